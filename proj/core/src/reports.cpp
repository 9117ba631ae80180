#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "liewalk/harness.hpp"

namespace liewalk {

using Json = nlohmann::ordered_json;

namespace {

Json config_object(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["d"] = c.d;
  j["eta"] = c.eta;
  j["eta_symmetric"] = c.eta_symmetric;
  j["variant"] = c.variant;
  j["epsilon"] = c.epsilon;
  j["tau"] = c.tau;
  j["d_list"] = c.d_list;
  j["n_chains"] = c.n_chains;
  j["max_steps"] = c.max_steps;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["method"] = c.method;
  j["mc_samples"] = c.mc_samples;
  j["target_file"] = c.target_file;
  j["eps1"] = c.eps1;
  j["closure_length"] = c.closure_length;
  j["synthetic_exponent"] = c.synthetic_exponent ? Json(*c.synthetic_exponent) : Json(nullptr);
  return j;
}

Json spectral_object(const SpectralReport& r) {
  Json j;
  j["d"] = r.d;
  j["degree"] = r.degree;
  j["top_eigenvalue"] = r.top_eigenvalue;
  j["second_eigenvalue"] = r.second_eigenvalue;
  j["gap"] = r.gap;
  j["d_gap"] = static_cast<double>(r.d) * r.gap;
  j["method"] = to_string(r.method);
  j["symmetric"] = r.symmetric;
  return j;
}

Json manifest_object(const GeneratorRegistry& reg) {
  const CoverageCertificate& cert = reg.certificate();
  std::size_t counts[4] = {0, 0, 0, 0};
  for (GeneratorId id = 0; id < reg.size(); ++id) ++counts[static_cast<int>(reg.provenance(id))];
  Json prov;
  for (Provenance p : {Provenance::atom, Provenance::sampled_net, Provenance::composite,
                       Provenance::signed_transposition}) {
    prov[to_string(p)] = counts[static_cast<int>(p)];
  }
  Json j;
  j["d"] = reg.dim();
  j["eps1"] = reg.eps1();
  j["eta"] = reg.eta().describe();
  j["generators"] = reg.size();
  j["pool_size"] = reg.pool_size();
  j["provenance"] = prov;
  j["net_size"] = reg.net().size();
  j["net_accuracy"] = reg.net().accuracy();
  j["net_max_word_length"] = reg.net().max_word_length();
  j["certificate"] = {{"eps1", cert.eps1},
                      {"diameter_bound", cert.diameter_bound},
                      {"bins", cert.bins},
                      {"cells", cert.cells},
                      {"covered", cert.covered},
                      {"complete", cert.complete()},
                      {"samples_drawn", cert.samples_drawn}};
  j["seed"] = reg.options().seed;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

std::string run_config_json(const RunConfig& cfg) { return config_object(cfg).dump(); }

std::string mixing_report_json(const MixingReport& r, const RunConfig& cfg) {
  Json j;
  j["d"] = r.d;
  j["epsilon_target"] = r.epsilon_target;
  j["mixed"] = r.mixed;
  j["steps_to_target"] = r.steps_to_target;
  j["steps_simulated"] = r.steps_simulated;
  j["n_chains"] = r.n_chains;
  j["max_steps"] = r.max_steps;
  j["variant"] = cfg.variant;
  j["eta"] = cfg.eta;
  j["seed"] = cfg.seed;
  j["criterion"] = r.criterion;
  Json traj = Json::array();
  for (const MomentPoint& p : r.trajectory) {
    traj.push_back({{"step", p.step},
                    {"abs_mean_trace", p.abs_mean_trace},
                    {"abs_second_moment_dev", p.abs_second_moment_dev}});
  }
  j["trajectory"] = std::move(traj);
  j["run_config"] = config_object(cfg);
  return dump(j);
}

std::string trajectory_csv(const MixingReport& r, const RunConfig& cfg) {
  std::ostringstream s;
  s << "# run_config: " << run_config_json(cfg) << "\n";
  s << "step,abs_mean_trace,abs_second_moment_dev\n";
  for (const MomentPoint& p : r.trajectory) {
    s << p.step << "," << csv_number(p.abs_mean_trace) << "," << csv_number(p.abs_second_moment_dev) << "\n";
  }
  return s.str();
}

std::string spectral_reports_json(const SpectralReport& degree1, const SpectralReport& degree2,
                                  const RunConfig& cfg) {
  Json j;
  j["d"] = degree1.d;
  j["gap"] = degree2.gap;
  j["seed"] = cfg.seed;
  j["degree1"] = spectral_object(degree1);
  j["degree2"] = spectral_object(degree2);
  j["run_config"] = config_object(cfg);
  return dump(j);
}

std::string compile_report_json(const CompileResult& r, const GeneratorRegistry& reg, const RunConfig& cfg) {
  Json j;
  j["d"] = reg.dim();
  j["tau"] = cfg.tau;
  j["measured_error"] = r.measured_error;
  j["length"] = r.word.length();
  j["eps0"] = r.eps0;
  j["sk_used"] = r.sk_used;
  Json stages = Json::array();
  for (const StageReport& s : r.stages) {
    stages.push_back({{"stage", s.name}, {"bound", s.bound}, {"measured", s.measured}, {"length", s.length}});
  }
  j["stage_breakdown"] = std::move(stages);
  j["seed"] = cfg.seed;
  j["registry"] = manifest_object(reg);
  j["run_config"] = config_object(cfg);
  return dump(j);
}

std::string registry_manifest_json(const GeneratorRegistry& reg) { return dump(manifest_object(reg)); }

std::string scaling_fit_json(const ScalingFit& fit, const std::vector<std::size_t>& excluded, const RunConfig& cfg) {
  Json j;
  j["exponent_estimate"] = fit.exponent_estimate;
  j["prefactor_estimate"] = fit.prefactor_estimate;
  j["r_squared"] = fit.r_squared;
  Json data = Json::array();
  for (const ScalingPoint& p : fit.data) data.push_back({{"d", p.d}, {"steps", p.steps}});
  j["data"] = std::move(data);
  j["excluded_not_mixed"] = excluded;
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.seed;
  j["run_config"] = config_object(cfg);
  return dump(j);
}

std::string scaling_csv(const ScalingFit& fit, const RunConfig& cfg) {
  std::ostringstream s;
  s << "# run_config: " << run_config_json(cfg) << "\n";
  s << "d,steps\n";
  for (const ScalingPoint& p : fit.data) s << csv_number(p.d) << "," << csv_number(p.steps) << "\n";
  return s.str();
}

std::string sidecar_json(const std::string& artifact, double seconds) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  Json j;
  j["artifact"] = artifact;
  j["written_at"] = ts.str();
  j["elapsed_seconds"] = seconds;
  return dump(j);
}

}  // namespace liewalk
