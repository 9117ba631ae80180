#include "liewalk/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "liewalk/rng.hpp"

namespace liewalk {

namespace {

namespace fs = std::filesystem;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string write_artifact(const RunConfig& cfg, const std::string& name, const std::string& content,
                           double seconds) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  const fs::path path = dir / name;
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("output_dir: cannot write " + path.string());
    out << content;
  }
  std::ofstream meta(path.string() + ".meta.json", std::ios::binary);
  meta << sidecar_json(name, seconds);
  return path.string();
}

void require_d(const RunConfig& cfg) {
  if (cfg.d == 0) throw UsageError("d: required");
  if (cfg.d < 2) throw UsageError("d: must be at least 2");
}

double parse_real(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("'" + tok + "' is not a number", line);
  }
  if (used != tok.size() || !std::isfinite(v)) throw ParseError("'" + tok + "' is not a finite number", line);
  return v;
}

}  // namespace

LocalMeasure make_eta(const std::string& text, bool symmetric) {
  if (text == "haar") return LocalMeasure::haar();
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "two_axis" && !arg.empty()) {
    double angle = 0.0;
    try {
      angle = std::stod(arg);
    } catch (const std::exception&) {
      throw UsageError("eta: bad angle '" + arg + "'");
    }
    return LocalMeasure::two_axis(angle, symmetric);
  }
  if (kind == "file" && !arg.empty()) return read_measure_file(arg, symmetric).measure;
  throw UsageError("eta: expected haar, two_axis:<angle> or file:<path>, got '" + text + "'");
}

WalkConfig make_walk_config(const RunConfig& cfg) {
  require_d(cfg);
  WalkConfig w;
  w.d = cfg.d;
  w.eta = make_eta(cfg.eta, cfg.eta_symmetric);
  try {
    w.variant = parse_variant(cfg.variant);
  } catch (const PreconditionError&) {
    throw UsageError("variant: expected fixed_nu or random_environment, got '" + cfg.variant + "'");
  }
  w.seed = cfg.seed;
  return w;
}

ComplexMatrix parse_target(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_of;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    std::istringstream ls(text);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_real(tok, line));
    rows.push_back(std::move(row));
    line_of.push_back(line);
  }
  if (rows.empty()) throw ParseError("empty target", line == 0 ? 1 : line);
  const std::size_t d = rows.size();
  ComplexMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    if (rows[r].size() != 2 * d) {
      throw ParseError("expected " + std::to_string(2 * d) + " reals (re im pairs), found " +
                           std::to_string(rows[r].size()),
                       line_of[r]);
    }
    for (std::size_t c = 0; c < d; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(rows[r][2 * c], rows[r][2 * c + 1]);
    }
  }
  return m;
}

ComplexMatrix read_target_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("target: cannot open '" + path + "'");
  return parse_target(in);
}

namespace {

CommandOutcome walk_impl(const RunConfig& cfg, MixingReport& rep) {
  const Timer timer;
  const WalkConfig w = make_walk_config(cfg);
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw UsageError("epsilon: must lie in (0, 1)");
  if (cfg.n_chains < 2) throw UsageError("chains: need at least 2");
  if (cfg.max_steps == 0) throw UsageError("max_steps: must be positive");
  Rng rng(cfg.seed, 0);
  MixingOptions mo;
  mo.threads = cfg.threads;
  rep = mixing_time(w, cfg.epsilon, cfg.n_chains, cfg.max_steps, rng, mo);
  CommandOutcome out;
  const std::string stem = "walk_d" + std::to_string(cfg.d);
  out.files.push_back(write_artifact(cfg, stem + ".json", mixing_report_json(rep, cfg), timer.seconds()));
  out.files.push_back(write_artifact(cfg, stem + ".csv", trajectory_csv(rep, cfg), timer.seconds()));
  if (rep.mixed) {
    out.summary = "d=" + std::to_string(cfg.d) + " steps_to_target=" + std::to_string(rep.steps_to_target);
  } else {
    out.summary = "d=" + std::to_string(cfg.d) + " not mixed within " + std::to_string(cfg.max_steps) + " steps";
    out.exit_code = kExitNotMixed;
  }
  return out;
}

}  // namespace

CommandOutcome cmd_walk(const RunConfig& cfg) {
  MixingReport rep;
  return walk_impl(cfg, rep);
}

CommandOutcome cmd_spectra(const RunConfig& cfg) {
  const Timer timer;
  const WalkConfig w = make_walk_config(cfg);
  const SpectralReport r1 = degree1_report(w);
  SpectralReport r2;
  if (cfg.method == "exact") {
    if (cfg.d > kMaxExactDegree2Dim) {
      throw UsageError("d: exact degree-2 spectra need d <= " + std::to_string(kMaxExactDegree2Dim) +
                       "; use --method monte_carlo");
    }
    r2 = degree2_transfer(w);
  } else if (cfg.method == "monte_carlo") {
    Rng rng(cfg.seed, 1);
    r2 = degree2_monte_carlo(w, cfg.mc_samples, 200, rng);
  } else {
    throw UsageError("method: expected exact or monte_carlo, got '" + cfg.method + "'");
  }
  CommandOutcome out;
  out.files.push_back(write_artifact(cfg, "spectra_d" + std::to_string(cfg.d) + ".json",
                                     spectral_reports_json(r1, r2, cfg), timer.seconds()));
  std::ostringstream s;
  s << "d=" << cfg.d << " degree1_factor=" << r1.second_eigenvalue << " degree2_second=" << r2.second_eigenvalue
    << " gap=" << r2.gap;
  out.summary = s.str();
  return out;
}

CommandOutcome cmd_compile(const RunConfig& cfg) {
  const Timer timer;
  if (cfg.target_file.empty()) throw UsageError("target: required");
  if (!(cfg.tau > 0.0)) throw UsageError("tau: must be positive");
  const ComplexMatrix m = read_target_file(cfg.target_file);
  Unitary target;
  try {
    target = Unitary::from_matrix(m, true, 1e-8);
  } catch (const PreconditionError& e) {
    throw UsageError(std::string("target: ") + e.what());
  }
  RunConfig eff = cfg;
  eff.d = target.dim();
  RegistryOptions ro;
  ro.eps1 = cfg.eps1;
  ro.seed = cfg.seed;
  ro.closure_length = cfg.closure_length;
  const GeneratorRegistry reg = GeneratorRegistry::build(eff.d, make_eta(cfg.eta, cfg.eta_symmetric), ro);
  const CompileResult res = compile(target, reg, cfg.tau);
  const std::string stem = "compile_d" + std::to_string(eff.d);
  std::ostringstream word;
  write_word(word, res.word);
  CommandOutcome out;
  out.files.push_back(write_artifact(eff, stem + ".word", word.str(), timer.seconds()));
  out.files.push_back(write_artifact(eff, stem + ".json", compile_report_json(res, reg, eff), timer.seconds()));
  out.files.push_back(write_artifact(eff, "registry_d" + std::to_string(eff.d) + ".json",
                                     registry_manifest_json(reg), timer.seconds()));
  std::ostringstream s;
  s << "d=" << eff.d << " measured_error=" << res.measured_error << " length=" << res.word.length();
  out.summary = s.str();
  return out;
}

CommandOutcome cmd_sweep(const RunConfig& cfg) {
  const Timer timer;
  std::vector<std::size_t> ds = cfg.d_list;
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  if (ds.size() < 4) throw UsageError("d_list: need at least 4 distinct values");
  CommandOutcome out;
  std::vector<ScalingPoint> points;
  std::vector<std::size_t> excluded;
  for (std::size_t d : ds) {
    if (d < 2) throw UsageError("d_list: entries must be at least 2");
    if (cfg.synthetic_exponent) {
      points.push_back({static_cast<double>(d), std::pow(static_cast<double>(d), *cfg.synthetic_exponent)});
      continue;
    }
    RunConfig sub = cfg;
    sub.command = "walk";
    sub.d = d;
    MixingReport rep;
    const CommandOutcome walk = walk_impl(sub, rep);
    out.files.insert(out.files.end(), walk.files.begin(), walk.files.end());
    if (walk.exit_code == kExitNotMixed) {
      excluded.push_back(d);
      continue;
    }
    points.push_back({static_cast<double>(d), static_cast<double>(rep.steps_to_target)});
  }
  if (points.size() < 4) {
    throw NumericalError("sweep: only " + std::to_string(points.size()) + " values of d mixed; a fit needs 4");
  }
  const ScalingFit fit = scaling_fit(points);
  out.files.push_back(write_artifact(cfg, "sweep.json", scaling_fit_json(fit, excluded, cfg), timer.seconds()));
  out.files.push_back(write_artifact(cfg, "sweep.csv", scaling_csv(fit, cfg), timer.seconds()));
  std::ostringstream s;
  s << "exponent=" << fit.exponent_estimate << " r_squared=" << fit.r_squared;
  if (!excluded.empty()) s << " excluded=" << excluded.size();
  out.summary = s.str();
  return out;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    CommandOutcome res;
    if (cfg.command == "walk") {
      res = cmd_walk(cfg);
    } else if (cfg.command == "spectra") {
      res = cmd_spectra(cfg);
    } else if (cfg.command == "compile") {
      res = cmd_compile(cfg);
    } else if (cfg.command == "sweep") {
      res = cmd_sweep(cfg);
    } else if (cfg.command == "selftest") {
      res = cmd_selftest(cfg, out);
    } else {
      throw UsageError("command: unknown '" + cfg.command + "'");
    }
    if (!res.summary.empty()) out << res.summary << "\n";
    for (const std::string& f : res.files) out << "wrote " << f << "\n";
    return res.exit_code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace liewalk
