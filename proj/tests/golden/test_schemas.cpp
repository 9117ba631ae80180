// Frozen output schemas. Each artifact's key paths are compared, in order, against
// tests/golden/data. Set LIEWALK_UPDATE_GOLDEN=1 to rewrite the files after a deliberate change.
#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "liewalk/harness.hpp"

namespace liewalk {
namespace {

using OrderedJson = nlohmann::ordered_json;

void flatten(const OrderedJson& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array() && !j.empty() && j.front().is_object()) {
    flatten(j.front(), prefix + "[]", out);
  } else {
    out.push_back(prefix);
  }
}

std::vector<std::string> json_paths(const std::string& text) {
  std::vector<std::string> out;
  flatten(OrderedJson::parse(text), "", out);
  return out;
}

/// First line that is neither blank nor a comment.
std::vector<std::string> csv_header(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string col;
    while (std::getline(ls, col, ',')) cols.push_back(col);
    return cols;
  }
  return {};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void check_golden(const std::string& name, const std::vector<std::string>& keys) {
  const std::string path = std::string(LIEWALK_GOLDEN_DIR) + "/" + name;
  const char* update = std::getenv("LIEWALK_UPDATE_GOLDEN");
  if (update != nullptr && std::string(update) == "1") {
    std::ofstream out(path);
    for (const std::string& k : keys) out << k << "\n";
  }
  std::vector<std::string> want;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) want.push_back(line);
  }
  ASSERT_FALSE(want.empty()) << "missing golden file " << path;
  EXPECT_EQ(keys, want) << name;

  const std::string doc = read_file(LIEWALK_SCHEMAS_DOC);
  for (const std::string& k : keys) {
    const std::size_t dot = k.find_last_of('.');
    std::string leaf = dot == std::string::npos ? k : k.substr(dot + 1);
    if (leaf.size() > 2 && leaf.compare(leaf.size() - 2, 2, "[]") == 0) leaf.resize(leaf.size() - 2);
    EXPECT_NE(doc.find("`" + leaf + "`"), std::string::npos) << "schema doc lacks `" << leaf << "` (" << name << ")";
  }
}

RunConfig sample_config(const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  cfg.d = 3;
  cfg.n_chains = 100;
  return cfg;
}

MixingReport sample_mixing() {
  MixingReport r;
  r.d = 3;
  r.epsilon_target = 0.05;
  r.mixed = true;
  r.steps_to_target = 10;
  r.steps_simulated = 30;
  r.n_chains = 100;
  r.max_steps = 1000;
  r.trajectory = {{0, 3.0, 8.0}, {1, 1.0, 2.0}};
  r.criterion = kMixingCriterion;
  return r;
}

const GeneratorRegistry& small_registry() {
  static const GeneratorRegistry reg = [] {
    RegistryOptions o;
    o.eps1 = 0.2;
    return GeneratorRegistry::build(2, LocalMeasure::haar(), o);
  }();
  return reg;
}

TEST(Schemas, MixingReport) {
  check_golden("mixing_report.keys", json_paths(mixing_report_json(sample_mixing(), sample_config("walk"))));
}

TEST(Schemas, TrajectoryCsv) {
  check_golden("trajectory_csv.keys", csv_header(trajectory_csv(sample_mixing(), sample_config("walk"))));
}

TEST(Schemas, SpectralReport) {
  const RunConfig cfg = sample_config("spectra");
  const WalkConfig w = make_walk_config(cfg);
  check_golden("spectra.keys", json_paths(spectral_reports_json(degree1_report(w), degree2_transfer(w), cfg)));
}

TEST(Schemas, CompileReport) {
  Rng rng(1);
  RunConfig cfg = sample_config("compile");
  cfg.d = 2;
  cfg.tau = 1e-2;
  const CompileResult r = compile(haar_su2(rng), small_registry(), cfg.tau);
  ASSERT_FALSE(r.stages.empty());
  check_golden("compile.keys", json_paths(compile_report_json(r, small_registry(), cfg)));
}

TEST(Schemas, RegistryManifest) {
  check_golden("manifest.keys", json_paths(registry_manifest_json(small_registry())));
}

TEST(Schemas, ScalingFit) {
  const ScalingFit fit = scaling_fit(std::vector<ScalingPoint>{{3, 9}, {4, 16}, {5, 25}, {6, 36}});
  const RunConfig cfg = sample_config("sweep");
  check_golden("sweep.keys", json_paths(scaling_fit_json(fit, {30}, cfg)));
  check_golden("sweep_csv.keys", csv_header(scaling_csv(fit, cfg)));
}

TEST(Schemas, Sidecar) { check_golden("sidecar.keys", json_paths(sidecar_json("walk_d3.json", 1.5))); }

TEST(Schemas, CsvCarriesTheRunConfig) {
  const RunConfig cfg = sample_config("walk");
  const std::string csv = trajectory_csv(sample_mixing(), cfg);
  EXPECT_EQ(csv.rfind("# run_config: " + run_config_json(cfg) + "\n", 0), 0u);
}

}  // namespace
}  // namespace liewalk
