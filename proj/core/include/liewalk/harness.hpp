#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liewalk/errors.hpp"
#include "liewalk/registry.hpp"
#include "liewalk/spectra.hpp"
#include "liewalk/synthesis.hpp"
#include "liewalk/walk.hpp"

namespace liewalk {

/// Invalid command-line or configuration input; the message names the field.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitNotMixed = 3 };

struct RunConfig {
  std::string command;
  std::size_t d = 0;
  /// "haar", "two_axis:<angle>" or "file:<path>" (atom file).
  std::string eta = "haar";
  bool eta_symmetric = false;
  std::string variant = "fixed_nu";
  double epsilon = 0.05;
  double tau = 1e-3;
  std::vector<std::size_t> d_list;
  std::size_t n_chains = 10000;
  std::size_t max_steps = 100000;
  std::string output_dir = ".";
  std::uint64_t seed = 1;
  /// Worker threads; execution only, not part of the recorded configuration.
  std::size_t threads = 1;

  /// spectra: "exact" or "monte_carlo".
  std::string method = "exact";
  std::size_t mc_samples = 100000;

  /// compile
  std::string target_file;
  double eps1 = 0.1;
  std::size_t closure_length = 12;

  /// sweep: when set, steps are replayed as d^exponent instead of running chains.
  std::optional<double> synthetic_exponent;

  /// selftest
  std::string filter;
  bool inject_embed_fault = false;
};

/// The configuration as embedded in every output artifact (canonical JSON text).
std::string run_config_json(const RunConfig& cfg);

/// Builds the walk configuration, validating the walk fields (UsageError names the field).
WalkConfig make_walk_config(const RunConfig& cfg);
/// Parses the eta field.
LocalMeasure make_eta(const std::string& text, bool symmetric);

/// Target matrix text: d lines of 2d reals (re, im pairs). Parse errors name the line.
ComplexMatrix parse_target(std::istream& in);
ComplexMatrix read_target_file(const std::string& path);

/// Report serialization. Field names and column order are frozen (see docs/schemas.md).
std::string mixing_report_json(const MixingReport& r, const RunConfig& cfg);
std::string trajectory_csv(const MixingReport& r, const RunConfig& cfg);
std::string spectral_reports_json(const SpectralReport& degree1, const SpectralReport& degree2,
                                  const RunConfig& cfg);
std::string compile_report_json(const CompileResult& r, const GeneratorRegistry& reg, const RunConfig& cfg);
std::string registry_manifest_json(const GeneratorRegistry& reg);
std::string scaling_fit_json(const ScalingFit& fit, const std::vector<std::size_t>& excluded, const RunConfig& cfg);
std::string scaling_csv(const ScalingFit& fit, const RunConfig& cfg);
/// Sidecar metadata (wall-clock timestamps, host facts) kept out of the payloads.
std::string sidecar_json(const std::string& artifact, double seconds);

struct CommandOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> files;
  std::string summary;
};

CommandOutcome cmd_walk(const RunConfig& cfg);
CommandOutcome cmd_spectra(const RunConfig& cfg);
CommandOutcome cmd_compile(const RunConfig& cfg);
CommandOutcome cmd_sweep(const RunConfig& cfg);
/// Runs the example catalog, printing one line per check to `out`.
CommandOutcome cmd_selftest(const RunConfig& cfg, std::ostream& out);

/// Dispatches on cfg.command and maps exceptions to exit codes, reporting them on `err`.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct SelfTestCase {
  std::string module;
  std::string name;
  /// "TRIVIAL" or "DERIVED".
  std::string tag;
};
/// The example catalog, in execution order.
std::vector<SelfTestCase> selftest_catalog();

}  // namespace liewalk
