#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "liewalk/harness.hpp"

namespace {

using liewalk::RunConfig;

/// "3,4,5" or "3..12" (inclusive), or a mix such as "3..6,8,10".
std::vector<std::size_t> parse_d_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoul(item));
      } else {
        const std::size_t lo = std::stoul(item.substr(0, dots)), hi = std::stoul(item.substr(dots + 2));
        for (std::size_t d = lo; d <= hi; ++d) out.push_back(d);
      }
    } catch (const std::exception&) {
      throw liewalk::UsageError("d_list: cannot parse '" + item + "'");
    }
    pos = comma + 1;
  }
  return out;
}

struct Flags {
  std::string d_list;
  double synthetic_exponent = 0.0;
  CLI::Option* synthetic = nullptr;
  std::string config_file;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// Applies `key = value` lines to options of `sub` that were not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw liewalk::UsageError("config: cannot open '" + path + "'");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw liewalk::ParseError("config: expected key = value", n);
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw liewalk::ParseError("config: unknown key '" + key + "'", n);
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_file) {
  sub->add_option("--config", config_file, "Flat key = value file; command-line flags take precedence");
  sub->add_option("--output-dir,--output_dir", cfg.output_dir, "Directory for reports")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed recorded in every artifact")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Worker threads")->envname("LIEWALK_THREADS")->capture_default_str();
}

void add_walk_fields(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--eta", cfg.eta, "haar, two_axis:<angle> or file:<path>")->capture_default_str();
  sub->add_flag("--eta-symmetric,--eta_symmetric", cfg.eta_symmetric, "Declare (and check) eta symmetric");
  sub->add_option("--variant", cfg.variant, "fixed_nu or random_environment")->capture_default_str();
}

void add_chain_fields(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--epsilon", cfg.epsilon, "Moment deviation target")->capture_default_str();
  sub->add_option("--chains,--n_chains", cfg.n_chains, "Independent chains")->capture_default_str();
  sub->add_option("--max-steps,--max_steps", cfg.max_steps, "Step budget")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  Flags flags;
  CLI::App app{"Local-rotation random walks on SU(d): mixing, spectra and word compilation"};
  app.require_subcommand(1, 1);

  CLI::App* walk = app.add_subcommand("walk", "Mixing time of the walk; writes JSON and CSV");
  add_common(walk, cfg, flags.config_file);
  add_walk_fields(walk, cfg);
  add_chain_fields(walk, cfg);
  walk->add_option("--d", cfg.d, "Dimension (required)");

  CLI::App* spectra = app.add_subcommand("spectra", "Degree-1 and degree-2 transfer spectra");
  add_common(spectra, cfg, flags.config_file);
  add_walk_fields(spectra, cfg);
  spectra->add_option("--d", cfg.d, "Dimension (required)");
  spectra->add_option("--method", cfg.method, "exact or monte_carlo")->capture_default_str();
  spectra->add_option("--mc-samples,--mc_samples", cfg.mc_samples, "Monte Carlo steps")->capture_default_str();

  CLI::App* compile = app.add_subcommand("compile", "Compile a target matrix into a word");
  add_common(compile, cfg, flags.config_file);
  compile->add_option("--eta", cfg.eta, "haar, two_axis:<angle> or file:<path>")->capture_default_str();
  compile->add_option("--target,--target_file", cfg.target_file, "Target: d lines of 2d reals (required)");
  compile->add_option("--tau", cfg.tau, "Target accuracy (operator norm)")->capture_default_str();
  compile->add_option("--eps1", cfg.eps1, "Net cell size")->capture_default_str();
  compile->add_option("--closure-length,--closure_length", cfg.closure_length, "Atom closure word length")
      ->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "Mixing times over d and a log-log fit");
  add_common(sweep, cfg, flags.config_file);
  add_walk_fields(sweep, cfg);
  add_chain_fields(sweep, cfg);
  sweep->add_option("--d-list,--d_list", flags.d_list, "e.g. 3..12 or 3,4,6,8 (required)");
  flags.synthetic = sweep->add_option("--synthetic-exponent,--synthetic_exponent", flags.synthetic_exponent,
                                      "Replay steps = d^exponent instead of running chains");

  CLI::App* selftest = app.add_subcommand("selftest", "Run the example catalog");
  add_common(selftest, cfg, flags.config_file);
  selftest->add_option("--filter", cfg.filter, "Module name or module/check prefix");
  selftest->add_flag("--inject-embed-fault", cfg.inject_embed_fault, "Flip a sign in embed (mutation check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? liewalk::kExitOk : liewalk::kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    if (!flags.config_file.empty()) apply_config(sub, flags.config_file);
    if (!flags.d_list.empty()) cfg.d_list = parse_d_list(flags.d_list);
  } catch (const liewalk::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return liewalk::kExitUsage;
  } catch (const liewalk::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return liewalk::kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: config: " << e.what() << "\n";
    return liewalk::kExitUsage;
  }
  if (flags.synthetic->count() > 0) cfg.synthetic_exponent = flags.synthetic_exponent;
  return liewalk::run_command(cfg, std::cout, std::cerr);
}
