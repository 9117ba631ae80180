// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "liewalk/harness.hpp"

namespace liewalk {
namespace {

/// Collects failed sub-checks of one criterion.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  std::string summary() const {
    std::string s;
    for (std::size_t k = 0; k < failures_.size() && k < 5; ++k) s += (k ? "; " : "") + failures_[k];
    if (failures_.size() > 5) s += "; ... (" + std::to_string(failures_.size()) + " failures)";
    return s;
  }

 private:
  std::vector<std::string> failures_;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

WalkConfig haar_walk(std::size_t d) {
  WalkConfig w;
  w.d = d;
  return w;
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. Degree-1 transfer matrix equals ((d - 2) / d) I for Haar blocks.
std::string criterion1(Verdict& v) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::size_t d = 2; d <= 32; ++d) {
    const ComplexMatrix m = degree1_transfer(haar_walk(d));
    const double f = (static_cast<double>(d) - 2.0) / static_cast<double>(d);
    const ComplexMatrix want =
        f * ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    worst = std::max(worst, (m - want).cwiseAbs().maxCoeff());
  }
  const double secs = since(t0);
  v.check(worst <= 1e-12, "max entry deviation " + num(worst));
  v.check(secs < 1.0, "runtime " + num(secs) + " s");
  return "d = 2..32, max deviation " + num(worst);
}

// 2. Degree-2 spectrum: exact values, gap shape and Monte Carlo agreement.
std::string criterion2(Verdict& v) {
  const SpectralReport r2 = degree2_transfer(haar_walk(2));
  v.check(std::abs(r2.second_eigenvalue) <= 1e-10, "d = 2 second eigenvalue " + num(r2.second_eigenvalue));
  double prev = 1.0;
  double min_dgap = 1e9, max_dgap = 0.0;
  double secs12 = 0.0;
  for (std::size_t d = 3; d <= 12; ++d) {
    const auto t = Clock::now();
    const SpectralReport r = degree2_transfer(haar_walk(d));
    if (d == 12) secs12 = since(t);
    const double dd = static_cast<double>(d);
    v.check(r.gap > 0.0, "gap not positive at d = " + std::to_string(d));
    v.check(r.gap <= prev, "gap increases at d = " + std::to_string(d));
    v.check(dd * r.gap >= 0.1 && dd * r.gap <= 2.0, "d gap " + num(dd * r.gap) + " outside [0.1, 2]");
    v.check(std::abs(r.gap - (1.0 - std::cos(2.0 * kPi / dd)) / dd) < 1e-10, "gap off the closed form");
    min_dgap = std::min(min_dgap, dd * r.gap);
    max_dgap = std::max(max_dgap, dd * r.gap);
    prev = r.gap;
  }
  v.check(secs12 < 120.0, "d = 12 runtime " + num(secs12) + " s");
  std::size_t entries = 0, outside = 0;
  for (std::size_t d : {4, 8}) {
    Rng rng(2, d);
    const WalkConfig w = haar_walk(d);
    const MonteCarloMatrix mc = degree2_monte_carlo_matrix(w, 100000, rng);
    const Eigen::MatrixXd dev = (mc.mean - degree2_matrix(w)).cwiseAbs();
    for (Eigen::Index r = 0; r < dev.rows(); ++r) {
      for (Eigen::Index c = 0; c < dev.cols(); ++c) {
        ++entries;
        if (dev(r, c) > 5.0 * mc.standard_error(r, c) + 1e-12) ++outside;
      }
    }
  }
  v.check(outside == 0, std::to_string(outside) + " Monte Carlo entries beyond 5 SE");
  return "d gap in [" + num(min_dgap) + ", " + num(max_dgap) + "], " + std::to_string(entries) +
         " Monte Carlo entries checked";
}

// 3. Contraction estimates reproduce (d - 2) / d; deficits respect the polylog floor.
std::string criterion3(Verdict& v) {
  std::ostringstream note;
  for (std::size_t d : {3, 6, 10}) {
    Rng rng(3, d);
    const Estimate e = contraction_estimate(TestFunction::linear_coeff(d, 0, 1), haar_walk(d), 10000, 100, rng);
    const double want = (static_cast<double>(d) - 2.0) / static_cast<double>(d);
    const double z = std::abs(e.value - want) / e.standard_error;
    v.check(z <= 3.0, "d = " + std::to_string(d) + ": " + num(e.value) + " vs " + num(want) + " (" + num(z) + " SE)");
    note << "d=" << d << " z=" << num(z) << " ";
  }
  const std::size_t d = 4;
  std::vector<double> deficit;
  for (double lip : {10.0, 100.0, 10000.0}) {
    Rng rng(30, static_cast<std::uint64_t>(lip));
    const Estimate e = contraction_estimate(TestFunction::ridge_with_lip(d, lip), haar_walk(d), 10000, 100, rng);
    deficit.push_back(1.0 - e.value);
  }
  const double floor = deficit[0] * std::pow(std::log(11.0) / std::log(10001.0), 10.0);
  v.check(deficit[2] >= floor, "deficit at B = 1e4 " + num(deficit[2]) + " below floor " + num(floor));
  note << "deficits " << num(deficit[0]) << "/" << num(deficit[1]) << "/" << num(deficit[2]);
  return note.str();
}

// 4. Polynomial mixing: log-log sweep and the epsilon ratio test.
std::string criterion4(Verdict& v) {
  const auto t0 = Clock::now();
  std::vector<MixingReport> reps;
  for (std::size_t d = 3; d <= 12; ++d) {
    Rng rng(4, d);
    reps.push_back(mixing_time(haar_walk(d), 0.05, 2000, 100000, rng));
    v.check(reps.back().mixed, "d = " + std::to_string(d) + " did not mix");
  }
  const ScalingFit fit = scaling_fit(reps);
  v.check(fit.exponent_estimate > 0.5 && fit.exponent_estimate < 4.0, "slope " + num(fit.exponent_estimate));
  v.check(fit.r_squared > 0.9, "r^2 " + num(fit.r_squared));
  const std::vector<double> eps = {0.2, 0.05, 0.01};
  std::vector<double> steps;
  for (double e : eps) {
    Rng rng(40);
    const auto chains = static_cast<std::size_t>(std::max(2000.0, std::ceil(30.0 / (e * e))));
    const MixingReport r = mixing_time(haar_walk(6), e, chains, 100000, rng);
    v.check(r.mixed, "d = 6 did not mix at eps = " + num(e));
    steps.push_back(static_cast<double>(r.steps_to_target));
  }
  for (std::size_t k = 1; k < eps.size(); ++k) {
    const double allowed = std::pow(std::log(1.0 / eps[k]) / std::log(1.0 / eps[k - 1]), 3.0);
    v.check(steps[k] / steps[k - 1] <= allowed,
            "steps ratio " + num(steps[k] / steps[k - 1]) + " exceeds (log ratio)^3 = " + num(allowed));
  }
  const double secs = since(t0);
  v.check(secs < 1800.0, "runtime " + num(secs) + " s");
  return "slope " + num(fit.exponent_estimate) + ", r^2 " + num(fit.r_squared) + ", d=6 steps " + num(steps[0]) +
         "/" + num(steps[1]) + "/" + num(steps[2]);
}

// 5. Exact iterate decay against the closed form.
std::string criterion5(Verdict& v) {
  std::ostringstream note;
  for (std::size_t d : {4, 10}) {
    for (double rho : {std::exp(-1.0), 0.1, 0.01}) {
      Rng rng(5);
      const std::size_t got = iterate_decay(TestFunction::linear_coeff(d, 0, 0), haar_walk(d), rho, rng);
      const double dd = static_cast<double>(d);
      const double ratio = std::log(1.0 / rho) / std::log(dd / (dd - 2.0));
      // The first l with ((d-2)/d)^l strictly below rho.
      const auto want = static_cast<std::size_t>(std::floor(ratio) + 1.0);
      v.check(got == want, "d = " + std::to_string(d) + ", rho = " + num(rho) + ": " + std::to_string(got) +
                               " vs " + std::to_string(want));
      v.check(iterate_decay_closed_form(d, rho) == want, "closed form disagrees at d = " + std::to_string(d));
      note << got << " ";
    }
  }
  return "decay steps " + note.str();
}

// 6. Compilation pipeline: errors below tau, stage bounds, 1/r splitting.
std::string criterion6(Verdict& v) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::size_t d : {3, 4}) {
    RegistryOptions o;
    const GeneratorRegistry reg = GeneratorRegistry::build(d, LocalMeasure::haar(), o);
    Rng rng(6, d);
    for (int t = 0; t < 20; ++t) {
      const Unitary target = haar_sud(d, rng);
      const CompileResult r = compile(target, reg, 1e-3);
      const double e = distance(eval(r.word, reg), target);
      worst = std::max(worst, e);
      v.check(e < 1e-3, "d = " + std::to_string(d) + " target " + std::to_string(t) + " error " + num(e));
      for (const StageReport& s : r.stages) {
        v.check(s.measured <= s.bound, "stage " + s.name + " measured " + num(s.measured) + " > " + num(s.bound));
      }
    }
  }
  RegistryOptions o;
  const GeneratorRegistry reg4 = GeneratorRegistry::build(4, LocalMeasure::haar(), o);
  ComplexMatrix a = ComplexMatrix::Zero(4, 4);
  a(0, 0) = Complex(0.0, 0.5);
  a(1, 1) = Complex(0.0, -0.5);
  Rng rng(60);
  ComplexMatrix g(4, 4);
  for (Eigen::Index r = 0; r < 4; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) g(r, c) = Complex(rng.normal(), rng.normal());
  ComplexMatrix b = (g - g.adjoint()) / 2.0;
  b -= (b.trace() / 4.0) * ComplexMatrix::Identity(4, 4);
  b /= operator_norm(b);
  std::vector<double> affine, word;
  for (std::size_t r : {16, 64, 256}) {
    affine.push_back(exp_splitting_word(SkewHermitian::from_matrix(a), r, reg4).affine_error);
    const SplittingResult s = exp_splitting_word(SkewHermitian::from_matrix(b), r, reg4);
    v.check(s.measured <= s.bound, "splitting bound fails at r = " + std::to_string(r));
    word.push_back(s.measured);
  }
  std::ostringstream note;
  for (std::size_t k = 1; k < 3; ++k) {
    const double ra = affine[k - 1] / affine[k], rw = word[k - 1] / word[k];
    v.check(ra >= 2.5 && ra <= 5.5, "affine error ratio " + num(ra));
    v.check(rw >= 2.5 && rw <= 5.5, "word error ratio " + num(rw));
    note << num(ra) << "/" << num(rw) << " ";
  }
  const double secs = since(t0);
  v.check(secs < 600.0, "runtime " + num(secs) + " s");
  return "worst compile error " + num(worst) + ", splitting ratios (affine/word) " + note.str();
}

// 7. Solovay-Kitaev contraction and length growth at d = 2 with two atoms.
std::string criterion7(Verdict& v) {
  const GeneratorRegistry reg = GeneratorRegistry::build(2, LocalMeasure::two_axis(0.5));
  const NetApproximator net(reg);
  SkOptions o;
  Rng cal(71, 7);
  o.c_sk = 1.5 * calibrate_sk_constant(net, 20, 4, cal);
  const double eps0 = net.accuracy();
  const double l0 = static_cast<double>(net.max_length());
  const double closed4 = std::pow(o.c_sk, -2.0) * std::pow(o.c_sk * eps0, std::pow(1.5, 4));
  Rng rng(7);
  double smallest = 1.0;
  for (int t = 0; t < 10; ++t) {
    const Unitary target = haar_su2(rng);
    const SkResult r = sk_refine(target, net, 5, o);
    v.check(r.levels.size() > 4 && r.levels[4].error <= closed4, "depth-4 error above the closed form");
    for (const SkLevel& l : r.levels) {
      if (l.level > 0) {
        const double prev = r.levels[l.level - 1].level_error;
        if (prev > o.floor) {
          v.check(l.level_error <= o.c_sk * std::pow(prev, 1.5),
                  "level " + std::to_string(l.level) + " error " + num(l.level_error) + " > c eps^(3/2)");
        }
      }
      v.check(static_cast<double>(l.length) <= 2.0 * std::pow(5.0, static_cast<double>(l.level)) * l0,
              "level " + std::to_string(l.level) + " length " + std::to_string(l.length));
    }
    smallest = std::min(smallest, r.error);
    v.check(std::abs(distance(eval(r.word, reg), target) - r.error) < 1e-12, "tracked error differs from eval");
  }
  return "c_sk " + num(o.c_sk) + ", eps0 " + num(eps0) + ", L0 " + num(l0) + ", smallest depth-5 error " +
         num(smallest);
}

// 8. Random environments mix within a factor 3 of the fixed walk's median.
std::string criterion8(Verdict& v) {
  std::vector<double> fixed;
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rng(8, s);
    const MixingReport r = mixing_time(haar_walk(6), 0.05, 10000, 100000, rng);
    v.check(r.mixed, "fixed walk did not mix");
    fixed.push_back(static_cast<double>(r.steps_to_target));
  }
  std::sort(fixed.begin(), fixed.end());
  const double median = fixed[fixed.size() / 2];
  double lo = 1e9, hi = 0.0;
  for (std::uint64_t omega = 1; omega <= 20; ++omega) {
    WalkConfig w = haar_walk(6);
    w.variant = WalkVariant::random_environment;
    w.seed = omega;
    Rng rng(80, omega);
    const MixingReport r = mixing_time(w, 0.05, 10000, 100000, rng);
    const double t = static_cast<double>(r.steps_to_target);
    v.check(r.mixed && t <= 3.0 * median && t >= median / 3.0,
            "realization " + std::to_string(omega) + ": " + num(t) + " vs median " + num(median));
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return "fixed median " + num(median) + ", realizations in [" + num(lo) + ", " + num(hi) + "]";
}

// 9. Two-atom block law: convolution powers and the full walk.
std::string criterion9(Verdict& v) {
  const LocalMeasure eta = LocalMeasure::two_axis(0.5);
  Rng rng(9);
  const ConvolutionReport c = convolution_power_check(eta, 200, 20000, rng);
  v.check(c.abs_mean_trace < 0.05, "|E tr| at l = 200 is " + num(c.abs_mean_trace));
  WalkConfig w = haar_walk(4);
  w.eta = eta;
  Rng rng2(90);
  const MixingReport r = mixing_time(w, 0.1, 10000, 1000000, rng2);
  v.check(r.mixed, "d = 4 walk did not reach eps = 0.1");
  return "|E tr| " + num(c.abs_mean_trace) + ", d = 4 mixes in " + std::to_string(r.steps_to_target) + " steps";
}

// 10. The self-test catalog.
std::string criterion10(Verdict& v) {
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.command = "selftest";
  std::ostringstream out;
  const CommandOutcome r = cmd_selftest(cfg, out);
  const double secs = since(t0);
  std::istringstream lines(out.str());
  std::string line, summary;
  while (std::getline(lines, line)) {
    if (line.rfind("FAIL ", 0) == 0) v.check(false, line);
    if (line.rfind("selftest:", 0) == 0) summary = line;
  }
  v.check(r.exit_code == kExitOk, "exit code " + std::to_string(r.exit_code));
  v.check(secs < 900.0, "runtime " + num(secs) + " s");
  return summary;
}

}  // namespace
}  // namespace liewalk

int main() {
  using namespace liewalk;
  const std::vector<std::pair<std::string, std::function<std::string(Verdict&)>>> criteria = {
      {"degree-1 contraction exactness", criterion1}, {"degree-2 spectrum", criterion2},
      {"contraction estimate consistency", criterion3}, {"polynomial mixing", criterion4},
      {"exact iterate decay", criterion5},             {"compilation pipeline", criterion6},
      {"Solovay-Kitaev recursion", criterion7},        {"random environment", criterion8},
      {"two-atom block law", criterion9},              {"self-test suite", criterion10},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    std::string note;
    const auto t0 = Clock::now();
    try {
      note = criteria[k].second(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = since(t0);
    std::cout << (v.ok() ? "PASS" : "FAIL") << " criterion " << k + 1 << ": " << criteria[k].first << " ("
              << num(secs) << " s) " << note;
    if (!v.ok()) std::cout << " | " << v.summary();
    std::cout << std::endl;
    if (!v.ok()) ++failed;
  }
  std::cout << "acceptance: " << criteria.size() - static_cast<std::size_t>(failed) << " passed, " << failed
            << " failed" << std::endl;
  return failed == 0 ? 0 : 1;
}
