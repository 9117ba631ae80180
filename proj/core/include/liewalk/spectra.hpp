#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liewalk/matcore.hpp"
#include "liewalk/rng.hpp"
#include "liewalk/walk.hpp"

namespace liewalk {

/// Largest d accepted by the dense degree-2 eigenproblem.
inline constexpr std::size_t kMaxExactDegree2Dim = 64;

enum class SpectralMethod { exact, monte_carlo };
const char* to_string(SpectralMethod m);

struct SpectralReport {
  std::size_t d = 0;
  int degree = 1;
  double top_eigenvalue = 1.0;
  double second_eigenvalue = 0.0;
  double gap = 1.0;
  SpectralMethod method = SpectralMethod::exact;
  /// Whether the step law is symmetric (nu equals its inversion).
  bool symmetric = true;
};

/// M = E_nu[g]. For the random-environment variant the symmetrized step law is used.
ComplexMatrix degree1_transfer(const WalkConfig& cfg);
/// Degree-1 report. The constants are the top (eigenvalue 1); the second value is the
/// largest singular value of M, the contraction factor on linear coefficients.
SpectralReport degree1_report(const WalkConfig& cfg);

/// M2 = E_nu[conj(g) (x) g], rows and columns indexed a*d + c. Requires d <= 64.
ComplexMatrix degree2_matrix(const WalkConfig& cfg);
/// Top and second-largest eigenvalue modulus of M2.
SpectralReport degree2_transfer(const WalkConfig& cfg);

struct MonteCarloMatrix {
  ComplexMatrix mean;
  /// Entrywise standard error of `mean`.
  Eigen::MatrixXd standard_error;
  std::size_t samples = 0;
};
/// Empirical average of conj(g) (x) g over sampled steps.
MonteCarloMatrix degree2_monte_carlo_matrix(const WalkConfig& cfg, std::size_t samples, Rng& rng);
/// Second eigenvalue modulus estimated by power iteration of the sampled degree-2 operator
/// X -> mean_s conj(g_s) X g_s^T on the complement of the identity. Works for any d.
SpectralReport degree2_monte_carlo(const WalkConfig& cfg, std::size_t samples, std::size_t iterations,
                                   Rng& rng);

/// Real test function f on SU(d). Evaluation returns the normalized (f - mean) / l2_norm.
class TestFunction {
 public:
  enum class Kind { linear_coeff, quadratic_coeff, trace_power, ridge, custom };
  using Raw = std::function<double(const ComplexMatrix&)>;

  /// Re(x_kl). Exact moments: mean 0, l2 = 1 / sqrt(2d).
  static TestFunction linear_coeff(std::size_t d, std::size_t k, std::size_t l);
  /// Re(conj(x_kl) x_mn). Moments calibrated by Monte Carlo.
  static TestFunction quadratic_coeff(std::size_t d, std::size_t k, std::size_t l, std::size_t m, std::size_t n,
                                      std::size_t calibration_samples, Rng& rng);
  /// Re tr(x^p). Exact moments for p = 1, Monte Carlo otherwise.
  static TestFunction trace_power(std::size_t d, unsigned p, std::size_t calibration_samples, Rng& rng);
  /// sin(beta Re x_00). Mean 0; l2 norm by quadrature against the law of Re x_00; Lipschitz constant beta.
  static TestFunction ridge(std::size_t d, double beta);
  /// The ridge function whose normalized Lipschitz norm equals `lip`.
  static TestFunction ridge_with_lip(std::size_t d, double lip);
  /// Arbitrary function with a known Lipschitz bound; moments calibrated by Monte Carlo.
  static TestFunction custom(std::string name, std::size_t d, Raw raw, double raw_lip,
                             std::size_t calibration_samples, Rng& rng);
  /// Identically zero; normalizing it fails.
  static TestFunction zero(std::size_t d);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::size_t dim() const { return d_; }
  double raw(const ComplexMatrix& x) const { return raw_(x); }
  double operator()(const ComplexMatrix& x) const { return (raw_(x) - mean_) / l2_; }
  double mean() const { return mean_; }
  double l2_norm() const { return l2_; }
  /// Lipschitz constant of the normalized function with respect to the operator norm.
  double lip_norm() const { return raw_lip_ / l2_; }
  /// (k, l) for linear coefficients.
  std::optional<std::pair<std::size_t, std::size_t>> linear_index() const { return linear_; }

 private:
  Kind kind_ = Kind::custom;
  std::string name_;
  std::size_t d_ = 0;
  Raw raw_;
  double mean_ = 0.0;
  double l2_ = 1.0;
  double raw_lip_ = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> linear_;
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of ||T f||_2 for the normalized f: outer x ~ Haar, inner steps g ~ nu.
/// (Tf(x))^2 is estimated without bias by the U-statistic over inner pairs.
Estimate contraction_estimate(const TestFunction& f, const WalkConfig& cfg, std::size_t n_outer,
                              std::size_t n_inner, Rng& rng);

struct DecayOptions {
  std::size_t max_steps = 100000;
  std::size_t n_outer = 2000;
  std::size_t n_inner = 64;
};
/// First l with ||T^l f||_2 < rho. Exact for linear coefficients (row norms of M^l),
/// Monte Carlo otherwise. Requires 0 < rho < 1/2.
std::size_t iterate_decay(const TestFunction& f, const WalkConfig& cfg, double rho, Rng& rng,
                          const DecayOptions& opt = {});
/// ceil(log(1/rho) / log(d / (d - 2))): the Haar closed form for linear coefficients.
std::size_t iterate_decay_closed_form(std::size_t d, double rho);

struct MomentPoint {
  std::size_t step = 0;
  double abs_mean_trace = 0.0;
  double abs_second_moment_dev = 0.0;
};

struct MixingOptions {
  std::size_t threads = 1;
  /// Chains per deterministic work unit; results do not depend on the thread count.
  std::size_t chunk = 256;
};

struct MixingReport {
  std::size_t d = 0;
  double epsilon_target = 0.0;
  bool mixed = false;
  /// First step t with both deviations below epsilon and no significant exceedance
  /// (more than 3 standard errors above epsilon) through step 3t; 0 when not mixed.
  std::size_t steps_to_target = 0;
  std::size_t steps_simulated = 0;
  std::size_t n_chains = 0;
  std::size_t max_steps = 0;
  std::vector<MomentPoint> trajectory;
  std::uint64_t seed = 0;
  std::string criterion;
};

/// Name of the mixing criterion recorded in every report.
extern const char* const kMixingCriterion;

/// Runs n_chains chains from the identity and returns the first confirmed crossing of
/// |E tr U_t| and |E|tr U_t|^2 - 1| below epsilon. Chunk k of chains uses stream k of a seed drawn from `rng`.
MixingReport mixing_time(const WalkConfig& cfg, double epsilon, std::size_t n_chains, std::size_t max_steps,
                         Rng& rng, const MixingOptions& opt = {});

struct ScalingPoint {
  double d = 0.0;
  double steps = 0.0;
};

struct ScalingFit {
  double exponent_estimate = 0.0;
  double prefactor_estimate = 0.0;
  double r_squared = 0.0;
  std::vector<ScalingPoint> data;
};

/// Least squares of log(steps) against log(d). Needs at least 4 distinct d and positive steps.
ScalingFit scaling_fit(const std::vector<ScalingPoint>& data);
/// Fit over the mixed reports; unmixed ones are skipped.
ScalingFit scaling_fit(const std::vector<MixingReport>& reports);

}  // namespace liewalk
