#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "liewalk/matcore.hpp"
#include "liewalk/rng.hpp"
#include "liewalk/word.hpp"

namespace liewalk {

/// A word together with its tracked value.
struct Approximation {
  Word word;
  ComplexMatrix value;
};

/// Produces the depth-0 approximation of a target.
class BaseApproximator {
 public:
  virtual ~BaseApproximator() = default;
  virtual std::size_t dim() const = 0;
  virtual Approximation approximate(const ComplexMatrix& target) const = 0;
  /// Declared accuracy of approximate().
  virtual double accuracy() const = 0;
  /// Length bound of a base word.
  virtual std::size_t max_length() const = 0;
};

struct SkOptions {
  /// Contraction constant in eps_{n+1} <= c_sk eps_n^{3/2}.
  double c_sk = 10.0;
  /// Errors at or below this are treated as floating-point level: bounds are floored here
  /// and no contraction is demanded.
  double floor = 1e-10;
};

struct SkLevel {
  std::size_t level = 0;
  /// Error of the top-level approximation at this depth.
  double error = 0.0;
  /// Largest error over every call at this depth in the recursion tree.
  double level_error = 0.0;
  /// c_sk * level_error(level - 1)^{3/2}; the base accuracy at level 0.
  double bound = 0.0;
  /// Recursion bound b_n with b_0 = base accuracy, b_{n+1} = c_sk b_n^{3/2}.
  double predicted = 0.0;
  std::size_t length = 0;
};

struct SkResult {
  Word word;
  ComplexMatrix value;
  double error = 0.0;
  std::vector<SkLevel> levels;
};

/// Solovay-Kitaev refinement to a fixed depth. Throws NumericalError when a level fails to
/// contract above the floating-point floor.
SkResult sk_refine(const Unitary& target, const BaseApproximator& base, std::size_t depth,
                   const SkOptions& opt = {});
/// Deepens until the measured error is at most tau, up to max_depth.
SkResult sk_refine_to(const Unitary& target, const BaseApproximator& base, double tau, std::size_t max_depth,
                      const SkOptions& opt = {});

/// Largest observed eps_{n+1} / eps_n^{3/2} over `targets` Haar targets refined to `depth`,
/// counting only levels whose error is above `floor`. A registry-level estimate of c_sk.
double calibrate_sk_constant(const BaseApproximator& base, std::size_t targets, std::size_t depth, Rng& rng,
                             double floor = 1e-10);

}  // namespace liewalk
