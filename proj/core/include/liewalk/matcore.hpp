#pragma once

#include <complex>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

#include "liewalk/rng.hpp"

namespace liewalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
/// 2x2 block of an embedded rotation.
using Block = Eigen::Matrix2cd;

inline constexpr double kMachineEpsilon = std::numeric_limits<double>::epsilon();
inline constexpr double kPi = 3.14159265358979323846;

/// Throws PreconditionError if `m` is not square or has a NaN/Inf entry.
void require_square_finite(const ComplexMatrix& m, const char* what);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);
/// Hilbert-Schmidt norm.
double frobenius_norm(const ComplexMatrix& m);
/// ||m^dagger m - I||_op.
double unitarity_defect(const ComplexMatrix& m);

/// A d x d unitary together with an upper bound on ||U^dagger U - I||_op.
class Unitary {
 public:
  Unitary() = default;

  static Unitary identity(std::size_t d);
  /// Measures the defect and rejects it above `tol`. With `special`, also requires |det - 1| <= 1e-8.
  static Unitary from_matrix(ComplexMatrix m, bool special = true, double tol = 1e-9);
  /// Wraps `m` without measuring; the caller supplies the defect bound.
  static Unitary trusted(ComplexMatrix m, double defect, bool special, std::size_t multiplications = 0);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  double defect() const { return defect_; }
  bool special() const { return special_; }
  /// Number of products accumulated since the last exact construction or repair.
  std::size_t multiplications() const { return multiplications_; }

  Unitary adjoint() const;

  /// Applies an in-place update `f(matrix)` that adds at most `added_defect`, counting one multiplication.
  template <class F>
  void update(F&& f, double added_defect) {
    f(m_);
    defect_ += added_defect;
    ++multiplications_;
  }

 private:
  ComplexMatrix m_;
  double defect_ = 0.0;
  bool special_ = true;
  std::size_t multiplications_ = 0;
};

/// Product a*b. Defect bound: a.defect + b.defect + d * machine epsilon.
Unitary mul(const Unitary& a, const Unitary& b);
inline Unitary operator*(const Unitary& a, const Unitary& b) { return mul(a, b); }

/// Operator-norm distance.
double distance(const Unitary& a, const Unitary& b);
double distance(const ComplexMatrix& a, const ComplexMatrix& b);
/// Hilbert-Schmidt distance.
double distance_hs(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traceless skew-Hermitian matrix with ||A||_op <= 2 pi.
class SkewHermitian {
 public:
  SkewHermitian() = default;

  static SkewHermitian zero(std::size_t d);
  /// Validates skewness and tracelessness to 1e-12 relative, and the 2 pi norm cap.
  static SkewHermitian from_matrix(ComplexMatrix m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  double norm() const { return operator_norm(m_); }

 private:
  ComplexMatrix m_;
};

/// e^A through the Hermitian eigendecomposition of -iA. Result is tagged special.
Unitary expm(const SkewHermitian& a);
/// e^X for any skew-Hermitian X (no norm cap, trace allowed).
ComplexMatrix expm_skew(const ComplexMatrix& x);

/// Principal traceless logarithm of a special unitary: eigen-angles in (-pi, pi], an
/// eigenvalue within 1e-8 of -1 is moved to angle pi - 1e-8, and the trace is brought
/// back to zero by shifting whole turns off the extreme angles and spreading the remainder.
SkewHermitian log_special(const Unitary& u);

/// [[a, -conj(b)], [b, conj(a)]]; special unitary when |a|^2 + |b|^2 = 1.
Block su2_block(Complex a, Complex b);

Block haar_su2_block(Rng& rng);
/// Haar-distributed element of SU(2), built from a normalized Gaussian quaternion.
Unitary haar_su2(Rng& rng);
/// Haar-distributed element of SU(d), d >= 2.
Unitary haar_sud(std::size_t d, Rng& rng);

/// Polar factor of `m`: the nearest unitary in Hilbert-Schmidt distance.
Unitary project_unitary(const ComplexMatrix& m);

}  // namespace liewalk
