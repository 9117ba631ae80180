#include "liewalk/commutator.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "liewalk/errors.hpp"

namespace liewalk {

namespace {

constexpr std::size_t kMaxCorrections = 150;

struct Generators {
  ComplexMatrix f;
  ComplexMatrix g;
};

/// F, G skew-Hermitian with [F, G] = x and ||F|| = ||G||. Eigenvector phases follow `basis`
/// (updated in place) so that the split varies smoothly across correction steps.
Generators solve_generators(const ComplexMatrix& x, ComplexMatrix& basis) {
  const Eigen::Index d = x.rows();
  const ComplexMatrix h = Complex(0.0, -1.0) * x;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  ComplexMatrix vecs = es.eigenvectors();
  if (basis.size() != 0) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const Complex overlap = basis.col(k).dot(vecs.col(k));
      if (std::abs(overlap) > 0.0) vecs.col(k) *= std::conj(overlap) / std::abs(overlap);
    }
  }
  basis = vecs;
  // Rotating the eigenbasis by the DFT gives every diagonal entry the mean eigenvalue, 0.
  ComplexMatrix fourier(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      fourier(j, k) = std::polar(scale, 2.0 * kPi * static_cast<double>(j * k) / static_cast<double>(d));
  const ComplexMatrix q = vecs * fourier;
  const ComplexMatrix xr = q.adjoint() * x * q;
  ComplexMatrix fr = ComplexMatrix::Zero(d, d);
  ComplexMatrix gr = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) gr(k, k) = Complex(0.0, static_cast<double>(k) - 0.5 * static_cast<double>(d - 1));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (j == k) continue;
      fr(j, k) = xr(j, k) / Complex(0.0, static_cast<double>(k - j));
    }
  }
  const double nf = operator_norm(fr);
  const double ng = operator_norm(gr);
  if (nf > 0.0) {
    const double s = std::sqrt(nf / ng);
    fr /= s;
    gr *= s;
  } else {
    gr.setZero();
  }
  return {q * fr * q.adjoint(), q * gr * q.adjoint()};
}

}  // namespace

ComplexMatrix log_near_identity(const ComplexMatrix& u) {
  const Eigen::Index d = u.rows();
  Eigen::ComplexSchur<ComplexMatrix> schur(u);
  Eigen::VectorXcd diag(d);
  double mean = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) mean += std::arg(schur.matrixT()(k, k));
  mean /= static_cast<double>(d);
  for (Eigen::Index k = 0; k < d; ++k) diag(k) = Complex(0.0, std::arg(schur.matrixT()(k, k)) - mean);
  ComplexMatrix a = schur.matrixU() * diag.asDiagonal() * schur.matrixU().adjoint();
  return 0.5 * (a - a.adjoint());
}

CommutatorPair balanced_commutator(const ComplexMatrix& delta) {
  require_square_finite(delta, "balanced_commutator");
  const Eigen::Index d = delta.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  CommutatorPair best{id, id, operator_norm(delta - id), 0};
  const ComplexMatrix target = log_near_identity(delta);
  if (operator_norm(target) == 0.0) return best;
  const double stop = 4.0 * static_cast<double>(d) * kMachineEpsilon;
  ComplexMatrix x = target;
  ComplexMatrix basis;
  for (std::size_t it = 1; it <= kMaxCorrections; ++it) {
    const Generators fg = solve_generators(x, basis);
    const ComplexMatrix v = expm_skew(fg.f);
    const ComplexMatrix w = expm_skew(fg.g);
    const ComplexMatrix c = v * w * v.adjoint() * w.adjoint();
    const double res = operator_norm(delta - c);
    if (res < best.residual) best = {v, w, res, it};
    if (res <= stop) break;
    x += target - log_near_identity(c);
  }
  return best;
}

}  // namespace liewalk
