#include "liewalk/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "liewalk/errors.hpp"

namespace liewalk {

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw PreconditionError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw PreconditionError(std::string(what) + ": non-finite entry");
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw PreconditionError("operator_norm: non-finite entry");
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

double unitarity_defect(const ComplexMatrix& m) {
  const ComplexMatrix g = m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Unitary Unitary::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return trusted(ComplexMatrix::Identity(n, n), 0.0, true);
}

Unitary Unitary::from_matrix(ComplexMatrix m, bool special, double tol) {
  require_square_finite(m, "Unitary");
  const double defect = unitarity_defect(m);
  if (defect > tol) {
    throw PreconditionError("Unitary: defect " + std::to_string(defect) + " exceeds " +
                            std::to_string(tol));
  }
  if (special && std::abs(m.determinant() - Complex(1.0)) > 1e-8) {
    throw PreconditionError("Unitary: determinant differs from 1");
  }
  return trusted(std::move(m), defect, special);
}

Unitary Unitary::trusted(ComplexMatrix m, double defect, bool special, std::size_t multiplications) {
  Unitary u;
  u.m_ = std::move(m);
  u.defect_ = defect;
  u.special_ = special;
  u.multiplications_ = multiplications;
  return u;
}

Unitary Unitary::adjoint() const {
  return trusted(m_.adjoint(), defect_, special_, multiplications_);
}

Unitary mul(const Unitary& a, const Unitary& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("mul: dimensions " + std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()));
  }
  const double defect =
      a.defect() + b.defect() + static_cast<double>(a.dim()) * kMachineEpsilon;
  return Unitary::trusted(a.matrix() * b.matrix(), defect, a.special() && b.special(),
                          a.multiplications() + b.multiplications() + 1);
}

double distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("distance: shape mismatch");
  return operator_norm(a - b);
}

double distance(const Unitary& a, const Unitary& b) { return distance(a.matrix(), b.matrix()); }

double distance_hs(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("distance_hs: shape mismatch");
  return (a - b).norm();
}

SkewHermitian SkewHermitian::zero(std::size_t d) {
  SkewHermitian s;
  const auto n = static_cast<Eigen::Index>(d);
  s.m_ = ComplexMatrix::Zero(n, n);
  return s;
}

SkewHermitian SkewHermitian::from_matrix(ComplexMatrix m) {
  require_square_finite(m, "SkewHermitian");
  const double nrm = operator_norm(m);
  const double d = static_cast<double>(m.rows());
  if (operator_norm(m.adjoint() + m) > 1e-12 * std::max(nrm, 1.0)) {
    throw PreconditionError("SkewHermitian: A^dagger + A is not zero");
  }
  if (std::abs(m.trace()) > 1e-12 * d * std::max(nrm, 1.0)) {
    throw PreconditionError("SkewHermitian: trace is not zero");
  }
  if (nrm > 2.0 * kPi * (1.0 + 1e-12)) {
    throw PreconditionError("SkewHermitian: norm " + std::to_string(nrm) + " exceeds 2 pi");
  }
  SkewHermitian s;
  s.m_ = std::move(m);
  return s;
}

ComplexMatrix expm_skew(const ComplexMatrix& x) {
  // x = iH with H Hermitian; e^x = V e^{i lambda} V^dagger.
  const ComplexMatrix h = Complex(0.0, -1.0) * x;
  const ComplexMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
  const Eigen::VectorXd& lam = es.eigenvalues();
  Eigen::VectorXcd phase(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) phase(k) = std::polar(1.0, lam(k));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Unitary expm(const SkewHermitian& a) {
  if (a.dim() == 0) throw PreconditionError("expm: empty matrix");
  ComplexMatrix u = expm_skew(a.matrix());
  const double defect = unitarity_defect(u);
  return Unitary::trusted(std::move(u), defect, true);
}

SkewHermitian log_special(const Unitary& u) {
  const ComplexMatrix& m = u.matrix();
  const Eigen::Index d = m.rows();
  Eigen::ComplexSchur<ComplexMatrix> schur(m);
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& q = schur.matrixU();

  std::vector<double> theta(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    double a = std::arg(t(k, k));
    if (kPi - std::abs(a) < 1e-8) a = kPi - 1e-8;
    theta[static_cast<std::size_t>(k)] = a;
  }
  const double total = std::accumulate(theta.begin(), theta.end(), 0.0);
  const long turns = std::lround(total / (2.0 * kPi));
  std::vector<std::size_t> order(theta.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return theta[x] > theta[y]; });
  if (turns > 0) {
    for (long k = 0; k < turns; ++k) theta[order[static_cast<std::size_t>(k)]] -= 2.0 * kPi;
  } else if (turns < 0) {
    for (long k = 0; k < -turns; ++k) theta[order[order.size() - 1 - static_cast<std::size_t>(k)]] += 2.0 * kPi;
  }
  const double rest = std::accumulate(theta.begin(), theta.end(), 0.0) / static_cast<double>(d);
  Eigen::VectorXcd diag(d);
  for (Eigen::Index k = 0; k < d; ++k) diag(k) = Complex(0.0, theta[static_cast<std::size_t>(k)] - rest);
  ComplexMatrix a = q * diag.asDiagonal() * q.adjoint();
  a = 0.5 * (a - a.adjoint());
  a -= (a.trace() / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
  return SkewHermitian::from_matrix(std::move(a));
}

Block su2_block(Complex a, Complex b) {
  Block g;
  g << a, -std::conj(b), b, std::conj(a);
  return g;
}

Block haar_su2_block(Rng& rng) {
  double q[4];
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : q) {
      x = rng.normal();
      n2 += x * x;
    }
  } while (n2 < 1e-300);
  const double inv = 1.0 / std::sqrt(n2);
  return su2_block(Complex(q[0] * inv, q[1] * inv), Complex(q[2] * inv, q[3] * inv));
}

Unitary haar_su2(Rng& rng) {
  Block g = haar_su2_block(rng);
  return Unitary::trusted(ComplexMatrix(g), 4.0 * kMachineEpsilon, true);
}

Unitary haar_sud(std::size_t d, Rng& rng) {
  if (d < 2) throw PreconditionError("haar_sud: d must be at least 2");
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix z(n, n);
  const double s = std::sqrt(0.5);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      z(r, c) = Complex(s * re, s * im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex rk = r(k, k);
    const double mag = std::abs(rk);
    q.col(k) *= (mag > 0.0 ? rk / mag : Complex(1.0));
  }
  const Complex det = q.determinant();
  q.col(0) *= std::conj(det) / std::abs(det);
  const double defect = unitarity_defect(q);
  return Unitary::trusted(std::move(q), defect, true);
}

Unitary project_unitary(const ComplexMatrix& m) {
  require_square_finite(m, "project_unitary");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-12 * std::max(s(0), 1e-300)) {
    throw NumericalError("project_unitary: matrix is singular");
  }
  ComplexMatrix p = svd.matrixU() * svd.matrixV().adjoint();
  const double defect = unitarity_defect(p);
  const bool special = std::abs(p.determinant() - Complex(1.0)) <= 1e-8;
  return Unitary::trusted(std::move(p), defect, special);
}

}  // namespace liewalk
