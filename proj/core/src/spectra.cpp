#include "liewalk/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "liewalk/errors.hpp"

namespace liewalk {

namespace {

/// Step-law block mean, symmetrized for the random environment.
Block step_mean(const WalkConfig& cfg) {
  const Block m = cfg.eta.mean();
  if (cfg.variant == WalkVariant::random_environment) return 0.5 * (m + m.adjoint());
  return m;
}

/// E[conj(g^{-1}) (x) g^{-1}] over eta.
BlockMoment inverse_moment(const LocalMeasure& eta) {
  if (eta.kind() == LocalMeasure::Kind::haar) return eta.second_moment();
  BlockMoment m = BlockMoment::Zero();
  for (const Atom& at : eta.atoms()) {
    const Block g = at.element.adjoint();
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c)
        for (int b = 0; b < 2; ++b)
          for (int e = 0; e < 2; ++e) m(2 * a + c, 2 * b + e) += at.weight * std::conj(g(a, b)) * g(c, e);
  }
  return m;
}

BlockMoment step_moment(const WalkConfig& cfg) {
  const BlockMoment m = cfg.eta.second_moment();
  if (cfg.variant == WalkVariant::random_environment) return 0.5 * (m + inverse_moment(cfg.eta));
  return m;
}

/// Calls emit(row, col, value) for every entry of conj(g) (x) g - I, where g embeds a
/// block law with first moment `mean` and second moment `moment` at (i, j).
template <class Emit>
void for_each_degree2_delta(std::size_t d, std::size_t i, std::size_t j, const Block& mean,
                            const BlockMoment& moment, Emit&& emit) {
  const std::size_t s[2] = {i, j};
  auto local = [&](std::size_t a) -> int { return a == i ? 0 : (a == j ? 1 : -1); };
  auto idx = [d](std::size_t a, std::size_t c) { return static_cast<Eigen::Index>(a * d + c); };
  for (std::size_t a = 0; a < d; ++a) {
    const int la = local(a);
    for (std::size_t c = 0; c < d; ++c) {
      const int lc = local(c);
      if (la < 0 && lc < 0) continue;
      const Eigen::Index row = idx(a, c);
      if (la >= 0 && lc < 0) {
        for (int lb = 0; lb < 2; ++lb) emit(row, idx(s[lb], c), std::conj(mean(la, lb)));
      } else if (la < 0) {
        for (int le = 0; le < 2; ++le) emit(row, idx(a, s[le]), mean(lc, le));
      } else {
        for (int lb = 0; lb < 2; ++lb)
          for (int le = 0; le < 2; ++le) emit(row, idx(s[lb], s[le]), moment(2 * la + lc, 2 * lb + le));
      }
      emit(row, row, Complex(-1.0));
    }
  }
}

struct ModulusPair {
  double top = 0.0;
  double second = 0.0;
};

ModulusPair leading_moduli(const ComplexMatrix& m, bool hermitian) {
  std::vector<double> mods;
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) mods.push_back(std::abs(es.eigenvalues()(k)));
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) mods.push_back(std::abs(es.eigenvalues()(k)));
  }
  std::sort(mods.begin(), mods.end(), std::greater<>());
  return {mods[0], mods.size() > 1 ? mods[1] : 0.0};
}

bool step_law_symmetric(const WalkConfig& cfg) {
  return cfg.variant == WalkVariant::random_environment || cfg.eta.is_symmetric();
}

/// E[sin^2(beta t)] for t = Re x_00 of a Haar element of SU(d): t is one real coordinate
/// of a uniform point on the sphere of R^{2d}, so E cos(w t) = Gamma(d) (2/w)^{d-1} J_{d-1}(w).
double ridge_l2(std::size_t d, double beta) {
  const double w = 2.0 * beta;
  const double nu = static_cast<double>(d) - 1.0;
  const double ecos = boost::math::tgamma(static_cast<double>(d)) * std::pow(2.0 / w, nu) *
                      boost::math::cyl_bessel_j(nu, w);
  return std::sqrt(std::max(0.0, 0.5 * (1.0 - ecos)));
}

}  // namespace

const char* to_string(SpectralMethod m) { return m == SpectralMethod::exact ? "exact" : "monte_carlo"; }

ComplexMatrix degree1_transfer(const WalkConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(cfg.d);
  const Block mean = step_mean(cfg);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < cfg.d; ++i) {
    const std::size_t j = (i + 1) % cfg.d;
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    const Eigen::Index idx[2] = {static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) term(idx[r], idx[c]) = mean(r, c);
    m += term;
  }
  return m / static_cast<double>(cfg.d);
}

SpectralReport degree1_report(const WalkConfig& cfg) {
  const ComplexMatrix m = degree1_transfer(cfg);
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  SpectralReport r;
  r.d = cfg.d;
  r.degree = 1;
  r.top_eigenvalue = 1.0;
  r.second_eigenvalue = std::min(1.0, svd.singularValues()(0));
  r.gap = 1.0 - r.second_eigenvalue;
  r.method = SpectralMethod::exact;
  r.symmetric = step_law_symmetric(cfg);
  return r;
}

ComplexMatrix degree2_matrix(const WalkConfig& cfg) {
  cfg.validate();
  if (cfg.d > kMaxExactDegree2Dim) {
    throw PreconditionError("degree2: d = " + std::to_string(cfg.d) + " exceeds " +
                            std::to_string(kMaxExactDegree2Dim) +
                            " for the exact method; use the monte_carlo method");
  }
  const auto n2 = static_cast<Eigen::Index>(cfg.d * cfg.d);
  const Block mean = step_mean(cfg);
  const BlockMoment moment = step_moment(cfg);
  ComplexMatrix m = ComplexMatrix::Identity(n2, n2);
  const double w = 1.0 / static_cast<double>(cfg.d);
  for (std::size_t i = 0; i < cfg.d; ++i) {
    for_each_degree2_delta(cfg.d, i, (i + 1) % cfg.d, mean, moment,
                           [&](Eigen::Index r, Eigen::Index c, Complex v) { m(r, c) += w * v; });
  }
  return m;
}

SpectralReport degree2_transfer(const WalkConfig& cfg) {
  const ComplexMatrix m = degree2_matrix(cfg);
  const bool sym = step_law_symmetric(cfg);
  const ModulusPair p = leading_moduli(m, sym);
  SpectralReport r;
  r.d = cfg.d;
  r.degree = 2;
  r.top_eigenvalue = p.top;
  r.second_eigenvalue = p.second;
  r.gap = 1.0 - p.second;
  r.method = SpectralMethod::exact;
  r.symmetric = sym;
  return r;
}

MonteCarloMatrix degree2_monte_carlo_matrix(const WalkConfig& cfg, std::size_t samples, Rng& rng) {
  cfg.validate();
  if (samples < 2) throw PreconditionError("degree2_monte_carlo_matrix: need at least 2 samples");
  const auto n2 = static_cast<Eigen::Index>(cfg.d * cfg.d);
  ComplexMatrix delta_sum = ComplexMatrix::Zero(n2, n2);
  Eigen::MatrixXd sq_sum = Eigen::MatrixXd::Zero(n2, n2);
  ComplexMatrix scratch = ComplexMatrix::Zero(n2, n2);
  std::vector<char> marked(static_cast<std::size_t>(n2 * n2), 0);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> touched;
  for (std::size_t s = 0; s < samples; ++s) {
    const EmbeddedRotation rot = sample_step(cfg, rng);
    BlockMoment mom;
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c)
        for (int b = 0; b < 2; ++b)
          for (int e = 0; e < 2; ++e) mom(2 * a + c, 2 * b + e) = std::conj(rot.block(a, b)) * rot.block(c, e);
    touched.clear();
    for_each_degree2_delta(cfg.d, rot.i, rot.j, rot.block, mom, [&](Eigen::Index r, Eigen::Index c, Complex v) {
      char& mark = marked[static_cast<std::size_t>(r * n2 + c)];
      if (!mark) {
        mark = 1;
        touched.emplace_back(r, c);
      }
      scratch(r, c) += v;
    });
    for (const auto& [r, c] : touched) {
      const Complex v = scratch(r, c);
      delta_sum(r, c) += v;
      const double base = r == c ? 1.0 : 0.0;
      sq_sum(r, c) += std::norm(Complex(base) + v) - base;
      scratch(r, c) = Complex(0.0);
      marked[static_cast<std::size_t>(r * n2 + c)] = 0;
    }
  }
  const double n = static_cast<double>(samples);
  MonteCarloMatrix out;
  out.samples = samples;
  out.mean = ComplexMatrix::Identity(n2, n2) + delta_sum / n;
  out.standard_error.resize(n2, n2);
  for (Eigen::Index r = 0; r < n2; ++r) {
    for (Eigen::Index c = 0; c < n2; ++c) {
      const double second = (r == c ? 1.0 : 0.0) + sq_sum(r, c) / n;
      const double var = std::max(0.0, second - std::norm(out.mean(r, c))) * n / (n - 1.0);
      out.standard_error(r, c) = std::sqrt(var / n);
    }
  }
  return out;
}

SpectralReport degree2_monte_carlo(const WalkConfig& cfg, std::size_t samples, std::size_t iterations, Rng& rng) {
  cfg.validate();
  if (samples < 1 || iterations < 1) throw PreconditionError("degree2_monte_carlo: empty sample or iteration budget");
  std::vector<EmbeddedRotation> steps;
  steps.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) steps.push_back(sample_step(cfg, rng));
  const auto n = static_cast<Eigen::Index>(cfg.d);
  // X -> conj(g) X g^T acts on coefficient matrices; deviations touch rows and columns i, j only.
  auto apply = [&](const ComplexMatrix& x) {
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    ComplexMatrix y = x;
    for (const EmbeddedRotation& st : steps) {
      const EmbeddedRotation conj_rot{st.i, st.j, st.block.conjugate()};
      const EmbeddedRotation tr_rot{st.i, st.j, st.block.transpose()};
      const auto i = static_cast<Eigen::Index>(st.i);
      const auto j = static_cast<Eigen::Index>(st.j);
      apply_left(conj_rot, y);
      apply_right(y, tr_rot);
      acc.row(i) += y.row(i) - x.row(i);
      acc.row(j) += y.row(j) - x.row(j);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (r == i || r == j) continue;
        acc(r, i) += y(r, i) - x(r, i);
        acc(r, j) += y(r, j) - x(r, j);
      }
      y.row(i) = x.row(i);
      y.row(j) = x.row(j);
      y.col(i) = x.col(i);
      y.col(j) = x.col(j);
    }
    return ComplexMatrix(x + acc / static_cast<double>(steps.size()));
  };
  auto deflate = [&](ComplexMatrix& x) {
    x -= (x.trace() / static_cast<double>(n)) * ComplexMatrix::Identity(n, n);
  };
  ComplexMatrix x(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) x(r, c) = Complex(rng.normal(), rng.normal());
  deflate(x);
  x /= x.norm();
  double lambda = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    ComplexMatrix y = apply(x);
    deflate(y);
    lambda = y.norm();
    if (lambda == 0.0) break;
    x = y / lambda;
  }
  SpectralReport r;
  r.d = cfg.d;
  r.degree = 2;
  r.top_eigenvalue = 1.0;
  r.second_eigenvalue = std::min(1.0, lambda);
  r.gap = 1.0 - r.second_eigenvalue;
  r.method = SpectralMethod::monte_carlo;
  r.symmetric = step_law_symmetric(cfg);
  return r;
}

namespace {

struct Moments {
  double mean = 0.0;
  double l2 = 0.0;
};

Moments calibrate(std::size_t d, const TestFunction::Raw& raw, std::size_t samples, Rng& rng) {
  if (samples < 2) throw PreconditionError("TestFunction: calibration needs at least 2 samples");
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double v = raw(haar_sud(d, rng).matrix());
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sum2 / n - mean * mean))};
}

void require_index(std::size_t d, std::size_t k) {
  if (k >= d) throw PreconditionError("TestFunction: coefficient index out of range");
}

}  // namespace

TestFunction TestFunction::linear_coeff(std::size_t d, std::size_t k, std::size_t l) {
  if (d < 2) throw PreconditionError("TestFunction: d must be at least 2");
  require_index(d, k);
  require_index(d, l);
  TestFunction f;
  f.kind_ = Kind::linear_coeff;
  f.name_ = "linear_coeff(" + std::to_string(k) + "," + std::to_string(l) + ")";
  f.d_ = d;
  const auto kk = static_cast<Eigen::Index>(k), ll = static_cast<Eigen::Index>(l);
  f.raw_ = [kk, ll](const ComplexMatrix& x) { return x(kk, ll).real(); };
  f.mean_ = 0.0;
  f.l2_ = 1.0 / std::sqrt(2.0 * static_cast<double>(d));
  f.raw_lip_ = 1.0;
  f.linear_ = std::make_pair(k, l);
  return f;
}

TestFunction TestFunction::quadratic_coeff(std::size_t d, std::size_t k, std::size_t l, std::size_t m, std::size_t n,
                                           std::size_t calibration_samples, Rng& rng) {
  for (std::size_t idx : {k, l, m, n}) require_index(d, idx);
  TestFunction f;
  f.kind_ = Kind::quadratic_coeff;
  f.name_ = "quadratic_coeff(" + std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(m) + "," +
            std::to_string(n) + ")";
  f.d_ = d;
  const auto a = static_cast<Eigen::Index>(k), b = static_cast<Eigen::Index>(l);
  const auto c = static_cast<Eigen::Index>(m), e = static_cast<Eigen::Index>(n);
  f.raw_ = [a, b, c, e](const ComplexMatrix& x) { return (std::conj(x(a, b)) * x(c, e)).real(); };
  const Moments mo = calibrate(d, f.raw_, calibration_samples, rng);
  f.mean_ = mo.mean;
  f.l2_ = mo.l2;
  f.raw_lip_ = 2.0;
  if (!(f.l2_ > 0.0)) throw PreconditionError("TestFunction: zero l2 norm");
  return f;
}

TestFunction TestFunction::trace_power(std::size_t d, unsigned p, std::size_t calibration_samples, Rng& rng) {
  if (d < 2) throw PreconditionError("TestFunction: d must be at least 2");
  if (p < 1) throw PreconditionError("TestFunction: trace power must be at least 1");
  TestFunction f;
  f.kind_ = Kind::trace_power;
  f.name_ = "trace_power(" + std::to_string(p) + ")";
  f.d_ = d;
  f.raw_ = [p](const ComplexMatrix& x) {
    if (p == 1) return x.trace().real();
    ComplexMatrix y = x;
    for (unsigned k = 1; k < p; ++k) y = y * x;
    return y.trace().real();
  };
  f.raw_lip_ = static_cast<double>(p) * static_cast<double>(d);
  if (p == 1) {
    // tr x is real on SU(2); for d >= 3, E[(tr x)^2] = 0 so E[(Re tr x)^2] = E|tr x|^2 / 2 = 1/2.
    f.mean_ = 0.0;
    f.l2_ = d == 2 ? 1.0 : std::sqrt(0.5);
  } else {
    const Moments mo = calibrate(d, f.raw_, calibration_samples, rng);
    f.mean_ = mo.mean;
    f.l2_ = mo.l2;
  }
  return f;
}

TestFunction TestFunction::ridge(std::size_t d, double beta) {
  if (d < 2) throw PreconditionError("TestFunction: d must be at least 2");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("TestFunction: ridge frequency must be positive");
  TestFunction f;
  f.kind_ = Kind::ridge;
  f.name_ = "ridge(" + std::to_string(beta) + ")";
  f.d_ = d;
  f.raw_ = [beta](const ComplexMatrix& x) { return std::sin(beta * x(0, 0).real()); };
  // diag(-1, -1, 1, ...) or -I maps Re x_00 to its negative, so the mean vanishes.
  f.mean_ = 0.0;
  f.l2_ = ridge_l2(d, beta);
  f.raw_lip_ = beta;
  if (!(f.l2_ > 0.0)) throw PreconditionError("TestFunction: zero l2 norm");
  return f;
}

TestFunction TestFunction::ridge_with_lip(std::size_t d, double lip) {
  const double floor = std::sqrt(2.0 * static_cast<double>(d));
  if (!(lip > floor)) {
    throw PreconditionError("ridge_with_lip: Lipschitz norm must exceed sqrt(2d) = " + std::to_string(floor));
  }
  auto ratio = [d](double beta) { return beta / ridge_l2(d, beta); };
  double lo = 1e-3, hi = lip;
  while (ratio(hi) < lip) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < lip ? lo : hi) = mid;
  }
  return ridge(d, 0.5 * (lo + hi));
}

TestFunction TestFunction::custom(std::string name, std::size_t d, Raw raw, double raw_lip,
                                  std::size_t calibration_samples, Rng& rng) {
  if (d < 2) throw PreconditionError("TestFunction: d must be at least 2");
  TestFunction f;
  f.kind_ = Kind::custom;
  f.name_ = std::move(name);
  f.d_ = d;
  f.raw_ = std::move(raw);
  f.raw_lip_ = raw_lip;
  const Moments mo = calibrate(d, f.raw_, calibration_samples, rng);
  f.mean_ = mo.mean;
  f.l2_ = mo.l2;
  if (!(f.l2_ > 1e-12)) throw PreconditionError("TestFunction: zero l2 norm");
  return f;
}

TestFunction TestFunction::zero(std::size_t d) {
  TestFunction f;
  f.kind_ = Kind::custom;
  f.name_ = "zero";
  f.d_ = d;
  f.raw_ = [](const ComplexMatrix&) { return 0.0; };
  f.l2_ = 0.0;
  return f;
}

Estimate contraction_estimate(const TestFunction& f, const WalkConfig& cfg, std::size_t n_outer, std::size_t n_inner,
                              Rng& rng) {
  cfg.validate();
  if (!(f.l2_norm() > 0.0)) throw PreconditionError("contraction_estimate: test function has zero l2 norm");
  if (f.dim() != cfg.d) throw DimensionError("contraction_estimate: test function dimension differs from d");
  if (n_outer < 2 || n_inner < 2) throw PreconditionError("contraction_estimate: need n_outer, n_inner >= 2");
  double sum = 0.0, sum2 = 0.0;
  ComplexMatrix y;
  for (std::size_t o = 0; o < n_outer; ++o) {
    const Unitary x = haar_sud(cfg.d, rng);
    double s = 0.0, q = 0.0;
    for (std::size_t k = 0; k < n_inner; ++k) {
      y = x.matrix();
      apply_left(sample_step(cfg, rng), y);
      const double v = f(y);
      s += v;
      q += v * v;
    }
    const double ni = static_cast<double>(n_inner);
    const double tf2 = (s * s - q) / (ni * (ni - 1.0));
    sum += tf2;
    sum2 += tf2 * tf2;
  }
  const double n = static_cast<double>(n_outer);
  const double mean = sum / n;
  const double se_sq = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / (n - 1.0));
  const double value = std::sqrt(std::max(0.0, mean));
  // Delta method for the square root, guarded near zero.
  const double se = value > 0.0 ? se_sq / (2.0 * value) : std::sqrt(se_sq);
  return {value, se};
}

std::size_t iterate_decay(const TestFunction& f, const WalkConfig& cfg, double rho, Rng& rng, const DecayOptions& opt) {
  cfg.validate();
  if (!(rho > 0.0 && rho < 0.5)) throw PreconditionError("iterate_decay: rho must lie in (0, 1/2)");
  if (f.dim() != cfg.d) throw DimensionError("iterate_decay: test function dimension differs from d");
  if (const auto idx = f.linear_index()) {
    // T^l Re(x_kl) = Re((M^l x)_kl); its normalized l2 norm is the norm of row k of M^l.
    const ComplexMatrix m = degree1_transfer(cfg);
    const auto k = static_cast<Eigen::Index>(idx->first);
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(m.cols());
    row(k) = 1.0;
    for (std::size_t l = 1; l <= opt.max_steps; ++l) {
      row = row * m;
      if (row.norm() < rho) return l;
    }
    throw NumericalError("iterate_decay: no crossing within " + std::to_string(opt.max_steps) + " steps");
  }
  if (!(f.l2_norm() > 0.0)) throw PreconditionError("iterate_decay: test function has zero l2 norm");
  for (std::size_t l = 1; l <= opt.max_steps; ++l) {
    double sum = 0.0;
    for (std::size_t o = 0; o < opt.n_outer; ++o) {
      const Unitary x = haar_sud(cfg.d, rng);
      double s = 0.0, q = 0.0;
      for (std::size_t k = 0; k < opt.n_inner; ++k) {
        ComplexMatrix y = x.matrix();
        for (std::size_t t = 0; t < l; ++t) apply_left(sample_step(cfg, rng), y);
        const double v = f(y);
        s += v;
        q += v * v;
      }
      const double ni = static_cast<double>(opt.n_inner);
      sum += (s * s - q) / (ni * (ni - 1.0));
    }
    if (std::sqrt(std::max(0.0, sum / static_cast<double>(opt.n_outer))) < rho) return l;
  }
  throw NumericalError("iterate_decay: no crossing within " + std::to_string(opt.max_steps) + " steps");
}

std::size_t iterate_decay_closed_form(std::size_t d, double rho) {
  if (d < 3) throw PreconditionError("iterate_decay_closed_form: d must be at least 3");
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("iterate_decay_closed_form: rho must lie in (0, 1)");
  const double dd = static_cast<double>(d);
  const double x = std::log(1.0 / rho) / std::log(dd / (dd - 2.0));
  // Strict crossing: an exact integer ratio needs one more step.
  const double c = std::ceil(x);
  return static_cast<std::size_t>(c == x ? c + 1.0 : c);
}

ScalingFit scaling_fit(const std::vector<ScalingPoint>& data) {
  std::vector<double> ds;
  for (const ScalingPoint& p : data) {
    if (!(p.d > 0.0) || !(p.steps > 0.0)) throw PreconditionError("scaling_fit: d and steps must be positive");
    if (std::find(ds.begin(), ds.end(), p.d) == ds.end()) ds.push_back(p.d);
  }
  if (ds.size() < 4) throw PreconditionError("scaling_fit: need at least 4 distinct d values");
  const double n = static_cast<double>(data.size());
  double sx = 0.0, sy = 0.0;
  for (const ScalingPoint& p : data) {
    sx += std::log(p.d);
    sy += std::log(p.steps);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const ScalingPoint& p : data) {
    const double x = std::log(p.d) - mx, y = std::log(p.steps) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  ScalingFit fit;
  fit.data = data;
  fit.exponent_estimate = sxy / sxx;
  fit.prefactor_estimate = std::exp(my - fit.exponent_estimate * mx);
  double ss_res = 0.0;
  for (const ScalingPoint& p : data) {
    const double r = std::log(p.steps) - (my + fit.exponent_estimate * (std::log(p.d) - mx));
    ss_res += r * r;
  }
  fit.r_squared = syy > 1e-300 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

ScalingFit scaling_fit(const std::vector<MixingReport>& reports) {
  std::vector<ScalingPoint> data;
  for (const MixingReport& r : reports) {
    if (r.mixed) data.push_back({static_cast<double>(r.d), static_cast<double>(r.steps_to_target)});
  }
  return scaling_fit(data);
}

}  // namespace liewalk
