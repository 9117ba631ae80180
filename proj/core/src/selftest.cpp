#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include "liewalk/commutator.hpp"
#include "liewalk/givens.hpp"
#include "liewalk/harness.hpp"

// Executable versions of the documented per-operation examples. Each check throws
// CheckFailure naming the violated invariant.

namespace liewalk {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void require(bool ok, const std::string& invariant, const std::string& detail = "") {
  if (!ok) throw CheckFailure("invariant '" + invariant + "' violated" + (detail.empty() ? "" : ": " + detail));
}

void require_near(double got, double want, double tol, const std::string& invariant) {
  require(std::abs(got - want) <= tol, invariant, "got " + num(got) + ", want " + num(want) + " +- " + num(tol));
}

template <class E, class F>
std::string require_throws(F&& f, const std::string& invariant) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  throw CheckFailure("invariant '" + invariant + "' violated: no error raised");
}

ComplexMatrix random_matrix(std::size_t d, Rng& rng) {
  ComplexMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

/// Traceless skew-Hermitian with operator norm `norm`.
SkewHermitian random_skew(std::size_t d, double norm, Rng& rng) {
  const ComplexMatrix g = random_matrix(d, rng);
  ComplexMatrix a = (g - g.adjoint()) / 2.0;
  a -= (a.trace() / static_cast<double>(d)) * ComplexMatrix::Identity(a.rows(), a.cols());
  a *= norm / operator_norm(a);
  return SkewHermitian::from_matrix(a);
}

ComplexMatrix identity(std::size_t d) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

ComplexMatrix permutation_swap(std::size_t d, std::size_t i, std::size_t j) {
  ComplexMatrix p = identity(d);
  p.row(static_cast<Eigen::Index>(i)).swap(p.row(static_cast<Eigen::Index>(j)));
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_matrix_file(const fs::path& p, const ComplexMatrix& m) {
  std::ofstream out(p);
  out.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << m(r, c).real() << " " << m(r, c).imag() << " ";
    out << "\n";
  }
}

class Context {
 public:
  Context() {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("liewalk_selftest_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  ~Context() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  fs::path dir(const std::string& sub) const {
    const fs::path p = dir_ / sub;
    fs::create_directories(p);
    return p;
  }

  const GeneratorRegistry& haar(std::size_t d, double eps1) {
    return cached("haar/" + std::to_string(d) + "/" + num(eps1), [&] {
      RegistryOptions o;
      o.eps1 = eps1;
      return GeneratorRegistry::build(d, LocalMeasure::haar(), o);
    });
  }

  /// d = 2, two rotations of angle 0.5 about non-parallel axes, closure length 12.
  const GeneratorRegistry& atoms() {
    return cached("atoms", [] { return GeneratorRegistry::build(2, LocalMeasure::two_axis(0.5), {}); });
  }

 private:
  template <class F>
  const GeneratorRegistry& cached(const std::string& key, F&& build) {
    auto it = registries_.find(key);
    if (it == registries_.end()) {
      it = registries_.emplace(key, std::make_unique<GeneratorRegistry>(build())).first;
    }
    return *it->second;
  }

  fs::path dir_;
  std::map<std::string, std::unique_ptr<GeneratorRegistry>> registries_;
};

struct Check {
  SelfTestCase info;
  std::function<void(Context&)> run;
};

// matcore ------------------------------------------------------------------

void matcore_checks(std::vector<Check>& v) {
  v.push_back({{"matcore", "mul_identity", "TRIVIAL"}, [](Context&) {
                 Rng rng(11);
                 const Unitary u = haar_sud(5, rng);
                 require(distance(mul(Unitary::identity(5), u), u) == 0.0, "I * U = U");
               }});
  v.push_back({{"matcore", "mul_inverse", "TRIVIAL"}, [](Context&) {
                 Rng rng(12);
                 const Unitary u = haar_sud(8, rng);
                 require(distance(mul(u, u.adjoint()), Unitary::identity(8)) < 1e-12, "U U^dagger = I within 1e-12");
               }});
  v.push_back({{"matcore", "mul_associativity", "DERIVED"}, [](Context&) {
                 Rng rng(13);
                 for (int t = 0; t < 10; ++t) {
                   const Unitary a = haar_sud(16, rng), b = haar_sud(16, rng), c = haar_sud(16, rng);
                   const double e = distance(mul(mul(a, b), c), mul(a, mul(b, c)));
                   require(e < 1e-11, "(AB)C = A(BC) within 1e-11", num(e));
                 }
               }});
  v.push_back({{"matcore", "mul_dimension_mismatch", "TRIVIAL"}, [](Context&) {
                 require_throws<DimensionError>([] { mul(Unitary::identity(2), Unitary::identity(3)); },
                                                "mismatched dimensions are rejected");
               }});
  v.push_back({{"matcore", "operator_norm_zero", "TRIVIAL"}, [](Context&) {
                 require(operator_norm(ComplexMatrix::Zero(4, 4)) == 0.0, "||0|| = 0");
               }});
  v.push_back({{"matcore", "operator_norm_diagonal", "TRIVIAL"}, [](Context&) {
                 ComplexMatrix m = ComplexMatrix::Zero(3, 3);
                 m(0, 0) = 3.0;
                 m(1, 1) = 1.0;
                 m(2, 2) = -2.0;
                 require_near(operator_norm(m), 3.0, 3e-10, "||diag(3, 1, -2)|| = 3");
               }});
  v.push_back({{"matcore", "operator_norm_eigen_oracle", "DERIVED"}, [](Context&) {
                 Rng rng(14);
                 for (int t = 0; t < 20; ++t) {
                   const ComplexMatrix m = random_matrix(5, rng);
                   Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.adjoint() * m);
                   const double want = std::sqrt(es.eigenvalues().maxCoeff());
                   require_near(operator_norm(m), want, 1e-9 * want, "norm matches sqrt of top eigenvalue of m^dagger m");
                 }
               }});
  v.push_back({{"matcore", "expm_zero", "TRIVIAL"}, [](Context&) {
                 require(distance(expm(SkewHermitian::zero(4)), Unitary::identity(4)) < 1e-15, "e^0 = I");
               }});
  v.push_back({{"matcore", "expm_diagonal", "TRIVIAL"}, [](Context&) {
                 ComplexMatrix a = ComplexMatrix::Zero(2, 2);
                 a(0, 0) = Complex(0.0, kPi);
                 a(1, 1) = Complex(0.0, -kPi);
                 const Unitary u = expm(SkewHermitian::from_matrix(a));
                 require(distance(u.matrix(), -identity(2)) < 1e-12, "exp(i pi diag(1, -1)) = -I");
               }});
  v.push_back({{"matcore", "expm_inverse", "DERIVED"}, [](Context&) {
                 Rng rng(15);
                 for (int t = 0; t < 10; ++t) {
                   const SkewHermitian a = random_skew(6, 3.0, rng);
                   const SkewHermitian neg = SkewHermitian::from_matrix(-a.matrix());
                   const double e = distance(mul(expm(a), expm(neg)), Unitary::identity(6));
                   require(e < 1e-11, "e^A e^-A = I within 1e-11", num(e));
                   require(distance(expm(a).adjoint(), expm(neg)) < 1e-11, "e^A^dagger = e^-A");
                 }
               }});
  v.push_back({{"matcore", "haar_su2_mean", "DERIVED"}, [](Context&) {
                 Rng rng(16);
                 const int n = 1000000;
                 Block sum = Block::Zero();
                 for (int s = 0; s < n; ++s) sum += haar_su2_block(rng);
                 sum /= static_cast<double>(n);
                 require(sum.cwiseAbs().maxCoeff() < 3e-3, "E[U] = 0 entrywise within 3e-3",
                         num(sum.cwiseAbs().maxCoeff()));
               }});
  v.push_back({{"matcore", "haar_su2_column", "DERIVED"}, [](Context&) {
                 Rng rng(17);
                 const int n = 1000000;
                 double acc = 0.0;
                 for (int s = 0; s < n; ++s) acc += std::norm(haar_su2_block(rng)(0, 0));
                 require_near(acc / n, 0.5, 2e-3, "E|u11|^2 = 1/2");
               }});
  v.push_back({{"matcore", "haar_su2_det", "TRIVIAL"}, [](Context&) {
                 Rng rng(18);
                 for (int s = 0; s < 1000; ++s) {
                   require(std::abs(haar_su2(rng).matrix().determinant() - 1.0) < 1e-14, "det U = 1");
                 }
               }});
  v.push_back({{"matcore", "haar_sud_mean_trace", "DERIVED"}, [](Context&) {
                 Rng rng(19);
                 const int n = 100000;
                 Complex acc = 0.0;
                 for (int s = 0; s < n; ++s) acc += haar_sud(4, rng).matrix().trace();
                 require(std::abs(acc / static_cast<double>(n)) < 1e-2, "E tr U = 0 within 1e-2, d = 4");
               }});
  v.push_back({{"matcore", "haar_sud_second_moment", "DERIVED"}, [](Context&) {
                 Rng rng(20);
                 const int n = 100000;
                 double acc4 = 0.0, acc2 = 0.0;
                 for (int s = 0; s < n; ++s) {
                   acc4 += std::norm(haar_sud(4, rng).matrix().trace());
                   acc2 += std::norm(haar_sud(2, rng).matrix().trace());
                 }
                 require_near(acc4 / n, 1.0, 2e-2, "E|tr U|^2 = 1 within 2e-2, d = 4");
                 // SU(2) class angle density (2 / pi) sin^2(t) on [0, pi] with tr = 2 cos(t).
                 const int q = 20000;
                 double quad = 0.0;
                 for (int k = 0; k < q; ++k) {
                   const double t = (k + 0.5) * kPi / q;
                   quad += 4.0 * std::cos(t) * std::cos(t) * (2.0 / kPi) * std::sin(t) * std::sin(t) * (kPi / q);
                 }
                 require_near(acc2 / n, quad, 2e-2, "d = 2 sample matches the class angle density");
               }});
  v.push_back({{"matcore", "haar_sud_columns", "DERIVED"}, [](Context&) {
                 Rng rng(21);
                 const int n = 100000;
                 Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
                 for (int s = 0; s < n; ++s) acc += haar_sud(4, rng).matrix().cwiseAbs2();
                 acc /= n;
                 require((acc.array() - 0.25).abs().maxCoeff() < 1e-2, "E|u_kl|^2 = 1/d within 1e-2");
               }});
  v.push_back({{"matcore", "project_fixed_point", "TRIVIAL"}, [](Context&) {
                 Rng rng(22);
                 const Unitary u = haar_sud(5, rng);
                 require(distance(project_unitary(u.matrix()), u) < 1e-13, "unitary input is a fixed point");
               }});
  v.push_back({{"matcore", "project_scaling", "TRIVIAL"}, [](Context&) {
                 require(distance(project_unitary(1.1 * identity(3)).matrix(), identity(3)) < 1e-14,
                         "positive scaling is removed");
               }});
  v.push_back({{"matcore", "project_near_unitary", "DERIVED"}, [](Context&) {
                 Rng rng(23);
                 for (int t = 0; t < 10; ++t) {
                   const Unitary u = haar_sud(6, rng);
                   const ComplexMatrix m = u.matrix() + 1e-6 * random_matrix(6, rng);
                   const Unitary p = project_unitary(m);
                   Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
                   const ComplexMatrix polar = svd.matrixU() * svd.matrixV().adjoint();
                   require(distance(p.matrix(), polar) < 1e-12, "result equals the SVD polar factor");
                   require(distance(p, u) < 1e-5, "result within 1e-5 of U");
                   require(unitarity_defect(p.matrix()) < 1e-12, "defect below 1e-12");
                 }
               }});
}

// walk ---------------------------------------------------------------------

void embed_explicit(Context&) {
  const Unitary m = embed({0, 1, su2_block(0.0, 1.0)}, 3);
  ComplexMatrix want = ComplexMatrix::Zero(3, 3);
  want(1, 0) = 1.0;
  want(0, 1) = -1.0;
  want(2, 2) = 1.0;
  require(distance(m.matrix().col(0), want.col(0)) < 1e-15, "embed sends e0 to e1");
  require(distance(m.matrix().col(1), want.col(1)) < 1e-15, "embed sends e1 to -e0");
  require(distance(m.matrix().col(2), want.col(2)) < 1e-15, "embed fixes e2");
}

void walk_checks(std::vector<Check>& v) {
  v.push_back({{"walk", "embed_identity", "TRIVIAL"}, [](Context&) {
                 for (std::size_t i = 0; i < 5; ++i) {
                   const Unitary m = embed({i, (i + 2) % 5, Block::Identity()}, 5);
                   require(distance(m.matrix(), identity(5)) == 0.0, "identity block embeds to I");
                 }
               }});
  v.push_back({{"walk", "embed_explicit", "TRIVIAL"}, embed_explicit});
  v.push_back({{"walk", "embed_random_block", "DERIVED"}, [](Context&) {
                 Rng rng(31);
                 const Unitary m = embed({2, 5, haar_su2_block(rng)}, 7);
                 require(distance(mul(m, m.adjoint()), Unitary::identity(7)) < 1e-13, "embed is unitary");
                 require(std::abs(m.matrix().determinant() - 1.0) < 1e-12, "embed has determinant 1");
                 require(m.matrix().block(0, 0, 2, 2) == identity(2), "coordinates outside the pair are fixed");
               }});
  v.push_back({{"walk", "embed_homomorphism", "DERIVED"}, [](Context&) {
                 Rng rng(32);
                 for (int t = 0; t < 20; ++t) {
                   const Block a = haar_su2_block(rng), b = haar_su2_block(rng);
                   const std::size_t i = rng.below(6), j = (i + 1 + rng.below(5)) % 6;
                   const double e = distance(embed({i, j, a * b}, 6), mul(embed({i, j, a}, 6), embed({i, j, b}, 6)));
                   require(e < 1e-12, "embed(ab) = embed(a) embed(b)", num(e));
                 }
               }});
  v.push_back({{"walk", "sample_step_uniform_index", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 10;
                 Rng rng(33);
                 std::vector<double> counts(10, 0.0);
                 const int n = 1000000;
                 for (int s = 0; s < n; ++s) {
                   const EmbeddedRotation r = sample_step(cfg, rng);
                   require(r.j == (r.i + 1) % 10, "j = i + 1 mod d");
                   counts[r.i] += 1.0;
                 }
                 double stat = 0.0;
                 for (double c : counts) stat += (c - n / 10.0) * (c - n / 10.0) / (n / 10.0);
                 const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(9.0), stat));
                 require(p >= 0.001 && p <= 0.999, "index chi-square p-value in [0.001, 0.999]", num(p));
               }});
  v.push_back({{"walk", "sample_step_d2_haar", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 2;
                 Rng rng(34);
                 const int n = 100000;
                 Complex tr = 0.0;
                 double tr2 = 0.0, u00 = 0.0;
                 int pairs[2] = {0, 0};
                 for (int s = 0; s < n; ++s) {
                   const EmbeddedRotation r = sample_step(cfg, rng);
                   ++pairs[r.i];
                   const ComplexMatrix m = embed(r, 2).matrix();
                   tr += m.trace();
                   tr2 += std::norm(m.trace());
                   u00 += std::norm(m(0, 0));
                 }
                 require(pairs[0] > 0 && pairs[1] > 0, "both index pairs occur");
                 require(std::abs(tr / static_cast<double>(n)) < 2e-2, "E tr = 0 after one step");
                 require_near(tr2 / n, 1.0, 2e-2, "E|tr|^2 = 1 after one step");
                 require_near(u00 / n, 0.5, 1e-2, "E|u00|^2 = 1/2 after one step");
               }});
  v.push_back({{"walk", "sample_step_point_atom", "TRIVIAL"}, [](Context&) {
                 Rng g(35);
                 const Block g0 = haar_su2_block(g);
                 WalkConfig cfg;
                 cfg.d = 5;
                 cfg.eta = LocalMeasure::point(g0);
                 Rng rng(36);
                 for (int s = 0; s < 1000; ++s) require(sample_step(cfg, rng).block == g0, "block is always g0");
               }});
  v.push_back({{"walk", "run_chain_zero_steps", "TRIVIAL"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 Rng rng(37);
                 const ChainState s = run_chain(cfg, 0, rng);
                 require(s.steps_taken == 0 && distance(s.current.matrix(), identity(4)) == 0.0, "no steps gives I");
               }});
  v.push_back({{"walk", "run_chain_d2_one_step", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 2;
                 Rng rng(38);
                 const int n = 100000;
                 double acc = 0.0;
                 for (int s = 0; s < n; ++s) acc += std::norm(run_chain(cfg, 1, rng).current.matrix().trace());
                 require_near(acc / n, 1.0, 2e-2, "E|tr|^2 = 1 after one step at d = 2");
               }});
  v.push_back({{"walk", "run_chain_drift", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 16;
                 Rng rng(39);
                 const ChainState s = run_chain(cfg, 100000, rng);
                 const double defect = unitarity_defect(s.current.matrix());
                 require(defect < 1e-8, "defect after 1e5 steps below 1e-8", num(defect));
                 require(s.current.defect() >= defect, "declared defect bounds the measured one");
               }});
  v.push_back({{"walk", "run_chain_left_multiplication", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 5;
                 Rng a(40), b(40);
                 const ChainState s = run_chain(cfg, 7, a);
                 ComplexMatrix want = identity(5);
                 for (int k = 0; k < 7; ++k) want = embed(sample_step(cfg, b), 5).matrix() * want;
                 require(distance(s.current.matrix(), want) < 1e-13, "current = g_n ... g_1");
               }});
  v.push_back({{"walk", "convolution_identity_atom", "TRIVIAL"}, [](Context&) {
                 Rng rng(41);
                 const ConvolutionReport r = convolution_power_check(LocalMeasure::point(Block::Identity()), 1, 100, rng);
                 require_near(r.abs_mean_trace, 2.0, 1e-12, "E tr = 2 for the point mass at I");
                 require_throws<PreconditionError>(
                     [&] { convolution_power_check(LocalMeasure::point(Block::Identity()), 0, 100, rng); },
                     "ell = 0 is rejected");
               }});
  v.push_back({{"walk", "convolution_two_axis", "DERIVED"}, [](Context&) {
                 Rng rng(42);
                 const ConvolutionReport r = convolution_power_check(LocalMeasure::two_axis(0.5), 200, 100000, rng);
                 require(r.abs_mean_trace < 0.05, "|E tr| < 0.05 at ell = 200", num(r.abs_mean_trace));
               }});
  v.push_back({{"walk", "convolution_haar", "DERIVED"}, [](Context&) {
                 Rng rng(43);
                 const std::size_t n = 100000;
                 const ConvolutionReport r = convolution_power_check(LocalMeasure::haar(), 1, n, rng);
                 // Both |tr| and |tr|^2 - 1 have unit variance under Haar.
                 const double floor = 4.0 / std::sqrt(static_cast<double>(n));
                 require(r.abs_mean_trace < floor, "|E tr| below the noise floor", num(r.abs_mean_trace));
                 require(r.second_moment_dev < floor, "|E|tr|^2 - 1| below the noise floor", num(r.second_moment_dev));
               }});
  v.push_back({{"walk", "small_ball_mass", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 6;
                 for (double eps : {0.3, 0.5}) {
                   Rng rng(44);
                   const int n = 1000000;
                   int hits = 0;
                   for (int s = 0; s < n; ++s) {
                     if (operator_norm(sample_step(cfg, rng).block - Block::Identity()) <= eps) ++hits;
                   }
                   const double ratio = (static_cast<double>(hits) / n) / std::pow(eps, 4);
                   require(ratio >= 0.01 && ratio <= 100.0, "nu(B_eps) / eps^4 in [0.01, 100]", num(ratio));
                 }
               }});
}

// spectra ------------------------------------------------------------------

ScalingFit haar_sweep_fit() {
  static const ScalingFit fit = [] {
    std::vector<MixingReport> reps;
    for (std::size_t d = 3; d <= 12; ++d) {
      WalkConfig cfg;
      cfg.d = d;
      Rng rng(1, 0);
      reps.push_back(mixing_time(cfg, 0.05, 2000, 100000, rng));
    }
    return scaling_fit(reps);
  }();
  return fit;
}

void spectra_checks(std::vector<Check>& v) {
  v.push_back({{"spectra", "degree1_haar_d2", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 2;
                 require(degree1_transfer(cfg).cwiseAbs().maxCoeff() < 1e-15, "M = 0 at d = 2");
               }});
  v.push_back({{"spectra", "degree1_haar_d4", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 const ComplexMatrix m = degree1_transfer(cfg);
                 require((m - 0.5 * identity(4)).cwiseAbs().maxCoeff() < 1e-12, "M = 0.5 I at d = 4");
                 Rng rng(51);
                 const int n = 10000000;
                 ComplexMatrix acc = ComplexMatrix::Zero(4, 4);
                 for (int s = 0; s < n; ++s) {
                   const EmbeddedRotation r = sample_step(cfg, rng);
                   const std::size_t idx[2] = {r.i, r.j};
                   for (std::size_t k = 0; k < 4; ++k) {
                     if (k != r.i && k != r.j) acc(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += 1.0;
                   }
                   for (int a = 0; a < 2; ++a) {
                     for (int b = 0; b < 2; ++b) {
                       acc(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b])) += r.block(a, b);
                     }
                   }
                 }
                 acc /= static_cast<double>(n);
                 require((acc - m).cwiseAbs().maxCoeff() < 1e-3, "Monte Carlo average of steps matches M to 1e-3");
               }});
  v.push_back({{"spectra", "degree1_point_identity", "TRIVIAL"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 5;
                 cfg.eta = LocalMeasure::point(Block::Identity());
                 require((degree1_transfer(cfg) - identity(5)).cwiseAbs().maxCoeff() < 1e-15, "M = I for eta = {I}");
               }});
  v.push_back({{"spectra", "degree1_closed_form_range", "DERIVED"}, [](Context&) {
                 for (std::size_t d = 2; d <= 32; ++d) {
                   WalkConfig cfg;
                   cfg.d = d;
                   const double f = (static_cast<double>(d) - 2.0) / static_cast<double>(d);
                   require((degree1_transfer(cfg) - f * identity(d)).cwiseAbs().maxCoeff() < 1e-12,
                           "M = ((d - 2) / d) I", "d = " + std::to_string(d));
                 }
               }});
  v.push_back({{"spectra", "degree2_haar_d2", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 2;
                 const SpectralReport r = degree2_transfer(cfg);
                 require(std::abs(r.second_eigenvalue) < 1e-10, "second eigenvalue 0 at d = 2");
                 const ComplexMatrix m2 = degree2_matrix(cfg);
                 require((m2 * m2 - m2).cwiseAbs().maxCoeff() < 1e-12, "M2 is a projector at d = 2");
               }});
  v.push_back({{"spectra", "degree2_invariant_vector", "TRIVIAL"}, [](Context&) {
                 for (std::size_t d : {2, 3, 5, 8}) {
                   for (const LocalMeasure& eta : {LocalMeasure::haar(), LocalMeasure::two_axis(0.5)}) {
                     WalkConfig cfg;
                     cfg.d = d;
                     cfg.eta = eta;
                     const ComplexMatrix m2 = degree2_matrix(cfg);
                     Eigen::VectorXcd vi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d * d));
                     for (std::size_t a = 0; a < d; ++a) vi(static_cast<Eigen::Index>(a * d + a)) = 1.0;
                     require((m2 * vi - vi).cwiseAbs().maxCoeff() < 1e-12, "M2 vec(I) = vec(I)");
                     require_near(degree2_transfer(cfg).top_eigenvalue, 1.0, 1e-10, "top eigenvalue 1");
                   }
                 }
               }});
  v.push_back({{"spectra", "degree2_gap_bracket", "DERIVED"}, [](Context&) {
                 double prev = 2.0;
                 for (std::size_t d = 3; d <= 12; ++d) {
                   WalkConfig cfg;
                   cfg.d = d;
                   const SpectralReport r = degree2_transfer(cfg);
                   const double dd = static_cast<double>(d);
                   require(r.gap > 0.0, "gap positive", "d = " + std::to_string(d));
                   require(r.gap <= prev + 1e-12, "gap non-increasing in d", "d = " + std::to_string(d));
                   require(dd * r.gap >= 0.1 && dd * r.gap <= 2.0, "d * gap in [0.1, 2]", num(dd * r.gap));
                   require_near(r.gap, (1.0 - std::cos(2.0 * kPi / dd)) / dd, 1e-10, "gap = (1 - cos(2 pi / d)) / d");
                   prev = r.gap;
                 }
               }});
  v.push_back({{"spectra", "degree2_monte_carlo_matrix", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 Rng rng(52);
                 const MonteCarloMatrix mc = degree2_monte_carlo_matrix(cfg, 100000, rng);
                 const ComplexMatrix exact = degree2_matrix(cfg);
                 const Eigen::MatrixXd dev = (mc.mean - exact).cwiseAbs();
                 require((dev.array() <= 5.0 * mc.standard_error.array() + 1e-12).all(),
                         "sampled M2 within 5 standard errors of the exact M2");
               }});
  v.push_back({{"spectra", "contraction_linear", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 Rng rng(53);
                 const Estimate e = contraction_estimate(TestFunction::linear_coeff(4, 0, 0), cfg, 10000, 100, rng);
                 require(std::abs(e.value - 0.5) <= 3.0 * e.standard_error, "||Tf|| = 0.5 within 3 standard errors",
                         num(e.value) + " +- " + num(e.standard_error));
               }});
  v.push_back({{"spectra", "contraction_zero_rejected", "TRIVIAL"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 Rng rng(54);
                 require_throws<PreconditionError>(
                     [&] { contraction_estimate(TestFunction::zero(4), cfg, 10, 10, rng); }, "zero function rejected");
               }});
  v.push_back({{"spectra", "contraction_trace_power", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 Rng rng(55);
                 const TestFunction f = TestFunction::trace_power(4, 1, 0, rng);
                 const Estimate e = contraction_estimate(f, cfg, 10000, 100, rng);
                 require(std::abs(e.value - 0.5) <= 3.0 * e.standard_error, "||T tr|| = 0.5 within 3 standard errors",
                         num(e.value) + " +- " + num(e.standard_error));
               }});
  v.push_back({{"spectra", "iterate_decay_d4_half", "DERIVED"}, [](Context&) {
                 // Exact geometric decay 0.5^l: the first strict crossing below 0.5 is l = 2.
                 WalkConfig cfg;
                 cfg.d = 4;
                 const ComplexMatrix m = degree1_transfer(cfg);
                 ComplexMatrix p = identity(4);
                 std::size_t ell = 0;
                 while (operator_norm(p) >= 0.5) {
                   p = m * p;
                   ++ell;
                 }
                 require(ell == 2, "matrix powers cross 0.5 at l = 2", std::to_string(ell));
                 require(iterate_decay_closed_form(4, 0.5) == 2, "closed form gives l = 2");
               }});
  v.push_back({{"spectra", "iterate_decay_d10", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 10;
                 Rng rng(56);
                 const double rho = std::exp(-1.0);
                 const std::size_t want = static_cast<std::size_t>(std::ceil(1.0 / std::log(10.0 / 8.0)));
                 require(want == 5, "ceil(1 / log(10 / 8)) = 5");
                 require(iterate_decay(TestFunction::linear_coeff(10, 0, 0), cfg, rho, rng) == want, "l = 5");
                 require(iterate_decay_closed_form(10, rho) == want, "closed form l = 5");
               }});
  v.push_back({{"spectra", "iterate_decay_rho_range", "TRIVIAL"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 Rng rng(57);
                 for (double rho : {0.5, 0.7, 0.0}) {
                   require_throws<PreconditionError>(
                       [&] { iterate_decay(TestFunction::linear_coeff(4, 0, 0), cfg, rho, rng); },
                       "rho outside (0, 1/2) rejected");
                 }
               }});
  v.push_back({{"spectra", "mixing_d2", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 2;
                 Rng rng(58);
                 const MixingReport r = mixing_time(cfg, 0.05, 10000, 1000, rng);
                 require(r.mixed && r.steps_to_target == 1, "one step suffices at d = 2",
                         std::to_string(r.steps_to_target));
               }});
  v.push_back({{"spectra", "mixing_loose_target", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 4;
                 Rng rng(59);
                 const MixingReport r = mixing_time(cfg, 0.9, 2000, 1000, rng);
                 require(r.mixed && r.steps_to_target <= 5, "epsilon = 0.9 reached within 5 steps",
                         std::to_string(r.steps_to_target));
                 const MomentPoint& p = r.trajectory.at(r.steps_to_target);
                 require(p.step == r.steps_to_target && p.abs_mean_trace < 0.9 && p.abs_second_moment_dev < 0.9,
                         "trajectory confirms the crossing");
               }});
  v.push_back({{"spectra", "mixing_stationary", "TRIVIAL"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 3;
                 cfg.eta = LocalMeasure::point(Block::Identity());
                 Rng rng(60);
                 const MixingReport r = mixing_time(cfg, 0.05, 1000, 50, rng);
                 require(!r.mixed && r.steps_simulated == 50, "eta = {I} is not mixed at max_steps");
                 require(!r.trajectory.empty(), "not-mixed result carries the trajectory");
               }});
  v.push_back({{"spectra", "mixing_monotone_in_epsilon", "DERIVED"}, [](Context&) {
                 WalkConfig cfg;
                 cfg.d = 5;
                 std::size_t prev = 0;
                 for (double eps : {0.2, 0.1, 0.05}) {
                   Rng rng(61);
                   const MixingReport r = mixing_time(cfg, eps, 2000, 10000, rng);
                   require(r.mixed && r.steps_to_target >= prev, "steps non-increasing in epsilon");
                   prev = r.steps_to_target;
                 }
               }});
  v.push_back({{"spectra", "scaling_fit_power_law", "TRIVIAL"}, [](Context&) {
                 std::vector<ScalingPoint> pts;
                 for (double d = 3; d <= 8; ++d) pts.push_back({d, d * d});
                 const ScalingFit f = scaling_fit(pts);
                 require_near(f.exponent_estimate, 2.0, 1e-9, "exponent 2 for steps = d^2");
                 require_near(f.r_squared, 1.0, 1e-9, "r^2 = 1 for an exact power law");
               }});
  v.push_back({{"spectra", "scaling_fit_constant", "TRIVIAL"}, [](Context&) {
                 std::vector<ScalingPoint> pts;
                 for (double d = 3; d <= 8; ++d) pts.push_back({d, 7.0});
                 require_near(scaling_fit(pts).exponent_estimate, 0.0, 1e-12, "exponent 0 for constant steps");
               }});
  v.push_back({{"spectra", "scaling_fit_degenerate", "TRIVIAL"}, [](Context&) {
                 require_throws<Error>([] { scaling_fit(std::vector<ScalingPoint>{{3, 9}, {4, 16}, {3, 9}, {4, 16}}); },
                                       "fewer than 4 distinct d rejected");
               }});
  v.push_back({{"spectra", "scaling_fit_haar_sweep", "DERIVED"}, [](Context&) {
                 const ScalingFit f = haar_sweep_fit();
                 require(f.data.size() == 10, "all d in 3..12 mixed");
                 require(f.exponent_estimate > 0.5 && f.exponent_estimate < 4.0, "exponent in (0.5, 4)",
                         num(f.exponent_estimate));
                 require(f.r_squared > 0.9, "r^2 > 0.9", num(f.r_squared));
               }});
}

// genwords -----------------------------------------------------------------

Word random_word(const GeneratorRegistry& reg, std::size_t len, Rng& rng) {
  std::vector<Letter> letters;
  for (std::size_t k = 0; k < len; ++k) {
    letters.push_back({static_cast<GeneratorId>(rng.below(reg.size())), rng.coin() ? 1 : -1});
  }
  return Word(std::move(letters));
}

double calibrated_sk_constant(const NetApproximator& net) {
  Rng rng(71, 7);
  return 1.5 * calibrate_sk_constant(net, 20, 4, rng);
}

void genwords_checks(std::vector<Check>& v) {
  v.push_back({{"genwords", "eval_empty", "TRIVIAL"}, [](Context& ctx) {
                 require(distance(eval(Word(), ctx.haar(4, 0.1)).matrix(), identity(4)) == 0.0, "empty word is I");
               }});
  v.push_back({{"genwords", "eval_inverse", "TRIVIAL"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 Rng rng(72);
                 const Word w = random_word(reg, 50, rng);
                 require(distance(eval(concat(w, w.inverse()), reg).matrix(), identity(4)) < 1e-10, "w w^-1 = I");
               }});
  v.push_back({{"genwords", "eval_concat", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 Rng rng(73);
                 for (int t = 0; t < 20; ++t) {
                   const Word a = random_word(reg, 1 + rng.below(40), rng), b = random_word(reg, 1 + rng.below(40), rng);
                   require(distance(eval(concat(a, b), reg), mul(eval(a, reg), eval(b, reg))) < 1e-10,
                           "eval(ab) = eval(a) eval(b)");
                 }
               }});
  v.push_back({{"genwords", "registry_certificate", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 require(reg.certificate().complete(), "every eps1 cell is covered");
                 require(reg.grid().diameter_bound() <= 0.1 + 1e-12, "cell diameter at most eps1");
                 for (GeneratorId id = 0; id < reg.size(); ++id) {
                   require(unitarity_defect(embed(reg.rotation(id), 4).matrix()) < 1e-9, "generators special unitary");
                 }
               }});
  v.push_back({{"genwords", "signed_transposition_d2", "TRIVIAL"}, [](Context&) {
                 const ComplexMatrix m = embed(signed_transposition(0, 1, 2), 2).matrix();
                 ComplexMatrix want(2, 2);
                 want << 0.0, -1.0, 1.0, 0.0;
                 require(m == want, "signed transposition is [[0, -1], [1, 0]]");
               }});
  v.push_back({{"genwords", "signed_transposition_square", "DERIVED"}, [](Context&) {
                 const Unitary s = embed(signed_transposition(1, 3, 4), 4);
                 const Unitary minus = embed({1, 3, -Block::Identity()}, 4);
                 require(distance(mul(s, s), minus) < 1e-15, "square is embed(-I2)");
                 require(distance(mul(s, s).matrix(), identity(4)) > 1.0, "square is not the identity");
               }});
  v.push_back({{"genwords", "signed_transposition_conjugation", "DERIVED"}, [](Context&) {
                 Rng rng(74);
                 const Block g = haar_su2_block(rng);
                 const Unitary s = embed(signed_transposition(1, 2, 4), 4);
                 const ComplexMatrix c = (s * embed({0, 1, g}, 4) * s.adjoint()).matrix();
                 const std::size_t idx[2] = {0, 2};
                 ComplexMatrix outside = c;
                 for (int a = 0; a < 2; ++a) {
                   for (int b = 0; b < 2; ++b) {
                     const Complex got = c(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
                     require(std::abs(got - g(a, b)) < 1e-14 || std::abs(got + g(a, b)) < 1e-14,
                             "conjugated block equals gamma up to signs");
                     outside(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b])) = a == b ? 1.0 : 0.0;
                   }
                 }
                 require(distance(outside, identity(4)) < 1e-14, "conjugate acts only on (0, 2)");
               }});
  v.push_back({{"genwords", "ladder_adjacent", "TRIVIAL"}, [](Context& ctx) {
                 require(transposition_ladder(2, 3, ctx.haar(4, 0.1)).length() == 1, "(i, i+1) ladder has length 1");
               }});
  v.push_back({{"genwords", "ladder_permutation", "DERIVED"}, [](Context& ctx) {
                 for (auto [d, i, j] : {std::tuple<std::size_t, std::size_t, std::size_t>{4, 1, 3}, {8, 0, 7}, {6, 1, 4}}) {
                   const GeneratorRegistry& reg = ctx.haar(d, 0.1);
                   const Word w = transposition_ladder(i, j, reg);
                   require(w.length() == 2 * (j - i) - 1, "ladder length 2(j - i) - 1", std::to_string(w.length()));
                   ComplexMatrix p = identity(d);
                   for (std::size_t k : ladder_indices(i, j)) p = p * permutation_swap(d, k, k + 1);
                   require(distance(p, permutation_swap(d, i, j)) == 0.0, "adjacent swaps compose to (i j)");
                   require(distance(eval(w, reg).matrix().cwiseAbs().cast<Complex>(), p) < 1e-14,
                           "ladder absolute values equal the permutation matrix");
                 }
               }});
  v.push_back({{"genwords", "approx_gamma_identity", "TRIVIAL"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 const WordResult r = approx_gamma_ij(Block::Identity(), 0, 2, reg);
                 require(distance(eval(r.word, reg).matrix(), identity(4)) <= reg.eps1(), "within eps1 of I");
               }});
  v.push_back({{"genwords", "approx_gamma_ladder", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.05);
                 const Block g = su2_block(0.0, 1.0);
                 const WordResult r = approx_gamma_ij(g, 0, 2, reg);
                 const double e = distance(eval(r.word, reg), embed({0, 2, g}, 4));
                 require(e < 0.35, "error below the 7 eps1 budget", num(e));
                 require(e <= r.bound, "measured error within the reported bound");
               }});
  v.push_back({{"genwords", "approx_gamma_adjacent", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.05);
                 Rng rng(75);
                 for (int t = 0; t < 10; ++t) {
                   const Block g = haar_su2_block(rng);
                   const WordResult r = approx_gamma_ij(g, 1, 2, reg);
                   require(r.word.length() == 1, "adjacent word has length 1");
                   require(distance(eval(r.word, reg), embed({1, 2, g}, 4)) < reg.eps1(), "error below eps1");
                 }
               }});
  v.push_back({{"genwords", "first_order_zero", "TRIVIAL"}, [](Context& ctx) {
                 const FirstOrderResult r = first_order_word(SkewHermitian::zero(4), 0.01, ctx.haar(4, 0.1));
                 require(r.word.empty() && r.measured == 0.0, "A = 0 gives the empty word");
               }});
  v.push_back({{"genwords", "first_order_single_block", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 ComplexMatrix a = ComplexMatrix::Zero(4, 4);
                 a(0, 1) = 1.0;
                 a(1, 0) = -1.0;
                 const double kappa = 0.01;
                 // exp of a single 2x2 block is exact; the affine gap is second order.
                 const double gap = distance(expm_skew(kappa * a), identity(4) + kappa * a);
                 require(gap <= 1e-4, "||exp(kX) - I - kX|| <= k^2 ||X||^2", num(gap));
                 FirstOrderOptions o;
                 o.block_tolerance = kappa * kappa / (2.0 * 16.0);
                 const FirstOrderResult r = first_order_word(SkewHermitian::from_matrix(a), kappa, reg, o);
                 const double e = distance(eval(r.word, reg).matrix(), identity(4) + kappa * a);
                 require(e <= 1e-4 + r.net_term, "error within 1e-4 plus the word budget", num(e));
                 require(e <= r.bound, "measured within bound");
               }});
  v.push_back({{"genwords", "first_order_bound", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 Rng rng(76);
                 const double kappa = 1.0 / 64.0;
                 FirstOrderOptions o;
                 o.block_tolerance = kappa * kappa / (2.0 * 16.0);
                 for (int t = 0; t < 3; ++t) {
                   const SkewHermitian a = random_skew(4, 1.5, rng);
                   const FirstOrderResult r = first_order_word(a, kappa, reg, o);
                   const double e = distance(eval(r.word, reg).matrix(), identity(4) + kappa * a.matrix());
                   require(e <= r.bound, "reported bound dominates measured error", num(e) + " > " + num(r.bound));
                 }
               }});
  v.push_back({{"genwords", "first_order_precondition", "TRIVIAL"}, [](Context& ctx) {
                 Rng rng(77);
                 const std::string msg = require_throws<PreconditionError>(
                     [&] { first_order_word(random_skew(4, 1.0, rng), 0.01, ctx.haar(4, 0.1)); },
                     "kappa^2 <= c d^2 eps1 rejected");
                 require(msg.find("kappa^2") != std::string::npos, "error names the failed inequality", msg);
               }});
  v.push_back({{"genwords", "exp_splitting_zero", "TRIVIAL"}, [](Context& ctx) {
                 const SplittingResult r = exp_splitting_word(SkewHermitian::zero(4), 8, ctx.haar(4, 0.1));
                 require(r.measured == 0.0 && r.word.empty(), "A = 0 gives the identity exactly");
               }});
  v.push_back({{"genwords", "exp_splitting_rate", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 ComplexMatrix a = ComplexMatrix::Zero(4, 4);
                 a(0, 0) = Complex(0.0, 0.5);
                 a(1, 1) = Complex(0.0, -0.5);
                 const SkewHermitian diag = SkewHermitian::from_matrix(a);
                 const ComplexMatrix ea = expm(diag).matrix();
                 std::vector<double> affine;
                 for (std::size_t r : {16, 64, 256}) {
                   const SplittingResult s = exp_splitting_word(diag, r, reg);
                   require(s.measured <= s.bound, "measured within bound");
                   ComplexMatrix p = identity(4);
                   const ComplexMatrix step = identity(4) + a / static_cast<double>(r);
                   for (std::size_t k = 0; k < r; ++k) p = p * step;
                   require_near(s.affine_error, distance(ea, p), 1e-12, "affine error matches direct product");
                   affine.push_back(s.affine_error);
                 }
                 for (std::size_t k = 1; k < affine.size(); ++k) {
                   const double ratio = affine[k - 1] / affine[k];
                   require(ratio >= 2.5 && ratio <= 5.5, "affine error ratio in [2.5, 5.5]", num(ratio));
                 }
               }});
  v.push_back({{"genwords", "exp_splitting_d2_over_r", "TRIVIAL"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 Rng rng(78);
                 const SkewHermitian a = random_skew(4, 0.5, rng);
                 const SplittingResult r8 = exp_splitting_word(a, 8, reg);
                 const SplittingResult r16 = exp_splitting_word(a, 16, reg);
                 require(r8.d2_over_r == 2.0 * r16.d2_over_r, "doubling r halves d^2 / r");
                 require_throws<PreconditionError>([&] { exp_splitting_word(random_skew(4, 3.0, rng), 8, reg); },
                                                   "r below ceil(10 ||A||^2) rejected");
               }});
  v.push_back({{"genwords", "sk_depth0", "TRIVIAL"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.atoms();
                 const NetApproximator net(reg);
                 const NetIndex::Entry& e = reg.net().entry(reg.net().size() / 3);
                 const Unitary target = Unitary::from_matrix(from_quaternion(e.point));
                 const SkResult r = sk_refine(target, net, 0);
                 require(r.word == reg.place(reg.net().word(reg.net().size() / 3), 0), "depth 0 returns the net word");
                 require(r.error <= net.accuracy(), "error at most eps0");
               }});
  v.push_back({{"genwords", "sk_contraction", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.atoms();
                 const NetApproximator net(reg);
                 SkOptions o;
                 o.c_sk = calibrated_sk_constant(net);
                 const double eps0 = net.accuracy();
                 const double closed = std::pow(o.c_sk, -2.0) * std::pow(o.c_sk * eps0, std::pow(1.5, 4));
                 Rng rng(79);
                 for (int t = 0; t < 10; ++t) {
                   const SkResult r = sk_refine(haar_su2(rng), net, 4, o);
                   require(r.error <= closed, "depth-4 error within c^-2 (c eps0)^(3/2)^4", num(r.error));
                   for (const SkLevel& l : r.levels) {
                     require(l.level_error <= std::max(l.predicted, o.floor), "level error within predicted bound",
                             "level " + std::to_string(l.level));
                     if (l.level > 0 && r.levels[l.level - 1].level_error > o.floor) {
                       require(l.level_error <= o.c_sk * std::pow(r.levels[l.level - 1].level_error, 1.5),
                               "eps_{n+1} <= c_sk eps_n^{3/2}", "level " + std::to_string(l.level));
                     }
                   }
                 }
               }});
  v.push_back({{"genwords", "sk_length", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.atoms();
                 const NetApproximator net(reg);
                 SkOptions o;
                 o.c_sk = calibrated_sk_constant(net);
                 Rng rng(80);
                 const double l0 = static_cast<double>(net.max_length());
                 for (int t = 0; t < 3; ++t) {
                   const SkResult r = sk_refine(haar_su2(rng), net, 5, o);
                   for (const SkLevel& l : r.levels) {
                     require(static_cast<double>(l.length) <= 2.0 * std::pow(5.0, static_cast<double>(l.level)) * l0,
                             "length at depth n at most 2 5^n L0", "level " + std::to_string(l.level));
                   }
                 }
               }});
  v.push_back({{"genwords", "compile_identity", "TRIVIAL"}, [](Context& ctx) {
                 const CompileResult r = compile(Unitary::identity(4), ctx.haar(4, 0.1), 1e-3);
                 require(r.word.empty() && r.measured_error == 0.0, "identity compiles to the empty word");
               }});
  v.push_back({{"genwords", "compile_embedded", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 Rng rng(81);
                 const Unitary target = embed({0, 1, haar_su2_block(rng)}, 4);
                 const CompileResult r = compile(target, reg, 1e-3);
                 const double e = distance(eval(r.word, reg), target);
                 require(e < 1e-3, "error below 1e-3", num(e));
                 require_near(r.measured_error, e, 1e-12, "reported error is the measured one");
               }});
  v.push_back({{"genwords", "compile_haar_polylog", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 Rng rng(82);
                 const Unitary target = haar_sud(4, rng);
                 const double tau = 1e-4;
                 const CompileResult a = compile(target, reg, tau);
                 const CompileResult b = compile(target, reg, tau / 10.0);
                 require(distance(eval(a.word, reg), target) < tau, "error below tau");
                 require(distance(eval(b.word, reg), target) < tau / 10.0, "error below tau / 10");
                 const double ratio = static_cast<double>(b.word.length()) / static_cast<double>(a.word.length());
                 const double allowed = 5.0 * std::pow(std::log(10.0 / tau) / std::log(1.0 / tau), 5.0);
                 require(ratio <= allowed, "length ratio polylog in 1/tau", num(ratio) + " > " + num(allowed));
               }});
  v.push_back({{"genwords", "compile_stage_bounds", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(3, 0.1);
                 Rng rng(83);
                 for (int t = 0; t < 3; ++t) {
                   const CompileResult r = compile(haar_sud(3, rng), reg, 1e-3);
                   require(r.measured_error < 1e-3, "error below tau");
                   for (const StageReport& s : r.stages) {
                     require(s.measured <= s.bound, "stage bound dominates measured error", s.name);
                   }
                 }
               }});
  v.push_back({{"genwords", "givens_diagonal", "TRIVIAL"}, [](Context&) {
                 ComplexMatrix m = ComplexMatrix::Zero(3, 3);
                 m(0, 0) = std::polar(1.0, 0.4);
                 m(1, 1) = std::polar(1.0, -1.1);
                 m(2, 2) = std::polar(1.0, 0.7);
                 const Unitary u = Unitary::from_matrix(m);
                 const auto factors = givens_oracle(u);
                 for (const EmbeddedRotation& f : factors) {
                   require(std::abs(f.block(1, 0)) < 1e-14, "zero mixing angle for diagonal targets");
                 }
                 require(distance(givens_product(factors, 3), m) < 1e-10, "product reproduces the target");
               }});
  v.push_back({{"genwords", "givens_two_level", "TRIVIAL"}, [](Context&) {
                 Rng rng(84);
                 const Unitary u = embed({0, 1, haar_su2_block(rng)}, 5);
                 const auto factors = givens_oracle(u);
                 require(factors.size() == 1 && factors[0].i == 0 && factors[0].j == 1,
                         "single factor at (0, 1)", std::to_string(factors.size()) + " factors");
                 require(distance(givens_product(factors, 5), u.matrix()) < 1e-10, "product reproduces the target");
               }});
  v.push_back({{"genwords", "givens_haar", "DERIVED"}, [](Context&) {
                 Rng rng(85);
                 for (int t = 0; t < 10; ++t) {
                   const Unitary u = haar_sud(6, rng);
                   const auto factors = givens_oracle(u);
                   require(factors.size() <= 15, "at most d(d-1)/2 factors");
                   const double e = distance(givens_product(factors, 6), u.matrix());
                   require(e < 1e-10, "product reproduces the target within 1e-10", num(e));
                 }
               }});
  v.push_back({{"genwords", "givens_cross_validation", "DERIVED"}, [](Context& ctx) {
                 const GeneratorRegistry& reg = ctx.haar(4, 0.1);
                 Rng rng(86);
                 for (int t = 0; t < 20; ++t) {
                   const Unitary h = haar_sud(4, rng);
                   const CompileResult r = compile(h, reg, 1e-3);
                   const double e = distance(eval(r.word, reg).matrix(), givens_product(givens_oracle(h), 4));
                   require(e <= 2e-3, "compile and Givens agree within 2e-3", num(e));
                 }
               }});
  v.push_back({{"genwords", "commutator_split", "DERIVED"}, [](Context&) {
                 Rng rng(87);
                 for (std::size_t d : {2, 3, 4}) {
                   const SkewHermitian a = random_skew(d, 0.01, rng);
                   const ComplexMatrix delta = expm(a).matrix();
                   const CommutatorPair p = balanced_commutator(delta);
                   const ComplexMatrix c = p.v * p.w * p.v.adjoint() * p.w.adjoint();
                   require(distance(c, delta) < 1e-12, "v w v^-1 w^-1 reproduces delta");
                   const double scale = std::sqrt(0.01);
                   require(distance(p.v, identity(d)) < 2.0 * scale && distance(p.w, identity(d)) < 2.0 * scale,
                           "factors of order sqrt(||delta - I||)");
                 }
               }});
}

// harness ------------------------------------------------------------------

int run_captured(const RunConfig& cfg, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(cfg, out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

void harness_checks(std::vector<Check>& v) {
  v.push_back({{"harness", "walk_d4", "DERIVED"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "walk";
                 cfg.d = 4;
                 cfg.n_chains = 2000;
                 cfg.seed = 7;
                 cfg.output_dir = ctx.dir("walk_d4").string();
                 require(run_captured(cfg) == kExitOk, "walk exits 0");
                 const Json j = read_json(fs::path(cfg.output_dir) / "walk_d4.json");
                 require(j.at("steps_to_target").get<std::size_t>() > 0, "steps_to_target > 0");
                 require(j.at("seed").get<std::uint64_t>() == 7, "seed recorded");
                 const std::string csv = slurp(fs::path(cfg.output_dir) / "walk_d4.csv");
                 require(csv.find("step,abs_mean_trace,abs_second_moment_dev\n") != std::string::npos,
                         "trajectory CSV header");
               }});
  v.push_back({{"harness", "walk_d2", "DERIVED"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "walk";
                 cfg.d = 2;
                 cfg.output_dir = ctx.dir("walk_d2").string();
                 require(run_captured(cfg) == kExitOk, "walk exits 0");
                 const Json j = read_json(fs::path(cfg.output_dir) / "walk_d2.json");
                 require(j.at("steps_to_target").get<std::size_t>() == 1, "steps_to_target = 1 at d = 2");
               }});
  v.push_back({{"harness", "walk_missing_d", "TRIVIAL"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "walk";
                 cfg.output_dir = ctx.dir("walk_missing").string();
                 std::string err;
                 require(run_captured(cfg, &err) == kExitUsage, "missing d is a usage error");
                 require(err.find("d:") != std::string::npos, "message names the field", err);
               }});
  v.push_back({{"harness", "walk_not_mixed_exit", "TRIVIAL"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "walk";
                 cfg.d = 8;
                 cfg.n_chains = 200;
                 cfg.max_steps = 3;
                 cfg.output_dir = ctx.dir("walk_budget").string();
                 require(run_captured(cfg) == kExitNotMixed, "budget exhausted exits 3");
               }});
  v.push_back({{"harness", "spectra_d4", "DERIVED"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "spectra";
                 cfg.d = 4;
                 cfg.output_dir = ctx.dir("spectra_d4").string();
                 require(run_captured(cfg) == kExitOk, "spectra exits 0");
                 const Json j = read_json(fs::path(cfg.output_dir) / "spectra_d4.json");
                 require_near(j.at("degree1").at("second_eigenvalue").get<double>(), 0.5, 1e-12,
                              "degree-1 factor 0.5 in report");
                 require(j.contains("gap") && j.at("degree2").contains("d_gap"), "report carries gap and d * gap");
               }});
  v.push_back({{"harness", "spectra_d2", "DERIVED"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "spectra";
                 cfg.d = 2;
                 cfg.output_dir = ctx.dir("spectra_d2").string();
                 require(run_captured(cfg) == kExitOk, "spectra exits 0");
                 const Json j = read_json(fs::path(cfg.output_dir) / "spectra_d2.json");
                 require(std::abs(j.at("degree2").at("second_eigenvalue").get<double>()) < 1e-10,
                         "degree-2 second eigenvalue 0 in report");
               }});
  v.push_back({{"harness", "spectra_too_large", "TRIVIAL"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "spectra";
                 cfg.d = 65;
                 cfg.output_dir = ctx.dir("spectra_d65").string();
                 std::string err;
                 require(run_captured(cfg, &err) == kExitUsage, "d = 65 exact is rejected");
                 require(err.find("monte_carlo") != std::string::npos, "error advises the Monte Carlo method", err);
               }});
  v.push_back({{"harness", "compile_identity", "TRIVIAL"}, [](Context& ctx) {
                 const fs::path dir = ctx.dir("compile_identity");
                 write_matrix_file(dir / "target.txt", identity(3));
                 RunConfig cfg;
                 cfg.command = "compile";
                 cfg.target_file = (dir / "target.txt").string();
                 cfg.output_dir = dir.string();
                 require(run_captured(cfg) == kExitOk, "compile exits 0");
                 std::ifstream in(dir / "compile_d3.word");
                 require(parse_word(in).empty(), "identity target gives the empty word");
               }});
  v.push_back({{"harness", "compile_embedded", "DERIVED"}, [](Context& ctx) {
                 const fs::path dir = ctx.dir("compile_embedded");
                 Rng rng(91);
                 write_matrix_file(dir / "target.txt", embed({1, 2, haar_su2_block(rng)}, 4).matrix());
                 RunConfig cfg;
                 cfg.command = "compile";
                 cfg.tau = 1e-3;
                 cfg.target_file = (dir / "target.txt").string();
                 cfg.output_dir = dir.string();
                 require(run_captured(cfg) == kExitOk, "compile exits 0");
                 const Json j = read_json(dir / "compile_d4.json");
                 require(j.at("measured_error").get<double>() < 1e-3, "measured_error < 1e-3 in report");
                 require(j.at("stage_breakdown").is_array() && j.contains("length"), "report has length and stages");
                 std::ifstream in(dir / "compile_d4.word");
                 require(parse_word(in).length() == j.at("length").get<std::size_t>(), "word file matches the report");
               }});
  v.push_back({{"harness", "compile_garbled", "TRIVIAL"}, [](Context& ctx) {
                 const fs::path dir = ctx.dir("compile_garbled");
                 {
                   std::ofstream out(dir / "target.txt");
                   out << "# target\n1 0 0 0\n0 0 x1 0\n";
                 }
                 RunConfig cfg;
                 cfg.command = "compile";
                 cfg.target_file = (dir / "target.txt").string();
                 cfg.output_dir = dir.string();
                 std::string err;
                 require(run_captured(cfg, &err) == kExitUsage, "garbled input is a parse error");
                 require(err.find("line 3") != std::string::npos, "error names the line", err);
               }});
  v.push_back({{"harness", "sweep_haar", "DERIVED"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "sweep";
                 for (std::size_t d = 3; d <= 12; ++d) cfg.d_list.push_back(d);
                 cfg.n_chains = 2000;
                 cfg.output_dir = ctx.dir("sweep").string();
                 require(run_captured(cfg) == kExitOk, "sweep exits 0");
                 const Json j = read_json(fs::path(cfg.output_dir) / "sweep.json");
                 const double slope = j.at("exponent_estimate").get<double>();
                 require(slope > 0.5 && slope < 4.0, "exponent in (0.5, 4)", num(slope));
                 require(j.at("r_squared").get<double>() > 0.9, "r^2 > 0.9");
               }});
  v.push_back({{"harness", "sweep_too_few", "TRIVIAL"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "sweep";
                 cfg.d_list = {3, 4};
                 cfg.output_dir = ctx.dir("sweep_few").string();
                 require(run_captured(cfg) == kExitUsage, "two entries rejected");
               }});
  v.push_back({{"harness", "sweep_synthetic", "TRIVIAL"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "sweep";
                 cfg.d_list = {3, 4, 5, 6, 8};
                 cfg.synthetic_exponent = 2.0;
                 cfg.output_dir = ctx.dir("sweep_synthetic").string();
                 require(run_captured(cfg) == kExitOk, "synthetic sweep exits 0");
                 const Json j = read_json(fs::path(cfg.output_dir) / "sweep.json");
                 require_near(j.at("exponent_estimate").get<double>(), 2.0, 1e-9, "exponent 2.0");
               }});
  v.push_back({{"harness", "reproducible_outputs", "DERIVED"}, [](Context& ctx) {
                 RunConfig cfg;
                 cfg.command = "walk";
                 cfg.d = 3;
                 cfg.n_chains = 500;
                 cfg.seed = 5;
                 std::string first[2];
                 for (int k = 0; k < 2; ++k) {
                   cfg.output_dir = ctx.dir("repro").string();
                   require(run_captured(cfg) == kExitOk, "walk exits 0");
                   first[k] = slurp(fs::path(cfg.output_dir) / "walk_d3.json") +
                              slurp(fs::path(cfg.output_dir) / "walk_d3.csv");
                 }
                 require(first[0] == first[1], "identical config gives byte-identical outputs");
                 const Json j = read_json(fs::path(cfg.output_dir) / "walk_d3.json");
                 require(j.at("run_config").at("seed").get<std::uint64_t>() == 5, "run config embedded");
               }});
  v.push_back({{"harness", "selftest_fault_injection", "TRIVIAL"}, [](Context& ctx) {
                 const bool prev = fault::embed_sign();
                 fault::set_embed_sign(true);
                 std::string msg;
                 try {
                   embed_explicit(ctx);
                 } catch (const CheckFailure& e) {
                   msg = e.what();
                 }
                 fault::set_embed_sign(prev);
                 require(msg.find("invariant 'embed sends e0 to e1'") != std::string::npos,
                         "injected embed sign fault is caught by a named invariant", msg);
               }});
  v.push_back({{"harness", "selftest_filter", "TRIVIAL"}, [](Context&) {
                 RunConfig cfg;
                 cfg.command = "selftest";
                 cfg.filter = "spectra/scaling_fit_power";
                 std::ostringstream out;
                 const CommandOutcome r = cmd_selftest(cfg, out);
                 require(r.exit_code == kExitOk, "filtered run passes");
                 require(out.str().find("PASS spectra/scaling_fit_power_law") != std::string::npos &&
                             out.str().find("walk/") == std::string::npos,
                         "filter selects only the matching checks", out.str());
               }});
}

std::vector<Check> all_checks() {
  std::vector<Check> v;
  matcore_checks(v);
  walk_checks(v);
  spectra_checks(v);
  genwords_checks(v);
  harness_checks(v);
  return v;
}

bool selected(const SelfTestCase& c, const std::string& filter) {
  if (filter.empty() || filter == c.module) return true;
  const std::string full = c.module + "/" + c.name;
  return full.compare(0, filter.size(), filter) == 0;
}

}  // namespace

std::vector<SelfTestCase> selftest_catalog() {
  std::vector<SelfTestCase> out;
  for (const Check& c : all_checks()) out.push_back(c.info);
  return out;
}

CommandOutcome cmd_selftest(const RunConfig& cfg, std::ostream& out) {
  const bool prev_fault = fault::embed_sign();
  if (cfg.inject_embed_fault) fault::set_embed_sign(true);
  Context ctx;
  std::size_t passed = 0, failed = 0;
  for (const Check& c : all_checks()) {
    if (!selected(c.info, cfg.filter)) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      c.run(ctx);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string label = c.info.module + "/" + c.info.name + " [" + c.info.tag + "]";
    if (failure.empty()) {
      ++passed;
      out << "PASS " << label << " (" << num(secs) << " s)\n";
    } else {
      ++failed;
      out << "FAIL " << label << ": " << failure << "\n";
    }
    out.flush();
  }
  fault::set_embed_sign(prev_fault);
  CommandOutcome res;
  if (passed + failed == 0) throw UsageError("filter: no check matches '" + cfg.filter + "'");
  res.summary = "selftest: " + std::to_string(passed) + " passed, " + std::to_string(failed) + " failed";
  res.exit_code = failed == 0 ? kExitOk : kExitNumerical;
  return res;
}

}  // namespace liewalk
