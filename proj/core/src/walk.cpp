#include "liewalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <numeric>

#include "liewalk/errors.hpp"

namespace liewalk {

namespace {

constexpr std::uint64_t kEnvironmentSalt = 0x9e3779b97f4a7c15ULL;

std::atomic<bool> g_embed_sign_fault{false};

double block_defect(const Block& g) {
  return (g.adjoint() * g - Block::Identity()).cwiseAbs().sum();
}

}  // namespace

LocalMeasure LocalMeasure::haar() { return LocalMeasure(); }

LocalMeasure LocalMeasure::from_atoms(std::vector<Atom> atoms, bool symmetric) {
  if (atoms.empty()) throw PreconditionError("LocalMeasure: no atoms");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw PreconditionError("LocalMeasure: weights must be nonnegative");
    }
    if (!a.element.allFinite() || block_defect(a.element) >= 1e-10 ||
        std::abs(a.element.determinant() - Complex(1.0)) >= 1e-10) {
      throw PreconditionError("LocalMeasure: atom is not special unitary");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("LocalMeasure: weights do not sum to 1");
  LocalMeasure m;
  m.kind_ = Kind::atoms;
  m.atoms_ = std::move(atoms);
  m.symmetric_ = symmetric;
  m.cumulative_.resize(m.atoms_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < m.atoms_.size(); ++k) {
    acc += m.atoms_[k].weight;
    m.cumulative_[k] = acc;
  }
  if (symmetric && !m.is_symmetric()) {
    throw PreconditionError("LocalMeasure: declared symmetric but atoms are not closed under inversion");
  }
  return m;
}

LocalMeasure LocalMeasure::two_axis(double angle, bool symmetric) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  // exp(i angle sigma_x) = [[c, i s], [i s, c]], exp(i angle sigma_z) = diag(e^{i angle}, e^{-i angle}).
  const Block x = su2_block(Complex(c, 0.0), Complex(0.0, s));
  const Block z = su2_block(Complex(c, s), Complex(0.0, 0.0));
  std::vector<Atom> atoms;
  if (symmetric) {
    atoms = {{x, 0.25}, {x.adjoint(), 0.25}, {z, 0.25}, {z.adjoint(), 0.25}};
  } else {
    atoms = {{x, 0.5}, {z, 0.5}};
  }
  return from_atoms(std::move(atoms), symmetric);
}

LocalMeasure LocalMeasure::point(const Block& g) { return from_atoms({{g, 1.0}}, false); }

bool LocalMeasure::is_symmetric(double tol) const {
  if (kind_ == Kind::haar) return true;
  for (const Atom& a : atoms_) {
    const Block inv = a.element.adjoint();
    const bool found = std::any_of(atoms_.begin(), atoms_.end(), [&](const Atom& b) {
      return (b.element - inv).cwiseAbs().maxCoeff() <= tol && std::abs(b.weight - a.weight) <= tol;
    });
    if (!found) return false;
  }
  return true;
}

Block LocalMeasure::sample(Rng& rng) const {
  if (kind_ == Kind::haar) return haar_su2_block(rng);
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
  return atoms_[k].element;
}

Block LocalMeasure::mean() const {
  Block m = Block::Zero();
  if (kind_ == Kind::haar) return m;
  for (const Atom& a : atoms_) m += a.weight * a.element;
  return m;
}

BlockMoment LocalMeasure::second_moment() const {
  BlockMoment m = BlockMoment::Zero();
  if (kind_ == Kind::haar) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) m(3 * a, 3 * b) = 0.5;
    }
    return m;
  }
  for (const Atom& at : atoms_) {
    const Block& g = at.element;
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c)
        for (int b = 0; b < 2; ++b)
          for (int e = 0; e < 2; ++e) m(2 * a + c, 2 * b + e) += at.weight * std::conj(g(a, b)) * g(c, e);
  }
  return m;
}

std::string LocalMeasure::describe() const {
  if (kind_ == Kind::haar) return "haar";
  return "atoms(" + std::to_string(atoms_.size()) + (symmetric_ ? ",symmetric)" : ")");
}

Unitary embed(const EmbeddedRotation& rot, std::size_t d) {
  if (rot.i >= d || rot.j >= d) throw PreconditionError("embed: index out of range");
  if (rot.i == rot.j) throw PreconditionError("embed: i must differ from j");
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  const Eigen::Index idx[2] = {static_cast<Eigen::Index>(rot.i), static_cast<Eigen::Index>(rot.j)};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(idx[r], idx[c]) = rot.block(r, c);
  if (g_embed_sign_fault.load(std::memory_order_relaxed)) m(idx[1], idx[0]) = -m(idx[1], idx[0]);
  return Unitary::trusted(std::move(m), block_defect(rot.block) + 4.0 * kMachineEpsilon, true);
}

namespace fault {
void set_embed_sign(bool on) { g_embed_sign_fault.store(on); }
bool embed_sign() { return g_embed_sign_fault.load(); }
}  // namespace fault

void apply_left(const EmbeddedRotation& rot, ComplexMatrix& x) {
  const auto i = static_cast<Eigen::Index>(rot.i);
  const auto j = static_cast<Eigen::Index>(rot.j);
  const Block& b = rot.block;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const Complex xi = x(i, c);
    const Complex xj = x(j, c);
    x(i, c) = b(0, 0) * xi + b(0, 1) * xj;
    x(j, c) = b(1, 0) * xi + b(1, 1) * xj;
  }
}

void apply_right(ComplexMatrix& x, const EmbeddedRotation& rot) {
  const auto i = static_cast<Eigen::Index>(rot.i);
  const auto j = static_cast<Eigen::Index>(rot.j);
  const Block& b = rot.block;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Complex xi = x(r, i);
    const Complex xj = x(r, j);
    x(r, i) = xi * b(0, 0) + xj * b(1, 0);
    x(r, j) = xi * b(0, 1) + xj * b(1, 1);
  }
}

void WalkConfig::validate() const {
  if (d < 2) throw PreconditionError("WalkConfig: d must be at least 2");
  if (repair_interval == 0) throw PreconditionError("WalkConfig: repair_interval must be positive");
}

const char* to_string(WalkVariant v) {
  return v == WalkVariant::fixed_nu ? "fixed_nu" : "random_environment";
}

WalkVariant parse_variant(const std::string& s) {
  if (s == "fixed_nu" || s == "fixed") return WalkVariant::fixed_nu;
  if (s == "random_environment" || s == "random") return WalkVariant::random_environment;
  throw PreconditionError("unknown walk variant '" + s + "'");
}

EmbeddedRotation sample_step(const WalkConfig& cfg, Rng& rng) {
  EmbeddedRotation rot;
  rot.i = rng.below(cfg.d);
  rot.j = (rot.i + 1) % cfg.d;
  rot.block = cfg.eta.sample(rng);
  if (cfg.variant == WalkVariant::random_environment && rng.coin()) rot.block = rot.block.adjoint().eval();
  return rot;
}

Environment::Environment(const WalkConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

EmbeddedRotation Environment::at(std::size_t k) const {
  Rng rng(cfg_.seed ^ kEnvironmentSalt, k);
  EmbeddedRotation rot;
  rot.i = rng.below(cfg_.d);
  rot.j = (rot.i + 1) % cfg_.d;
  rot.block = cfg_.eta.sample(rng);
  return rot;
}

EmbeddedRotation Environment::step(std::size_t k, Rng& coin_rng) const {
  EmbeddedRotation rot = at(k);
  if (coin_rng.coin()) rot.block = rot.block.adjoint().eval();
  return rot;
}

ChainState initial_state(std::size_t d) { return ChainState{Unitary::identity(d), 0, 0}; }

void advance(ChainState& state, const EmbeddedRotation& rot, std::size_t repair_interval) {
  state.current.update([&](ComplexMatrix& m) { apply_left(rot, m); }, 4.0 * kMachineEpsilon);
  ++state.steps_taken;
  ++state.multiplication_count;
  if (state.multiplication_count % repair_interval == 0) {
    state.current = project_unitary(state.current.matrix());
  }
}

ChainState run_chain(const WalkConfig& cfg, std::size_t n_steps, Rng& rng) {
  cfg.validate();
  ChainState state = initial_state(cfg.d);
  if (cfg.variant == WalkVariant::random_environment) {
    const Environment env(cfg);
    for (std::size_t k = 0; k < n_steps; ++k) advance(state, env.step(k, rng), cfg.repair_interval);
  } else {
    for (std::size_t k = 0; k < n_steps; ++k) advance(state, sample_step(cfg, rng), cfg.repair_interval);
  }
  return state;
}

ConvolutionReport convolution_power_check(const LocalMeasure& eta, std::size_t ell, std::size_t samples,
                                          Rng& rng) {
  if (ell < 1) throw PreconditionError("convolution_power_check: ell must be at least 1");
  if (samples < 1) throw PreconditionError("convolution_power_check: samples must be at least 1");
  Complex trace_sum(0.0);
  double trace2_sum = 0.0;
  Block entry_sum = Block::Zero();
  for (std::size_t s = 0; s < samples; ++s) {
    Block g = eta.sample(rng);
    for (std::size_t k = 1; k < ell; ++k) g = (eta.sample(rng) * g).eval();
    const Complex t = g.trace();
    trace_sum += t;
    trace2_sum += std::norm(t);
    entry_sum += g;
  }
  const double n = static_cast<double>(samples);
  ConvolutionReport r;
  r.ell = ell;
  r.samples = samples;
  r.abs_mean_trace = std::abs(trace_sum / n);
  r.second_moment_dev = std::abs(trace2_sum / n - 1.0);
  r.max_entry_mean = (entry_sum / n).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace liewalk
