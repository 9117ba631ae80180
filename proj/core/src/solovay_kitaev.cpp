#include "liewalk/solovay_kitaev.hpp"

#include <algorithm>
#include <cmath>

#include "liewalk/commutator.hpp"
#include "liewalk/errors.hpp"

namespace liewalk {

namespace {

class Engine {
 public:
  Engine(const BaseApproximator& base, const SkOptions& opt) : base_(base), opt_(opt) {}

  /// Standard recursion: depth n refines the depth n-1 answer once.
  Approximation solve(const ComplexMatrix& u, std::size_t n) {
    Approximation w = base_.approximate(u);
    note(0, operator_norm(u - w.value));
    for (std::size_t k = 1; k <= n; ++k) {
      w = refine(u, w, k - 1);
      note(k, operator_norm(u - w.value));
    }
    return w;
  }

  /// One level: u w^-1 = V W V^-1 W^-1 with V, W approximated at depth k.
  Approximation refine(const ComplexMatrix& u, const Approximation& w, std::size_t k) {
    const ComplexMatrix delta = u * w.value.adjoint();
    const CommutatorPair pair = balanced_commutator(delta);
    const Approximation av = solve(pair.v, k);
    const Approximation aw = solve(pair.w, k);
    Approximation out;
    out.word = av.word;
    out.word.append(aw.word);
    out.word.append(av.word.inverse());
    out.word.append(aw.word.inverse());
    out.word.append(w.word);
    out.value = av.value * aw.value * av.value.adjoint() * aw.value.adjoint() * w.value;
    return out;
  }

  void note(std::size_t level, double err) {
    if (level_max_.size() <= level) level_max_.resize(level + 1, 0.0);
    level_max_[level] = std::max(level_max_[level], err);
  }

  const std::vector<double>& level_max() const { return level_max_; }

 private:
  const BaseApproximator& base_;
  SkOptions opt_;
  std::vector<double> level_max_;
};

void check_target(const Unitary& target, const BaseApproximator& base) {
  if (target.dim() != base.dim()) throw DimensionError("sk_refine: target dimension differs from the base");
}

SkLevel make_level(std::size_t level, double error, std::size_t length, const std::vector<double>& level_max,
                   const BaseApproximator& base, const SkOptions& opt, double predicted) {
  SkLevel l;
  l.level = level;
  l.error = error;
  l.level_error = level_max[level];
  l.bound = level == 0 ? base.accuracy() : std::max(opt.c_sk * std::pow(level_max[level - 1], 1.5), opt.floor);
  l.predicted = predicted;
  l.length = length;
  return l;
}

void check_contraction(const std::vector<SkLevel>& levels, const SkOptions& opt) {
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double prev = levels[k - 1].level_error;
    if (prev > opt.floor && levels[k].level_error >= prev) {
      throw NumericalError("sk_refine: level " + std::to_string(k) + " did not contract (" +
                           std::to_string(levels[k].level_error) + " >= " + std::to_string(prev) +
                           "); use a denser base net");
    }
  }
}

}  // namespace

SkResult sk_refine_to(const Unitary& target, const BaseApproximator& base, double tau, std::size_t max_depth,
                      const SkOptions& opt) {
  check_target(target, base);
  if (!(tau > 0.0)) throw PreconditionError("sk_refine: tolerance must be positive");
  Engine engine(base, opt);
  const ComplexMatrix& u = target.matrix();
  Approximation w = base.approximate(u);
  double err = operator_norm(u - w.value);
  engine.note(0, err);
  SkResult res;
  double predicted = base.accuracy();
  res.levels.push_back(make_level(0, err, w.word.length(), engine.level_max(), base, opt, predicted));
  for (std::size_t k = 1; k <= max_depth && err > tau; ++k) {
    w = engine.refine(u, w, k - 1);
    err = operator_norm(u - w.value);
    engine.note(k, err);
    predicted = opt.c_sk * std::pow(predicted, 1.5);
    res.levels.push_back(make_level(k, err, w.word.length(), engine.level_max(), base, opt, predicted));
    // Later calls can raise earlier level maxima; refresh them.
    for (SkLevel& l : res.levels) l.level_error = engine.level_max()[l.level];
    check_contraction(res.levels, opt);
  }
  for (std::size_t k = 1; k < res.levels.size(); ++k) {
    res.levels[k].bound = std::max(opt.c_sk * std::pow(res.levels[k - 1].level_error, 1.5), opt.floor);
  }
  res.word = std::move(w.word);
  res.value = std::move(w.value);
  res.error = err;
  return res;
}

SkResult sk_refine(const Unitary& target, const BaseApproximator& base, std::size_t depth, const SkOptions& opt) {
  check_target(target, base);
  Engine engine(base, opt);
  const ComplexMatrix& u = target.matrix();
  Approximation w = base.approximate(u);
  std::vector<double> errors{operator_norm(u - w.value)};
  std::vector<std::size_t> lengths{w.word.length()};
  engine.note(0, errors.back());
  for (std::size_t k = 1; k <= depth; ++k) {
    w = engine.refine(u, w, k - 1);
    errors.push_back(operator_norm(u - w.value));
    lengths.push_back(w.word.length());
    engine.note(k, errors.back());
  }
  SkResult res;
  double predicted = base.accuracy();
  for (std::size_t k = 0; k <= depth; ++k) {
    if (k > 0) predicted = opt.c_sk * std::pow(predicted, 1.5);
    res.levels.push_back(make_level(k, errors[k], lengths[k], engine.level_max(), base, opt, predicted));
  }
  check_contraction(res.levels, opt);
  res.word = std::move(w.word);
  res.value = std::move(w.value);
  res.error = errors.back();
  return res;
}

double calibrate_sk_constant(const BaseApproximator& base, std::size_t targets, std::size_t depth, Rng& rng,
                             double floor) {
  if (depth < 1) throw PreconditionError("calibrate_sk_constant: depth must be at least 1");
  SkOptions opt;
  opt.floor = floor;
  double worst = 0.0;
  for (std::size_t t = 0; t < targets; ++t) {
    const Unitary u = base.dim() == 2 ? haar_su2(rng) : haar_sud(base.dim(), rng);
    const SkResult r = sk_refine(u, base, depth, opt);
    for (std::size_t k = 1; k < r.levels.size(); ++k) {
      if (r.levels[k].level_error <= floor) continue;
      worst = std::max(worst, r.levels[k].level_error / std::pow(r.levels[k - 1].level_error, 1.5));
    }
  }
  return worst;
}

}  // namespace liewalk
