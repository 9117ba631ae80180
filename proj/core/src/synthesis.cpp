#include "liewalk/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "liewalk/errors.hpp"

namespace liewalk {

namespace {

void require_pair(std::size_t i, std::size_t j, std::size_t d, const char* what) {
  if (i >= j) throw PreconditionError(std::string(what) + ": requires i < j");
  if (j >= d) throw PreconditionError(std::string(what) + ": index out of range");
}

ComplexMatrix matrix_power(ComplexMatrix base, std::size_t r) {
  ComplexMatrix result = ComplexMatrix::Identity(base.rows(), base.cols());
  while (r > 0) {
    if (r & 1U) result = result * base;
    r >>= 1U;
    if (r > 0) base = base * base;
  }
  return result;
}

/// (prod_b exp(x_b / r))^r with exact block exponentials.
ComplexMatrix exact_splitting(const std::vector<ElementaryBlock>& blocks, std::size_t d, std::size_t r) {
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix step = ComplexMatrix::Identity(n, n);
  for (const ElementaryBlock& b : blocks) {
    const Block g = expm_skew(ComplexMatrix(b.x / static_cast<double>(r)));
    apply_right(step, EmbeddedRotation{b.i, b.j, g});
  }
  return matrix_power(step, r);
}

double splitting_constant(const std::vector<ElementaryBlock>& blocks, std::size_t d) {
  std::vector<ComplexMatrix> full;
  full.reserve(blocks.size());
  for (const ElementaryBlock& b : blocks) full.push_back(block_matrix(b, d));
  double c = 0.0;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      const std::size_t sa[2] = {blocks[a].i, blocks[a].j};
      const std::size_t sb[2] = {blocks[b].i, blocks[b].j};
      const bool overlap = sa[0] == sb[0] || sa[0] == sb[1] || sa[1] == sb[0] || sa[1] == sb[1];
      if (!overlap) continue;
      c += operator_norm(full[a] * full[b] - full[b] * full[a]);
    }
  }
  return 0.5 * c;
}

Block as_special_block(const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw DimensionError("expected a 2x2 matrix");
  return Block(m);
}

}  // namespace

EmbeddedRotation signed_transposition(std::size_t i, std::size_t j, std::size_t d) {
  if (i == j) throw PreconditionError("signed_transposition: i must differ from j");
  if (i >= d || j >= d) throw PreconditionError("signed_transposition: index out of range");
  return {i, j, su2_block(Complex(0.0), Complex(1.0))};
}

std::vector<std::size_t> ladder_indices(std::size_t i, std::size_t j) {
  if (i >= j) throw PreconditionError("transposition_ladder: requires i < j");
  std::vector<std::size_t> out;
  for (std::size_t k = j - 1; k > i; --k) out.push_back(k);
  out.push_back(i);
  for (std::size_t k = i + 1; k < j; ++k) out.push_back(k);
  return out;
}

Word transposition_ladder(std::size_t i, std::size_t j, const GeneratorRegistry& reg) {
  require_pair(i, j, reg.dim(), "transposition_ladder");
  std::vector<Letter> letters;
  for (std::size_t k : ladder_indices(i, j)) letters.push_back({reg.transposition(k), 1});
  return Word(std::move(letters));
}

Approximation NetApproximator::approximate(const ComplexMatrix& target) const {
  const NetIndex::Hit hit = reg_.net().nearest(to_quaternion(as_special_block(target)));
  Approximation a;
  a.word = reg_.place(reg_.net().word(hit.entry), 0);
  a.value = from_quaternion(reg_.net().entry(hit.entry).point);
  return a;
}

WordResult approx_gamma_ij(const Block& gamma, std::size_t i, std::size_t j, const GeneratorRegistry& reg,
                           const GammaOptions& opt) {
  const std::size_t d = reg.dim();
  require_pair(i, j, d, "approx_gamma_ij");
  if ((gamma.adjoint() * gamma - Block::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(gamma.determinant() - Complex(1.0)) > 1e-9) {
    throw PreconditionError("approx_gamma_ij: gamma must be special unitary");
  }
  Block local = gamma;
  Word ladder;
  if (j > i + 1) {
    ladder = transposition_ladder(i + 1, j, reg);
    // Sign s with P e_{i+1} = s e_j; conjugation then needs diag(1, s) gamma diag(1, s).
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(i + 1)) = 1.0;
    const auto& letters = ladder.letters();
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
      const EmbeddedRotation rot = reg.rotation(it->generator);
      ComplexMatrix col = v;
      apply_left(rot, col);
      v = col;
    }
    const double s = v(static_cast<Eigen::Index>(j)).real();
    local(0, 1) *= s;
    local(1, 0) *= s;
  }
  if (!reg.covers(local)) {
    throw NumericalError("approx_gamma_ij: net coverage missing for the required cell at block (" +
                         std::to_string(i) + ", " + std::to_string(i + 1) + ")");
  }
  const NetApproximator net(reg);
  WordResult out;
  Word block_word;
  if (opt.tolerance) {
    const SkResult sk = sk_refine_to(Unitary::trusted(ComplexMatrix(local), 0.0, true), net, *opt.tolerance,
                                     opt.max_sk_depth, opt.sk);
    if (sk.error > *opt.tolerance) {
      throw NumericalError("approx_gamma_ij: block tolerance not reached within the depth limit");
    }
    block_word = sk.word;
    out.bound = *opt.tolerance;
  } else {
    block_word = net.approximate(local).word;
    out.bound = reg.eps1();
  }
  std::vector<Letter> moved;
  moved.reserve(block_word.length());
  for (const Letter& l : block_word.letters()) moved.push_back({reg.move_to_block(l.generator, i), l.exponent});
  out.word = ladder;
  out.word.append(Word(std::move(moved)));
  out.word.append(ladder.inverse());
  out.measured = distance(eval(out.word, reg), embed({i, j, gamma}, d));
  return out;
}

std::vector<ElementaryBlock> elementary_blocks(const ComplexMatrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<ElementaryBlock> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex z = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (z == Complex(0.0)) continue;
      ElementaryBlock b{i, j, Block::Zero()};
      b.x(0, 1) = z;
      b.x(1, 0) = -std::conj(z);
      out.push_back(b);
    }
  }
  double c = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    c += a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).imag();
    if (c == 0.0) continue;
    ElementaryBlock b{k, k + 1, Block::Zero()};
    b.x(0, 0) = Complex(0.0, c);
    b.x(1, 1) = Complex(0.0, -c);
    out.push_back(b);
  }
  return out;
}

ComplexMatrix block_matrix(const ElementaryBlock& b, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  const Eigen::Index idx[2] = {static_cast<Eigen::Index>(b.i), static_cast<Eigen::Index>(b.j)};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(idx[r], idx[c]) = b.x(r, c);
  return m;
}

FirstOrderResult first_order_word(const SkewHermitian& a, double kappa, const GeneratorRegistry& reg,
                                  const FirstOrderOptions& opt) {
  const std::size_t d = reg.dim();
  if (a.dim() != d) throw DimensionError("first_order_word: A dimension differs from the registry");
  if (!(kappa > 0.0)) throw PreconditionError("first_order_word: kappa must be positive");
  const double eps_eff = opt.block_tolerance.value_or(reg.eps1());
  const double dd = static_cast<double>(d);
  const std::vector<ElementaryBlock> blocks = elementary_blocks(a.matrix());
  // A = 0 needs no letters, so the net accuracy is irrelevant.
  if (!blocks.empty() && !(kappa * kappa > opt.c * dd * dd * eps_eff)) {
    throw PreconditionError("first_order_word: kappa^2 > c d^2 eps1 fails (" + std::to_string(kappa * kappa) +
                            " <= " + std::to_string(opt.c * dd * dd * eps_eff) + ")");
  }
  const auto n = static_cast<Eigen::Index>(d);
  FirstOrderResult res;
  res.d2_kappa2 = dd * dd * kappa * kappa;
  const ComplexMatrix affine = ComplexMatrix::Identity(n, n) + kappa * a.matrix();
  res.blocks = blocks.size();
  double s = 0.0;
  GammaOptions gopt;
  gopt.tolerance = opt.block_tolerance;
  gopt.sk = opt.sk;
  for (const ElementaryBlock& b : blocks) {
    const ComplexMatrix x = kappa * b.x;
    s += operator_norm(x);
    const Block g = expm_skew(x);
    const WordResult w = approx_gamma_ij(g, b.i, b.j, reg, gopt);
    res.word.append(w.word);
    res.net_term += w.bound;
  }
  res.quadratic_term = std::expm1(s) - s;
  res.bound = res.quadratic_term + res.net_term;
  res.value = eval(res.word, reg).matrix();
  res.measured = distance(res.value, affine);
  return res;
}

SplittingResult exp_splitting_word(const SkewHermitian& a, std::size_t r, const GeneratorRegistry& reg,
                                   const SplittingOptions& opt) {
  const std::size_t d = reg.dim();
  if (a.dim() != d) throw DimensionError("exp_splitting_word: A dimension differs from the registry");
  const double norm = a.norm();
  const auto r_min = static_cast<std::size_t>(std::ceil(10.0 * norm * norm));
  if (r < 1 || r < r_min) {
    throw PreconditionError("exp_splitting_word: r = " + std::to_string(r) + " is below ceil(10 ||A||^2) = " +
                            std::to_string(r_min));
  }
  const auto n = static_cast<Eigen::Index>(d);
  const double rr = static_cast<double>(r);
  const double dd = static_cast<double>(d);
  SplittingResult res;
  res.r = r;
  res.d2_over_r = dd * dd / rr;
  const ComplexMatrix target = expm_skew(a.matrix());
  res.affine_error =
      distance(target, matrix_power(ComplexMatrix::Identity(n, n) + a.matrix() / rr, r));
  if (norm == 0.0) {
    res.value = ComplexMatrix::Identity(n, n);
    return res;
  }
  const std::vector<ElementaryBlock> blocks = elementary_blocks(a.matrix());
  FirstOrderOptions fo_opt;
  fo_opt.c = opt.c;
  fo_opt.block_tolerance = opt.block_tolerance.value_or(1.0 / (2.0 * opt.c * dd * dd * rr * rr));
  fo_opt.sk = opt.sk;
  const FirstOrderResult fo = first_order_word(a, 1.0 / rr, reg, fo_opt);
  res.word = fo.word.power(r);
  res.value = matrix_power(fo.value, r);
  res.split_term = splitting_constant(blocks, d) / rr;
  res.net_term = rr * fo.net_term;
  res.bound = res.split_term + res.net_term;
  res.measured = distance(target, res.value);
  return res;
}

SplittingApproximator::SplittingApproximator(const GeneratorRegistry& reg, double eps0, SplittingOptions opt)
    : reg_(reg), eps0_(eps0), opt_(opt) {
  if (!(eps0 > 0.0)) throw PreconditionError("SplittingApproximator: eps0 must be positive");
}

SplittingResult SplittingApproximator::approximate_with_report(const ComplexMatrix& target) const {
  const std::size_t d = reg_.dim();
  const auto n = static_cast<Eigen::Index>(d);
  const SkewHermitian a = log_special(Unitary::trusted(target, 0.0, true));
  const std::vector<ElementaryBlock> blocks = elementary_blocks(a.matrix());
  const double norm = a.norm();
  if (blocks.empty()) {
    SplittingResult res;
    res.r = 1;
    res.value = ComplexMatrix::Identity(n, n);
    res.measured = distance(target, res.value);
    return res;
  }
  const double half = 0.5 * eps0_;
  std::size_t r = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(10.0 * norm * norm)));
  double err = distance(target, exact_splitting(blocks, d, r));
  if (err > half) {
    r = std::max(r + 1, static_cast<std::size_t>(std::ceil(static_cast<double>(r) * err / half)));
    while ((err = distance(target, exact_splitting(blocks, d, r))) > half) {
      r = static_cast<std::size_t>(std::ceil(1.25 * static_cast<double>(r)));
    }
  }
  const double rr = static_cast<double>(r);
  const double dd = static_cast<double>(d);
  const double m = static_cast<double>(blocks.size());
  SplittingOptions so = opt_;
  so.block_tolerance = std::min(1.0 / (2.0 * opt_.c * dd * dd * rr * rr), half / (rr * m));
  return exp_splitting_word(a, r, reg_, so);
}

Approximation SplittingApproximator::approximate(const ComplexMatrix& target) const {
  SplittingResult res = approximate_with_report(target);
  return {std::move(res.word), std::move(res.value)};
}

CompileResult compile(const Unitary& target, const GeneratorRegistry& reg, double tau, const CompileOptions& opt) {
  const std::size_t d = reg.dim();
  if (target.dim() != d) throw DimensionError("compile: target dimension differs from the registry");
  if (!(tau > 0.0)) throw PreconditionError("compile: tau must be positive");
  if (!target.special() || std::abs(target.matrix().determinant() - Complex(1.0)) > 1e-8) {
    throw PreconditionError("compile: target must be special unitary");
  }
  const auto n = static_cast<Eigen::Index>(d);
  const ComplexMatrix& u = target.matrix();
  CompileResult res;
  if (distance(u, ComplexMatrix::Identity(n, n)) <= tau) {
    res.eps0 = 0.0;
    res.measured_error = distance(u, ComplexMatrix::Identity(n, n));
    res.stages.push_back({"identity", tau, res.measured_error, 0});
    return res;
  }
  auto run_sk = [&](const BaseApproximator& base) {
    const SkResult sk = sk_refine_to(target, base, tau, opt.max_sk_depth, opt.sk);
    for (const SkLevel& l : sk.levels) {
      if (l.level == 0) continue;
      res.stages.push_back({"sk_level_" + std::to_string(l.level), l.bound, l.error, l.length});
    }
    res.word = sk.word;
    res.sk_used = sk.levels.size() > 1;
  };
  if (d == 2) {
    const NetApproximator net(reg);
    res.eps0 = net.accuracy();
    const Approximation a0 = net.approximate(u);
    res.stages.push_back({"net_lookup", net.accuracy(), distance(u, a0.value), a0.word.length()});
    run_sk(net);
  } else {
    res.eps0 = std::min(std::pow(static_cast<double>(d), -opt.C), opt.sk_threshold);
    const SplittingApproximator base(reg, res.eps0, opt.splitting);
    SplittingResult coarse = base.approximate_with_report(u);
    res.stages.push_back({"exp_splitting", coarse.bound, coarse.measured, coarse.word.length()});
    if (coarse.measured <= tau || tau >= res.eps0) {
      res.word = std::move(coarse.word);
    } else {
      run_sk(base);
    }
  }
  res.measured_error = distance(eval(res.word, reg).matrix(), u);
  if (res.measured_error > tau) {
    throw NumericalError("compile: tolerance " + std::to_string(tau) + " not reached (error " +
                         std::to_string(res.measured_error) + ")");
  }
  return res;
}

}  // namespace liewalk
