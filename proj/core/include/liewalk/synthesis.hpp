#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "liewalk/matcore.hpp"
#include "liewalk/registry.hpp"
#include "liewalk/solovay_kitaev.hpp"
#include "liewalk/walk.hpp"
#include "liewalk/word.hpp"

namespace liewalk {

/// Block [[0, -1], [1, 0]] at (i, j): e_i -> e_j, e_j -> -e_i, determinant 1.
EmbeddedRotation signed_transposition(std::size_t i, std::size_t j, std::size_t d);

/// Adjacent indices k of the ladder s_{j-1} ... s_{i+1} s_i s_{i+1} ... s_{j-1}, left to right.
std::vector<std::size_t> ladder_indices(std::size_t i, std::size_t j);
/// The ladder as a word of adjacent signed transpositions (length 2(j - i) - 1). Its
/// permutation part is the transposition (i j).
Word transposition_ladder(std::size_t i, std::size_t j, const GeneratorRegistry& reg);

/// SU(2) base approximator over the registry's net, returning words on block 0.
class NetApproximator : public BaseApproximator {
 public:
  explicit NetApproximator(const GeneratorRegistry& reg) : reg_(reg) {}
  std::size_t dim() const override { return 2; }
  Approximation approximate(const ComplexMatrix& target) const override;
  double accuracy() const override { return reg_.net().accuracy(); }
  std::size_t max_length() const override { return reg_.net().max_word_length(); }

 private:
  const GeneratorRegistry& reg_;
};

/// Result of a word builder: the word, a rigorous error bound and the measured error
/// against the intended element, in operator norm.
struct WordResult {
  Word word;
  double bound = 0.0;
  double measured = 0.0;
};

struct GammaOptions {
  /// When set, the block word is refined by SU(2) Solovay-Kitaev until its measured error
  /// is at most this value, and the bound is the tolerance. Otherwise a single net lookup
  /// with bound eps1.
  std::optional<double> tolerance;
  SkOptions sk;
  std::size_t max_sk_depth = 8;
};

/// Word for embed(gamma at (i, j)), i < j: ladder(i+1, j), the sign-compensated gamma on
/// block (i, i+1), then the inverse ladder. Ladders are exact, so the error is the block's.
WordResult approx_gamma_ij(const Block& gamma, std::size_t i, std::size_t j, const GeneratorRegistry& reg,
                           const GammaOptions& opt = {});

/// One elementary block of a traceless skew-Hermitian matrix: a 2x2 traceless skew-Hermitian
/// x at pair (i, j). Off-diagonal pairs carry [[0, z], [-conj z, 0]]; the diagonal is split
/// over adjacent pairs (k, k+1) as i c_k diag(1, -1).
struct ElementaryBlock {
  std::size_t i = 0;
  std::size_t j = 1;
  Block x = Block::Zero();
};
std::vector<ElementaryBlock> elementary_blocks(const ComplexMatrix& a);
/// The block as a d x d matrix.
ComplexMatrix block_matrix(const ElementaryBlock& b, std::size_t d);

struct FirstOrderOptions {
  /// c in kappa^2 > c d^2 eps1.
  double c = 1.0;
  /// Per-block tolerance; default one net lookup per block (eps1).
  std::optional<double> block_tolerance;
  SkOptions sk;
};

struct FirstOrderResult {
  Word word;
  /// Value of the word (tracked).
  ComplexMatrix value;
  /// Rigorous: ||prod exp(kappa X_b) - (I + kappa A)|| <= e^s - 1 - s with s = kappa sum ||X_b||.
  double quadratic_term = 0.0;
  /// d^2 kappa^2, reported for comparison.
  double d2_kappa2 = 0.0;
  /// Sum of block word bounds.
  double net_term = 0.0;
  double bound = 0.0;
  /// ||eval(word) - (I + kappa A)||.
  double measured = 0.0;
  std::size_t blocks = 0;
};

/// Realizes I + kappa A up to second order by the product of exp(kappa X_b) over the
/// elementary blocks, each drawn through approx_gamma_ij.
FirstOrderResult first_order_word(const SkewHermitian& a, double kappa, const GeneratorRegistry& reg,
                                  const FirstOrderOptions& opt = {});

struct SplittingOptions {
  double c = 1.0;
  /// Per-block tolerance; default 1 / (2 c d^2 r^2), the largest value kappa = 1/r admits.
  std::optional<double> block_tolerance;
  SkOptions sk;
};

struct SplittingResult {
  Word word;
  ComplexMatrix value;
  std::size_t r = 0;
  /// C_split / r with C_split = (1/2) sum_{a<b} ||[X_a, X_b]||: product-formula error.
  double split_term = 0.0;
  /// r times the per-repetition net term.
  double net_term = 0.0;
  /// d^2 / r, reported alongside and not part of the bound.
  double d2_over_r = 0.0;
  double bound = 0.0;
  /// ||e^A - eval(word)||.
  double measured = 0.0;
  /// ||e^A - (I + A/r)^r||, the affine splitting error.
  double affine_error = 0.0;
};

/// r-fold repetition of first_order_word(A, 1/r). Requires r >= ceil(10 ||A||^2).
SplittingResult exp_splitting_word(const SkewHermitian& a, std::size_t r, const GeneratorRegistry& reg,
                                   const SplittingOptions& opt = {});

/// SU(d) base approximator for d >= 3: exponential splitting to accuracy eps0.
/// The repetition count is the smallest tried value whose exact-block product is within
/// eps0 / 2; the block tolerance keeps the net term within the other half.
class SplittingApproximator : public BaseApproximator {
 public:
  SplittingApproximator(const GeneratorRegistry& reg, double eps0, SplittingOptions opt = {});
  std::size_t dim() const override { return reg_.dim(); }
  Approximation approximate(const ComplexMatrix& target) const override;
  double accuracy() const override { return eps0_; }
  std::size_t max_length() const override { return 0; }
  /// The full result for one target, including the bound terms.
  SplittingResult approximate_with_report(const ComplexMatrix& target) const;

 private:
  const GeneratorRegistry& reg_;
  double eps0_;
  SplittingOptions opt_;
};

struct CompileOptions {
  /// Coarse accuracy eps0 = min(d^{-C}, sk_threshold).
  double C = 2.0;
  double sk_threshold = 0.04;
  std::size_t max_sk_depth = 6;
  SkOptions sk;
  SplittingOptions splitting;
};

struct StageReport {
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  std::size_t length = 0;
};

struct CompileResult {
  Word word;
  double measured_error = 0.0;
  double eps0 = 0.0;
  bool sk_used = false;
  std::vector<StageReport> stages;
};

/// Full pipeline: principal logarithm, exponential splitting to eps0, then Solovay-Kitaev
/// to tau. At d = 2 the net itself is the base. The measured error is from eval(word).
CompileResult compile(const Unitary& target, const GeneratorRegistry& reg, double tau,
                      const CompileOptions& opt = {});

}  // namespace liewalk
