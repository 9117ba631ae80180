#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <tuple>

#include "liewalk/commutator.hpp"
#include "liewalk/givens.hpp"
#include "liewalk/synthesis.hpp"
#include "support.hpp"

namespace liewalk {
namespace {

using test::eye;

Word random_word(const GeneratorRegistry& reg, std::size_t len, Rng& rng) {
  std::vector<Letter> letters;
  for (std::size_t k = 0; k < len; ++k) {
    letters.push_back({static_cast<GeneratorId>(rng.below(reg.size())), rng.coin() ? 1 : -1});
  }
  return Word(std::move(letters));
}

/// Product of the letters' embedded rotations, multiplied naively.
ComplexMatrix naive_eval(const Word& w, const GeneratorRegistry& reg) {
  ComplexMatrix p = eye(reg.dim());
  for (const Letter& l : w.letters()) {
    const ComplexMatrix g = embed(reg.rotation(l.generator), reg.dim()).matrix();
    p = p * (l.exponent > 0 ? g : ComplexMatrix(g.adjoint()));
  }
  return p;
}

ComplexMatrix swap_matrix(std::size_t d, std::size_t i, std::size_t j) {
  ComplexMatrix p = eye(d);
  p.row(static_cast<Eigen::Index>(i)).swap(p.row(static_cast<Eigen::Index>(j)));
  return p;
}

double calibrated_c_sk(const NetApproximator& net) {
  Rng rng(71, 7);
  return 1.5 * calibrate_sk_constant(net, 20, 4, rng);
}

// Words -----------------------------------------------------------------------

TEST(Word, InverseIsAnInvolution) {
  Rng rng(1);
  const Word w = random_word(test::haar_registry(3), 30, rng);
  EXPECT_EQ(w.inverse().inverse(), w);
  EXPECT_EQ(w.inverse().length(), 30u);
  EXPECT_EQ(w.inverse().letters().front().generator, w.letters().back().generator);
  EXPECT_EQ(w.inverse().letters().front().exponent, -w.letters().back().exponent);
}

TEST(Word, PowerAndAppend) {
  const Word a = Word::single(3, -1);
  EXPECT_EQ(a.power(5).length(), 5u);
  EXPECT_TRUE(a.power(0).empty());
  Word b = a;
  b.append(Word::single(4));
  EXPECT_EQ(b.length(), 2u);
  EXPECT_EQ(b.letters()[1], (Letter{4, 1}));
  EXPECT_THROW(Word::single(1, 2), PreconditionError);
}

TEST(Word, EvalMatchesNaiveProduct) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const Word w = random_word(reg, 1 + rng.below(60), rng);
    EXPECT_LT(distance(eval(w, reg).matrix(), naive_eval(w, reg)), 1e-12);
  }
}

TEST(Word, ConcatIsAHomomorphism) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  Rng rng(3);
  const Word a = random_word(reg, 25, rng), b = random_word(reg, 17, rng);
  EXPECT_LT(distance(eval(concat(a, b), reg), eval(a, reg) * eval(b, reg)), 1e-12);
  EXPECT_LT(distance(eval(concat(a, a.inverse()), reg).matrix(), eye(4)), 1e-12);
  EXPECT_EQ(distance(eval(Word(), reg).matrix(), eye(4)), 0.0);
}

TEST(Word, RepairKeepsTheValue) {
  const GeneratorRegistry& reg = test::haar_registry(3);
  Rng rng(4);
  const Word w = random_word(reg, 500, rng);
  EXPECT_LT(distance(eval(w, reg, 7), eval(w, reg)), 1e-11);
  EXPECT_THROW(eval(w, reg, 0), PreconditionError);
}

TEST(WordIo, RoundTrip) {
  Rng rng(5);
  const Word w = random_word(test::haar_registry(3), 40, rng);
  std::stringstream s;
  write_word(s, w);
  EXPECT_EQ(parse_word(s), w);
}

TEST(WordIo, CommentsAndBlankLines) {
  std::istringstream in("# header\n\n3 1\n  # indented comment\n7 -1\n");
  const Word w = parse_word(in);
  ASSERT_EQ(w.length(), 2u);
  EXPECT_EQ(w.letters()[1], (Letter{7, -1}));
}

TEST(WordIo, ErrorsNameTheLine) {
  for (auto [text, line] : {std::pair<const char*, std::size_t>{"1 1\n2 2\n", 2}, {"x 1\n", 1},
                            {"1 1\n1 1\n-4 1\n", 3}, {"1 1 1\n", 1}, {"5\n", 1}}) {
    std::istringstream in(text);
    try {
      parse_word(in);
      ADD_FAILURE() << "no error for '" << text << "'";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
  EXPECT_THROW(read_word_file("/nonexistent/word.txt"), ParseError);
}

// Cells and the net index -------------------------------------------------------

TEST(Cells, QuaternionRoundTripAndDistance) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const Block g = haar_su2_block(rng), h = haar_su2_block(rng);
    EXPECT_LT((from_quaternion(to_quaternion(g)) - g).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(quaternion_distance(to_quaternion(g), to_quaternion(h)), distance(ComplexMatrix(g), ComplexMatrix(h)),
                1e-12);
  }
}

TEST(Cells, CentersLieInTheirCells) {
  const Su2CellGrid grid(0.4);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) EXPECT_EQ(grid.cell_of(grid.center(c)), c);
}

TEST(Cells, DiameterBoundHoldsOnSamples) {
  for (double eps1 : {0.9, 0.5, 0.25}) {
    const Su2CellGrid grid(eps1);
    EXPECT_LE(grid.diameter_bound(), eps1 + 1e-12);
    Rng rng(7);
    double worst = 0.0;
    for (int s = 0; s < 200000; ++s) {
      const Quaternion q = to_quaternion(haar_su2_block(rng));
      worst = std::max(worst, quaternion_distance(q, grid.center(grid.cell_of(q))));
    }
    EXPECT_LE(worst, grid.diameter_bound()) << "eps1 = " << eps1;
  }
  EXPECT_THROW(Su2CellGrid(0.0), PreconditionError);
  EXPECT_THROW(Su2CellGrid(1.5), PreconditionError);
}

TEST(NetIndex, NearestMatchesBruteForce) {
  const NetIndex& net = test::atom_registry(8).net();
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const Quaternion q = to_quaternion(haar_su2_block(rng));
    double best = 1e9;
    for (std::size_t e = 0; e < net.size(); ++e) best = std::min(best, quaternion_distance(q, net.entry(e).point));
    const NetIndex::Hit hit = net.nearest(q);
    EXPECT_NEAR(hit.distance, best, 1e-14);
    EXPECT_NEAR(quaternion_distance(q, net.entry(hit.entry).point), hit.distance, 1e-14);
  }
}

TEST(NetIndex, EntryWordsEvaluateToTheirPoints) {
  const GeneratorRegistry& reg = test::atom_registry(8);
  const NetIndex& net = reg.net();
  for (std::size_t e = 0; e < net.size(); e += std::max<std::size_t>(1, net.size() / 50)) {
    const std::vector<PoolLetter> letters = net.word(e);
    EXPECT_EQ(letters.size(), net.entry(e).length);
    EXPECT_LE(letters.size(), net.max_word_length());
    Block g = Block::Identity();
    for (const PoolLetter& l : letters) {
      const Block p = reg.pool_element(l.pool_index);
      g = g * (l.exponent > 0 ? p : Block(p.adjoint()));
    }
    EXPECT_LT(quaternion_distance(to_quaternion(g), net.entry(e).point), 1e-12);
  }
}

TEST(NetIndex, DeclaredAccuracyCoversProbes) {
  const GeneratorRegistry& reg = test::atom_registry(12);
  Rng rng(9);
  for (int t = 0; t < 2000; ++t) {
    EXPECT_LE(reg.net().nearest(to_quaternion(haar_su2_block(rng))).distance, reg.net().accuracy());
  }
}

// Registry --------------------------------------------------------------------

TEST(Registry, IdLayout) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  const std::size_t p = reg.pool_size();
  EXPECT_EQ(reg.size(), 4 * p + 3);
  EXPECT_EQ(reg.pool_generator(2, 5), 2 * p + 5);
  EXPECT_EQ(reg.transposition(1), 4 * p + 1);
  EXPECT_EQ(reg.block_of(reg.pool_generator(3, 1)), 3u);
  EXPECT_EQ(reg.move_to_block(reg.pool_generator(0, 7), 2), reg.pool_generator(2, 7));
  EXPECT_EQ(reg.provenance(0), Provenance::sampled_net);
  EXPECT_EQ(reg.provenance(reg.transposition(0)), Provenance::signed_transposition);
  const EmbeddedRotation wrap = reg.rotation(reg.pool_generator(3, 0));
  EXPECT_EQ(wrap.i, 3u);
  EXPECT_EQ(wrap.j, 0u);
  EXPECT_THROW(reg.rotation(static_cast<GeneratorId>(reg.size())), PreconditionError);
  EXPECT_THROW(reg.transposition(3), PreconditionError);
  EXPECT_THROW(reg.block_of(reg.transposition(0)), PreconditionError);
}

TEST(Registry, TranspositionGeneratorsMatchTheirDefinition) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(distance(embed(reg.rotation(reg.transposition(k)), 4), embed(signed_transposition(k, k + 1, 4), 4)), 0.0);
  }
}

TEST(Registry, HaarCertificateIsComplete) {
  const GeneratorRegistry& reg = test::haar_registry(3);
  const CoverageCertificate& c = reg.certificate();
  EXPECT_TRUE(c.complete());
  EXPECT_EQ(c.cells, reg.grid().cell_count());
  EXPECT_LE(c.diameter_bound, c.eps1);
  Rng rng(10);
  for (int t = 0; t < 100; ++t) EXPECT_TRUE(reg.covers(haar_su2_block(rng)));
}

TEST(Registry, AtomPoolUsesTheAtoms) {
  const GeneratorRegistry& reg = test::atom_registry();
  ASSERT_EQ(reg.pool_size(), 2u);
  EXPECT_EQ(reg.provenance(0), Provenance::atom);
  const LocalMeasure eta = LocalMeasure::two_axis(0.5);
  const auto& atoms = eta.atoms();
  EXPECT_LT((reg.pool_element(0) - atoms[0].element).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((reg.pool_element(1) - atoms[1].element).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Registry, Reproducible) {
  RegistryOptions o;
  o.eps1 = 0.5;
  const GeneratorRegistry a = GeneratorRegistry::build(3, LocalMeasure::haar(), o);
  const GeneratorRegistry b = GeneratorRegistry::build(3, LocalMeasure::haar(), o);
  ASSERT_EQ(a.pool_size(), b.pool_size());
  for (std::size_t p = 0; p < a.pool_size(); ++p) EXPECT_EQ(a.pool_element(p), b.pool_element(p));
}

// Transpositions and ladders ------------------------------------------------------

TEST(SignedTransposition, Layout) {
  const ComplexMatrix m = embed(signed_transposition(0, 2, 3), 3).matrix();
  ComplexMatrix want = ComplexMatrix::Zero(3, 3);
  want(2, 0) = 1.0;
  want(0, 2) = -1.0;
  want(1, 1) = 1.0;
  EXPECT_EQ(m, want);
  EXPECT_THROW(signed_transposition(1, 1, 3), PreconditionError);
  EXPECT_THROW(signed_transposition(0, 3, 3), PreconditionError);
}

TEST(SignedTransposition, FourthPowerIsIdentity) {
  const Unitary s = embed(signed_transposition(1, 4, 6), 6);
  const Unitary s2 = s * s;
  EXPECT_GT(distance(s2.matrix(), eye(6)), 1.0);
  EXPECT_LT(distance((s2 * s2).matrix(), eye(6)), 1e-15);
}

TEST(Ladder, IndicesAndLength) {
  EXPECT_EQ(ladder_indices(1, 4), (std::vector<std::size_t>{3, 2, 1, 2, 3}));
  EXPECT_EQ(ladder_indices(2, 3), (std::vector<std::size_t>{2}));
  for (auto [d, i, j] : {std::tuple<std::size_t, std::size_t, std::size_t>{3, 0, 2}, {5, 1, 4}, {6, 0, 5}}) {
    const GeneratorRegistry& reg = test::haar_registry(d);
    const Word w = transposition_ladder(i, j, reg);
    EXPECT_EQ(w.length(), 2 * (j - i) - 1);
    const ComplexMatrix v = eval(w, reg).matrix();
    EXPECT_LT(distance(ComplexMatrix(v.cwiseAbs().cast<Complex>()), swap_matrix(d, i, j)), 1e-14);
    EXPECT_LT(distance(v, naive_eval(w, reg)), 1e-14);
  }
  EXPECT_THROW(transposition_ladder(2, 2, test::haar_registry(3)), PreconditionError);
}

// approx_gamma ----------------------------------------------------------------------

TEST(ApproxGamma, NetLookupWithinEps1Budget) {
  const GeneratorRegistry& reg = test::haar_registry(5);
  Rng rng(11);
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 4}, {1, 3}, {2, 4}}) {
    const Block g = haar_su2_block(rng);
    const WordResult r = approx_gamma_ij(g, i, j, reg);
    const double e = distance(eval(r.word, reg), embed({i, j, g}, 5));
    EXPECT_NEAR(r.measured, e, 1e-12);
    EXPECT_LE(e, r.bound);
    EXPECT_LE(r.bound, reg.eps1() + 1e-15);
    EXPECT_EQ(r.word.length() >= 1, true);
  }
}

TEST(ApproxGamma, ToleranceRefinesTheBlock) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  GammaOptions o;
  o.tolerance = 1e-5;
  Rng rng(12);
  for (int t = 0; t < 3; ++t) {
    const Block g = haar_su2_block(rng);
    const WordResult r = approx_gamma_ij(g, 0, 3, reg, o);
    EXPECT_LE(distance(eval(r.word, reg), embed({0, 3, g}, 4)), 1e-5);
  }
}

TEST(ApproxGamma, RejectsBadInput) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  EXPECT_THROW(approx_gamma_ij(Block::Identity(), 2, 1, reg), PreconditionError);
  EXPECT_THROW(approx_gamma_ij(Block::Identity(), 0, 4, reg), PreconditionError);
  EXPECT_THROW(approx_gamma_ij(2.0 * Block::Identity(), 0, 1, reg), PreconditionError);
}

// First-order words and splitting --------------------------------------------------

TEST(ElementaryBlocks, SumToTheMatrix) {
  Rng rng(13);
  for (std::size_t d : {2, 3, 5}) {
    const SkewHermitian a = test::random_skew(d, 1.0, rng);
    ComplexMatrix sum = ComplexMatrix::Zero(a.matrix().rows(), a.matrix().cols());
    for (const ElementaryBlock& b : elementary_blocks(a.matrix())) {
      EXPECT_LT(std::abs(b.x.trace()), 1e-14);
      EXPECT_LT((b.x + b.x.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
      sum += block_matrix(b, d);
    }
    EXPECT_LT(distance(sum, a.matrix()), 1e-13);
  }
  EXPECT_TRUE(elementary_blocks(ComplexMatrix::Zero(4, 4)).empty());
}

TEST(FirstOrder, BoundHoldsAcrossDimensions) {
  for (std::size_t d : {3, 4, 6}) {
    const GeneratorRegistry& reg = test::haar_registry(d);
    Rng rng(14 + d);
    const double dd = static_cast<double>(d);
    const double kappa = 1.0 / (4.0 * dd * dd);
    FirstOrderOptions o;
    o.c = 0.01;
    o.block_tolerance = kappa * kappa / (2.0 * dd * dd);
    for (int t = 0; t < 2; ++t) {
      const SkewHermitian a = test::random_skew(d, 1.0, rng);
      const FirstOrderResult r = first_order_word(a, kappa, reg, o);
      const double e = distance(eval(r.word, reg).matrix(), eye(d) + kappa * a.matrix());
      EXPECT_NEAR(r.measured, e, 1e-12);
      EXPECT_LE(e, r.bound) << "d = " << d;
      EXPECT_NEAR(r.bound, r.quadratic_term + r.net_term, 1e-15);
      EXPECT_NEAR(r.d2_kappa2, dd * dd * kappa * kappa, 1e-15);
    }
  }
}

TEST(FirstOrder, PreconditionNamesTheInequality) {
  Rng rng(17);
  try {
    first_order_word(test::random_skew(4, 1.0, rng), 0.01, test::haar_registry(4));
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("kappa^2"), std::string::npos);
  }
  EXPECT_THROW(first_order_word(test::random_skew(3, 1.0, rng), 0.5, test::haar_registry(4)), DimensionError);
}

TEST(ExpSplitting, BoundHoldsAndAffineErrorMatchesProduct) {
  const GeneratorRegistry& reg = test::haar_registry(3);
  Rng rng(18);
  const SkewHermitian a = test::random_skew(3, 0.8, rng);
  for (std::size_t r : {8, 32}) {
    const SplittingResult s = exp_splitting_word(a, r, reg);
    const double e = distance(eval(s.word, reg), expm(a));
    EXPECT_NEAR(s.measured, e, 1e-12);
    EXPECT_LE(e, s.bound);
    ComplexMatrix p = eye(3);
    for (std::size_t k = 0; k < r; ++k) p = p * (eye(3) + a.matrix() / static_cast<double>(r));
    EXPECT_NEAR(s.affine_error, distance(expm(a).matrix(), p), 1e-12);
    EXPECT_DOUBLE_EQ(s.d2_over_r, 9.0 / static_cast<double>(r));
  }
}

TEST(ExpSplitting, WordErrorDecaysLikeOneOverR) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  Rng rng(19);
  const SkewHermitian a = test::random_skew(4, 1.0, rng);
  std::vector<double> err;
  for (std::size_t r : {16, 64, 256}) err.push_back(exp_splitting_word(a, r, reg).measured);
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double ratio = err[k - 1] / err[k];
    EXPECT_GE(ratio, 2.5) << "r step " << k;
    EXPECT_LE(ratio, 5.5) << "r step " << k;
  }
}

TEST(ExpSplitting, RejectsTooFewRepetitions) {
  Rng rng(20);
  EXPECT_THROW(exp_splitting_word(test::random_skew(4, 2.0, rng), 39, test::haar_registry(4)), PreconditionError);
  EXPECT_NO_THROW(exp_splitting_word(test::random_skew(3, 0.3, rng), 1, test::haar_registry(3)));
}

// Solovay-Kitaev ------------------------------------------------------------------

/// Base that ignores its target and always answers with one fixed rotation: refinement can never contract.
class FixedAnswerBase : public BaseApproximator {
 public:
  std::size_t dim() const override { return 2; }
  Approximation approximate(const ComplexMatrix&) const override {
    return {Word(), embed({0, 1, su2_block(Complex(std::cos(0.05), std::sin(0.05)), 0.0)}, 2).matrix()};
  }
  double accuracy() const override { return 0.1; }
  std::size_t max_length() const override { return 0; }
};

TEST(SolovayKitaev, NonContractingBaseThrows) {
  const FixedAnswerBase base;
  Rng rng(3);
  SkOptions o;
  o.c_sk = 1.0;
  for (std::size_t depth : {1, 2, 3}) EXPECT_THROW(sk_refine(haar_su2(rng), base, depth, o), NumericalError);
}

TEST(SolovayKitaev, DepthZeroIsTheBaseAnswer) {
  const GeneratorRegistry& reg = test::atom_registry();
  const NetApproximator net(reg);
  Rng rng(21);
  const Unitary target = haar_su2(rng);
  const SkResult r = sk_refine(target, net, 0);
  EXPECT_EQ(r.word, net.approximate(target.matrix()).word);
  EXPECT_LE(r.error, net.accuracy());
  ASSERT_EQ(r.levels.size(), 1u);
}

TEST(SolovayKitaev, ContractsWithinThePredictedBounds) {
  const GeneratorRegistry& reg = test::atom_registry();
  const NetApproximator net(reg);
  SkOptions o;
  o.c_sk = calibrated_c_sk(net);
  const double b0 = net.accuracy();
  EXPECT_LT(o.c_sk * o.c_sk * b0, 1.0);
  Rng rng(22);
  for (int t = 0; t < 5; ++t) {
    const Unitary target = haar_su2(rng);
    const SkResult r = sk_refine(target, net, 3, o);
    ASSERT_EQ(r.levels.size(), 4u);
    EXPECT_NEAR(distance(eval(r.word, reg), target), r.error, 1e-12);
    for (const SkLevel& l : r.levels) {
      const double closed = std::pow(o.c_sk, -2.0) * std::pow(o.c_sk * o.c_sk * b0, std::pow(1.5, l.level));
      EXPECT_NEAR(l.predicted, closed, 1e-12 * std::max(1.0, closed));
      EXPECT_LE(l.level_error, std::max(l.predicted, o.floor));
      EXPECT_LE(l.error, l.level_error + 1e-15);
    }
  }
}

TEST(SolovayKitaev, DepthFourMeetsTheClosedForm) {
  const GeneratorRegistry& reg = test::atom_registry();
  const NetApproximator net(reg);
  SkOptions o;
  o.c_sk = calibrated_c_sk(net);
  const double closed = std::pow(o.c_sk, -2.0) * std::pow(o.c_sk * net.accuracy(), std::pow(1.5, 4));
  Rng rng(32);
  for (int t = 0; t < 3; ++t) {
    const SkResult r = sk_refine(haar_su2(rng), net, 4, o);
    EXPECT_LE(r.error, closed);
    for (std::size_t k = 1; k < r.levels.size(); ++k) {
      const double prev = r.levels[k - 1].level_error;
      if (prev > o.floor) {
        EXPECT_LE(r.levels[k].level_error, o.c_sk * std::pow(prev, 1.5)) << "level " << k;
      }
    }
  }
}

TEST(SolovayKitaev, LengthQuintuplesPerLevel) {
  const GeneratorRegistry& reg = test::atom_registry();
  const NetApproximator net(reg);
  SkOptions o;
  o.c_sk = calibrated_c_sk(net);
  Rng rng(33);
  const SkResult r = sk_refine(haar_su2(rng), net, 4, o);
  const double l0 = static_cast<double>(net.max_length());
  for (const SkLevel& l : r.levels) {
    EXPECT_LE(static_cast<double>(l.length), 2.0 * std::pow(5.0, static_cast<double>(l.level)) * l0);
  }
  EXPECT_EQ(r.word.length(), r.levels.back().length);
}

TEST(SolovayKitaev, RefineToTolerance) {
  const GeneratorRegistry& reg = test::atom_registry();
  const NetApproximator net(reg);
  SkOptions o;
  o.c_sk = calibrated_c_sk(net);
  Rng rng(23);
  const Unitary target = haar_su2(rng);
  const SkResult r = sk_refine_to(target, net, 1e-4, 6, o);
  EXPECT_LE(r.error, 1e-4);
  EXPECT_LE(distance(eval(r.word, reg), target), 1e-4);
  EXPECT_THROW(sk_refine_to(target, net, 0.0, 6, o), PreconditionError);
}

TEST(SolovayKitaev, DimensionMismatch) {
  const NetApproximator net(test::atom_registry());
  Rng rng(24);
  EXPECT_THROW(sk_refine(haar_sud(3, rng), net, 1), DimensionError);
}

// Commutators -----------------------------------------------------------------------

TEST(Commutator, BalancedSplitOfSmallRotations) {
  Rng rng(25);
  for (std::size_t d : {2, 3, 5}) {
    for (double size : {1e-2, 1e-4}) {
      const ComplexMatrix delta = expm(test::random_skew(d, size, rng)).matrix();
      const CommutatorPair p = balanced_commutator(delta);
      EXPECT_LT(distance(p.v * p.w * p.v.adjoint() * p.w.adjoint(), delta), 1e-12);
      EXPECT_LT(unitarity_defect(p.v), 1e-12);
      EXPECT_LT(unitarity_defect(p.w), 1e-12);
      EXPECT_LT(distance(p.v, eye(d)), 2.0 * std::sqrt(size));
      EXPECT_LT(distance(p.w, eye(d)), 2.0 * std::sqrt(size));
    }
  }
}

TEST(Commutator, LogNearIdentityInvertsExp) {
  Rng rng(26);
  const SkewHermitian a = test::random_skew(4, 0.3, rng);
  EXPECT_LT(distance(log_near_identity(expm(a).matrix()), a.matrix()), 1e-12);
}

// Compilation ----------------------------------------------------------------------

TEST(Compile, IdentityIsTheEmptyWord) {
  const CompileResult r = compile(Unitary::identity(3), test::haar_registry(3), 1e-3);
  EXPECT_TRUE(r.word.empty());
  EXPECT_EQ(r.measured_error, 0.0);
}

TEST(Compile, MinusIdentity) {
  const GeneratorRegistry& reg = test::haar_registry(4);
  const Unitary minus = Unitary::from_matrix(-eye(4));
  const CompileResult r = compile(minus, reg, 1e-3);
  EXPECT_LT(distance(eval(r.word, reg), minus), 1e-3);
}

TEST(Compile, HaarTargetsAtDimensionThree) {
  const GeneratorRegistry& reg = test::haar_registry(3);
  Rng rng(27);
  for (int t = 0; t < 3; ++t) {
    const Unitary target = haar_sud(3, rng);
    const CompileResult r = compile(target, reg, 1e-3);
    const double e = distance(eval(r.word, reg), target);
    EXPECT_LT(e, 1e-3);
    EXPECT_NEAR(r.measured_error, e, 1e-12);
    EXPECT_DOUBLE_EQ(r.eps0, std::min(1.0 / 9.0, 0.04));
    for (const StageReport& s : r.stages) EXPECT_LE(s.measured, s.bound) << s.name;
  }
}

TEST(Compile, DimensionTwoUsesTheNetAsBase) {
  const GeneratorRegistry& reg = test::atom_registry();
  Rng rng(28);
  const Unitary target = haar_su2(rng);
  const CompileResult r = compile(target, reg, 1e-3);
  EXPECT_LT(distance(eval(r.word, reg), target), 1e-3);
}

TEST(Compile, RejectsBadInput) {
  const GeneratorRegistry& reg = test::haar_registry(3);
  Rng rng(29);
  EXPECT_THROW(compile(haar_sud(4, rng), reg, 1e-3), DimensionError);
  EXPECT_THROW(compile(haar_sud(3, rng), reg, 0.0), PreconditionError);
}

// Givens oracle -------------------------------------------------------------------

TEST(Givens, ReproducesHaarTargets) {
  Rng rng(30);
  for (std::size_t d : {2, 3, 5, 8}) {
    const Unitary u = haar_sud(d, rng);
    const std::vector<EmbeddedRotation> f = givens_oracle(u);
    EXPECT_LE(f.size(), d * (d - 1) / 2);
    for (const EmbeddedRotation& r : f) {
      EXPECT_EQ(r.j, r.i + 1);
      EXPECT_LT(unitarity_defect(r.block), 1e-12);
      EXPECT_NEAR(std::abs(r.block.determinant() - 1.0), 0.0, 1e-12);
    }
    EXPECT_LT(distance(givens_product(f, d), u.matrix()), 1e-10);
  }
}

TEST(Givens, IdentityHasNoFactors) {
  EXPECT_TRUE(givens_oracle(Unitary::identity(5)).empty());
}

TEST(Givens, AgreesWithCompiledWords) {
  const GeneratorRegistry& reg = test::haar_registry(3);
  Rng rng(31);
  for (int t = 0; t < 3; ++t) {
    const Unitary h = haar_sud(3, rng);
    const CompileResult r = compile(h, reg, 1e-3);
    EXPECT_LE(distance(eval(r.word, reg).matrix(), givens_product(givens_oracle(h), 3)), 2e-3);
  }
}

}  // namespace
}  // namespace liewalk
