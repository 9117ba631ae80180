#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liewalk/matcore.hpp"
#include "liewalk/rng.hpp"

namespace liewalk {

/// Second moment E[conj(g) (x) g] of a 2x2 block law, as a 4x4 matrix
/// indexed (2a + c, 2b + e) -> E[conj(g_ab) g_ce].
using BlockMoment = Eigen::Matrix4cd;

struct Atom {
  Block element;
  double weight = 0.0;
};

/// The single-block law eta on SU(2): exact Haar, or finitely many weighted atoms.
class LocalMeasure {
 public:
  enum class Kind { haar, atoms };

  /// Haar measure on SU(2).
  static LocalMeasure haar();
  /// Validates weights (nonnegative, summing to 1 within 1e-12) and that every atom is
  /// special unitary with defect < 1e-10. With `symmetric`, also checks closure under inversion.
  static LocalMeasure from_atoms(std::vector<Atom> atoms, bool symmetric = false);
  /// Two rotations exp(i angle sigma_x) and exp(i angle sigma_z), equal weights;
  /// with `symmetric`, their inverses are added.
  static LocalMeasure two_axis(double angle, bool symmetric = false);
  /// Single atom of weight 1.
  static LocalMeasure point(const Block& g);

  Kind kind() const { return kind_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  /// Declared closure under inversion. Haar counts as symmetric.
  bool symmetric() const { return symmetric_; }
  /// Checked closure under inversion (atoms within `tol` of an inverse with equal weight).
  bool is_symmetric(double tol = 1e-10) const;

  Block sample(Rng& rng) const;
  /// E[g] over eta.
  Block mean() const;
  /// E[conj(g) (x) g] over eta.
  BlockMoment second_moment() const;
  /// Short description, e.g. "haar" or "atoms(4)".
  std::string describe() const;

 private:
  Kind kind_ = Kind::haar;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  bool symmetric_ = true;
};

/// Parses atoms, one per line as `w re(a) im(a) re(b) im(b)`, encoding [[a, -conj(b)], [b, conj(a)]].
/// Blank lines and lines starting with '#' are skipped. Weights summing away from 1 by
/// more than 1e-9 are renormalized and a warning is appended.
struct MeasureParse {
  LocalMeasure measure;
  std::vector<std::string> warnings;
};
MeasureParse parse_measure(std::istream& in, bool symmetric = false);
MeasureParse read_measure_file(const std::string& path, bool symmetric = false);
void write_measure(std::ostream& out, const LocalMeasure& eta);

/// A 2x2 special unitary acting on coordinates (i, j), fixing the others.
/// The pair is stored in sampling order; (d-1, 0) is a valid walk step.
struct EmbeddedRotation {
  std::size_t i = 0;
  std::size_t j = 1;
  Block block = Block::Identity();

  EmbeddedRotation inverse() const { return {i, j, block.adjoint()}; }
};

/// d x d identity with M(idx[r], idx[c]) = block(r, c), idx = {i, j}.
Unitary embed(const EmbeddedRotation& rot, std::size_t d);
namespace fault {
/// Mutation hook for the self-test: while set, embed flips the sign of the lower
/// off-diagonal block entry.
void set_embed_sign(bool on);
bool embed_sign();
}  // namespace fault

/// x <- embed(rot) * x, touching only rows i and j.
void apply_left(const EmbeddedRotation& rot, ComplexMatrix& x);
/// x <- x * embed(rot), touching only columns i and j.
void apply_right(ComplexMatrix& x, const EmbeddedRotation& rot);

enum class WalkVariant { fixed_nu, random_environment };

struct WalkConfig {
  std::size_t d = 2;
  LocalMeasure eta = LocalMeasure::haar();
  WalkVariant variant = WalkVariant::fixed_nu;
  /// For random_environment, seeds the realization omega; chains replaying the same seed share it.
  std::uint64_t seed = 0;
  /// Polar repair of the chain state every this many multiplications.
  std::size_t repair_interval = 10000;

  void validate() const;
};

const char* to_string(WalkVariant v);
WalkVariant parse_variant(const std::string& s);

/// One step of nu: i uniform on Z/dZ, j = i + 1 mod d, block from eta. For the
/// random-environment variant the block is drawn, then inverted on a fair coin.
EmbeddedRotation sample_step(const WalkConfig& cfg, Rng& rng);

/// A fixed realization omega of the time-indexed environment (i_k, g_k), derived
/// from cfg.seed. Step k is reproducible in isolation.
class Environment {
 public:
  explicit Environment(const WalkConfig& cfg);
  /// The environment's rotation at time k (before the per-chain coin).
  EmbeddedRotation at(std::size_t k) const;
  /// Step k as seen by one chain: at(k) or its inverse on `coin_rng`'s fair coin.
  EmbeddedRotation step(std::size_t k, Rng& coin_rng) const;

 private:
  WalkConfig cfg_;
};

struct ChainState {
  Unitary current;
  std::size_t steps_taken = 0;
  std::size_t multiplication_count = 0;
};

ChainState initial_state(std::size_t d);
/// Left-multiplies `rot` into the state and repairs drift at the configured cadence.
void advance(ChainState& state, const EmbeddedRotation& rot, std::size_t repair_interval);
/// current = g_n ... g_2 g_1.
ChainState run_chain(const WalkConfig& cfg, std::size_t n_steps, Rng& rng);

struct ConvolutionReport {
  std::size_t ell = 0;
  std::size_t samples = 0;
  double abs_mean_trace = 0.0;
  double second_moment_dev = 0.0;
  /// max over entries of |E u_ab|.
  double max_entry_mean = 0.0;
};

/// Samples ell-fold products of eta and reports the deviation of low moments from Haar.
ConvolutionReport convolution_power_check(const LocalMeasure& eta, std::size_t ell, std::size_t samples,
                                          Rng& rng);

}  // namespace liewalk
