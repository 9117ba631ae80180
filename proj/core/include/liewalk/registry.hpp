#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "liewalk/cells.hpp"
#include "liewalk/net_index.hpp"
#include "liewalk/walk.hpp"
#include "liewalk/word.hpp"

namespace liewalk {

enum class Provenance { atom, sampled_net, composite, signed_transposition };
const char* to_string(Provenance p);

/// For every cell of the eps1 grid of SU(2), whether some net element lies in it.
struct CoverageCertificate {
  double eps1 = 0.0;
  double diameter_bound = 0.0;
  std::size_t bins = 0;
  std::size_t cells = 0;
  std::size_t covered = 0;
  std::size_t samples_drawn = 0;
  bool complete() const { return covered == cells; }
};

struct RegistryOptions {
  double eps1 = 0.1;
  std::uint64_t seed = 1;
  /// Maximum word length of the closure net for atom measures.
  std::size_t closure_length = 12;
  /// Haar sampling budget; 0 means 60 times the cell count.
  std::size_t max_samples = 0;
  /// Haar probes used to measure the covering radius of an atom net.
  std::size_t accuracy_probes = 20000;
};

/// The generator collection. Ids are laid out as
///   block k in [0, d), pool element p  ->  k * P + p   (rotation at (k, k+1 mod d))
///   signed transposition at (k, k+1), k in [0, d-1)  ->  d * P + k.
/// Every generator is an embedded rotation. Pool words up to the closure length live in
/// the NetIndex rather than as separate generators.
class GeneratorRegistry {
 public:
  static GeneratorRegistry build(std::size_t d, const LocalMeasure& eta, const RegistryOptions& opt = {});

  std::size_t dim() const { return d_; }
  double eps1() const { return options_.eps1; }
  const RegistryOptions& options() const { return options_; }
  const LocalMeasure& eta() const { return eta_; }
  std::size_t pool_size() const { return pool_.size(); }
  std::size_t size() const { return d_ * pool_.size() + (d_ - 1); }

  EmbeddedRotation rotation(GeneratorId id) const;
  Provenance provenance(GeneratorId id) const;
  GeneratorId pool_generator(std::size_t block, std::size_t pool_index) const;
  GeneratorId transposition(std::size_t k) const;
  bool is_pool_generator(GeneratorId id) const { return id < d_ * pool_.size(); }
  /// Block index of a pool generator.
  std::size_t block_of(GeneratorId id) const;
  /// The same pool letter moved to block k.
  GeneratorId move_to_block(GeneratorId id, std::size_t k) const;

  const Block& pool_element(std::size_t p) const { return pool_[p]; }
  const NetIndex& net() const { return net_; }
  const Su2CellGrid& grid() const { return grid_; }
  const CoverageCertificate& certificate() const { return certificate_; }
  /// Whether the certificate covers the cell of `g`.
  bool covers(const Block& g) const;

  /// Places a pool-level word on block k.
  Word place(const std::vector<PoolLetter>& letters, std::size_t k) const;

 private:
  GeneratorRegistry(std::size_t d, LocalMeasure eta, RegistryOptions opt);
  void build_haar();
  void build_atoms();
  void certify(const std::vector<Quaternion>& points);

  std::size_t d_ = 2;
  LocalMeasure eta_;
  RegistryOptions options_;
  Su2CellGrid grid_;
  std::vector<Block> pool_;
  std::vector<char> covered_;
  NetIndex net_;
  CoverageCertificate certificate_;
};

}  // namespace liewalk
