#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace liewalk {

/// Seeded random stream. Two instances built from the same (seed, stream)
/// produce bit-identical sequences; distinct streams are statistically independent.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  /// Standard normal.
  double normal() { return normal_(engine_); }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  bool coin() { return (engine_() >> 63) != 0; }
  /// Fresh 64-bit value, e.g. to seed a derived stream.
  std::uint64_t next_u64() { return engine_(); }

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace liewalk
