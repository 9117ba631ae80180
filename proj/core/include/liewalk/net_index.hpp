#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "liewalk/cells.hpp"

namespace liewalk {

/// A letter over the registry's SU(2) pool, before it is placed on a block.
struct PoolLetter {
  std::uint32_t pool_index = 0;
  std::int32_t exponent = 1;
};

/// Nearest-neighbour table over SU(2) elements that are known words in the pool.
/// Entries form a tree: an entry's word is its parent's word followed by one letter.
/// Lookup is exact nearest neighbour through a uniform 4D grid hash.
class NetIndex {
 public:
  struct Entry {
    Quaternion point{1.0, 0.0, 0.0, 0.0};
    /// -1 for a root (the entry is the single `letter`, or the empty word when `length` is 0).
    std::int64_t parent = -1;
    PoolLetter letter;
    std::uint32_t length = 0;
  };
  struct Hit {
    std::size_t entry = 0;
    double distance = 0.0;
  };

  NetIndex() = default;
  /// `accuracy` is the declared covering radius used as the base accuracy of lookups.
  NetIndex(std::vector<Entry> entries, double accuracy);

  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t e) const { return entries_[e]; }
  /// Letters of entry `e` in evaluation order.
  std::vector<PoolLetter> word(std::size_t e) const;
  Hit nearest(const Quaternion& q) const;

  double accuracy() const { return accuracy_; }
  void set_accuracy(double a) { accuracy_ = a; }
  double cell_size() const { return cell_; }
  std::size_t max_word_length() const { return max_length_; }

 private:
  std::uint64_t key(const std::array<std::int64_t, 4>& g) const;
  std::array<std::int64_t, 4> grid_coords(const Quaternion& q) const;

  std::vector<Entry> entries_;
  double accuracy_ = 0.0;
  double cell_ = 0.1;
  std::int64_t per_axis_ = 1;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> order_;
  std::size_t max_length_ = 0;
};

}  // namespace liewalk
