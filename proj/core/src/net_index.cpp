#include "liewalk/net_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "liewalk/errors.hpp"

namespace liewalk {

NetIndex::NetIndex(std::vector<Entry> entries, double accuracy) : entries_(std::move(entries)), accuracy_(accuracy) {
  if (entries_.empty()) throw PreconditionError("NetIndex: no entries");
  // About one entry per occupied grid cell: S^3 has volume 2 pi^2.
  const double n = static_cast<double>(entries_.size());
  cell_ = std::clamp(std::cbrt(2.0 * kPi * kPi / n), 0.004, 0.5);
  per_axis_ = static_cast<std::int64_t>(std::ceil(2.0 / cell_)) + 1;
  keys_.resize(entries_.size());
  order_.resize(entries_.size());
  std::vector<std::uint64_t> raw(entries_.size());
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    raw[e] = key(grid_coords(entries_[e].point));
    max_length_ = std::max<std::size_t>(max_length_, entries_[e].length);
  }
  std::iota(order_.begin(), order_.end(), 0u);
  std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return raw[a] < raw[b]; });
  for (std::size_t k = 0; k < order_.size(); ++k) keys_[k] = raw[order_[k]];
}

std::array<std::int64_t, 4> NetIndex::grid_coords(const Quaternion& q) const {
  std::array<std::int64_t, 4> g{};
  for (int k = 0; k < 4; ++k) {
    g[k] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((q[k] + 1.0) / cell_)), 0, per_axis_ - 1);
  }
  return g;
}

std::uint64_t NetIndex::key(const std::array<std::int64_t, 4>& g) const {
  std::uint64_t k = 0;
  for (int a = 0; a < 4; ++a) k = k * static_cast<std::uint64_t>(per_axis_) + static_cast<std::uint64_t>(g[a]);
  return k;
}

std::vector<PoolLetter> NetIndex::word(std::size_t e) const {
  std::vector<PoolLetter> out;
  std::int64_t cur = static_cast<std::int64_t>(e);
  while (cur >= 0) {
    const Entry& en = entries_[static_cast<std::size_t>(cur)];
    if (en.length == 0) break;
    out.push_back(en.letter);
    cur = en.parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

NetIndex::Hit NetIndex::nearest(const Quaternion& q) const {
  const auto c = grid_coords(q);
  Hit best{0, std::numeric_limits<double>::infinity()};
  auto visit = [&](const std::array<std::int64_t, 4>& g) {
    const std::uint64_t k = key(g);
    auto lo = std::lower_bound(keys_.begin(), keys_.end(), k);
    for (auto it = lo; it != keys_.end() && *it == k; ++it) {
      const std::size_t e = order_[static_cast<std::size_t>(it - keys_.begin())];
      const double dist = quaternion_distance(entries_[e].point, q);
      if (dist < best.distance || (dist == best.distance && e < best.entry)) best = {e, dist};
    }
  };
  for (std::int64_t r = 0; r <= per_axis_; ++r) {
    std::array<std::int64_t, 4> g{};
    // Cells at Chebyshev distance exactly r from the query's cell.
    for (std::int64_t o0 = -r; o0 <= r; ++o0) {
      for (std::int64_t o1 = -r; o1 <= r; ++o1) {
        for (std::int64_t o2 = -r; o2 <= r; ++o2) {
          for (std::int64_t o3 = -r; o3 <= r; ++o3) {
            const std::int64_t m = std::max({std::abs(o0), std::abs(o1), std::abs(o2), std::abs(o3)});
            if (m != r) {
              if (o3 < r) o3 = r - 1;  // skip the interior of this row
              continue;
            }
            g = {c[0] + o0, c[1] + o1, c[2] + o2, c[3] + o3};
            bool inside = true;
            for (std::int64_t x : g) inside = inside && x >= 0 && x < per_axis_;
            if (inside) visit(g);
          }
        }
      }
    }
    // Anything outside this shell is farther than r cells from the query.
    if (best.distance <= static_cast<double>(r) * cell_) break;
  }
  return best;
}

}  // namespace liewalk
