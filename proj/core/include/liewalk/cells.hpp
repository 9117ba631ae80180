#pragma once

#include <array>
#include <cstddef>

#include "liewalk/matcore.hpp"

namespace liewalk {

/// Unit quaternion (Re a, Im a, Re b, Im b) of [[a, -conj(b)], [b, conj(a)]].
/// Operator-norm distance in SU(2) equals Euclidean distance of quaternions.
using Quaternion = std::array<double, 4>;

Quaternion to_quaternion(const Block& g);
Block from_quaternion(const Quaternion& q);
double quaternion_distance(const Quaternion& a, const Quaternion& b);

/// Equiangular cubed-sphere partition of SU(2) = S^3. A point lies on the facet of its
/// largest |coordinate| (8 facets); the other three coordinates, divided by that one, are
/// mapped through atan to [-pi/4, pi/4] and binned into n equal intervals each.
/// Every cell has operator-norm diameter at most kLipschitz * sqrt(3) * (pi/2) / n.
class Su2CellGrid {
 public:
  /// Lipschitz bound of the facet chart from angle space to S^3 (numerical sup is about 1.155).
  static constexpr double kLipschitz = 1.2;

  /// Smallest grid whose cell diameter is at most eps1.
  explicit Su2CellGrid(double eps1);

  double eps1() const { return eps1_; }
  std::size_t bins() const { return n_; }
  std::size_t cell_count() const { return 8 * n_ * n_ * n_; }
  double diameter_bound() const;

  std::size_t cell_of(const Quaternion& q) const;
  /// A unit quaternion inside `cell` (the image of the angle-space center).
  Quaternion center(std::size_t cell) const;

 private:
  double eps1_;
  std::size_t n_;
};

}  // namespace liewalk
