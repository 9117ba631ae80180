#include "liewalk/cells.hpp"

#include <algorithm>
#include <cmath>

#include "liewalk/errors.hpp"

namespace liewalk {

Quaternion to_quaternion(const Block& g) {
  return {g(0, 0).real(), g(0, 0).imag(), g(1, 0).real(), g(1, 0).imag()};
}

Block from_quaternion(const Quaternion& q) { return su2_block(Complex(q[0], q[1]), Complex(q[2], q[3])); }

double quaternion_distance(const Quaternion& a, const Quaternion& b) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

Su2CellGrid::Su2CellGrid(double eps1) : eps1_(eps1) {
  if (!(eps1 > 0.0) || eps1 > 1.0) throw PreconditionError("Su2CellGrid: eps1 must lie in (0, 1]");
  const double side = eps1 / (kLipschitz * std::sqrt(3.0));
  n_ = static_cast<std::size_t>(std::ceil((kPi / 2.0) / side));
}

double Su2CellGrid::diameter_bound() const {
  return kLipschitz * std::sqrt(3.0) * (kPi / 2.0) / static_cast<double>(n_);
}

std::size_t Su2CellGrid::cell_of(const Quaternion& q) const {
  int axis = 0;
  for (int k = 1; k < 4; ++k) {
    if (std::abs(q[k]) > std::abs(q[axis])) axis = k;
  }
  const double lead = q[axis];
  const std::size_t facet = static_cast<std::size_t>(2 * axis + (lead < 0.0 ? 1 : 0));
  const double h = (kPi / 2.0) / static_cast<double>(n_);
  std::size_t cell = facet;
  for (int k = 0; k < 4; ++k) {
    if (k == axis) continue;
    const double phi = std::atan(q[k] / std::abs(lead));
    auto bin = static_cast<std::ptrdiff_t>(std::floor((phi + kPi / 4.0) / h));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(n_) - 1);
    cell = cell * n_ + static_cast<std::size_t>(bin);
  }
  return cell;
}

Quaternion Su2CellGrid::center(std::size_t cell) const {
  if (cell >= cell_count()) throw PreconditionError("Su2CellGrid: cell out of range");
  std::size_t bins[3];
  for (int k = 2; k >= 0; --k) {
    bins[k] = cell % n_;
    cell /= n_;
  }
  const std::size_t facet = cell;
  const int axis = static_cast<int>(facet / 2);
  const double sign = (facet % 2) ? -1.0 : 1.0;
  const double h = (kPi / 2.0) / static_cast<double>(n_);
  Quaternion q{};
  q[axis] = sign;
  int b = 0;
  for (int k = 0; k < 4; ++k) {
    if (k == axis) continue;
    q[k] = std::tan(-kPi / 4.0 + (static_cast<double>(bins[b++]) + 0.5) * h);
  }
  double n2 = 0.0;
  for (double x : q) n2 += x * x;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : q) x *= inv;
  return q;
}

}  // namespace liewalk
