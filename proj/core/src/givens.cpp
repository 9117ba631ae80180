#include "liewalk/givens.hpp"

#include <cmath>

#include "liewalk/errors.hpp"

namespace liewalk {

std::vector<EmbeddedRotation> givens_oracle(const Unitary& target) {
  const std::size_t d = target.dim();
  if (d < 2) throw PreconditionError("givens_oracle: d must be at least 2");
  ComplexMatrix u = target.matrix();
  std::vector<EmbeddedRotation> eliminations;
  for (std::size_t c = 0; c + 1 < d; ++c) {
    for (std::size_t r = d - 1; r > c; --r) {
      const auto ri = static_cast<Eigen::Index>(r), ci = static_cast<Eigen::Index>(c);
      const Complex a = u(ri - 1, ci);
      const Complex b = u(ri, ci);
      const double nrm = std::hypot(std::abs(a), std::abs(b));
      const bool last = r == c + 1;
      if (std::abs(b) == 0.0 && !last) continue;
      if (nrm == 0.0) continue;
      // [[conj a, conj b], [-b, a]] / n maps (a, b) to (n, 0); det = 1.
      Block g;
      g << std::conj(a) / nrm, std::conj(b) / nrm, -b / nrm, a / nrm;
      if ((g - Block::Identity()).cwiseAbs().maxCoeff() == 0.0) continue;
      const EmbeddedRotation rot{r - 1, r, g};
      apply_left(rot, u);
      eliminations.push_back(rot);
    }
  }
  // u is now the identity up to rounding: target = G_1^dagger G_2^dagger ... G_K^dagger.
  std::vector<EmbeddedRotation> factors;
  factors.reserve(eliminations.size());
  for (const EmbeddedRotation& g : eliminations) factors.push_back(g.inverse());
  return factors;
}

ComplexMatrix givens_product(const std::vector<EmbeddedRotation>& factors, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  for (const EmbeddedRotation& f : factors) apply_right(m, f);
  return m;
}

}  // namespace liewalk
