#pragma once

#include <map>
#include <memory>
#include <string>

#include "liewalk/errors.hpp"
#include "liewalk/matcore.hpp"
#include "liewalk/registry.hpp"

namespace liewalk::test {

inline ComplexMatrix gaussian(std::size_t d, Rng& rng) {
  ComplexMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

/// Traceless skew-Hermitian matrix of operator norm `norm`.
inline SkewHermitian random_skew(std::size_t d, double norm, Rng& rng) {
  const ComplexMatrix g = gaussian(d, rng);
  ComplexMatrix a = (g - g.adjoint()) / 2.0;
  a -= (a.trace() / static_cast<double>(d)) * ComplexMatrix::Identity(a.rows(), a.cols());
  a *= norm / operator_norm(a);
  return SkewHermitian::from_matrix(a);
}

inline ComplexMatrix eye(std::size_t d) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

/// Registries are expensive; share them within a test binary.
inline const GeneratorRegistry& haar_registry(std::size_t d, double eps1 = 0.1) {
  static std::map<std::pair<std::size_t, double>, std::unique_ptr<GeneratorRegistry>> cache;
  auto& slot = cache[{d, eps1}];
  if (!slot) {
    RegistryOptions o;
    o.eps1 = eps1;
    slot = std::make_unique<GeneratorRegistry>(GeneratorRegistry::build(d, LocalMeasure::haar(), o));
  }
  return *slot;
}

inline const GeneratorRegistry& atom_registry(std::size_t closure_length = 12) {
  static std::map<std::size_t, std::unique_ptr<GeneratorRegistry>> cache;
  auto& slot = cache[closure_length];
  if (!slot) {
    RegistryOptions o;
    o.closure_length = closure_length;
    slot = std::make_unique<GeneratorRegistry>(GeneratorRegistry::build(2, LocalMeasure::two_axis(0.5), o));
  }
  return *slot;
}

}  // namespace liewalk::test
