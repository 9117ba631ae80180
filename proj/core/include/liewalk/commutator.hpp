#pragma once

#include <cstddef>

#include "liewalk/matcore.hpp"

namespace liewalk {

struct CommutatorPair {
  ComplexMatrix v;
  ComplexMatrix w;
  /// ||delta - v w v^-1 w^-1||_op after the fixed-point correction.
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Splits a special unitary `delta` near the identity into a balanced group commutator
/// v w v^-1 w^-1 with ||v - I||, ||w - I|| of order sqrt(||delta - I||).
/// X = log(delta) is rotated to a basis where it has zero diagonal; G = i diag(k - (d-1)/2)
/// there, F solves [F, G] = X entrywise, both are rescaled to equal norm, and the
/// logarithm target is corrected by fixed-point iteration until the commutator matches.
CommutatorPair balanced_commutator(const ComplexMatrix& delta);

/// Principal logarithm of a unitary close to the identity (skew-Hermitian, trace-adjusted).
ComplexMatrix log_near_identity(const ComplexMatrix& u);

}  // namespace liewalk
