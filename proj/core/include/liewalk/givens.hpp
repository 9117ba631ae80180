#pragma once

#include <vector>

#include "liewalk/matcore.hpp"
#include "liewalk/walk.hpp"

namespace liewalk {

/// Factors a special unitary into adjacent two-level rotations with
/// target = factors[0] * factors[1] * ... Columns are cleared bottom-up; the last rotation of
/// each column also fixes the diagonal phase, so no separate diagonal remains.
/// Identity factors are omitted; at most d(d-1)/2 are returned.
std::vector<EmbeddedRotation> givens_oracle(const Unitary& target);

/// Product of the factors as a d x d matrix.
ComplexMatrix givens_product(const std::vector<EmbeddedRotation>& factors, std::size_t d);

}  // namespace liewalk
