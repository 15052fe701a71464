#pragma once

#include "ignr/types.hpp"

namespace ignr {

struct EmdResult {
  Matrix plan;        // n1 x n2 transport plan
  double cost = 0.0;  // <cost, plan>
  long pivots = 0;
};

/// Exact discrete optimal transport min <C, P> s.t. P 1 = a, P^T 1 = b,
/// P >= 0, solved with the primal network simplex method (block search
/// pivoting, spanning-tree thread/parent representation).
///
/// a and b must be strictly positive with equal mass (checked to 1e-9
/// relative). Throws InputDomainError on bad input and NumericalError if the
/// pivot budget is exhausted.
EmdResult emd(const Vector& a, const Vector& b, const Matrix& cost, long max_pivots = 0);

}  // namespace ignr
