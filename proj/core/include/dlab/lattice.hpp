#pragma once

#include <vector>

#include "dlab/exactnum.hpp"

namespace dlab {

using IntVector = std::vector<Integer>;
using IntMatrix = std::vector<IntVector>;

size_t integer_rank(const IntMatrix& rows);

// Nonzero diagonal entries d_1 | d_2 | ... of the Smith normal form.
std::vector<Integer> elementary_divisors(IntMatrix rows);

// Negates v if its last nonzero entry is negative.
void normalize_sign_last_positive(IntVector& v);

}  // namespace dlab
