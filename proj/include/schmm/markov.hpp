#pragma once

#include <span>
#include <vector>

#include "schmm/common.hpp"

namespace schmm {

// Stationary distribution of a row-stochastic matrix by power iteration:
// repeatedly apply pi <- pi * theta from the uniform start until the L1
// change drops below tol, then renormalize.  Throws a numerical error if
// the iteration has not settled after max_iters sweeps (periodic or
// otherwise non-mixing chains).
std::vector<double> stationary_distribution(const Mat& theta, double tol = 1e-12,
                                            int max_iters = 100000);

}  // namespace schmm
