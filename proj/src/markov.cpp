#include "schmm/markov.hpp"

#include <cmath>

#include "schmm/kernels.hpp"

namespace schmm {

std::vector<double> stationary_distribution(const Mat& theta, double tol,
                                            int max_iters) {
  const int K = theta.rows;
  if (K < 1 || theta.cols != K) {
    fail(ErrorKind::invalid_argument, "stationary_distribution: matrix must be square");
  }
  for (int k = 0; k < K; ++k) {
    require_simplex(std::span<const double>(theta.row(k), static_cast<size_t>(K)),
                    "transition row");
  }

  std::vector<double> pi(K, 1.0 / K), next(K);
  for (int it = 0; it < max_iters; ++it) {
    kernels::active().vec_mat(pi.data(), theta.data(), K, next.data());
    kernels::normalize(next.data(), K);
    double delta = 0.0;
    for (int k = 0; k < K; ++k) delta += std::abs(next[k] - pi[k]);
    pi.swap(next);
    if (delta <= tol) return pi;
  }
  fail(ErrorKind::numerical, "stationary_distribution: power iteration did not converge");
}

}  // namespace schmm
