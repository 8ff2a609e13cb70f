#include "schmm/common.hpp"

#include <cmath>
#include <string>

namespace schmm {

bool is_simplex(std::span<const double> v, double tol) {
  if (v.empty()) return false;
  double s = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= tol;
}

void require_simplex(std::span<const double> v, const char* what, double tol) {
  if (!is_simplex(v, tol)) {
    double s = 0.0;
    for (double x : v) s += x;
    fail(ErrorKind::invalid_argument,
         std::string(what) + " is not a probability vector (sum=" +
             std::to_string(s) + ")");
  }
}

}  // namespace schmm
