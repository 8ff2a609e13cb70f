#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace schmm {

// Error taxonomy used across the library. The CLI maps kinds to exit codes.
enum class ErrorKind {
  invalid_argument,  // bad parameters, malformed usage
  data,              // empty/missing/inconsistent input data
  artifact,          // corrupt file on disk (checkpoint, cache)
  numerical,         // degenerate message, non-finite statistic
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

// Dense row-major matrix of doubles. All numeric state in the library
// (counts, factor weights, marginal tables) lives in these.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }

  size_t size() const { return a.size(); }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
};

bool is_simplex(std::span<const double> v, double tol = 1e-9);

// Throws ErrorKind::invalid_argument unless v is entrywise >= 0 and sums to 1
// within tol.
void require_simplex(std::span<const double> v, const char* what, double tol = 1e-9);

}  // namespace schmm
