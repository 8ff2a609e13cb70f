#pragma once

#include <cmath>
#include <cstddef>

#include "schmm/common.hpp"

namespace schmm::kernels {

// Dense double-precision primitives behind the inference and training inner
// loops. Each entry has a scalar reference implementation and, on x86-64
// hardware with AVX2+FMA, a vectorized variant selected at runtime. The two
// are equivalence-tested against each other; the scalar versions are the
// semantic reference.
struct Ops {
  const char* name;

  double (*sum)(const double* x, size_t n);
  double (*dot)(const double* x, const double* y, size_t n);
  // x[i] *= s
  void (*scale)(double* x, size_t n, double s);
  // x[i] *= y[i]
  void (*mul)(double* x, const double* y, size_t n);
  // x[i] = a*x[i] + b*y[i]
  void (*axpby)(double* x, const double* y, size_t n, double a, double b);
  // y[j] = sum_i x[i] * A[i*n+j]   (row vector times square matrix)
  void (*vec_mat)(const double* x, const double* A, int n, double* y);
  // y[i] = sum_j A[i*n+j] * x[j]   (square matrix times column vector)
  void (*mat_vec)(const double* A, const double* x, int n, double* y);
  // B[i*n+j] = u[i] * A[i*n+j] * v[j]
  void (*scaled_outer)(const double* u, const double* A, const double* v, int n,
                       double* B);
};

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
const Ops& backend_ops(Backend b);  // throws invalid_argument if unavailable

// Best backend the current CPU supports.
Backend detect_backend();

// Process-wide active backend. Defaults to detect_backend(); select() pins it
// (tests and the CLI --kernel flag use this).
const Ops& active();
void select(Backend b);
Backend selected();

// Rescales x to sum 1 and returns the former sum. Throws
// ErrorKind::numerical if the sum is not finite and positive.
inline double normalize(double* x, size_t n) {
  const Ops& k = active();
  double s = k.sum(x, n);
  if (!(s > 0.0) || !std::isfinite(s)) {
    fail(ErrorKind::numerical, "degenerate message: normalizer " + std::to_string(s));
  }
  k.scale(x, n, 1.0 / s);
  return s;
}

}  // namespace schmm::kernels
