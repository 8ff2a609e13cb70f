#include "schmm/kernels.hpp"

// Reference kernels. Plain loops, no reordering tricks: these define the
// semantics the vectorized backends must reproduce.

namespace schmm::kernels {
namespace {

double sum_scalar(const double* x, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void scale_scalar(double* x, size_t n, double s) {
  for (size_t i = 0; i < n; ++i) x[i] *= s;
}

void mul_scalar(double* x, const double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= y[i];
}

void axpby_scalar(double* x, const double* y, size_t n, double a, double b) {
  for (size_t i = 0; i < n; ++i) x[i] = a * x[i] + b * y[i];
}

void vec_mat_scalar(const double* x, const double* A, int n, double* y) {
  for (int j = 0; j < n; ++j) y[j] = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = x[i];
    const double* row = A + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) y[j] += xi * row[j];
  }
}

void mat_vec_scalar(const double* A, const double* x, int n, double* y) {
  for (int i = 0; i < n; ++i) {
    const double* row = A + static_cast<size_t>(i) * n;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void scaled_outer_scalar(const double* u, const double* A, const double* v,
                         int n, double* B) {
  for (int i = 0; i < n; ++i) {
    const double ui = u[i];
    const double* arow = A + static_cast<size_t>(i) * n;
    double* brow = B + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) brow[j] = ui * arow[j] * v[j];
  }
}

}  // namespace

extern const Ops kScalarOps;
const Ops kScalarOps = {
    "scalar",      sum_scalar,     dot_scalar,     scale_scalar,
    mul_scalar,    axpby_scalar,   vec_mat_scalar, mat_vec_scalar,
    scaled_outer_scalar,
};

}  // namespace schmm::kernels
