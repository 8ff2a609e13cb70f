#include "schmm/kernels.hpp"

// AVX2+FMA variants. This translation unit is compiled with -mavx2 -mfma on
// x86-64 only; the dispatcher never hands these out unless the CPU reports
// both features. Accumulation order differs from the scalar kernels, so
// results may differ in the last ulps; the equivalence tests bound that.

#if defined(__x86_64__) || defined(_M_X64)
#define SCHMM_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define SCHMM_HAVE_AVX2_TU 0
#endif

namespace schmm::kernels {

#if SCHMM_HAVE_AVX2_TU

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double sum_avx2(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* x, const double* y, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void scale_avx2(double* x, size_t n, double s) {
  __m256d vs = _mm256_set1_pd(s);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
  }
  for (; i < n; ++i) x[i] *= s;
}

void mul_avx2(double* x, const double* y, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) x[i] *= y[i];
}

void axpby_avx2(double* x, const double* y, size_t n, double a, double b) {
  __m256d va = _mm256_set1_pd(a);
  __m256d vb = _mm256_set1_pd(b);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), vx));
  }
  for (; i < n; ++i) x[i] = a * x[i] + b * y[i];
}

void vec_mat_avx2(const double* x, const double* A, int n, double* y) {
  int j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(y + j, _mm256_setzero_pd());
  for (; j < n; ++j) y[j] = 0.0;
  for (int i = 0; i < n; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    const double* row = A + static_cast<size_t>(i) * n;
    j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d acc = _mm256_loadu_pd(y + j);
      acc = _mm256_fmadd_pd(xi, _mm256_loadu_pd(row + j), acc);
      _mm256_storeu_pd(y + j, acc);
    }
    const double xs = x[i];
    for (; j < n; ++j) y[j] += xs * row[j];
  }
}

void mat_vec_avx2(const double* A, const double* x, int n, double* y) {
  for (int i = 0; i < n; ++i) {
    y[i] = dot_avx2(A + static_cast<size_t>(i) * n, x, static_cast<size_t>(n));
  }
}

void scaled_outer_avx2(const double* u, const double* A, const double* v,
                       int n, double* B) {
  for (int i = 0; i < n; ++i) {
    const __m256d ui = _mm256_set1_pd(u[i]);
    const double* arow = A + static_cast<size_t>(i) * n;
    double* brow = B + static_cast<size_t>(i) * n;
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d t = _mm256_mul_pd(ui, _mm256_loadu_pd(arow + j));
      _mm256_storeu_pd(brow + j, _mm256_mul_pd(t, _mm256_loadu_pd(v + j)));
    }
    const double us = u[i];
    for (; j < n; ++j) brow[j] = us * arow[j] * v[j];
  }
}

}  // namespace

extern const Ops kAvx2Ops;
extern const bool kAvx2Compiled;

const Ops kAvx2Ops = {
    "avx2",      sum_avx2,     dot_avx2,     scale_avx2, mul_avx2,
    axpby_avx2,  vec_mat_avx2, mat_vec_avx2, scaled_outer_avx2,
};

const bool kAvx2Compiled = true;

#else

extern const Ops kAvx2Ops;
extern const bool kAvx2Compiled;

const Ops kAvx2Ops = {};
const bool kAvx2Compiled = false;

#endif  // SCHMM_HAVE_AVX2_TU

}  // namespace schmm::kernels
