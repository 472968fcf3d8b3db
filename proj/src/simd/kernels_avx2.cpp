// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "rmtx/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace rmtx::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                                 _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

// Four dot products sharing the left operand.
inline void dot4(const double* a, const double* b0, const double* b1, const double* b2,
                 const double* b3, std::size_t n, double* res) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d va = _mm256_loadu_pd(a + k);
    s0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + k), s0);
    s1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + k), s1);
    s2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + k), s2);
    s3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + k), s3);
  }
  double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
  for (; k < n; ++k) {
    r0 += a[k] * b0[k];
    r1 += a[k] * b1[k];
    r2 += a[k] * b2[k];
    r3 += a[k] * b3[k];
  }
  res[0] = r0;
  res[1] = r1;
  res[2] = r2;
  res[3] = r3;
}

void gram_rows_avx2(const double* a, std::size_t rows, std::size_t cols, double* out) {
  double r[4];
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ai = a + i * cols;
    std::size_t j = i;
    for (; j + 4 <= rows; j += 4) {
      dot4(ai, a + j * cols, a + (j + 1) * cols, a + (j + 2) * cols, a + (j + 3) * cols, cols, r);
      for (std::size_t t = 0; t < 4; ++t) {
        out[i * rows + j + t] = r[t];
        out[(j + t) * rows + i] = r[t];
      }
    }
    for (; j < rows; ++j) {
      const double v = dot_avx2(ai, a + j * cols, cols);
      out[i * rows + j] = v;
      out[j * rows + i] = v;
    }
  }
}

void packed_symv_avx2(const double* packed, std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
  const double* row = packed;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = n - i;
    const double* r = row + 1;
    const double* xs = x + i + 1;
    double* ys = y + i + 1;
    const std::size_t m = len - 1;
    const __m256d xi = _mm256_set1_pd(x[i]);
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= m; k += 4) {
      const __m256d rv = _mm256_loadu_pd(r + k);
      acc = _mm256_fmadd_pd(rv, _mm256_loadu_pd(xs + k), acc);
      _mm256_storeu_pd(ys + k, _mm256_fmadd_pd(rv, xi, _mm256_loadu_pd(ys + k)));
    }
    double s = hsum(acc) + row[0] * x[i];
    for (; k < m; ++k) {
      s += r[k] * xs[k];
      ys[k] += r[k] * x[i];
    }
    y[i] += s;
    row += len;
  }
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4)
    dot4(x, a + i * cols, a + (i + 1) * cols, a + (i + 2) * cols, a + (i + 3) * cols, cols, y + i);
  for (; i < rows; ++i) y[i] = dot_avx2(a + i * cols, x, cols);
}

void gemv_t_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x,
                 double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy_avx2(x[i], a + i * cols, y, cols);
}

}  // namespace

const KernelTable avx2_table{
    Isa::Avx2,       dot_avx2,         sum_squares_avx2, axpy_avx2,  scale_avx2,
    gram_rows_avx2,  packed_symv_avx2, gemv_avx2,        gemv_t_avx2};

}  // namespace rmtx::simd::detail

#endif
