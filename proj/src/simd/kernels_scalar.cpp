#include "rmtx/simd/kernels.hpp"

namespace rmtx::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gram_rows_scalar(const double* a, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i; j < rows; ++j) {
      const double v = dot_scalar(a + i * cols, a + j * cols, cols);
      out[i * rows + j] = v;
      out[j * rows + i] = v;
    }
  }
}

void packed_symv_scalar(const double* packed, std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
  const double* row = packed;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = n - i;
    // row[0] is the diagonal entry (i,i); row[k] is (i, i+k)
    double acc = row[0] * x[i];
    for (std::size_t k = 1; k < len; ++k) {
      acc += row[k] * x[i + k];
      y[i + k] += row[k] * x[i];
    }
    y[i] += acc;
    row += len;
  }
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x,
                 double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(a + i * cols, x, cols);
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x,
                   double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy_scalar(x[i], a + i * cols, y, cols);
}

}  // namespace

const KernelTable scalar_table{
    Isa::Scalar,       dot_scalar,         sum_squares_scalar, axpy_scalar,  scale_scalar,
    gram_rows_scalar,  packed_symv_scalar, gemv_scalar,        gemv_t_scalar};

}  // namespace rmtx::simd::detail
