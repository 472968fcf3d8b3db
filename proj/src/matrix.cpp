#include "rmtx/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "rmtx/errors.hpp"
#include "rmtx/simd/kernels.hpp"

namespace rmtx {

DenseSymmetricMatrix::DenseSymmetricMatrix(std::size_t order)
    : order_(order), packed_(order * (order + 1) / 2, 0.0) {}

std::vector<double> DenseSymmetricMatrix::to_lapack_lower() const {
  std::vector<double> full(order_ * order_, 0.0);
  for (std::size_t i = 0; i < order_; ++i) {
    const double* r = row(i);
    std::copy(r, r + (order_ - i), full.begin() + static_cast<std::ptrdiff_t>(i * order_ + i));
  }
  return full;
}

void DenseSymmetricMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != order_ || y.size() != order_)
    throw InvalidArgument("DenseSymmetricMatrix::multiply: size mismatch");
  simd::kernels().packed_symv(packed_.data(), order_, x.data(), y.data());
}

double DenseSymmetricMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < order_; ++i) t += row(i)[0];
  return t;
}

double DenseSymmetricMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : packed_) m = std::max(m, std::abs(v));
  return m;
}

bool DenseSymmetricMatrix::all_finite() const noexcept {
  return std::all_of(packed_.begin(), packed_.end(), [](double v) { return std::isfinite(v); });
}

SparseSymmetricMatrix::SparseSymmetricMatrix(std::size_t order, std::vector<Triplet> entries)
    : order_(order) {
  for (auto& t : entries) {
    if (t.row >= order || t.col >= order)
      throw InvalidArgument("SparseSymmetricMatrix: coordinate out of range");
    if (!std::isfinite(t.value)) throw InvalidArgument("SparseSymmetricMatrix: non-finite entry");
    if (t.row > t.col) std::swap(t.row, t.col);
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  entries_.reserve(entries.size());
  for (const auto& t : entries) {
    if (!entries_.empty() && entries_.back().row == t.row && entries_.back().col == t.col)
      entries_.back().value += t.value;
    else
      entries_.push_back(t);
  }
  std::erase_if(entries_, [](const Triplet& t) { return t.value == 0.0; });
}

void SparseSymmetricMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != order_ || y.size() != order_)
    throw InvalidArgument("SparseSymmetricMatrix::multiply: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (const auto& t : entries_) {
    y[t.row] += t.value * x[t.col];
    if (t.row != t.col) y[t.col] += t.value * x[t.row];
  }
}

DenseSymmetricMatrix SparseSymmetricMatrix::to_dense() const {
  DenseSymmetricMatrix d(order_);
  for (const auto& t : entries_) d.ref(t.row, t.col) = t.value;
  return d;
}

double SparseSymmetricMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& t : entries_) m = std::max(m, std::abs(t.value));
  return m;
}

namespace {

// Frobenius norm, an upper bound on the spectral radius.
double frobenius(const DenseSymmetricMatrix& m) {
  const std::size_t n = m.order();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = m.row(i);
    s += r[0] * r[0];
    for (std::size_t k = 1; k < n - i; ++k) s += 2.0 * r[k] * r[k];
  }
  return std::sqrt(s);
}

}  // namespace

SymmetricOperator as_operator(const DenseSymmetricMatrix& m) {
  return {m.order(), [&m](std::span<const double> x, std::span<double> y) { m.multiply(x, y); },
          frobenius(m)};
}

SymmetricOperator as_operator(const SparseSymmetricMatrix& m) {
  double s = 0.0;
  for (const auto& t : m.entries()) s += (t.row == t.col ? 1.0 : 2.0) * t.value * t.value;
  return {m.order(), [&m](std::span<const double> x, std::span<double> y) { m.multiply(x, y); },
          std::sqrt(s)};
}

}  // namespace rmtx
