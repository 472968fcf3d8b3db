#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace rmtx {

/// Real symmetric matrix stored as its packed upper triangle, row by row:
/// (0,0) (0,1) ... (0,n-1) (1,1) ... (n-1,n-1). Symmetry is structural.
class DenseSymmetricMatrix {
 public:
  DenseSymmetricMatrix() = default;
  explicit DenseSymmetricMatrix(std::size_t order);

  [[nodiscard]] std::size_t order() const noexcept { return order_; }

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
    return packed_[index(i, j)];
  }
  /// Reference to the stored (upper) element for the unordered pair {i, j}.
  [[nodiscard]] double& ref(std::size_t i, std::size_t j) noexcept { return packed_[index(i, j)]; }

  [[nodiscard]] std::span<const double> packed() const noexcept { return packed_; }
  [[nodiscard]] std::span<double> packed() noexcept { return packed_; }

  /// Pointer to the packed row i, i.e. elements (i,i), (i,i+1), ..., (i,n-1).
  [[nodiscard]] const double* row(std::size_t i) const noexcept { return packed_.data() + row_offset(i); }
  [[nodiscard]] double* row(std::size_t i) noexcept { return packed_.data() + row_offset(i); }

  /// n x n buffer holding the upper triangle row-major, which is the lower
  /// triangle in column-major order (LAPACK uplo='L'). Strict upper part of the
  /// column-major view is zero.
  [[nodiscard]] std::vector<double> to_lapack_lower() const;

  void multiply(std::span<const double> x, std::span<double> y) const;

  [[nodiscard]] double trace() const noexcept;
  [[nodiscard]] double max_abs() const noexcept;
  [[nodiscard]] bool all_finite() const noexcept;

  friend bool operator==(const DenseSymmetricMatrix&, const DenseSymmetricMatrix&) = default;

 private:
  [[nodiscard]] std::size_t row_offset(std::size_t i) const noexcept {
    return i * (2 * order_ - i + 1) / 2;
  }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    return row_offset(i) + (j - i);
  }

  std::size_t order_ = 0;
  std::vector<double> packed_;
};

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  double value;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Coordinate-format symmetric matrix, upper triangle only (row <= col), no
/// duplicate coordinates, sorted by (row, col).
class SparseSymmetricMatrix {
 public:
  SparseSymmetricMatrix() = default;
  /// Sums duplicate coordinates, mirrors lower entries into the upper triangle
  /// and drops exact zeros.
  SparseSymmetricMatrix(std::size_t order, std::vector<Triplet> entries);

  [[nodiscard]] std::size_t order() const noexcept { return order_; }
  [[nodiscard]] std::size_t nonzeros() const noexcept { return entries_.size(); }
  [[nodiscard]] std::span<const Triplet> entries() const noexcept { return entries_; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] DenseSymmetricMatrix to_dense() const;
  [[nodiscard]] double max_abs() const noexcept;

  friend bool operator==(const SparseSymmetricMatrix&, const SparseSymmetricMatrix&) = default;

 private:
  std::size_t order_ = 0;
  std::vector<Triplet> entries_;
};

/// Matrix-free symmetric operator, y = A x.
struct SymmetricOperator {
  std::size_t order = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
  /// Any upper bound on the spectral radius, used for tolerances. 0 = unknown.
  double norm_bound = 0.0;
};

[[nodiscard]] SymmetricOperator as_operator(const DenseSymmetricMatrix& m);
[[nodiscard]] SymmetricOperator as_operator(const SparseSymmetricMatrix& m);

}  // namespace rmtx
