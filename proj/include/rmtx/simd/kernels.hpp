#pragma once

// Dense arithmetic inner loops. Every kernel has a scalar reference version
// and vectorized versions; the active table is chosen once at startup from
// CPUID, and can be forced with RMTX_ISA=scalar|avx2.

#include <cstddef>
#include <span>
#include <string_view>

namespace rmtx::simd {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  // out (rows x rows, row-major, both triangles) = A A^T, A row-major rows x cols
  void (*gram_rows)(const double* a, std::size_t rows, std::size_t cols, double* out);
  // y = A x with A symmetric, stored as packed upper triangle, row-major
  void (*packed_symv)(const double* packed, std::size_t n, const double* x, double* y);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y = A^T x, A row-major rows x cols
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

/// Best ISA the running CPU supports.
[[nodiscard]] Isa detected_isa() noexcept;

/// Whether `isa` can run on this CPU.
[[nodiscard]] bool isa_available(Isa isa) noexcept;

[[nodiscard]] const KernelTable& kernels(Isa isa);

/// Active table: detected ISA unless overridden by RMTX_ISA.
[[nodiscard]] const KernelTable& kernels();

// Span conveniences over the active table.

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double sum_squares(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace rmtx::simd
