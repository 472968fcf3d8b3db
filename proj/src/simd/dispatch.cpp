#include <cstdlib>
#include <string>

#include "rmtx/errors.hpp"
#include "rmtx/simd/kernels.hpp"

namespace rmtx::simd {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() noexcept { return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

const KernelTable& kernels(Isa isa) {
  if (!isa_available(isa))
    throw InvalidArgument("ISA not supported on this CPU: " + std::string(isa_name(isa)));
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::Avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

namespace {

Isa choose_isa() {
  const char* env = std::getenv("RMTX_ISA");
  if (env != nullptr) {
    const std::string_view want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
  }
  return detected_isa();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& table = kernels(choose_isa());
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
  return kernels().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> x) { return kernels().sum_squares(x.data(), x.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InvalidArgument("axpy: length mismatch");
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) { kernels().scale(alpha, x.data(), x.size()); }

}  // namespace rmtx::simd
