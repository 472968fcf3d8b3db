#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rmtx/matrix.hpp"
#include "rmtx/random.hpp"
#include "rmtx/schmidt.hpp"

namespace rmtx {

enum class EnsembleKind { Goe, Wishart, Ultrametric, QuantumSun };

[[nodiscard]] std::string_view to_string(EnsembleKind kind) noexcept;
[[nodiscard]] EnsembleKind parse_ensemble_kind(std::string_view name);

/// Largest log2(order) accepted for dense constructions by default.
inline constexpr unsigned kDefaultMaxLog2Order = 14;

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Ultrametric;
  unsigned dot_size = 1;       // N
  unsigned chain_length = 11;  // L
  double alpha = 0.9;
  double coupling = 1.0;  // J, ultrametric only
  double gamma = 1.0;     // dot prefactor, quantum sun only
  double epsilon = 0.2;   // jitter of the coupling exponents
  double field_center = 1.0;
  double field_halfwidth = 0.5;
  std::uint64_t seed = 0;

  [[nodiscard]] unsigned log2_dimension() const noexcept { return dot_size + chain_length; }
  [[nodiscard]] std::size_t dimension() const noexcept { return std::size_t{1} << log2_dimension(); }

  /// Throws InvalidArgument on violated invariants.
  void validate() const;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// (M + M^T)/sqrt(2) for M with i.i.d. standard normal entries: off-diagonal
/// variance 1, diagonal variance 2.
[[nodiscard]] DenseSymmetricMatrix sample_goe(std::size_t n, Rng& rng);

/// H = H_0 + J sum_{j=1..L} alpha^j H_j, where H_j holds 2^(L-j) independent
/// GOE blocks of order 2^(N+j), each divided by sqrt(2^(N+j) + 1).
[[nodiscard]] DenseSymmetricMatrix build_ultrametric(const EnsembleSpec& spec, Rng& rng,
                                                     unsigned max_log2_order = kDefaultMaxLog2Order);

/// Quantum sun Hamiltonian together with the disorder that produced it.
///
/// Basis convention: index bits, most significant first, are dot spins 1..N
/// followed by outside spins 0..L-1. A set bit is spin up (S^z = +1/2).
struct QuantumSunRealization {
  SparseSymmetricMatrix hamiltonian;
  std::vector<double> exponents;     // u_j
  std::vector<unsigned> dot_sites;   // n_j in 1..N
  std::vector<double> fields;        // h_j
};

[[nodiscard]] QuantumSunRealization build_qsm_detailed(const EnsembleSpec& spec, Rng& rng,
                                                       unsigned max_log2_order = 24);
[[nodiscard]] SparseSymmetricMatrix build_qsm(const EnsembleSpec& spec, Rng& rng,
                                              unsigned max_log2_order = 24);

/// Spectrum of W = G G^T / Tr(G G^T), G a d x d standard normal matrix.
[[nodiscard]] SchmidtSpectrum sample_trace_wishart(std::size_t d, Rng& rng);

/// Lower-bidiagonal B (n x n) with B B^T distributed as the real Wishart
/// matrix G G^T, G an n x m standard normal matrix (m >= n).
struct WishartBidiagonal {
  std::vector<double> diagonal;      // chi_{m-i}, i = 0..n-1
  std::vector<double> subdiagonal;   // chi_{n-1-i}, i = 0..n-2
  [[nodiscard]] double trace() const;
};

[[nodiscard]] WishartBidiagonal sample_wishart_bidiagonal(std::size_t n, std::size_t m, Rng& rng);

}  // namespace rmtx
