#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rmtx/ensembles.hpp"
#include "rmtx/matrix.hpp"
#include "rmtx/schmidt.hpp"

namespace rmtx {

/// Eigenpairs of a symmetric matrix, eigenvalues ascending. The pairs may be a
/// contiguous window [first_index, first_index + count) of the full spectrum.
struct EigenSystem {
  std::size_t order = 0;
  std::size_t first_index = 0;
  std::vector<double> eigenvalues;
  std::vector<double> eigenvectors;  // column-major, order x count; empty if not requested

  [[nodiscard]] std::size_t count() const noexcept { return eigenvalues.size(); }
  [[nodiscard]] bool has_vectors() const noexcept { return !eigenvectors.empty(); }
  [[nodiscard]] std::span<const double> vector(std::size_t k) const {
    return {eigenvectors.data() + k * order, order};
  }
};

[[nodiscard]] EigenSystem full_eigh(const DenseSymmetricMatrix& m, bool want_vectors);

/// Eigenpairs with global (ascending) indices first .. first+count-1.
[[nodiscard]] EigenSystem eigh_window(const DenseSymmetricMatrix& m, std::size_t first,
                                      std::size_t count);

/// Builds a Schmidt spectrum from ascending eigenvalues of an unnormalized
/// reduced density matrix with the given trace: divides by the trace, checks
/// values >= -1e-14, clips to zero and sorts descending.
[[nodiscard]] SchmidtSpectrum make_schmidt_spectrum(std::span<const double> ascending, double trace,
                                                    std::size_t d1, std::size_t d2);

/// Eigenvalues of a full symmetric matrix given row-major (only the upper
/// triangle is read); the buffer is overwritten. Ascending.
[[nodiscard]] std::vector<double> symmetric_eigenvalues(std::vector<double>& full, std::size_t n);

struct IndexWindow {
  std::size_t first = 0;
  std::size_t count = 0;
  friend bool operator==(const IndexWindow&, const IndexWindow&) = default;
};

/// Window of `count` contiguous indices starting at floor((order - count)/2).
[[nodiscard]] IndexWindow mid_spectrum_window(std::size_t order, std::size_t count);

/// The `count` mid-spectrum eigenvectors of `es`, which must contain them.
[[nodiscard]] std::vector<std::span<const double>> mid_spectrum_states(const EigenSystem& es,
                                                                       std::size_t count);

/// Spectrum of rho_1 = C C^T, C the d1 x d2 reshaping of `state` (subsystem 1
/// is the slowest-varying index).
[[nodiscard]] SchmidtSpectrum schmidt_spectrum(std::span<const double> state, std::size_t d1,
                                               std::size_t d2);

/// D * lambda_i for a square bipartition of dimension D.
[[nodiscard]] std::vector<double> rescale_schmidt(const SchmidtSpectrum& s);

enum class Extreme { Max, Min };

struct LanczosOptions {
  double rel_tol = 1e-8;
  std::size_t max_iterations = 20000;
  std::size_t krylov_dim = 160;  // basis size before an explicit restart
  std::uint64_t seed = 0x5eed;
};

/// Extreme eigenvalue by restarted Lanczos with full reorthogonalization.
/// Throws ConvergenceFailure when the iteration cap is hit.
[[nodiscard]] double extreme_eigenvalue(const SymmetricOperator& op, Extreme which,
                                        const LanczosOptions& opts = {});
[[nodiscard]] double extreme_eigenvalue(const DenseSymmetricMatrix& m, Extreme which,
                                        const LanczosOptions& opts = {});
[[nodiscard]] double extreme_eigenvalue(const SparseSymmetricMatrix& m, Extreme which,
                                        const LanczosOptions& opts = {});

/// Largest eigenvalue of B B^T (the Wishart matrix) by bisection on the
/// tridiagonal B B^T.
[[nodiscard]] double wishart_lambda_max(const WishartBidiagonal& b);

/// r_i = min(s_i, s_{i+1}) / max(s_i, s_{i+1}) over consecutive spacings.
/// Levels closer than 1e-13 * max|lambda| are merged first.
[[nodiscard]] std::vector<double> spacing_ratios(std::span<const double> eigenvalues);

/// sqrt(order) * components of the selected (local) eigenvector columns,
/// concatenated.
[[nodiscard]] std::vector<double> eigenvector_components(const EigenSystem& es,
                                                         std::span<const std::size_t> states);

}  // namespace rmtx
