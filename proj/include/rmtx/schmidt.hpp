#pragma once

#include <cstddef>
#include <vector>

namespace rmtx {

/// Eigenvalues of a reduced density matrix, sorted descending. Values are
/// clipped at zero after a roundoff sanity check and sum to one.
struct SchmidtSpectrum {
  std::vector<double> values;
  std::size_t dim1 = 0;
  std::size_t dim2 = 0;

  [[nodiscard]] double max() const { return values.front(); }
  [[nodiscard]] double min() const { return values.back(); }
  [[nodiscard]] bool square() const noexcept { return dim1 == dim2; }
};

}  // namespace rmtx
