#include "rmtx/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rmtx/errors.hpp"
#include "rmtx/simd/kernels.hpp"
#include "rmtx/spectra.hpp"

namespace rmtx {

std::string_view to_string(EnsembleKind kind) noexcept {
  switch (kind) {
    case EnsembleKind::Goe:
      return "goe";
    case EnsembleKind::Wishart:
      return "wishart";
    case EnsembleKind::Ultrametric:
      return "um";
    case EnsembleKind::QuantumSun:
      return "qsm";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  if (name == "goe") return EnsembleKind::Goe;
  if (name == "wishart") return EnsembleKind::Wishart;
  if (name == "um" || name == "ultrametric") return EnsembleKind::Ultrametric;
  if (name == "qsm" || name == "quantum-sun") return EnsembleKind::QuantumSun;
  throw InvalidArgument("unknown ensemble: " + std::string(name));
}

void EnsembleSpec::validate() const {
  if (log2_dimension() >= 63) throw InvalidArgument("N + L too large");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw InvalidArgument("epsilon must lie in [0, 0.5)");
  if (!(field_halfwidth >= 0.0)) throw InvalidArgument("field half-width must be >= 0");
  if (!(coupling > 0.0)) throw InvalidArgument("J must be positive");
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!std::isfinite(field_center)) throw InvalidArgument("field centre must be finite");
}

namespace {

void check_order(unsigned log2_order, unsigned max_log2_order) {
  if (log2_order > max_log2_order)
    throw ResourceLimit("matrix order 2^" + std::to_string(log2_order) +
                        " exceeds the configured maximum 2^" + std::to_string(max_log2_order));
}

// Adds scale * GOE(size) into the diagonal block starting at `offset`.
void add_goe_block(DenseSymmetricMatrix& h, std::size_t offset, std::size_t size, double scale,
                   std::normal_distribution<double>& normal, Rng& rng) {
  const double diag_scale = scale * std::sqrt(2.0);
  for (std::size_t r = 0; r < size; ++r) {
    double* row = h.row(offset + r);
    row[0] += diag_scale * normal(rng);
    for (std::size_t c = 1; c < size - r; ++c) row[c] += scale * normal(rng);
  }
}

}  // namespace

DenseSymmetricMatrix sample_goe(std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("sample_goe: n must be >= 1");
  DenseSymmetricMatrix m(n);
  std::normal_distribution<double> normal;
  add_goe_block(m, 0, n, 1.0, normal, rng);
  return m;
}

DenseSymmetricMatrix build_ultrametric(const EnsembleSpec& spec, Rng& rng,
                                       unsigned max_log2_order) {
  if (spec.kind != EnsembleKind::Ultrametric)
    throw InvalidArgument("build_ultrametric: spec is not ultrametric");
  spec.validate();
  check_order(spec.log2_dimension(), max_log2_order);

  const unsigned n_dot = spec.dot_size;
  const unsigned levels = spec.chain_length;
  DenseSymmetricMatrix h(spec.dimension());
  std::normal_distribution<double> normal;

  for (unsigned j = 0; j <= levels; ++j) {
    const double weight = j == 0 ? 1.0 : spec.coupling * std::pow(spec.alpha, j);
    if (weight == 0.0) continue;
    const std::size_t block = std::size_t{1} << (n_dot + j);
    const double scale = weight / std::sqrt(static_cast<double>(block) + 1.0);
    const std::size_t blocks = std::size_t{1} << (levels - j);
    for (std::size_t b = 0; b < blocks; ++b) add_goe_block(h, b * block, block, scale, normal, rng);
  }
  return h;
}

QuantumSunRealization build_qsm_detailed(const EnsembleSpec& spec, Rng& rng,
                                         unsigned max_log2_order) {
  if (spec.kind != EnsembleKind::QuantumSun)
    throw InvalidArgument("build_qsm: spec is not a quantum sun");
  spec.validate();
  if (spec.dot_size == 0) throw InvalidArgument("build_qsm: the dot needs N >= 1");
  if (spec.chain_length == 0) throw InvalidArgument("build_qsm: needs L >= 1 outside spins");
  check_order(spec.log2_dimension(), max_log2_order);

  const unsigned n_dot = spec.dot_size;
  const unsigned n_out = spec.chain_length;
  const std::size_t dim = spec.dimension();
  const std::size_t dot_dim = std::size_t{1} << n_dot;
  const std::size_t out_dim = std::size_t{1} << n_out;

  QuantumSunRealization out;
  DenseSymmetricMatrix dot = sample_goe(dot_dim, rng);
  const double dot_scale = spec.gamma / std::sqrt(static_cast<double>(dot_dim) + 1.0);

  std::uniform_int_distribution<unsigned> site(1, n_dot);
  for (unsigned j = 0; j < n_out; ++j) {
    const double eps = j == 0 ? 0.0 : spec.epsilon;
    std::uniform_real_distribution<double> u(j - eps, j + eps);
    out.exponents.push_back(eps == 0.0 ? static_cast<double>(j) : u(rng));
    out.dot_sites.push_back(site(rng));
    std::uniform_real_distribution<double> h(spec.field_center - spec.field_halfwidth,
                                             spec.field_center + spec.field_halfwidth);
    out.fields.push_back(spec.field_halfwidth == 0.0 ? spec.field_center : h(rng));
  }

  const auto dot_bit = [&](unsigned k) { return n_out + (n_dot - k); };  // k in 1..N
  const auto out_bit = [&](unsigned j) { return n_out - 1 - j; };

  std::vector<Triplet> t;
  t.reserve(out_dim * dot_dim * (dot_dim + 1) / 2 + dim * (n_out + 2) / 2);

  // H_dot (x) 1, diagonal merged with the fields below.
  std::vector<double> diagonal(dim, 0.0);
  for (std::size_t o = 0; o < out_dim; ++o) {
    for (std::size_t d = 0; d < dot_dim; ++d) {
      const std::size_t row = (d << n_out) | o;
      diagonal[row] += dot_scale * dot(d, d);
      for (std::size_t e = d + 1; e < dot_dim; ++e)
        t.push_back({static_cast<std::uint32_t>(row),
                     static_cast<std::uint32_t>((e << n_out) | o), dot_scale * dot(d, e)});
    }
  }

  for (unsigned j = 0; j < n_out; ++j) {
    const std::size_t zbit = std::size_t{1} << out_bit(j);
    for (std::size_t s = 0; s < dim; ++s)
      diagonal[s] += out.fields[j] * ((s & zbit) ? 0.5 : -0.5);

    // S^x_{n_j} S^x_j flips both spins, matrix element 1/4.
    const double g = std::pow(spec.alpha, out.exponents[j]) * 0.25;
    if (g == 0.0) continue;
    const std::size_t mask = zbit | (std::size_t{1} << dot_bit(out.dot_sites[j]));
    for (std::size_t s = 0; s < dim; ++s) {
      const std::size_t partner = s ^ mask;
      if (s < partner)
        t.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(partner), g});
    }
  }
  for (std::size_t s = 0; s < dim; ++s)
    t.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s), diagonal[s]});

  out.hamiltonian = SparseSymmetricMatrix(dim, std::move(t));
  return out;
}

SparseSymmetricMatrix build_qsm(const EnsembleSpec& spec, Rng& rng, unsigned max_log2_order) {
  return build_qsm_detailed(spec, rng, max_log2_order).hamiltonian;
}

SchmidtSpectrum sample_trace_wishart(std::size_t d, Rng& rng) {
  if (d == 0) throw InvalidArgument("sample_trace_wishart: d must be >= 1");
  std::normal_distribution<double> normal;
  std::vector<double> g(d * d);
  for (auto& v : g) v = normal(rng);
  std::vector<double> w(d * d);
  simd::kernels().gram_rows(g.data(), d, d, w.data());
  double tr = 0.0;
  for (std::size_t i = 0; i < d; ++i) tr += w[i * d + i];

  const std::vector<double> ev = symmetric_eigenvalues(w, d);
  return make_schmidt_spectrum(ev, tr, d, d);
}

double WishartBidiagonal::trace() const {
  double t = 0.0;
  for (double v : diagonal) t += v * v;
  for (double v : subdiagonal) t += v * v;
  return t;
}

WishartBidiagonal sample_wishart_bidiagonal(std::size_t n, std::size_t m, Rng& rng) {
  if (n == 0 || m < n) throw InvalidArgument("sample_wishart_bidiagonal: need 1 <= n <= m");
  WishartBidiagonal b;
  b.diagonal.resize(n);
  b.subdiagonal.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::chi_squared_distribution<double> chi2(static_cast<double>(m - i));
    b.diagonal[i] = std::sqrt(chi2(rng));
    if (i + 1 < n) {
      std::chi_squared_distribution<double> chi2_off(static_cast<double>(n - 1 - i));
      b.subdiagonal[i] = std::sqrt(chi2_off(rng));
    }
  }
  return b;
}

}  // namespace rmtx
