#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "rmtx/ensembles.hpp"
#include "rmtx/errors.hpp"
#include "rmtx/spectra.hpp"

using namespace rmtx;

namespace {

EnsembleSpec um_spec(unsigned n, unsigned l, double alpha) {
  EnsembleSpec s;
  s.kind = EnsembleKind::Ultrametric;
  s.dot_size = n;
  s.chain_length = l;
  s.alpha = alpha;
  return s;
}

EnsembleSpec qsm_spec(unsigned n, unsigned l, double alpha) {
  EnsembleSpec s = um_spec(n, l, alpha);
  s.kind = EnsembleKind::QuantumSun;
  return s;
}

// Dense Kronecker product of single-site 2x2 operators; site 0 is the most
// significant bit.
std::vector<double> kron_chain(const std::vector<std::vector<double>>& ops) {
  std::vector<double> out = {1.0};
  std::size_t dim = 1;
  for (const auto& op : ops) {
    std::vector<double> next(dim * 2 * dim * 2, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b)
            next[(i * 2 + a) * (dim * 2) + (j * 2 + b)] = out[i * dim + j] * op[a * 2 + b];
    out = std::move(next);
    dim *= 2;
  }
  return out;
}

}  // namespace

TEST_CASE("ensemble names round-trip") {
  for (EnsembleKind k : {EnsembleKind::Goe, EnsembleKind::Wishart, EnsembleKind::Ultrametric,
                         EnsembleKind::QuantumSun}) {
    CHECK(parse_ensemble_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS((void)parse_ensemble_kind("gue"), InvalidArgument);
}

TEST_CASE("spec validation") {
  EnsembleSpec s;
  CHECK_NOTHROW(s.validate());
  s.alpha = 1.5;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.alpha = 0.5;
  s.epsilon = 0.5;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.epsilon = 0.2;
  s.field_halfwidth = -1.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("GOE entry variances") {
  Rng rng(1);
  double s_diag = 0.0, s_off = 0.0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const DenseSymmetricMatrix m = sample_goe(2, rng);
    s_diag += m(0, 0) * m(0, 0);
    s_off += m(0, 1) * m(0, 1);
  }
  CHECK(s_diag / n == doctest::Approx(2.0).epsilon(0.02));
  CHECK(s_off / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS((void)sample_goe(0, rng), InvalidArgument);
}

TEST_CASE("samplers are deterministic per seed") {
  Rng a(99), b(99);
  CHECK(sample_goe(2, a) == sample_goe(2, b));
  const EnsembleSpec um = um_spec(1, 3, 0.9);
  Rng c(5), d(5);
  CHECK(build_ultrametric(um, c) == build_ultrametric(um, d));
  const EnsembleSpec q = qsm_spec(2, 3, 0.9);
  Rng e(5), f(5);
  CHECK(build_qsm(q, e) == build_qsm(q, f));
}

TEST_CASE("ultrametric at alpha = 0 is block diagonal") {
  Rng rng(2);
  const EnsembleSpec s = um_spec(2, 3, 0.0);
  const DenseSymmetricMatrix h = build_ultrametric(s, rng);
  REQUIRE(h.order() == 32);
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = i; j < 32; ++j)
      if (i / 4 != j / 4) CHECK(h(i, j) == 0.0);
}

TEST_CASE("ultrametric order and resource limit") {
  Rng rng(3);
  CHECK(build_ultrametric(um_spec(1, 4, 0.9), rng).order() == 32);
  CHECK_THROWS_AS((void)build_ultrametric(um_spec(1, 20, 0.9), rng), ResourceLimit);
}

TEST_CASE("ultrametric entry-variance profile matches the level sum") {
  const unsigned n = 1, l = 3;
  const double alpha = 0.8, j_coupling = 1.3;
  EnsembleSpec s = um_spec(n, l, alpha);
  s.coupling = j_coupling;
  const std::size_t dim = std::size_t{1} << (n + l);

  // Expected variance: sum over levels whose block holds (i, j).
  auto expected = [&](std::size_t i, std::size_t j) {
    double v = 0.0;
    for (unsigned lev = 0; lev <= l; ++lev) {
      const std::size_t block = std::size_t{1} << (n + lev);
      if (i / block != j / block) continue;
      const double w = lev == 0 ? 1.0 : j_coupling * std::pow(alpha, lev);
      v += w * w * (i == j ? 2.0 : 1.0) / (static_cast<double>(block) + 1.0);
    }
    return v;
  };

  std::vector<double> acc(dim * dim, 0.0);
  const int reps = 10000;
  Rng rng(4);
  for (int r = 0; r < reps; ++r) {
    const DenseSymmetricMatrix h = build_ultrametric(s, rng);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) acc[i * dim + j] += h(i, j) * h(i, j);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j)
      worst = std::max(worst, std::abs(acc[i * dim + j] / reps / expected(i, j) - 1.0));
  // 10^4 samples of a chi^2_1 variable: relative sd 1.4%; 136 entries.
  CHECK(worst <= 0.07);
}

TEST_CASE("quantum sun: order, sparsity bound and spin structure") {
  const unsigned n = 2, l = 3;
  EnsembleSpec s = qsm_spec(n, l, 0.7);
  Rng rng(6);
  const QuantumSunRealization q = build_qsm_detailed(s, rng);
  const std::size_t dim = 32, dot_dim = 4, out_dim = 8;
  REQUIRE(q.hamiltonian.order() == dim);
  CHECK(q.hamiltonian.nonzeros() <= dot_dim * dot_dim * out_dim / 2 + l * dim / 2 + dim);
  CHECK(q.exponents[0] == 0.0);
  for (unsigned j = 0; j < l; ++j) {
    CHECK(q.dot_sites[j] >= 1);
    CHECK(q.dot_sites[j] <= n);
    CHECK(std::abs(q.exponents[j] - j) <= s.epsilon);
    CHECK(std::abs(q.fields[j] - s.field_center) <= s.field_halfwidth);
  }

  // Subtract couplings and fields built from explicit Kronecker products; the
  // remainder must be H_dot (x) identity.
  const std::vector<double> id = {1, 0, 0, 1}, sx = {0, 0.5, 0.5, 0}, sz = {-0.5, 0, 0, 0.5};
  std::vector<double> h(dim * dim, 0.0);
  const DenseSymmetricMatrix dense = q.hamiltonian.to_dense();
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) h[i * dim + j] = dense(i, j);
  for (unsigned j = 0; j < l; ++j) {
    std::vector<std::vector<double>> coupling(n + l, id), field(n + l, id);
    coupling[q.dot_sites[j] - 1] = sx;
    coupling[n + j] = sx;
    field[n + j] = sz;
    const std::vector<double> c = kron_chain(coupling), f = kron_chain(field);
    const double g = std::pow(s.alpha, q.exponents[j]);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] -= g * c[k] + q.fields[j] * f[k];
  }
  for (std::size_t a = 0; a < dot_dim; ++a)
    for (std::size_t b = 0; b < dot_dim; ++b)
      for (std::size_t o = 0; o < out_dim; ++o)
        for (std::size_t p = 0; p < out_dim; ++p) {
          const double v = h[(a * out_dim + o) * dim + (b * out_dim + p)];
          if (o != p) {
            CHECK(std::abs(v) <= 1e-14);
          } else {
            CHECK(v == doctest::Approx(h[(a * out_dim) * dim + b * out_dim]).epsilon(1e-12));
          }
        }
}

TEST_CASE("quantum sun dot has unit Hilbert-Schmidt scale on average") {
  // ||H_dot||^2 / 2^N averaged: (gamma^2/(2^N+1)) * (2^N (2^N - 1) + 2 * 2^N) / 2^N = gamma^2.
  EnsembleSpec s = qsm_spec(3, 1, 0.0);
  s.field_halfwidth = 0.0;
  s.field_center = 0.0;
  Rng rng(7);
  double acc = 0.0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    const QuantumSunRealization q = build_qsm_detailed(s, rng);
    const DenseSymmetricMatrix d = q.hamiltonian.to_dense();
    double f = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) f += d(i, j) * d(i, j);
    // Remove the j = 0 coupling (alpha^0 = 1): 16 entries of 1/4.
    f -= 16 * 0.0625;
    acc += f / 16.0;
  }
  CHECK(acc / reps == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("quantum sun at alpha = 0 keeps only the first coupling") {
  const unsigned n = 2, l = 4;
  Rng rng(8);
  const SparseSymmetricMatrix h = build_qsm(qsm_spec(n, l, 0.0), rng);
  // Off-diagonal entries may only flip dot bits and outside spin 0 (bit l-1).
  const std::size_t allowed = ((std::size_t{1} << n) - 1) << l | (std::size_t{1} << (l - 1));
  for (const Triplet& t : h.entries()) {
    if (t.row == t.col) continue;
    CHECK(((t.row ^ t.col) & ~allowed) == 0);
  }
}

TEST_CASE("quantum sun argument checks") {
  Rng rng(9);
  CHECK_THROWS_AS((void)build_qsm(qsm_spec(0, 4, 0.9), rng), InvalidArgument);
  CHECK_THROWS_AS((void)build_qsm(um_spec(1, 4, 0.9), rng), InvalidArgument);
  CHECK_THROWS_AS((void)build_qsm(qsm_spec(5, 10, 0.9), rng, 14), ResourceLimit);
}

TEST_CASE("trace-normalized Wishart spectra") {
  Rng rng(10);
  const SchmidtSpectrum one = sample_trace_wishart(1, rng);
  REQUIRE(one.values.size() == 1);
  CHECK(one.values[0] == doctest::Approx(1.0));
  for (int t = 0; t < 50; ++t) {
    const SchmidtSpectrum s = sample_trace_wishart(16, rng);
    const double sum = std::accumulate(s.values.begin(), s.values.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(s.min() >= -1e-14);
  }
  CHECK_THROWS_AS((void)sample_trace_wishart(0, rng), InvalidArgument);
}

TEST_CASE("bidiagonal Wishart second moment") {
  // E[tr W] = n m for W = G G^T with G n x m.
  Rng rng(11);
  const std::size_t n = 10, m = 14;
  double acc = 0.0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) acc += sample_wishart_bidiagonal(n, m, rng).trace();
  CHECK(acc / reps == doctest::Approx(static_cast<double>(n * m)).epsilon(0.005));
  CHECK_THROWS_AS((void)sample_wishart_bidiagonal(5, 4, rng), InvalidArgument);
}
