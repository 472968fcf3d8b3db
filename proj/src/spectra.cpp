#include "rmtx/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rmtx/errors.hpp"
#include "rmtx/simd/kernels.hpp"

namespace rmtx {

namespace {

lapack_int to_lapack(std::size_t n) {
  if (n > static_cast<std::size_t>(std::numeric_limits<lapack_int>::max()))
    throw ResourceLimit("matrix too large for LAPACK");
  return static_cast<lapack_int>(n);
}

void check_info(lapack_int info, const char* routine) {
  if (info < 0) throw InvalidArgument(std::string(routine) + ": illegal argument");
  if (info > 0) throw ConvergenceFailure(std::string(routine) + " did not converge", 0.0, info);
}

}  // namespace

EigenSystem full_eigh(const DenseSymmetricMatrix& m, bool want_vectors) {
  if (!m.all_finite()) throw InvalidArgument("full_eigh: non-finite entries");
  const std::size_t n = m.order();
  EigenSystem es;
  es.order = n;
  if (n == 0) return es;
  std::vector<double> a = m.to_lapack_lower();
  es.eigenvalues.resize(n);
  const lapack_int ln = to_lapack(n);
  if (!want_vectors) {
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', ln, a.data(), ln, es.eigenvalues.data()),
               "dsyevd");
    return es;
  }
  es.eigenvectors.resize(n * n);
  std::vector<lapack_int> support(2 * n);
  lapack_int found = 0;
  check_info(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', ln, a.data(), ln, 0.0, 0.0, 0, 0, 0.0,
                            &found, es.eigenvalues.data(), es.eigenvectors.data(), ln,
                            support.data()),
             "dsyevr");
  return es;
}

EigenSystem eigh_window(const DenseSymmetricMatrix& m, std::size_t first, std::size_t count) {
  if (!m.all_finite()) throw InvalidArgument("eigh_window: non-finite entries");
  const std::size_t n = m.order();
  if (count == 0 || first + count > n) throw InvalidArgument("eigh_window: window out of range");
  EigenSystem es;
  es.order = n;
  es.first_index = first;
  std::vector<double> a = m.to_lapack_lower();
  std::vector<double> w(n);
  es.eigenvectors.resize(n * count);
  std::vector<lapack_int> support(2 * count);
  lapack_int found = 0;
  const lapack_int ln = to_lapack(n);
  check_info(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', ln, a.data(), ln, 0.0, 0.0,
                            to_lapack(first + 1), to_lapack(first + count), 0.0, &found, w.data(),
                            es.eigenvectors.data(), ln, support.data()),
             "dsyevr");
  if (static_cast<std::size_t>(found) != count)
    throw ConvergenceFailure("dsyevr returned a short window", 0.0, found);
  es.eigenvalues.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(count));
  return es;
}

std::vector<double> symmetric_eigenvalues(std::vector<double>& full, std::size_t n) {
  if (full.size() != n * n) throw InvalidArgument("symmetric_eigenvalues: size mismatch");
  std::vector<double> w(n);
  if (n == 0) return w;
  const lapack_int ln = to_lapack(n);
  // Row-major upper == column-major lower.
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', ln, full.data(), ln, w.data()), "dsyevd");
  return w;
}

SchmidtSpectrum make_schmidt_spectrum(std::span<const double> ascending, double trace,
                                      std::size_t d1, std::size_t d2) {
  if (!(trace > 0.0)) throw DomainError("Schmidt spectrum of a zero state");
  SchmidtSpectrum s;
  s.dim1 = d1;
  s.dim2 = d2;
  s.values.resize(ascending.size());
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    const double v = ascending[ascending.size() - 1 - i] / trace;
    if (v < -1e-14) throw DomainError("Schmidt eigenvalue below roundoff: " + std::to_string(v));
    s.values[i] = std::max(0.0, v);
  }
  return s;
}

IndexWindow mid_spectrum_window(std::size_t order, std::size_t count) {
  if (count == 0 || count > order)
    throw InvalidArgument("mid_spectrum_window: need 1 <= count <= order");
  return {(order - count) / 2, count};
}

std::vector<std::span<const double>> mid_spectrum_states(const EigenSystem& es,
                                                         std::size_t count) {
  if (!es.has_vectors()) throw InvalidArgument("mid_spectrum_states: no eigenvectors");
  const IndexWindow w = mid_spectrum_window(es.order, count);
  if (w.first < es.first_index || w.first + w.count > es.first_index + es.count())
    throw InvalidArgument("mid_spectrum_states: window not contained in the eigensystem");
  std::vector<std::span<const double>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(es.vector(w.first - es.first_index + k));
  return out;
}

SchmidtSpectrum schmidt_spectrum(std::span<const double> state, std::size_t d1, std::size_t d2) {
  if (d1 == 0 || d2 == 0 || state.size() != d1 * d2)
    throw InvalidArgument("schmidt_spectrum: state length must equal d1 * d2");
  const auto& k = simd::kernels();
  const double norm2 = k.sum_squares(state.data(), state.size());
  if (std::abs(norm2 - 1.0) > 2e-10) throw InvalidArgument("schmidt_spectrum: state not normalized");

  // The smaller side gives the nonzero part of the spectrum.
  std::vector<double> rho;
  std::size_t d = d1;
  if (d1 <= d2) {
    rho.resize(d1 * d1);
    k.gram_rows(state.data(), d1, d2, rho.data());
  } else {
    std::vector<double> ct(d2 * d1);
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t j = 0; j < d2; ++j) ct[j * d1 + i] = state[i * d2 + j];
    d = d2;
    rho.resize(d2 * d2);
    k.gram_rows(ct.data(), d2, d1, rho.data());
  }
  const std::vector<double> ev = symmetric_eigenvalues(rho, d);
  return make_schmidt_spectrum(ev, norm2, d1, d2);
}

std::vector<double> rescale_schmidt(const SchmidtSpectrum& s) {
  if (!s.square()) throw InvalidArgument("rescale_schmidt: bipartition must be square");
  const double dim = static_cast<double>(s.dim1);
  std::vector<double> out(s.values.size());
  std::transform(s.values.begin(), s.values.end(), out.begin(), [dim](double v) { return dim * v; });
  return out;
}

double extreme_eigenvalue(const SymmetricOperator& op, Extreme which, const LanczosOptions& opts) {
  const std::size_t n = op.order;
  if (n == 0) throw InvalidArgument("extreme_eigenvalue: empty operator");
  const double sign = which == Extreme::Max ? 1.0 : -1.0;
  const auto& kern = simd::kernels();
  const std::size_t m = std::max<std::size_t>(2, std::min(opts.krylov_dim, n));

  std::vector<double> basis(m * n);
  std::vector<double> w(n);
  std::vector<double> alpha(m), beta(m);
  std::vector<double> td(m), te(m), tz(m * m);

  Rng rng(opts.seed);
  std::normal_distribution<double> normal;
  std::vector<double> start(n);
  for (auto& v : start) v = normal(rng);

  double theta = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;

  while (iterations < opts.max_iterations) {
    kern.scale(1.0 / std::sqrt(kern.sum_squares(start.data(), n)), start.data(), n);
    std::copy(start.begin(), start.end(), basis.begin());
    std::size_t k = 0;
    std::size_t steps = 0;
    for (; k < m && iterations < opts.max_iterations; ++k) {
      const double* vk = basis.data() + k * n;
      op.apply({vk, n}, w);
      ++iterations;
      if (sign < 0) kern.scale(-1.0, w.data(), n);
      alpha[k] = kern.dot(w.data(), vk, n);
      // Two Gram-Schmidt passes against the whole basis.
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j <= k; ++j) {
          const double* vj = basis.data() + j * n;
          kern.axpy(-kern.dot(w.data(), vj, n), vj, w.data(), n);
        }
      beta[k] = std::sqrt(kern.sum_squares(w.data(), n));
      steps = k + 1;

      const bool check = steps < 24 || steps % 4 == 0 || steps == m || steps == n;
      const double scale_ref = std::max(std::abs(theta), op.norm_bound * 1e-12);
      const bool breakdown = beta[k] <= 1e-13 * std::max(scale_ref, std::abs(alpha[k]));
      if (check || breakdown) {
        std::copy_n(alpha.begin(), steps, td.begin());
        std::copy_n(beta.begin(), steps - 1, te.begin());
        const lapack_int ls = static_cast<lapack_int>(steps);
        check_info(LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', ls, td.data(), te.data(), tz.data(), ls),
                   "dstev");
        theta = td[steps - 1];
        const double last = tz[(steps - 1) * steps + (steps - 1)];
        residual = beta[k] * std::abs(last);
        const double tol = opts.rel_tol * std::max(std::abs(theta), op.norm_bound * 1e-12);
        if (residual <= tol || breakdown || steps == n) return sign * theta;
      }
      if (k + 1 < m) {
        kern.scale(1.0 / beta[k], w.data(), n);
        std::copy(w.begin(), w.end(), basis.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
      }
    }
    // Explicit restart from the current Ritz vector.
    std::copy_n(alpha.begin(), steps, td.begin());
    std::copy_n(beta.begin(), steps - 1, te.begin());
    const lapack_int ls = static_cast<lapack_int>(steps);
    check_info(LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', ls, td.data(), te.data(), tz.data(), ls), "dstev");
    theta = td[steps - 1];
    std::fill(start.begin(), start.end(), 0.0);
    for (std::size_t j = 0; j < steps; ++j)
      kern.axpy(tz[(steps - 1) * steps + j], basis.data() + j * n, start.data(), n);
  }
  throw ConvergenceFailure("Lanczos reached the iteration cap", sign * theta, residual);
}

double extreme_eigenvalue(const DenseSymmetricMatrix& m, Extreme which, const LanczosOptions& opts) {
  if (!m.all_finite()) throw InvalidArgument("extreme_eigenvalue: non-finite entries");
  return extreme_eigenvalue(as_operator(m), which, opts);
}

double extreme_eigenvalue(const SparseSymmetricMatrix& m, Extreme which, const LanczosOptions& opts) {
  return extreme_eigenvalue(as_operator(m), which, opts);
}

double wishart_lambda_max(const WishartBidiagonal& b) {
  const std::size_t n = b.diagonal.size();
  if (n == 0) throw InvalidArgument("wishart_lambda_max: empty matrix");
  std::vector<double> d(n), e(n > 1 ? n - 1 : 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double sub = i > 0 ? b.subdiagonal[i - 1] : 0.0;
    d[i] = b.diagonal[i] * b.diagonal[i] + sub * sub;
    if (i + 1 < n) e[i] = b.diagonal[i] * b.subdiagonal[i];
  }
  const lapack_int ln = to_lapack(n);
  lapack_int found = 0, nsplit = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  check_info(LAPACKE_dstebz('I', 'E', ln, 0.0, 0.0, ln, ln, abstol, d.data(), e.data(), &found,
                            &nsplit, w.data(), iblock.data(), isplit.data()),
             "dstebz");
  return w[0];
}

std::vector<double> spacing_ratios(std::span<const double> eigenvalues) {
  if (eigenvalues.size() < 3) throw InvalidArgument("spacing_ratios: need at least 3 levels");
  double scale = 0.0;
  for (double v : eigenvalues) scale = std::max(scale, std::abs(v));
  const double merge = 1e-13 * scale;

  std::vector<double> levels;
  levels.reserve(eigenvalues.size());
  for (double v : eigenvalues) {
    if (!levels.empty() && v < levels.back())
      throw InvalidArgument("spacing_ratios: eigenvalues must be ascending");
    if (levels.empty() || v - levels.back() > merge) levels.push_back(v);
  }
  if (levels.size() < 3) throw InvalidArgument("spacing_ratios: fewer than 3 distinct levels");

  std::vector<double> r;
  r.reserve(levels.size() - 2);
  for (std::size_t i = 0; i + 2 < levels.size(); ++i) {
    const double s0 = levels[i + 1] - levels[i];
    const double s1 = levels[i + 2] - levels[i + 1];
    r.push_back(std::min(s0, s1) / std::max(s0, s1));
  }
  return r;
}

std::vector<double> eigenvector_components(const EigenSystem& es,
                                           std::span<const std::size_t> states) {
  if (!es.has_vectors()) throw InvalidArgument("eigenvector_components: no eigenvectors");
  const double root = std::sqrt(static_cast<double>(es.order));
  std::vector<double> out;
  out.reserve(states.size() * es.order);
  for (std::size_t k : states) {
    if (k >= es.count()) throw InvalidArgument("eigenvector_components: state index out of range");
    for (double c : es.vector(k)) out.push_back(root * c);
  }
  return out;
}

}  // namespace rmtx
