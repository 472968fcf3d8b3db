#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rmtx/ensembles.hpp"
#include "rmtx/laws.hpp"
#include "rmtx/specfun.hpp"
#include "rmtx/spectra.hpp"
#include "rmtx/stats.hpp"

using namespace rmtx;

namespace {

// Semicircle of radius r: F(x) = 1/2 + (x sqrt(r^2 - x^2) + r^2 asin(x / r)) / (pi r^2).
double semicircle_cdf(double x, double r) {
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  return 0.5 + (x * std::sqrt(r * r - x * x) + r * r * std::asin(x / r)) / (std::numbers::pi * r * r);
}

}  // namespace

TEST_CASE("GOE spectrum follows the semicircle of radius 2 sqrt(n)") {
  const std::size_t n = 500;
  Rng rng(101);
  std::vector<double> all;
  for (int r = 0; r < 10; ++r) {
    const EigenSystem es = full_eigh(sample_goe(n, rng), false);
    all.insert(all.end(), es.eigenvalues.begin(), es.eigenvalues.end());
  }
  const double radius = 2.0 * std::sqrt(static_cast<double>(n));
  CHECK(ks_distance(all, [radius](double x) { return semicircle_cdf(x, radius); }) <= 0.03);
  // The alternative radius 2 sqrt(2n) is clearly rejected.
  const double wide = 2.0 * std::sqrt(2.0 * n);
  CHECK(ks_distance(all, [wide](double x) { return semicircle_cdf(x, wide); }) > 0.05);
}

TEST_CASE("GOE bulk spacing ratio") {
  Rng rng(102);
  std::vector<double> r;
  for (int k = 0; k < 20; ++k) {
    const EigenSystem es = full_eigh(sample_goe(1000, rng), false);
    const std::span<const double> bulk(es.eigenvalues.data() + 250, 500);
    const std::vector<double> x = spacing_ratios(bulk);
    r.insert(r.end(), x.begin(), x.end());
  }
  // Surmise-corrected large-n value 0.5307; ~10^4 ratios give sd ~ 0.002.
  CHECK(std::abs(sample_mean(r) - 0.5307) <= 0.006);
}

TEST_CASE("GOE eigenvector components are Gaussian") {
  Rng rng(103);
  const std::size_t n = 400;
  const EigenSystem es = full_eigh(sample_goe(n, rng), true);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  const std::vector<double> c = eigenvector_components(es, idx);
  CHECK(ks_distance(c, normal_cdf) <= 0.01);
  std::vector<double> y(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) y[i] = c[i] * c[i];
  CHECK(ks_distance(y, porter_thomas_cdf) <= 0.01);
}

TEST_CASE("largest Wishart eigenvalue sits at the Johnstone center") {
  Rng rng(104);
  const std::size_t n = 2048;
  const CenterScale cs = johnstone_wishart(n, n);
  std::vector<double> s;
  for (int k = 0; k < 10; ++k) s.push_back((wishart_lambda_max(sample_wishart_bidiagonal(n, n, rng)) - cs.center) / cs.scale);
  // The mean sits about 1.2 scale units below the center; 10 draws give sd 0.4.
  CHECK(std::abs(sample_mean(s) - TracyWidom1::instance().mean()) <= 1.3);
  CHECK(std::abs(sample_mean(s)) <= 3.0);
}

TEST_CASE("centered largest eigenvalue follows Tracy-Widom F1") {
  Rng rng(105);
  const std::size_t n = 400;
  const CenterScale cs = johnstone_wishart(n, n);
  std::vector<double> s;
  for (int k = 0; k < 4000; ++k) s.push_back((wishart_lambda_max(sample_wishart_bidiagonal(n, n, rng)) - cs.center) / cs.scale);
  CHECK(ks_distance(s, tracy_widom_f1_cdf) <= 0.04);
  CHECK(sample_mean(s) == doctest::Approx(TracyWidom1::instance().mean()).epsilon(0.06));
}

TEST_CASE("trace-normalized Wishart: Marchenko-Pastur bulk and smallest-eigenvalue law") {
  Rng rng(106);
  const std::size_t d = 32;
  std::vector<double> x, lmin;
  for (int k = 0; k < 4000; ++k) {
    const SchmidtSpectrum s = sample_trace_wishart(d, rng);
    const std::vector<double> r = rescale_schmidt(s);
    x.insert(x.end(), r.begin(), r.end());
    lmin.push_back(s.min());
  }
  // Finite-d edge corrections keep the distance above zero; 0.02 leaves room.
  CHECK(ks_distance(x, mp_cdf) <= 0.02);
  CHECK(sample_mean(lmin) == doctest::Approx(lmin_moment(1, static_cast<int>(d))).epsilon(0.03));
  const auto cdf = [d](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0 / d) return 1.0;
    QuadratureOptions o;
    o.abs_tol = 1e-10;
    o.rel_tol = 1e-9;
    return integrate([d](double u) { return lmin_density(u, static_cast<int>(d)); }, 0.0, t, o).value;
  };
  std::vector<double> sub(lmin.begin(), lmin.begin() + 1500);
  CHECK(ks_distance(sub, cdf) <= 1.63 / std::sqrt(1500.0));
}
