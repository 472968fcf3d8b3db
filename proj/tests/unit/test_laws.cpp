#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "rmtx/errors.hpp"
#include "rmtx/laws.hpp"
#include "rmtx/specfun.hpp"

using namespace rmtx;

namespace {

double catalan(unsigned k) {
  // C_k = C_{k-1} * 2(2k-1)/(k+1), exact in doubles for k <= 12.
  double c = 1.0;
  for (unsigned i = 1; i <= k; ++i) c = c * 2.0 * (2.0 * i - 1.0) / (i + 1.0);
  return c;
}

double integral(const RealFunction& f, double lo, double hi) {
  QuadratureOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-11;
  return integrate(f, lo, hi, o).value;
}

// F1(s) = det(I - A_s) on L^2(0, inf) with A_s(x, y) = Ai(x + y + s), by
// Gauss-Legendre discretization on [0, 16] and an LU determinant.
class FredholmF1 {
 public:
  FredholmF1() {
    const std::size_t m = 64;
    const double len = 16.0;
    nodes_.resize(m);
    weights_.resize(m);
    // Gauss-Legendre nodes by Newton iteration on P_m.
    for (std::size_t i = 0; i < m; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= m; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes_[i] = 0.5 * len * (x + 1.0);
      weights_[i] = len / ((1.0 - x * x) * dp * dp);
    }
  }

  double operator()(double s) const {
    const std::size_t m = nodes_.size();
    std::vector<double> a(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a[i * m + j] = (i == j ? 1.0 : 0.0) - std::sqrt(weights_[i] * weights_[j]) *
                                                  boost::math::airy_ai(nodes_[i] + nodes_[j] + s);
    double det = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < m; ++i)
        if (std::abs(a[i * m + k]) > std::abs(a[piv * m + k])) piv = i;
      if (piv != k) {
        for (std::size_t j = 0; j < m; ++j) std::swap(a[k * m + j], a[piv * m + j]);
        det = -det;
      }
      det *= a[k * m + k];
      for (std::size_t i = k + 1; i < m; ++i) {
        const double f = a[i * m + k] / a[k * m + k];
        for (std::size_t j = k; j < m; ++j) a[i * m + j] -= f * a[k * m + j];
      }
    }
    return det;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace

TEST_CASE("law names round-trip") {
  for (LawId id : {LawId::MarchenkoPastur, LawId::PorterThomas, LawId::EigvecMarginal, LawId::Normal,
                   LawId::Ghd, LawId::Gev, LawId::LambdaMin, LawId::TracyWidom1}) {
    CHECK(parse_law_id(to_string(id)) == id);
  }
  CHECK_THROWS_AS((void)parse_law_id("cauchy"), InvalidArgument);
}

TEST_CASE("Marchenko-Pastur density and cdf") {
  CHECK(mp_density(2.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
  CHECK(mp_density(4.0) == 0.0);
  CHECK(mp_density(4.5) == 0.0);
  CHECK(mp_density(-1.0) == 0.0);
  CHECK_THROWS_AS((void)mp_density(0.0), SingularPoint);
  CHECK(mp_cdf(0.0) == 0.0);
  CHECK(mp_cdf(4.0) == doctest::Approx(1.0));
  CHECK(integral(mp_density, 0.0, 4.0) == doctest::Approx(1.0).epsilon(1e-9));
  for (double x : {0.3, 1.0, 2.2, 3.7}) {
    CAPTURE(x);
    CHECK(mp_cdf(x) == doctest::Approx(integral(mp_density, 0.0, x)).epsilon(1e-9));
  }
}

TEST_CASE("Marchenko-Pastur moments are Catalan numbers") {
  for (unsigned k = 0; k <= 12; ++k) {
    CAPTURE(k);
    CHECK(std::abs(mp_moment(k) / catalan(k) - 1.0) <= 1e-10);
  }
  CHECK(catalan(12) == 208012.0);
  // Quadrature of the density as a second route.
  for (unsigned k : {1u, 4u, 9u}) {
    const double q = integral([k](double x) { return std::pow(x, k) * mp_density(x); }, 0.0, 4.0);
    CHECK(q == doctest::Approx(catalan(k)).epsilon(1e-8));
  }
  // Root moments approach the support edge 4 slowly: C_k^{1/k} ~ 4 (1 - 1.5 ln k / k).
  CHECK(std::pow(mp_moment(40), 1.0 / 40.0) == doctest::Approx(std::pow(catalan(40), 1.0 / 40.0)).epsilon(1e-12));
  CHECK(std::pow(catalan(40), 1.0 / 40.0) == doctest::Approx(3.43136).epsilon(1e-5));
  CHECK(std::pow(mp_moment(70), 1.0 / 70.0) >= 3.6);
  double prev = 0.0;
  for (unsigned k = 1; k <= 100; ++k) {
    const double r = std::pow(mp_moment(k), 1.0 / k);
    CHECK(r > prev);
    CHECK(r < 4.0);
    prev = r;
  }
}

TEST_CASE("Porter-Thomas law") {
  CHECK(porter_thomas(1.0) == doctest::Approx(0.2419707245191434).epsilon(1e-12));
  CHECK_THROWS_AS((void)porter_thomas(-1.0), DomainError);
  CHECK_THROWS_AS((void)porter_thomas(0.0), DomainError);
  // The transformed infinite range can round nodes to y = 0; split at 1.
  const auto mass = [](unsigned k) {
    const auto f = [k](double y) { return y > 0.0 ? std::pow(y, k) * porter_thomas(y) : 0.0; };
    return integral(f, 0.0, 1.0) + integral(f, 1.0, INFINITY);
  };
  CHECK(mass(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mass(1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(porter_thomas_cdf(1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))));
}

TEST_CASE("eigenvector component marginal") {
  // n = 3: uniform on [-1, 1].
  CHECK(eigvec_marginal(0.3, 3) == doctest::Approx(0.5));
  CHECK_THROWS_AS((void)eigvec_marginal(1.2, 10), DomainError);
  CHECK_THROWS_AS((void)eigvec_marginal(-1.0, 10), DomainError);
  for (int n : {3, 10, 100}) {
    CAPTURE(n);
    CHECK(integral([n](double x) { return eigvec_marginal(x, n); }, -1.0, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(integral([n](double x) { return x * x * eigvec_marginal(x, n); }, -1.0, 1.0) ==
          doctest::Approx(1.0 / n).epsilon(1e-9));
  }
  // sqrt(n) x tends to the standard normal.
  const int n = 4000;
  CHECK(eigvec_marginal(0.5 / std::sqrt(n), n) / std::sqrt(n) ==
        doctest::Approx(normal_pdf(0.5)).epsilon(1e-3));
}

TEST_CASE("normal law") {
  CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("GHD is symmetric, normalized and has unit variance") {
  for (auto [b, xi] : {std::pair{1.43068, 1.17378}, std::pair{3.9, 1.1}, std::pair{0.5, 0.3},
                       std::pair{-0.7, 2.0}}) {
    CAPTURE(b);
    CAPTURE(xi);
    const GhdLaw g(b, xi);
    CHECK(g.pdf(0.7) == doctest::Approx(g.pdf(-0.7)));
    const auto pdf = [&g](double x) { return g.pdf(x); };
    CHECK(integral(pdf, -INFINITY, INFINITY) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(integral([&g](double x) { return x * x * g.pdf(x); }, -INFINITY, INFINITY) ==
          doctest::Approx(1.0).epsilon(1e-8));
    // Shape parameters from Bessel ratios (Boost oracle).
    const double a = std::sqrt(xi * boost::math::cyl_bessel_k(b + 1.0, xi) /
                               boost::math::cyl_bessel_k(b, xi));
    CHECK(g.a() == doctest::Approx(a).epsilon(1e-12));
    CHECK(g.c() == doctest::Approx(xi / a).epsilon(1e-12));
    CHECK(ghd_pdf(0.4, b, xi) == doctest::Approx(g.pdf(0.4)));
  }
}

TEST_CASE("GHD kernel against an independent mixture representation") {
  // A normal variance mixture with GIG mixing density reproduces the GHD:
  // f(x) = int N(x; 0, v) GIG(v) dv. Checked at a few points, unnormalized
  // constants cancel through the ratio to x = 0.
  const double b = 1.43068, xi = 1.17378;
  const GhdLaw g(b, xi);
  const double a = g.a(), c = g.c();
  // Mixing weight v^{b-1} exp(-(a^2 v + c^2 / v)/2).
  auto mixture = [&](double x) {
    return integral(
        [&](double v) {
          if (v <= 0.0) return 0.0;
          return std::pow(v, b - 1.0) * std::exp(-0.5 * (a * a * v + c * c / v)) *
                 std::exp(-0.5 * x * x / v) / std::sqrt(v);
        },
        0.0, INFINITY);
  };
  const double m0 = mixture(0.0);
  for (double x : {0.5, 1.5, 3.0}) {
    CAPTURE(x);
    CHECK(mixture(x) / m0 == doctest::Approx(g.pdf(x) / g.pdf(0.0)).epsilon(1e-7));
  }
}

TEST_CASE("GHD tends to the normal law for large xi") {
  const GhdLaw g(1.0, 100.0);
  double sup = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.01) sup = std::max(sup, std::abs(g.pdf(x) - normal_pdf(x)));
  CHECK(sup <= 1e-2);
  const GhdLaw h(1.0, 2000.0);
  CHECK(h.pdf(0.0) == doctest::Approx(normal_pdf(0.0)).epsilon(1e-3));
}

TEST_CASE("GHD closed-form constant agrees with quadrature") {
  const GhdLaw g(1.43068, 1.17378);
  CHECK(g.log_analytic_constant() == doctest::Approx(-g.log_normalizer()).epsilon(1e-8));
  CHECK_THROWS_AS(GhdLaw(1.0, -0.5), DomainError);
}

TEST_CASE("GEV law") {
  CHECK(gev_cdf(0.0, 0.2) == doctest::Approx(std::exp(-1.0)));
  CHECK(gev_cdf(0.0, 0.0) == doctest::Approx(std::exp(-1.0)));
  // xi > 0: bounded above at 1/xi.
  CHECK(gev_pdf(5.0, 0.2) == 0.0);
  CHECK(gev_cdf(5.0, 0.2) == 1.0);
  // xi < 0: bounded below at 1/xi.
  CHECK(gev_pdf(-4.0, -0.3) == 0.0);
  CHECK(gev_cdf(-4.0, -0.3) == 0.0);
  for (double xi : {-0.3, 0.0, 0.2}) {
    CAPTURE(xi);
    const double lo = xi < 0.0 ? 1.0 / xi : -INFINITY;
    const double hi = xi > 0.0 ? 1.0 / xi : INFINITY;
    CHECK(integral([xi](double y) { return gev_pdf(y, xi); }, lo, hi) ==
          doctest::Approx(1.0).epsilon(1e-9));
    for (double p : {0.1, 0.5, 0.9}) CHECK(gev_cdf(gev_quantile(p, xi), xi) == doctest::Approx(p));
    CHECK(gev_cdf(0.3, xi) == doctest::Approx(integral([xi](double y) { return gev_pdf(y, xi); }, lo, 0.3))
                                  .epsilon(1e-9));
  }
  // Gumbel limit is continuous in the shape.
  for (double y : {-1.0, 0.0, 2.0}) {
    CHECK(gev_pdf(y, 1e-9) == doctest::Approx(gev_pdf(y, 0.0)).epsilon(1e-7));
    CHECK(gev_pdf(y, -1e-9) == doctest::Approx(gev_pdf(y, 0.0)).epsilon(1e-7));
    CHECK(gev_pdf(y, 0.0) == doctest::Approx(std::exp(-y - std::exp(-y))));
  }
  CHECK(gev_pdf(1.0, 0.5, 2.0, 0.1) == doctest::Approx(gev_pdf(0.25, 0.1) / 2.0));
  CHECK(gev_log_pdf(0.3, 0.1) == doctest::Approx(std::log(gev_pdf(0.3, 0.1))));
}

TEST_CASE("smallest Schmidt eigenvalue law: normalization and moments") {
  for (int d : {2, 4, 8, 64}) {
    CAPTURE(d);
    const double top = 1.0 / d;
    const auto f = [d](double x) { return lmin_density(x, d); };
    CHECK(integral(f, 0.0, top) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(lmin_moment(0, d) == doctest::Approx(1.0));
    for (unsigned k : {1u, 2u, 3u}) {
      const double q = integral([&](double x) { return std::pow(x, k) * f(x); }, 0.0, top);
      CHECK(lmin_moment(k, d) == doctest::Approx(q).epsilon(1e-7));
    }
    CHECK(lmin_density(1.2 / d, d) == 0.0);
    CHECK(lmin_density(-0.1, d) == 0.0);
  }
  // Moments decrease in k and stay below (1/D)^k.
  for (unsigned k = 1; k <= 5; ++k) {
    CHECK(lmin_moment(k, 64) < lmin_moment(k - 1, 64));
    CHECK(lmin_moment(k, 64) < std::pow(1.0 / 64.0, k));
  }
}

TEST_CASE("smallest Schmidt eigenvalue moments at D = 64") {
  // Oracle values: 30-digit evaluation of the closed form and quadrature of
  // the density agree on these.
  const double want[] = {2.647515024e-06, 2.229450465e-11, 3.242053336e-16, 6.764826809e-21,
                         1.848525528e-25};
  for (unsigned k = 1; k <= 5; ++k) {
    CAPTURE(k);
    CHECK(lmin_moment(k, 64) == doctest::Approx(want[k - 1]).epsilon(1e-8));
    CHECK(std::exp(lmin_log_moment(k, 64)) == doctest::Approx(want[k - 1]).epsilon(1e-8));
  }
}

TEST_CASE("Johnstone centering") {
  const CenterScale cs = johnstone_center_scale(64);
  CHECK(cs.center == doctest::Approx(0.0625));
  CHECK(cs.scale == doctest::Approx(2.46076e-3).epsilon(1e-5));
  CHECK(johnstone_center_scale(128).scale / cs.scale == doctest::Approx(std::pow(2.0, -5.0 / 3.0)));
  const CenterScale w = johnstone_wishart(100, 100);
  CHECK(w.center == doctest::Approx(std::pow(std::sqrt(99.0) + 10.0, 2)));
}

TEST_CASE("Tracy-Widom F1 against a Fredholm determinant oracle") {
  const TracyWidom1& tw = TracyWidom1::instance();
  const FredholmF1 f1;
  for (double s : {-6.0, -3.0, -1.2065, 0.0, 1.0, 2.5, 4.0}) {
    CAPTURE(s);
    CHECK(std::abs(tw.cdf(s) - f1(s)) <= 1e-7);
  }

  // Moments from the oracle cdf: E[s] = int_0^inf (1-F) - int_-inf^0 F.
  double mean = 0.0, second = 0.0;
  const double h = 0.02;
  for (double s = -10.0; s < 8.0 - 1e-12; s += h) {
    const double mid = s + 0.5 * h;
    const double f = f1(mid);
    if (mid < 0.0) {
      mean -= f * h;
      second += -2.0 * mid * f * h;
    } else {
      mean += (1.0 - f) * h;
      second += 2.0 * mid * (1.0 - f) * h;
    }
  }
  const double var = second - mean * mean;
  CHECK(tw.mean() == doctest::Approx(mean).epsilon(1e-4));
  CHECK(tw.variance() == doctest::Approx(var).epsilon(1e-3));
  CHECK(std::abs(tw.mean() + 1.2065) <= 0.01);
  CHECK(std::abs(tw.variance() - 1.6078) <= 0.02);
}

TEST_CASE("Tracy-Widom F1 density shape") {
  const TracyWidom1& tw = TracyWidom1::instance();
  CHECK(integral([&tw](double s) { return tw.pdf(s); }, -12.0, 8.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tw.cdf(-20.0) >= 0.0);
  CHECK(tw.cdf(-20.0) < 1e-20);
  CHECK(tw.cdf(10.0) <= 1.0);
  CHECK(1.0 - tw.cdf(10.0) < 1e-9);
  // Right tail ~ exp(-2/3 s^{3/2}) / (4 s^{3/4}) up to constants: log slope.
  const double r = std::log(tw.pdf(5.5) / tw.pdf(5.0));
  CHECK(r == doctest::Approx(-(2.0 / 3.0) * (std::pow(5.5, 1.5) - std::pow(5.0, 1.5))).epsilon(0.1));
  CHECK(TracyWidom1::full_accuracy(0.0));
  CHECK_FALSE(TracyWidom1::full_accuracy(7.0));
  CHECK(tracy_widom_f1_pdf(0.0) == tw.pdf(0.0));
}

TEST_CASE("law tabulation and CSV") {
  const LawCurve mp = tabulate(LawId::MarchenkoPastur, linspace(0.0, 4.0, 2001));
  CHECK(std::isinf(mp.density.front()));
  const LawCurve g = tabulate(LawId::Ghd, linspace(-12.0, 12.0, 4001), {{"b", 1.43068}, {"xi", 1.17378}});
  CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(g.parameters.at("b") == 1.43068);
  // The smallest-eigenvalue density has an integrable lambda^{-1/2} edge, so
  // compare pointwise instead of by trapezoid mass.
  const LawCurve lm = tabulate(LawId::LambdaMin, linspace(0.0, 1.0 / 16.0, 201), {{"D", 16}});
  for (std::size_t i = 1; i < lm.grid.size(); ++i) CHECK(lm.density[i] == lmin_density(lm.grid[i], 16));
  CHECK_THROWS_AS((void)tabulate(LawId::Ghd, {0.0}, {{"b", 1.0}}), InvalidArgument);

  std::ostringstream out;
  write_law_csv(tabulate(LawId::Normal, {0.0, 1.0}), out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,density");
  std::getline(in, line);
  CHECK(line.rfind("0,", 0) == 0);
  CHECK(linspace(0.0, 1.0, 5)[2] == 0.5);
}
