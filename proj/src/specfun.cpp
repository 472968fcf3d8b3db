#include "rmtx/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "rmtx/errors.hpp"

namespace rmtx {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma: argument must be positive");
  if (std::isinf(x)) return x;
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double ln_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: arguments must be positive");
  return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

double beta(double a, double b) { return std::exp(ln_beta(a, b)); }

// ---------------------------------------------------------------------------
// Modified Bessel K
// ---------------------------------------------------------------------------

namespace {

// Chebyshev expansions of (1/Gamma(1-mu) - 1/Gamma(1+mu))/(2mu) and
// (1/Gamma(1-mu) + 1/Gamma(1+mu))/2 on |mu| <= 1/2, argument 8mu^2 - 1.
constexpr std::array<double, 7> kGam1 = {-1.142022680371168e0, 6.5165112670737e-3,
                                         3.087090173086e-4,   -3.4706269649e-6,
                                         6.9437664e-9,        3.67795e-11,
                                         -1.356e-13};
constexpr std::array<double, 8> kGam2 = {1.843740587300905e0, -7.68528408447867e-2,
                                         1.2719271366546e-3,  -4.9717367042e-6,
                                         -3.31261198e-8,      2.423096e-10,
                                         -1.702e-13,          -1.49e-15};

template <std::size_t M>
double chebev(const std::array<double, M>& c, double y) {
  double d = 0.0;
  double dd = 0.0;
  for (std::size_t j = M - 1; j >= 1; --j) {
    const double sv = d;
    d = 2.0 * y * d - dd + c[j];
    dd = sv;
  }
  return y * d - dd + 0.5 * c[0];
}

constexpr int kMaxBesselIter = 10000;

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, multiplied by e^x.
// Temme's series below x = 2, Steed's continued fraction above.
void bessel_k_pair_scaled(double mu, double x, double& kmu, double& kmu1) {
  const double mu2 = mu * mu;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const double xx = 8.0 * mu2 - 1.0;
    const double gam1 = chebev(kGam1, xx);
    const double gam2 = chebev(kGam2, xx);
    const double gampl = gam2 - mu * gam1;
    const double gammi = gam2 + mu * gam1;
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxBesselIter; ++i) {
      const double di = i;
      ff = (di * ff + p + q) / (di * di - mu2);
      c *= d / di;
      p /= di - mu;
      q /= di + mu;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - di * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxBesselIter) throw ConvergenceFailure("bessel_k: series did not converge", sum, 0.0);
    const double scale = std::exp(x);
    kmu = sum * scale;
    kmu1 = sum1 * (2.0 / x) * scale;
    return;
  }
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i <= kMaxBesselIter; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxBesselIter) throw ConvergenceFailure("bessel_k: continued fraction did not converge", s, 0.0);
  h = a1 * h;
  kmu = std::sqrt(kPi / (2.0 * x)) / s;
  kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

// ln(e^x K_nu(x)).
double log_bessel_k_scaled(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be positive");
  if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
  nu = std::abs(nu);
  if (nu > 50.0) throw DomainError("bessel_k: |nu| > 50 unsupported");
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  double k0 = 0.0;
  double k1 = 0.0;
  bessel_k_pair_scaled(mu, x, k0, k1);
  double log_scale = 0.0;
  const double two_over_x = 2.0 / x;
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * two_over_x * k1 + k0;
    k0 = k1;
    k1 = next;
    if (k1 > 1e250) {
      k0 /= k1;
      log_scale += std::log(k1);
      k1 = 1.0;
    }
  }
  return std::log(k0) + log_scale;
}

}  // namespace

double log_bessel_k(double nu, double x) { return log_bessel_k_scaled(nu, x) - x; }

double bessel_k_scaled(double nu, double x) { return std::exp(log_bessel_k_scaled(nu, x)); }

double bessel_k(double nu, double x) { return std::exp(log_bessel_k_scaled(nu, x) - x); }

// ---------------------------------------------------------------------------
// Airy
// ---------------------------------------------------------------------------

namespace {
constexpr double kAi0 = 0.355028053887817239260;
constexpr double kAiPrime0 = -0.258819403792806798405;
}  // namespace

double airy_ai(double x) {
  if (!(x >= 0.0)) throw DomainError("airy_ai: only x >= 0 supported");
  if (x < 1e-8) return kAi0 + kAiPrime0 * x;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  return std::sqrt(x / 3.0) / kPi * bessel_k(1.0 / 3.0, zeta);
}

double airy_ai_prime(double x) {
  if (!(x >= 0.0)) throw DomainError("airy_ai_prime: only x >= 0 supported");
  if (x < 1e-8) return kAiPrime0 + 0.5 * x * x * kAi0;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  return -x / (kPi * std::sqrt(3.0)) * bessel_k(2.0 / 3.0, zeta);
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw DomainError("integrate: non-finite integrand at x=" + std::to_string(x));
  }
  return y;
}

Panel gauss_kronrod(const RealFunction& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = checked(f, center);
  double result_g = fc * kWg[3];
  double result_k = fc * kWgk[7];
  double result_abs = std::abs(result_k);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked(f, center - dx);
    f2[j] = checked(f, center + dx);
    const double s = f1[j] + f2[j];
    result_k += kWgk[j] * s;
    result_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) result_g += kWg[j / 2] * s;
  }
  const double mean = 0.5 * result_k;
  double result_asc = kWgk[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double h = std::abs(half);
  double err = std::abs((result_k - result_g) * half);
  result_asc *= h;
  result_abs *= h;
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * result_abs, err);
  }
  return {lo, hi, result_k * half, err};
}

QuadratureResult integrate_finite(const RealFunction& f, double lo, double hi,
                                  const QuadratureOptions& opts) {
  std::size_t evals = 15;
  std::priority_queue<Panel> queue;
  Panel first = gauss_kronrod(f, lo, hi);
  double value = first.value;
  double error = first.error;
  double frozen_error = 0.0;
  double frozen_value = 0.0;
  queue.push(first);
  auto done = [&] { return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };
  while (!done()) {
    if (queue.empty()) break;
    if (evals + 30 > opts.max_evaluations) {
      throw ConvergenceFailure("integrate: evaluation cap exceeded", value, error);
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        std::abs(worst.hi - worst.lo) <= 4.0 * kEps * std::max(std::abs(mid), 1e-300)) {
      // Panel cannot be split further; keep its contribution as is.
      frozen_error += worst.error;
      frozen_value += worst.value;
      continue;
    }
    const Panel left = gauss_kronrod(f, worst.lo, mid);
    const Panel right = gauss_kronrod(f, mid, worst.hi);
    evals += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  // Resum to shed drift from the incremental updates.
  double total = frozen_value;
  double total_err = frozen_error;
  while (!queue.empty()) {
    total += queue.top().value;
    total_err += queue.top().error;
    queue.pop();
  }
  return {total, total_err, evals};
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, double lo, double hi,
                           const QuadratureOptions& opts) {
  if (std::isnan(lo) || std::isnan(hi)) throw InvalidArgument("integrate: NaN limit");
  if (lo == hi) return {};
  if (lo > hi) {
    QuadratureResult r = integrate(f, hi, lo, opts);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (lo_inf && hi_inf) {
    QuadratureOptions half = opts;
    half.abs_tol = 0.5 * opts.abs_tol;
    const QuadratureResult a = integrate(f, lo, 0.0, half);
    half.max_evaluations = opts.max_evaluations - std::min(opts.max_evaluations, a.evaluations);
    const QuadratureResult b = integrate(f, 0.0, hi, half);
    return {a.value + b.value, a.abs_error_estimate + b.abs_error_estimate,
            a.evaluations + b.evaluations};
  }
  if (hi_inf) {
    const RealFunction g = [&f, lo](double t) {
      const double x = lo + (1.0 - t) / t;
      return f(x) / (t * t);
    };
    return integrate_finite(g, 0.0, 1.0, opts);
  }
  if (lo_inf) {
    const RealFunction g = [&f, hi](double t) {
      const double x = hi - (1.0 - t) / t;
      return f(x) / (t * t);
    };
    return integrate_finite(g, 0.0, 1.0, opts);
  }
  return integrate_finite(f, lo, hi, opts);
}

QuadratureResult integrate(const RealFunction& f, double lo, double hi, double tol) {
  QuadratureOptions opts;
  opts.abs_tol = tol;
  opts.rel_tol = 0.0;
  return integrate(f, lo, hi, opts);
}

QuadratureResult integrate_pieces(const RealFunction& f, const double* points, std::size_t count,
                                  const QuadratureOptions& opts) {
  QuadratureResult total;
  if (count < 2) return total;
  QuadratureOptions piece = opts;
  piece.abs_tol = opts.abs_tol / static_cast<double>(count - 1);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    piece.max_evaluations = opts.max_evaluations - std::min(opts.max_evaluations, total.evaluations);
    const QuadratureResult r = integrate(f, points[i], points[i + 1], piece);
    total.value += r.value;
    total.abs_error_estimate += r.abs_error_estimate;
    total.evaluations += r.evaluations;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric 2F1 for z <= 0
// ---------------------------------------------------------------------------

double SignedLog::value() const { return sign * std::exp(log_abs); }

namespace {

constexpr long kMaxSeriesTerms = 5'000'000;

bool nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

// Power series of 2F1(p, q; r; w) for 0 <= w < 1.
long double series_2f1(double p, double q, double r, double w) {
  long double sum = 1.0L;
  long double term = 1.0L;
  long double biggest = 1.0L;
  const long double lw = w;
  for (long n = 0; n < kMaxSeriesTerms; ++n) {
    const long double ratio_num = (static_cast<long double>(p) + n) * (static_cast<long double>(q) + n);
    if (ratio_num == 0.0L) return sum;
    const long double ratio = ratio_num / ((static_cast<long double>(r) + n) * (n + 1.0L)) * lw;
    term *= ratio;
    sum += term;
    biggest = std::max(biggest, std::abs(term));
    const long double rho = std::max(std::abs(ratio), lw);
    if (rho < 1.0L && std::abs(term) * rho / (1.0L - rho) <= 1e-19L * std::abs(sum)) {
      if (biggest > 1e10L * std::abs(sum)) {
        throw ConvergenceFailure("hyp2f1: catastrophic cancellation in series",
                                 static_cast<double>(sum), static_cast<double>(biggest));
      }
      return sum;
    }
  }
  throw ConvergenceFailure("hyp2f1: series did not converge", static_cast<double>(sum),
                           static_cast<double>(std::abs(term)));
}

// Euler integral in the logit variable u = ln(t/(1-t)), which turns the
// integrand into a single bump on the real line. Requires r > q > 0.
double log_euler_integral(double p, double q, double r, double z) {
  const double mz = -z;
  auto psi = [=](double u) {
    const double log_t = -std::log1p(std::exp(-u));
    const double log_1mt = -std::log1p(std::exp(u));
    const double t = std::exp(log_t);
    return q * log_t + (r - q) * log_1mt - p * std::log1p(mz * t);
  };
  constexpr double kSpan = 700.0;
  constexpr int kGrid = 1401;
  std::vector<double> grid(kGrid);
  std::size_t best = 0;
  for (int i = 0; i < kGrid; ++i) {
    grid[static_cast<std::size_t>(i)] = psi(-kSpan + i);
    if (grid[static_cast<std::size_t>(i)] > grid[best]) best = static_cast<std::size_t>(i);
  }
  // Golden-section refinement of the peak between neighbouring grid points.
  double a = -kSpan + std::max<double>(0.0, static_cast<double>(best) - 1.0);
  double b = -kSpan + std::min<double>(kGrid - 1.0, static_cast<double>(best) + 1.0);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = psi(c);
  double fd = psi(d);
  for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = psi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = psi(d);
    }
  }
  double u_peak = 0.5 * (a + b);
  double psi_peak = psi(u_peak);
  if (grid[best] > psi_peak) {
    u_peak = -kSpan + static_cast<double>(best);
    psi_peak = grid[best];
  }
  constexpr double kDrop = 60.0;
  std::size_t left = best;
  while (left > 0 && grid[left] > psi_peak - kDrop) --left;
  std::size_t right = best;
  while (right + 1 < grid.size() && grid[right] > psi_peak - kDrop) ++right;
  const double u_lo = std::min(-kSpan + static_cast<double>(left), u_peak - 1.0);
  const double u_hi = std::max(-kSpan + static_cast<double>(right), u_peak + 1.0);

  const RealFunction integrand = [&](double u) { return std::exp(psi(u) - psi_peak); };
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-13;
  opts.max_evaluations = 200000;
  const std::array<double, 3> pts = {u_lo, u_peak, u_hi};
  const QuadratureResult res = integrate_pieces(integrand, pts.data(), pts.size(), opts);
  if (!(res.value > 0.0)) throw ConvergenceFailure("hyp2f1: Euler integral vanished", res.value, 0.0);
  return psi_peak + std::log(res.value) + ln_gamma(r) - ln_gamma(q) - ln_gamma(r - q);
}

// Prefer a terminating form, then one with nonnegative numerator parameters
// (no cancellation), then the faster-decaying one.
bool prefer_first(double p1, double q1, double p2, double q2, double r) {
  const bool term1 = nonpositive_integer(p1) || nonpositive_integer(q1);
  const bool term2 = nonpositive_integer(p2) || nonpositive_integer(q2);
  if (term1 != term2) return term1;
  const bool pos1 = p1 >= 0.0 && q1 >= 0.0;
  const bool pos2 = p2 >= 0.0 && q2 >= 0.0;
  if (pos1 != pos2) return pos1;
  return p1 + q1 - r <= p2 + q2 - r;
}

}  // namespace

SignedLog log_hyp2f1(double a, double b, double c, double z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || std::isnan(z)) {
    throw DomainError("hyp2f1: non-finite parameter");
  }
  if (nonpositive_integer(c)) throw DomainError("hyp2f1: c is a nonpositive integer");
  if (z > 0.0) throw DomainError("hyp2f1: only z <= 0 supported");
  if (z == 0.0 || a == 0.0 || b == 0.0) return {0.0, 1};
  if (std::isinf(z)) throw DomainError("hyp2f1: infinite argument");

  const double w = z / (z - 1.0);
  const double log_1mz = std::log1p(-z);
  // Pfaff: F = (1-z)^{-a} F(a, c-b; c; w) = (1-z)^{-b} F(c-a, b; c; w).
  const bool use_a = prefer_first(a, c - b, c - a, b, c);
  const double p = use_a ? a : c - a;
  const double q = use_a ? c - b : b;
  const double prefactor = -(use_a ? a : b) * log_1mz;
  const bool terminates = nonpositive_integer(p) || nonpositive_integer(q);

  const bool series_fast = w <= 1.0 - 1e-4;
  if (!series_fast && !terminates) {
    // Euler integral needs c > (one numerator) > 0; 2F1 is symmetric in a, b.
    if (c > b && b > 0.0) return {log_euler_integral(a, b, c, z), 1};
    if (c > a && a > 0.0) return {log_euler_integral(b, a, c, z), 1};
  }
  const long double s = series_2f1(p, q, c, w);
  if (s == 0.0L) return {-std::numeric_limits<double>::infinity(), 1};
  return {prefactor + static_cast<double>(std::log(std::abs(s))), s < 0.0L ? -1 : 1};
}

double hyp2f1(double a, double b, double c, double z) { return log_hyp2f1(a, b, c, z).value(); }

}  // namespace rmtx
