#include "rmtx/laws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "rmtx/errors.hpp"
#include "rmtx/specfun.hpp"
#include "rmtx/text.hpp"

namespace rmtx {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;
}  // namespace

std::string_view to_string(LawId id) {
  switch (id) {
    case LawId::MarchenkoPastur: return "mp";
    case LawId::PorterThomas: return "porter-thomas";
    case LawId::EigvecMarginal: return "eigvec-marginal";
    case LawId::Normal: return "normal";
    case LawId::Ghd: return "ghd";
    case LawId::Gev: return "gev";
    case LawId::LambdaMin: return "lmin";
    case LawId::TracyWidom1: return "tw1";
  }
  return "unknown";
}

LawId parse_law_id(std::string_view name) {
  for (LawId id : {LawId::MarchenkoPastur, LawId::PorterThomas, LawId::EigvecMarginal,
                   LawId::Normal, LawId::Ghd, LawId::Gev, LawId::LambdaMin, LawId::TracyWidom1}) {
    if (to_string(id) == name) return id;
  }
  throw InvalidArgument("unknown law: " + std::string(name));
}

// ---------------------------------------------------------------------------

double mp_density(double x) {
  if (x == 0.0) throw SingularPoint("mp_density: singular at x = 0");
  if (!(x > 0.0) || x >= 4.0) return 0.0;
  return std::sqrt((4.0 - x) / x) / (2.0 * kPi);
}

double mp_cdf(double x) {
  if (!(x > 0.0)) return 0.0;
  if (x >= 4.0) return 1.0;
  const double theta = std::asin(0.5 * std::sqrt(x));
  return (2.0 * theta + std::sin(2.0 * theta)) / kPi;
}

double mp_moment(unsigned k) {
  const double kk = k;
  return std::exp((kk + 0.5) * 2.0 * kLn2 + ln_beta(kk + 0.5, 1.5)) / kPi;
}

double porter_thomas(double y) {
  if (!(y > 0.0)) throw DomainError("porter_thomas: y must be positive");
  return std::exp(-0.5 * y) / std::sqrt(2.0 * kPi * y);
}

double porter_thomas_cdf(double y) {
  if (!(y > 0.0)) return 0.0;
  return std::erf(std::sqrt(0.5 * y));
}

double eigvec_marginal(double x, int n) {
  if (n < 3) throw DomainError("eigvec_marginal: n must be at least 3");
  if (!(std::abs(x) < 1.0)) throw DomainError("eigvec_marginal: |x| must be below 1");
  const double nn = n;
  const double log_c = ln_gamma(0.5 * nn) - 0.5 * std::log(kPi) - ln_gamma(0.5 * (nn - 1.0));
  return std::exp(log_c + 0.5 * (nn - 3.0) * std::log1p(-x * x));
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// ---------------------------------------------------------------------------
// GHD

GhdLaw::GhdLaw(double b, double xi) : b_(b), xi_(xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("GhdLaw: xi must be positive");
  if (!std::isfinite(b) || std::abs(b + 1.0) > 50.0 || std::abs(b - 0.5) > 50.0) {
    throw DomainError("GhdLaw: b outside supported range");
  }
  a_ = std::sqrt(xi * std::exp(log_bessel_k(b + 1.0, xi) - log_bessel_k(b, xi)));
  c_ = xi / a_;
  const double peak = log_kernel(0.0);
  const RealFunction f = [this, peak](double x) { return std::exp(log_kernel(x) - peak); };
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  const std::array<double, 5> pts = {0.0, 1.0, 4.0, 16.0, kInf};
  const QuadratureResult half = integrate_pieces(f, pts.data(), pts.size(), opts);
  log_norm_ = peak + std::log(2.0 * half.value);
}

double GhdLaw::log_kernel(double x) const {
  const double r = std::hypot(x, c_);
  const double nu = b_ - 0.5;
  return nu * std::log(r) + log_bessel_k(nu, a_ * r);
}

double GhdLaw::log_pdf(double x) const { return log_kernel(x) - log_norm_; }

double GhdLaw::pdf(double x) const { return std::exp(log_pdf(x)); }

double GhdLaw::log_analytic_constant() const {
  return 0.5 * std::log(a_) - 0.5 * std::log(2.0 * kPi) - b_ * std::log(c_) - log_bessel_k(b_, xi_);
}

double ghd_pdf(double x, double b, double xi) { return GhdLaw(b, xi).pdf(x); }

// ---------------------------------------------------------------------------
// GEV

double gev_log_pdf(double y, double xi) {
  if (xi == 0.0) return -y - std::exp(-y);
  const double u = -xi * y;
  if (!(u > -1.0)) return -kInf;
  const double log_base = std::log1p(u);  // ln(1 - xi y)
  return -std::exp(log_base / xi) + (1.0 / xi - 1.0) * log_base;
}

double gev_pdf(double y, double xi) { return std::exp(gev_log_pdf(y, xi)); }

double gev_cdf(double y, double xi) {
  if (xi == 0.0) return std::exp(-std::exp(-y));
  const double u = -xi * y;
  if (!(u > -1.0)) return xi > 0.0 ? 1.0 : 0.0;
  return std::exp(-std::exp(std::log1p(u) / xi));
}

double gev_quantile(double p, double xi) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("gev_quantile: p must lie in (0, 1)");
  const double e = -std::log(p);
  if (xi == 0.0) return -std::log(e);
  return -std::expm1(xi * std::log(e)) / xi;
}

double gev_log_pdf(double x, double loc, double scale, double xi) {
  if (!(scale > 0.0)) throw DomainError("gev: scale must be positive");
  return gev_log_pdf((x - loc) / scale, xi) - std::log(scale);
}

double gev_pdf(double x, double loc, double scale, double xi) {
  return std::exp(gev_log_pdf(x, loc, scale, xi));
}

double gev_cdf(double x, double loc, double scale, double xi) {
  if (!(scale > 0.0)) throw DomainError("gev: scale must be positive");
  return gev_cdf((x - loc) / scale, xi);
}

// ---------------------------------------------------------------------------
// Smallest eigenvalue of trace-normalized Wishart

double lmin_log_density(double lam, int dim) {
  if (dim < 2) throw DomainError("lmin_density: D must be at least 2");
  const double d = dim;
  if (!(lam > 0.0) || !(d * lam < 1.0)) return -kInf;
  const double d2 = d * d;
  const double c = 0.5 * (d2 + d - 2.0);
  const double log_const = std::log(d) + ln_gamma(d) + ln_gamma(0.5 * d2) - (d - 1.0) * kLn2 -
                           ln_gamma(0.5 * d) - ln_gamma(c);
  const double z = -(1.0 - d * lam) / lam;
  const SignedLog f = log_hyp2f1(0.5 * (d + 2.0), 0.5 * (d - 1.0), c, z);
  if (f.sign < 0) throw DomainError("lmin_density: negative hypergeometric factor");
  return log_const - 0.5 * d * std::log(lam) + 0.5 * (d2 + d - 4.0) * std::log1p(-d * lam) +
         f.log_abs;
}

double lmin_density(double lam, int dim) { return std::exp(lmin_log_density(lam, dim)); }

double lmin_log_moment(unsigned k, int dim) {
  if (dim < 2) throw DomainError("lmin_moment: D must be at least 2");
  const double d = dim;
  const double kk = k;
  const double d2 = d * d;
  const double c = 0.5 * (d + 3.0) + kk;
  const double log_const = ln_gamma(kk + 2.0) + ln_gamma(kk + 0.5) + ln_gamma(d + 1.0) +
                           ln_gamma(0.5 * d2) - (d - 1.0) * kLn2 - ln_gamma(0.5 * d) -
                           ln_gamma(0.5 * d2 + kk) - ln_gamma(c);
  const SignedLog f = log_hyp2f1(kk + 2.0, kk + 0.5, c, 1.0 - d);
  if (f.sign < 0) throw DomainError("lmin_moment: negative hypergeometric factor");
  return log_const + f.log_abs;
}

double lmin_moment(unsigned k, int dim) { return std::exp(lmin_log_moment(k, dim)); }

CenterScale johnstone_center_scale(int dim) {
  if (dim < 1) throw DomainError("johnstone_center_scale: D must be positive");
  const double d = dim;
  return {4.0 / d, std::exp2(4.0 / 3.0) * std::pow(d, -5.0 / 3.0)};
}

CenterScale johnstone_wishart(std::size_t n, std::size_t m) {
  if (n < 2 || m < 1) throw DomainError("johnstone_wishart: need n >= 2, m >= 1");
  const double a = std::sqrt(static_cast<double>(n) - 1.0);
  const double b = std::sqrt(static_cast<double>(m));
  return {(a + b) * (a + b), (a + b) * std::cbrt(1.0 / a + 1.0 / b)};
}

// ---------------------------------------------------------------------------
// Tracy-Widom F1

namespace {

using State = std::array<double, 5>;  // q, q', U = int q^2, V = int (x-s) q^2, W = int q

State painleve_rhs(double s, const State& y) {
  const double q = y[0];
  return {y[1], s * q + 2.0 * q * q * q, -q * q, -y[2], -q};
}

State axpy(const State& y, double h, const State& k) {
  State out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

struct TwPoint {
  double cdf;
  double pdf;
  double dpdf;
};

TwPoint tw_from_state(const State& y) {
  const double q = y[0];
  const double f = std::exp(-0.5 * (y[4] + y[3]));
  const double p = 0.5 * f * (q + y[2]);
  const double dp = 0.5 * (p * (q + y[2]) + f * (y[1] - q * q));
  return {f, p, dp};
}

double airy_tail_integral(double s) {
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-13;
  return integrate([](double x) { return airy_ai(x); }, s, kInf, opts).value;
}

// Airy asymptotics of the Hastings-McLeod solution for large positive s.
State airy_state(double s) {
  const double ai = airy_ai(s);
  const double aip = airy_ai_prime(s);
  const double u = aip * aip - s * ai * ai;
  const double v = (2.0 * s * s * ai * ai - 2.0 * s * aip * aip - ai * aip) / 3.0;
  return {ai, aip, u, v, airy_tail_integral(s)};
}

double hermite(double y0, double y1, double d0, double d1, double h, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * d0 +
         (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * d1;
}

// Left tail: log F1(s) ~ -|s|^3/24 - |s|^{3/2}/(3 sqrt 2) - ln|s|/16 + ln tau1.
double tw_left_log_cdf(double s) {
  const double a = -s;
  constexpr double kZetaPrimeMinus1 = -0.16542114370045092921;
  const double log_tau = -11.0 / 48.0 * kLn2 + 0.5 * kZetaPrimeMinus1;
  return log_tau - a * a * a / 24.0 - std::pow(a, 1.5) / (3.0 * std::numbers::sqrt2) -
         std::log(a) / 16.0;
}

double tw_left_pdf(double s) {
  const double a = -s;
  return std::exp(tw_left_log_cdf(s)) *
         (a * a / 8.0 + std::sqrt(a) / (2.0 * std::numbers::sqrt2) + 1.0 / (16.0 * a));
}

}  // namespace

TracyWidom1::TracyWidom1() {
  constexpr int kSub = 10;
  const double h = -kStep / kSub;
  const auto count = static_cast<std::size_t>(std::llround((kHi - kLo) / kStep)) + 1;
  grid_.resize(count);
  cdf_.resize(count);
  pdf_.resize(count);
  dpdf_.resize(count);
  State y = airy_state(kHi);
  for (std::size_t idx = count; idx-- > 0;) {
    const std::size_t steps_done = count - 1 - idx;
    const double s = kHi - static_cast<double>(steps_done) * kStep;
    grid_[idx] = kLo + static_cast<double>(idx) * kStep;
    const TwPoint p = tw_from_state(y);
    cdf_[idx] = p.cdf;
    pdf_[idx] = p.pdf;
    dpdf_[idx] = p.dpdf;
    if (idx == 0) break;
    for (int k = 0; k < kSub; ++k) {
      const double sk = s + k * h;
      const State k1 = painleve_rhs(sk, y);
      const State k2 = painleve_rhs(sk + 0.5 * h, axpy(y, 0.5 * h, k1));
      const State k3 = painleve_rhs(sk + 0.5 * h, axpy(y, 0.5 * h, k2));
      const State k4 = painleve_rhs(sk + h, axpy(y, h, k3));
      for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
  }
  // Composite Simpson over the table, plus the right tail (about 2e-6 of the
  // mass lies above kHi). The left tail beyond kLo carries < 1e-20.
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double w = (i == 0 || i + 1 == count) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    m0 += w * pdf_[i];
    m1 += w * pdf_[i] * grid_[i];
    m2 += w * pdf_[i] * grid_[i] * grid_[i];
  }
  m0 *= kStep / 3.0;
  m1 *= kStep / 3.0;
  m2 *= kStep / 3.0;
  QuadratureOptions opts;
  opts.abs_tol = 1e-15;
  opts.rel_tol = 1e-10;
  for (int k = 0; k <= 2; ++k) {
    const RealFunction f = [k](double s) {
      return std::pow(s, k) * tw_from_state(airy_state(s)).pdf;
    };
    const double tail = integrate(f, kHi, 40.0, opts).value;
    (k == 0 ? m0 : (k == 1 ? m1 : m2)) += tail;
  }
  mean_ = m1 / m0;
  variance_ = m2 / m0 - mean_ * mean_;
}

const TracyWidom1& TracyWidom1::instance() {
  static const TracyWidom1 table;
  return table;
}

double TracyWidom1::pdf(double s) const {
  if (std::isnan(s)) return s;
  if (s < kLo) return tw_left_pdf(s);
  if (s > kHi) {
    if (s > 200.0) return 0.0;
    return tw_from_state(airy_state(s)).pdf;
  }
  const double pos = (s - kLo) / kStep;
  const auto i = std::min(static_cast<std::size_t>(pos), grid_.size() - 2);
  const double t = pos - static_cast<double>(i);
  return std::max(0.0, hermite(pdf_[i], pdf_[i + 1], dpdf_[i], dpdf_[i + 1], kStep, t));
}

double TracyWidom1::cdf(double s) const {
  if (std::isnan(s)) return s;
  if (s < kLo) return std::exp(tw_left_log_cdf(s));
  if (s > kHi) {
    if (s > 200.0) return 1.0;
    return tw_from_state(airy_state(s)).cdf;
  }
  const double pos = (s - kLo) / kStep;
  const auto i = std::min(static_cast<std::size_t>(pos), grid_.size() - 2);
  const double t = pos - static_cast<double>(i);
  return std::clamp(hermite(cdf_[i], cdf_[i + 1], pdf_[i], pdf_[i + 1], kStep, t), 0.0, 1.0);
}

double tracy_widom_f1_pdf(double s) { return TracyWidom1::instance().pdf(s); }

double tracy_widom_f1_cdf(double s) { return TracyWidom1::instance().cdf(s); }

// ---------------------------------------------------------------------------
// Curves

double LawCurve::mass() const {
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double lo = density[i - 1];
    const double hi = density[i];
    if (!std::isfinite(lo) || !std::isfinite(hi)) continue;
    total += 0.5 * (lo + hi) * (grid[i] - grid[i - 1]);
  }
  return total;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw InvalidArgument("law parameter missing: " + key);
  return it->second;
}

double param_or(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

double law_density(LawId law, double x, const std::map<std::string, double>& p) {
  switch (law) {
    case LawId::MarchenkoPastur: return mp_density(x);
    case LawId::PorterThomas: return x > 0.0 ? porter_thomas(x) : (x == 0.0 ? kInf : 0.0);
    case LawId::EigvecMarginal: {
      return std::abs(x) < 1.0 ? eigvec_marginal(x, static_cast<int>(param(p, "n"))) : 0.0;
    }
    case LawId::Normal: return normal_pdf(x);
    case LawId::Ghd: return ghd_pdf(x, param(p, "b"), param(p, "xi"));
    case LawId::Gev:
      return gev_pdf(x, param_or(p, "loc", 0.0), param_or(p, "scale", 1.0), param(p, "xi"));
    case LawId::LambdaMin: return lmin_density(x, static_cast<int>(param(p, "D")));
    case LawId::TracyWidom1: return tracy_widom_f1_pdf(x);
  }
  return 0.0;
}

LawCurve tabulate(LawId law, const std::vector<double>& grid,
                  const std::map<std::string, double>& parameters) {
  LawCurve curve;
  curve.law = law;
  curve.parameters = parameters;
  curve.grid = grid;
  curve.density.reserve(grid.size());
  if (law == LawId::Ghd) {
    const GhdLaw g(param(parameters, "b"), param(parameters, "xi"));
    for (double x : grid) curve.density.push_back(g.pdf(x));
    return curve;
  }
  for (double x : grid) {
    try {
      curve.density.push_back(law_density(law, x, parameters));
    } catch (const SingularPoint&) {
      curve.density.push_back(kInf);
    }
  }
  return curve;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  if (count > 1) out.back() = hi;
  return out;
}

void write_law_csv(const LawCurve& curve, std::ostream& out) {
  out << "x,density\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << format_double(curve.grid[i]) << ',' << format_double(curve.density[i]) << '\n';
  }
}

}  // namespace rmtx
