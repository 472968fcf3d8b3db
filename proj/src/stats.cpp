#include "rmtx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "rmtx/errors.hpp"
#include "rmtx/laws.hpp"
#include "rmtx/specfun.hpp"

namespace rmtx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

// ---------------------------------------------------------------------------
// Histograms

std::vector<double> EmpiricalDistribution::bin_centers() const {
  std::vector<double> out(density.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (bin_edges[i] + bin_edges[i + 1]);
  return out;
}

double EmpiricalDistribution::mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) m += density[i] * (bin_edges[i + 1] - bin_edges[i]);
  return m;
}

double EmpiricalDistribution::moment(unsigned k) const {
  if (samples.empty()) throw InvalidArgument("moment: distribution holds no samples");
  long double acc = 0.0L;
  for (double x : samples) acc += std::pow(static_cast<long double>(x), static_cast<int>(k));
  return static_cast<double>(acc / static_cast<long double>(samples.size()));
}

double EmpiricalDistribution::variance() const { return sample_variance(samples); }

std::size_t rice_bins(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(2.0 * std::cbrt(static_cast<double>(n))));
}

namespace {

std::size_t bin_index(double x, double lo, double hi, std::size_t bins) {
  const double pos = (x - lo) / (hi - lo) * static_cast<double>(bins);
  return std::min(static_cast<std::size_t>(pos), bins - 1);
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  std::vector<double> edges(bins + 1);
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + w * static_cast<double>(i);
  edges.back() = hi;
  return edges;
}

void fill_density(EmpiricalDistribution& d) {
  const std::uint64_t inside = std::accumulate(d.counts.begin(), d.counts.end(), std::uint64_t{0});
  d.density.assign(d.counts.size(), 0.0);
  if (inside == 0) return;
  for (std::size_t i = 0; i < d.counts.size(); ++i) {
    d.density[i] = static_cast<double>(d.counts[i]) /
                   (static_cast<double>(inside) * (d.bin_edges[i + 1] - d.bin_edges[i]));
  }
}

}  // namespace

EmpiricalDistribution histogram(std::span<const double> samples, std::size_t bins,
                                std::optional<std::pair<double, double>> range, bool keep_samples) {
  if (samples.empty()) throw InvalidArgument("histogram: no samples");
  if (bins == 0) bins = rice_bins(samples.size());
  double lo = 0.0;
  double hi = 0.0;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (!(lo < hi)) throw InvalidArgument("histogram: range must satisfy lo < hi");
  } else {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = *mn;
    hi = *mx;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("histogram: non-finite sample");
    if (lo == hi) {
      const double eps = std::max(std::abs(lo), 1.0) * 1e-6;
      lo -= eps;
      hi += eps;
    }
  }
  EmpiricalDistribution d;
  d.bin_edges = uniform_edges(lo, hi, bins);
  d.counts.assign(bins, 0);
  d.sample_count = samples.size();
  for (double x : samples) {
    if (!(x >= lo && x <= hi)) {
      ++d.outside;
      continue;
    }
    ++d.counts[bin_index(x, lo, hi, bins)];
  }
  fill_density(d);
  if (keep_samples) d.samples.assign(samples.begin(), samples.end());
  return d;
}

BinnedCounts::BinnedCounts(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0) {
  if (!(lo < hi) || bins == 0) throw InvalidArgument("BinnedCounts: need lo < hi and bins > 0");
}

void BinnedCounts::add(double x) {
  ++total_;
  sum_sq_ += x * x;
  if (x < lo_) {
    ++below_;
  } else if (x > hi_) {
    ++above_;
  } else {
    ++counts_[bin_index(x, lo_, hi_, counts_.size())];
  }
}

void BinnedCounts::add(std::span<const double> xs) {
  for (double x : xs) add(x);
}

void BinnedCounts::merge(const BinnedCounts& other) {
  if (counts_.empty()) {
    *this = other;
    return;
  }
  if (other.counts_.empty()) return;
  if (other.lo_ != lo_ || other.hi_ != hi_ || other.counts_.size() != counts_.size()) {
    throw InvalidArgument("BinnedCounts::merge: incompatible binning");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  below_ += other.below_;
  above_ += other.above_;
  sum_sq_ += other.sum_sq_;
}

std::vector<double> BinnedCounts::edges() const { return uniform_edges(lo_, hi_, counts_.size()); }

EmpiricalDistribution BinnedCounts::to_distribution() const {
  EmpiricalDistribution d;
  d.bin_edges = edges();
  d.counts = counts_;
  d.sample_count = total_;
  d.outside = below_ + above_;
  fill_density(d);
  return d;
}

// ---------------------------------------------------------------------------
// Moments and distances

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("sample_mean: empty input");
  long double acc = 0.0L;
  for (double x : xs) acc += x;
  return static_cast<double>(acc / static_cast<long double>(xs.size()));
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InvalidArgument("sample_variance: need at least two samples");
  const long double m = sample_mean(xs);
  long double acc = 0.0L;
  for (double x : xs) acc += (x - m) * (x - m);
  return static_cast<double>(acc / static_cast<long double>(xs.size() - 1));
}

double empirical_root_moment(std::span<const double> samples, unsigned k) {
  if (samples.empty()) throw InvalidArgument("empirical_root_moment: empty input");
  if (k == 0) throw InvalidArgument("empirical_root_moment: k must be positive");
  long double acc = 0.0L;
  for (double x : samples) acc += std::pow(static_cast<long double>(x), static_cast<int>(k));
  const long double m = acc / static_cast<long double>(samples.size());
  if (m < 0.0L) throw DomainError("empirical_root_moment: negative moment has no real root");
  return static_cast<double>(std::pow(m, 1.0L / k));
}

std::vector<double> center_rescale(std::span<const double> values, double center, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("center_rescale: scale must be positive");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - center) / scale;
  return out;
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_distance: empty input");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// ---------------------------------------------------------------------------
// Nelder-Mead

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, std::vector<double> step,
                             const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) throw InvalidArgument("nelder_mead: bad dimensions");
  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n);
  std::vector<double> trial(n);
  auto point = [&](double t, const std::vector<double>& worst) {
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (worst[j] - centroid[j]);
    return p;
  };
  bool converged = false;
  while (evals < opts.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
      }
    }
    const double fspread = std::abs(values[worst] - values[best]);
    if (std::isfinite(values[worst]) &&
        fspread <= opts.f_tol * (std::abs(values[best]) + opts.f_tol) && spread <= opts.x_tol * 1e3) {
      converged = true;
      break;
    }
    if (spread <= opts.x_tol) {
      converged = std::isfinite(values[best]);
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
    }
    const std::vector<double> reflected = point(-1.0, simplex[worst]);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const std::vector<double> expanded = point(-2.0, simplex[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const std::vector<double> contracted = point(outside ? -0.5 : 0.5, simplex[worst]);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) {
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      }
      values[i] = eval(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  NelderMeadResult res;
  res.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  res.value = *best_it;
  res.evaluations = evals;
  res.converged = converged;
  return res;
}

// ---------------------------------------------------------------------------
// GEV

namespace {

constexpr double kShapeBound = 0.9;

// Location and scale matching the first two probability-weighted moments for
// a given shape.
GevStart gev_pwm_for_shape(double b0, double b1, double shape) {
  double scale = 0.0;
  double location = 0.0;
  if (std::abs(shape) < 1e-8) {
    scale = (2.0 * b1 - b0) / std::numbers::ln2;
    location = b0 - std::numbers::egamma * scale;
  } else {
    const double g = std::exp(ln_gamma(1.0 + shape));
    scale = (2.0 * b1 - b0) * shape / (g * -std::expm1(-shape * std::numbers::ln2));
    location = b0 + scale * (g - 1.0) / shape;
  }
  return {location, std::max(scale, 1e-300), shape};
}

struct Pwm {
  double b0;
  double b1;
  double b2;
};

Pwm pwm(std::span<const double> xs) {
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  long double b0 = 0.0L;
  long double b1 = 0.0L;
  long double b2 = 0.0L;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double di = static_cast<double>(i);
    b0 += s[i];
    b1 += di / (n - 1.0) * s[i];
    b2 += di * (di - 1.0) / ((n - 1.0) * (n - 2.0)) * s[i];
  }
  return {static_cast<double>(b0 / n), static_cast<double>(b1 / n), static_cast<double>(b2 / n)};
}

}  // namespace

GevStart gev_pwm_estimate(std::span<const double> xs) {
  if (xs.size() < 3) throw InvalidArgument("gev_pwm_estimate: need at least 3 samples");
  const Pwm m = pwm(xs);
  const double c = (2.0 * m.b1 - m.b0) / (3.0 * m.b2 - m.b0) - std::log(2.0) / std::log(3.0);
  double k = 7.8590 * c + 2.9554 * c * c;
  if (!std::isfinite(k)) k = 0.0;
  k = std::clamp(k, -0.85, 0.85);
  return gev_pwm_for_shape(m.b0, m.b1, k);
}

double gev_negative_log_likelihood(std::span<const double> xs, double loc, double scale, double shape) {
  if (!(scale > 0.0)) return kInf;
  double nll = static_cast<double>(xs.size()) * std::log(scale);
  for (double x : xs) {
    const double lp = gev_log_pdf((x - loc) / scale, shape);
    if (!std::isfinite(lp)) return kInf;
    nll -= lp;
  }
  return nll;
}

GevFit fit_gev(std::span<const double> maxima) {
  if (maxima.size() < 3) throw InvalidArgument("fit_gev: need at least 3 samples");
  GevFit fit;
  fit.sample_count = maxima.size();
  if (maxima.size() < 100) fit.warnings.push_back("fewer than 100 samples");

  // Standardize for conditioning; undo at the end.
  const double mean = sample_mean(maxima);
  const double sd = std::sqrt(sample_variance(maxima));
  if (!(sd > 0.0)) throw InvalidArgument("fit_gev: samples have zero spread");
  std::vector<double> z(maxima.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (maxima[i] - mean) / sd;

  const Pwm m = pwm(z);
  const GevStart base = gev_pwm_estimate(z);
  const double k0 = base.shape;
  const std::vector<double> shapes = {k0, std::clamp(k0 - 0.2, -0.85, 0.85),
                                      std::clamp(k0 + 0.2, -0.85, 0.85), -0.4, -0.1, 0.0, 0.1, 0.4};

  auto objective = [&](std::span<const double> p) {
    const double shape = kShapeBound * std::tanh(p[2]);
    return gev_negative_log_likelihood(z, p[0], std::exp(p[1]), shape);
  };

  NelderMeadResult best;
  best.value = kInf;
  for (double shape : shapes) {
    const GevStart s = gev_pwm_for_shape(m.b0, m.b1, shape);
    std::vector<double> x0 = {s.location, std::log(s.scale), std::atanh(s.shape / kShapeBound)};
    // Pull the start inside the support if the PWM point violates it.
    for (int tries = 0; tries < 30 && !std::isfinite(objective(x0)); ++tries) x0[1] += 0.2;
    if (!std::isfinite(objective(x0))) continue;
    NelderMeadResult r = nelder_mead(objective, x0, {0.1, 0.1, 0.1});
    // One restart from the optimum guards against simplex collapse.
    r = nelder_mead(objective, r.x, {0.02, 0.02, 0.02});
    ++fit.starts;
    if (r.converged) ++fit.converged_starts;
    if (r.value < best.value) best = r;
  }
  if (!std::isfinite(best.value)) {
    throw ConvergenceFailure("fit_gev: no start produced a finite likelihood", kInf, kInf);
  }
  if (fit.converged_starts == 0) {
    throw ConvergenceFailure("fit_gev: optimizer did not converge", best.value, kInf);
  }
  fit.location = mean + sd * best.x[0];
  fit.scale = sd * std::exp(best.x[1]);
  fit.shape = kShapeBound * std::tanh(best.x[2]);
  fit.neg_log_likelihood = best.value + static_cast<double>(maxima.size()) * std::log(sd);
  return fit;
}

std::vector<double> sample_gev(double loc, double scale, double shape, std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) {
    double p = u(rng);
    while (p <= 0.0) p = u(rng);
    x = loc + scale * gev_quantile(p, shape);
  }
  return out;
}

// ---------------------------------------------------------------------------
// GHD

namespace {

double upper_tail(const GhdLaw& g, double from) {
  QuadratureOptions opts;
  opts.abs_tol = 1e-300;
  opts.rel_tol = 1e-10;
  return integrate([&g](double x) { return g.pdf(x); }, from, kInf, opts).value;
}

double clamp_log(double p) { return std::log(std::max(p, 1e-300)); }

// Binned log-likelihood; `pdf` in standardized units, `tail(t)` = mass above t.
template <class Pdf, class Tail>
double binned_nll(const BinnedCounts& counts, double rms, Pdf pdf, Tail tail) {
  const std::vector<double> edges = counts.edges();
  const std::vector<std::uint64_t>& c = counts.counts();
  double nll = 0.0;
  double prev_edge = edges[0] / rms;
  double prev_val = pdf(prev_edge);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double lo = prev_edge;
    const double hi = edges[i + 1] / rms;
    const double f_hi = pdf(hi);
    if (c[i] != 0) {
      const double mid = pdf(0.5 * (lo + hi));
      const double w = hi - lo;
      const double prob = w / 6.0 * (prev_val + 4.0 * mid + f_hi);
      // Density-equivalent likelihood: subtract log of the raw bin width.
      nll -= static_cast<double>(c[i]) * (clamp_log(prob) - std::log(w * rms));
    }
    prev_edge = hi;
    prev_val = f_hi;
  }
  if (counts.below() > 0) {
    // Symmetric law: mass below lo equals mass above -lo.
    nll -= static_cast<double>(counts.below()) * clamp_log(tail(-counts.lo() / rms));
  }
  if (counts.above() > 0) {
    nll -= static_cast<double>(counts.above()) * clamp_log(tail(counts.hi() / rms));
  }
  return nll;
}

}  // namespace

double ghd_binned_nll(const BinnedCounts& counts, double rms, double b, double xi) {
  const GhdLaw g(b, xi);
  return binned_nll(
      counts, rms, [&g](double x) { return g.pdf(x); },
      [&g](double t) { return upper_tail(g, t); });
}

GhdFit fit_ghd(const BinnedCounts& counts, double rms) {
  if (counts.total() < 2) throw InvalidArgument("fit_ghd: not enough samples");
  if (!(rms > 0.0)) throw InvalidArgument("fit_ghd: rms must be positive");
  GhdFit fit;
  fit.sample_count = counts.total();
  fit.input_scale = rms;

  auto objective = [&](std::span<const double> p) {
    const double b = p[0];
    const double log_xi = p[1];
    if (std::abs(b) > 40.0 || std::abs(log_xi) > 9.0) return kInf;
    try {
      return ghd_binned_nll(counts, rms, b, std::exp(log_xi));
    } catch (const Error&) {
      return kInf;
    }
  };
  const std::vector<std::vector<double>> starts = {
      {1.4, std::log(1.2)}, {0.5, std::log(0.5)}, {3.0, std::log(5.0)}, {-0.5, std::log(2.0)}};
  NelderMeadResult best;
  best.value = kInf;
  NelderMeadOptions opts;
  opts.f_tol = 1e-12;
  opts.x_tol = 1e-7;
  opts.max_evaluations = 2000;
  for (const auto& s : starts) {
    NelderMeadResult r = nelder_mead(objective, s, {0.3, 0.3}, opts);
    if (r.value < best.value) best = r;
  }
  best = nelder_mead(objective, best.x, {0.05, 0.05}, opts);
  if (!std::isfinite(best.value)) throw ConvergenceFailure("fit_ghd: no finite likelihood", kInf, kInf);
  const GhdLaw g(best.x[0], std::exp(best.x[1]));
  fit.b = g.b();
  fit.xi = g.xi();
  fit.a = g.a();
  fit.c = g.c();
  fit.neg_log_likelihood = best.value;
  fit.converged = best.converged;
  fit.normal_neg_log_likelihood = binned_nll(
      counts, rms, [](double x) { return normal_pdf(x); },
      [](double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); });
  return fit;
}

GhdFit fit_ghd(std::span<const double> components, std::size_t bins) {
  if (components.size() < 2) throw InvalidArgument("fit_ghd: not enough samples");
  long double ss = 0.0L;
  double max_abs = 0.0;
  for (double x : components) {
    ss += static_cast<long double>(x) * x;
    max_abs = std::max(max_abs, std::abs(x));
  }
  const double rms = std::sqrt(static_cast<double>(ss / static_cast<long double>(components.size())));
  const double r = max_abs * (1.0 + 1e-12) + 1e-300;
  BinnedCounts counts(-r, r, bins);
  counts.add(components);
  return fit_ghd(counts, rms);
}

std::vector<double> sample_ghd(double b, double xi, std::size_t n, Rng& rng) {
  const GhdLaw g(b, xi);
  constexpr double kDof = 3.0;
  const double log_t_norm = ln_gamma(0.5 * (kDof + 1.0)) - ln_gamma(0.5 * kDof) -
                            0.5 * std::log(kDof * std::numbers::pi);
  auto log_envelope = [&](double x) {
    return log_t_norm - 0.5 * (kDof + 1.0) * std::log1p(x * x / kDof);
  };
  // The GHD tail decays exponentially, so the density ratio peaks at moderate |x|.
  double log_m = -kInf;
  for (double x = 0.0; x <= 60.0; x += 0.01) log_m = std::max(log_m, g.log_pdf(x) - log_envelope(x));
  log_m += std::log(1.05);

  std::student_t_distribution<double> t(kDof);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = t(rng);
    const double v = u(rng);
    if (std::log(v) + log_m + log_envelope(x) <= g.log_pdf(x)) out.push_back(x);
  }
  return out;
}

}  // namespace rmtx
