#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmtx/random.hpp"

namespace rmtx {

/// Unit-mass histogram. `samples` may be empty when the distribution was
/// accumulated from counts only; `sample_count` always holds the total.
struct EmpiricalDistribution {
  std::vector<double> samples;
  std::vector<double> bin_edges;
  std::vector<double> density;
  std::vector<std::uint64_t> counts;
  std::uint64_t sample_count = 0;
  /// Samples that fell outside the binned range.
  std::uint64_t outside = 0;

  [[nodiscard]] std::size_t bins() const { return density.size(); }
  [[nodiscard]] std::vector<double> bin_centers() const;
  [[nodiscard]] double mass() const;
  /// Raw moment E[x^k] over the stored samples.
  [[nodiscard]] double moment(unsigned k) const;
  [[nodiscard]] double mean() const { return moment(1); }
  [[nodiscard]] double variance() const;
};

/// Rice rule: ceil(2 n^{1/3}).
[[nodiscard]] std::size_t rice_bins(std::size_t n);

/// Density histogram. `bins == 0` selects the Rice rule. The default range is
/// [min, max] of the samples (widened when all samples are equal).
[[nodiscard]] EmpiricalDistribution histogram(std::span<const double> samples, std::size_t bins = 0,
                                              std::optional<std::pair<double, double>> range = {},
                                              bool keep_samples = true);

/// Fixed-edge counter for streams too large to keep in memory.
class BinnedCounts {
 public:
  BinnedCounts() = default;
  BinnedCounts(double lo, double hi, std::size_t bins);

  void add(double x);
  void add(std::span<const double> xs);
  void merge(const BinnedCounts& other);

  [[nodiscard]] double lo() const { return lo_; }
  [[nodiscard]] double hi() const { return hi_; }
  [[nodiscard]] std::size_t bins() const { return counts_.size(); }
  [[nodiscard]] const std::vector<std::uint64_t>& counts() const { return counts_; }
  [[nodiscard]] std::uint64_t total() const { return total_; }
  [[nodiscard]] std::uint64_t outside() const { return below_ + above_; }
  [[nodiscard]] std::uint64_t below() const { return below_; }
  [[nodiscard]] std::uint64_t above() const { return above_; }
  [[nodiscard]] double sum_squares() const { return sum_sq_; }
  [[nodiscard]] std::vector<double> edges() const;
  [[nodiscard]] EmpiricalDistribution to_distribution() const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t below_ = 0;
  std::uint64_t above_ = 0;
  double sum_sq_ = 0.0;
};

/// (mean of x^k)^{1/k}.
[[nodiscard]] double empirical_root_moment(std::span<const double> samples, unsigned k);

[[nodiscard]] std::vector<double> center_rescale(std::span<const double> values, double center,
                                                 double scale);

/// Kolmogorov-Smirnov statistic sup |ecdf - cdf|.
[[nodiscard]] double ks_distance(std::span<const double> samples,
                                 const std::function<double(double)>& cdf);

[[nodiscard]] double sample_mean(std::span<const double> xs);
[[nodiscard]] double sample_variance(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Optimization

struct NelderMeadOptions {
  double f_tol = 1e-11;
  double x_tol = 1e-10;
  std::size_t max_evaluations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization. Non-finite objective values are
/// treated as +inf.
[[nodiscard]] NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                           std::vector<double> x0, std::vector<double> step,
                                           const NelderMeadOptions& opts = {});

// ---------------------------------------------------------------------------
// Fits

struct GevFit {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;
  double neg_log_likelihood = 0.0;
  std::size_t sample_count = 0;
  std::size_t starts = 0;
  std::size_t converged_starts = 0;
  std::vector<std::string> warnings;
};

struct GevStart {
  double location;
  double scale;
  double shape;
};

/// Probability-weighted-moment estimate; shape clamped to (-0.85, 0.85).
[[nodiscard]] GevStart gev_pwm_estimate(std::span<const double> xs);

[[nodiscard]] double gev_negative_log_likelihood(std::span<const double> xs, double loc, double scale,
                                                 double shape);

/// Maximum-likelihood fit of the location-scale GEV family with the shape
/// restricted to (-0.9, 0.9). Eight Nelder-Mead starts seeded from PWM.
[[nodiscard]] GevFit fit_gev(std::span<const double> maxima);

struct GhdFit {
  double b = 0.0;
  double xi = 1.0;
  double a = 0.0;
  double c = 0.0;
  double neg_log_likelihood = 0.0;
  /// Binned NLL of the standard normal on the same data, for comparison.
  double normal_neg_log_likelihood = 0.0;
  std::uint64_t sample_count = 0;
  /// Root-mean-square used to standardize the input.
  double input_scale = 1.0;
  bool converged = false;
};

/// Binned maximum likelihood of the unit-variance GHD over (b, xi). The input
/// is divided by its root-mean-square first.
[[nodiscard]] GhdFit fit_ghd(std::span<const double> components, std::size_t bins = 2000);
/// Same on pre-binned counts; `rms` is the root-mean-square of the raw data.
[[nodiscard]] GhdFit fit_ghd(const BinnedCounts& counts, double rms);

/// Binned negative log-likelihood of GHD(b, xi) for x / rms.
[[nodiscard]] double ghd_binned_nll(const BinnedCounts& counts, double rms, double b, double xi);

/// Rejection sampler with a Student-t envelope.
[[nodiscard]] std::vector<double> sample_ghd(double b, double xi, std::size_t n, Rng& rng);
[[nodiscard]] std::vector<double> sample_gev(double loc, double scale, double shape, std::size_t n,
                                             Rng& rng);

}  // namespace rmtx
