#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rmtx {

enum class LawId {
  MarchenkoPastur,
  PorterThomas,
  EigvecMarginal,
  Normal,
  Ghd,
  Gev,
  LambdaMin,
  TracyWidom1,
};

[[nodiscard]] std::string_view to_string(LawId id);
[[nodiscard]] LawId parse_law_id(std::string_view name);

// Marchenko-Pastur law for square bipartitions, rescaled variable x = D*lambda.
/// Density on (0, 4]; zero outside. Throws SingularPoint at x = 0.
[[nodiscard]] double mp_density(double x);
[[nodiscard]] double mp_cdf(double x);
/// k-th moment; equals the k-th Catalan number.
[[nodiscard]] double mp_moment(unsigned k);

/// Chi-squared(1) density of intensities y = D x^2.
[[nodiscard]] double porter_thomas(double y);
[[nodiscard]] double porter_thomas_cdf(double y);

/// Marginal density of one component of a uniformly random unit vector in R^n.
[[nodiscard]] double eigvec_marginal(double x, int n);

[[nodiscard]] double normal_pdf(double x);
[[nodiscard]] double normal_cdf(double x);

/// Unit-variance generalized hyperbolic law parametrized by (b, xi), with
/// a = sqrt(xi K_{b+1}(xi) / K_b(xi)) and c = xi / a. The normalizing constant
/// is obtained by quadrature of the kernel.
class GhdLaw {
 public:
  GhdLaw(double b, double xi);

  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] double xi() const { return xi_; }
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double c() const { return c_; }

  [[nodiscard]] double log_pdf(double x) const;
  [[nodiscard]] double pdf(double x) const;
  /// Log of the closed-form constant sqrt(a) / (sqrt(2 pi) c^b K_b(xi)).
  [[nodiscard]] double log_analytic_constant() const;
  [[nodiscard]] double log_normalizer() const { return log_norm_; }

  /// Unnormalized log kernel; the density is exp(log_kernel(x) - log_normalizer()).
  [[nodiscard]] double log_kernel(double x) const;

 private:
  double b_;
  double xi_;
  double a_;
  double c_;
  double log_norm_;
};

[[nodiscard]] double ghd_pdf(double x, double b, double xi);

// Generalized extreme value law in the convention
//   F(y) = exp(-(1 - xi y)^{1/xi}),  support 1 - xi y > 0,
// so xi > 0 is Weibull-like (bounded above) and xi < 0 Frechet-like.
[[nodiscard]] double gev_pdf(double y, double xi_shape);
[[nodiscard]] double gev_log_pdf(double y, double xi_shape);
[[nodiscard]] double gev_cdf(double y, double xi_shape);
[[nodiscard]] double gev_quantile(double p, double xi_shape);
/// Location-scale family: density of x with (x - loc)/scale ~ GEV(xi).
[[nodiscard]] double gev_pdf(double x, double loc, double scale, double xi_shape);
[[nodiscard]] double gev_log_pdf(double x, double loc, double scale, double xi_shape);
[[nodiscard]] double gev_cdf(double x, double loc, double scale, double xi_shape);

/// Exact density of the smallest eigenvalue of a D x D trace-normalized real
/// Wishart matrix. Zero outside (0, 1/D).
[[nodiscard]] double lmin_density(double lam, int dim);
[[nodiscard]] double lmin_log_density(double lam, int dim);
/// Exact k-th moment of the same law.
[[nodiscard]] double lmin_moment(unsigned k, int dim);
[[nodiscard]] double lmin_log_moment(unsigned k, int dim);

struct CenterScale {
  double center = 0.0;
  double scale = 1.0;
};

/// Leading-order center 4/D and scale 2^{4/3} D^{-5/3} of the largest
/// eigenvalue of a trace-normalized D x D Wishart matrix.
[[nodiscard]] CenterScale johnstone_center_scale(int dim);
/// Center and scale of the largest eigenvalue of an unnormalized real Wishart
/// matrix X X^T with X of shape n x m.
[[nodiscard]] CenterScale johnstone_wishart(std::size_t n, std::size_t m);

/// Tracy-Widom (beta = 1) law tabulated from the Hastings-McLeod solution of
/// Painleve II on [-10, 6]; beyond the table, tail asymptotics are used.
class TracyWidom1 {
 public:
  static constexpr double kLo = -10.0;
  static constexpr double kHi = 6.0;
  static constexpr double kStep = 1e-2;

  static const TracyWidom1& instance();

  [[nodiscard]] double pdf(double s) const;
  [[nodiscard]] double cdf(double s) const;
  /// False when s lies outside the table and an asymptotic form was used.
  [[nodiscard]] static bool full_accuracy(double s) { return s >= kLo && s <= kHi; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double variance() const { return variance_; }

  [[nodiscard]] const std::vector<double>& grid() const { return grid_; }

 private:
  TracyWidom1();
  std::vector<double> grid_;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
  std::vector<double> dpdf_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

[[nodiscard]] double tracy_widom_f1_pdf(double s);
[[nodiscard]] double tracy_widom_f1_cdf(double s);

struct LawCurve {
  std::vector<double> grid;
  std::vector<double> density;
  LawId law = LawId::MarchenkoPastur;
  std::map<std::string, double> parameters;

  /// Trapezoid integral over the grid.
  [[nodiscard]] double mass() const;
};

/// Evaluates `law` on `grid`. Parameters by law: Ghd {b, xi}; Gev {xi, loc,
/// scale}; LambdaMin {D}; EigvecMarginal {n}. Points where the density is
/// singular are stored as +inf.
[[nodiscard]] LawCurve tabulate(LawId law, const std::vector<double>& grid,
                                const std::map<std::string, double>& parameters = {});
[[nodiscard]] double law_density(LawId law, double x, const std::map<std::string, double>& parameters);

[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Two-column CSV (x,density) with a header row.
void write_law_csv(const LawCurve& curve, std::ostream& out);

}  // namespace rmtx
