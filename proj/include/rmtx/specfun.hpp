#pragma once

#include <cstddef>
#include <functional>

namespace rmtx {

/// ln Gamma(x) for x > 0.
[[nodiscard]] double ln_gamma(double x);

[[nodiscard]] double ln_beta(double a, double b);
[[nodiscard]] double beta(double a, double b);

/// Modified Bessel function of the second kind K_nu(x), x > 0, |nu| <= 50.
[[nodiscard]] double bessel_k(double nu, double x);
/// e^x K_nu(x); finite where K_nu underflows.
[[nodiscard]] double bessel_k_scaled(double nu, double x);
/// ln K_nu(x); finite where K_nu over- or underflows.
[[nodiscard]] double log_bessel_k(double nu, double x);

/// Ai(x) and Ai'(x) for x >= 0.
[[nodiscard]] double airy_ai(double x);
[[nodiscard]] double airy_ai_prime(double x);

/// Signed logarithm: value = sign * exp(log_abs).
struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;
  [[nodiscard]] double value() const;
};

/// Gauss hypergeometric 2F1(a, b; c; z) for z <= 0. Evaluated through the
/// Pfaff transformation to w = z/(z-1) in [0, 1); when w is too close to 1
/// for the power series, the Euler integral is used instead.
[[nodiscard]] double hyp2f1(double a, double b, double c, double z);
[[nodiscard]] SignedLog log_hyp2f1(double a, double b, double c, double z);

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  std::size_t max_evaluations = 400000;
};

using RealFunction = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature. Either limit may be
/// infinite. Nodes never touch the endpoints, so integrable endpoint
/// singularities are resolved by subdivision. Throws ConvergenceFailure (with
/// the partial value) when the evaluation cap is exceeded.
[[nodiscard]] QuadratureResult integrate(const RealFunction& f, double lo, double hi,
                                         const QuadratureOptions& opts = {});

/// Same, with an absolute tolerance and no relative one.
[[nodiscard]] QuadratureResult integrate(const RealFunction& f, double lo, double hi, double tol);

/// Integrates over consecutive breakpoints and sums the pieces.
[[nodiscard]] QuadratureResult integrate_pieces(const RealFunction& f, const double* points,
                                                std::size_t count, const QuadratureOptions& opts = {});

}  // namespace rmtx
