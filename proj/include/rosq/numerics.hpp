#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "rosq/errors.hpp"

namespace rosq {

using RealFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-9;
  double rel_tol = 0.0;
  std::size_t max_subdivisions = 4000;
};

/// Thrown when adaptive quadrature runs out of subdivisions. Carries the
/// best estimate reached so far.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, QuadratureResult partial)
      : NumericError(what, partial.value), partial_(partial) {}
  const QuadratureResult& partial() const noexcept { return partial_; }

 private:
  QuadratureResult partial_;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b].
///
/// The rule never evaluates f at an interval endpoint, so integrable
/// endpoint singularities and removable 0/0 points at a or b are fine.
/// Converges when the summed error estimate is below
/// max(abs_tol, rel_tol * |value|); otherwise throws QuadratureError.
QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureOptions& options = {});
QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    double tol);

/// Integrates over consecutive segments of an increasing list of points
/// (density jumps, kinks). The tolerance is shared across segments.
QuadratureResult integrate_piecewise(const RealFunction& f,
                                     std::span<const double> points,
                                     const QuadratureOptions& options = {});

/// Integral of f over [a, inf) through t = a + scale * u / (1 - u).
/// A scale near the width of the integrand's bulk speeds convergence.
QuadratureResult integrate_semi_infinite(const RealFunction& f, double a,
                                         const QuadratureOptions& options = {},
                                         double scale = 1.0);
QuadratureResult integrate_semi_infinite(const RealFunction& f, double a,
                                         double tol);

/// Gamma function for x > 0.
double gamma_fn(double x);

/// Euler Beta function B(a, b) for a, b > 0.
double beta_fn(double a, double b);

/// Modified Bessel function of the second kind, order one, for x > 0.
/// Power series below 2, Steed's continued fraction on [2, 25), and the
/// Hankel asymptotic expansion beyond.
double bessel_k1(double x);

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Brent's method on a sign-changing bracket. Stops when |f(root)| <= tol
/// or the bracket is narrower than tol. Throws DomainError without a sign
/// change.
RootResult find_root_bracketed(const RealFunction& f, double lo, double hi,
                               double tol);

}  // namespace rosq
