#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rosq/errors.hpp"
#include "rosq/rng.hpp"

namespace rosq {

enum class DistKind { Pareto, Exponential, Deterministic, Weibull };

/// Pure power tail P(X > x) = tail_coefficient * x^-index for x >= scale.
struct RegVaryingSpec {
  double index = 0.0;             // nu
  double scale = 0.0;             // x_m
  double tail_coefficient = 0.0;  // c_B = x_m^nu
  // Constant in lst(s) - 1 + mean*s ~ bingham_C * s^nu as s -> 0.
  double bingham_C = 0.0;
};

/// A positive random variable used as a service or inter-arrival law.
/// Immutable; sampling takes a caller-owned Rng.
class TailDistribution {
 public:
  DistKind kind() const noexcept { return kind_; }
  std::string name() const;
  /// Constructor parameters in declaration order, e.g. {nu, x_m} for Pareto.
  std::vector<double> parameters() const;

  double tail(double x) const;
  double cdf(double x) const { return 1.0 - tail(x); }
  bool has_density() const noexcept { return kind_ != DistKind::Deterministic; }
  /// Throws DomainError for the deterministic law.
  double density(double x) const;
  double mean() const;
  /// +inf for Pareto with index below 2.
  double variance() const;
  /// Infimum of the support.
  double support_min() const;

  double sample(Rng& rng) const;

  /// E[exp(-sX)] for s >= 0.
  double lst(double s) const;
  /// 1 - E[exp(-sX)] without cancellation for small s.
  double lst_complement(double s) const;
  /// lst(s) - 1 + mean*s, accurate for small s.
  double lst_defect(double s) const;

  /// P(X^fw > x) = integral of tail over (x, inf) divided by the mean.
  double forward_tail(double x) const;
  /// E[X 1{a < X <= b}]; b may be +inf.
  double partial_expectation(double a, double b) const;

  std::optional<RegVaryingSpec> regular_variation() const;

  /// The law of factor * X.
  TailDistribution scaled(double factor) const;

 private:
  friend TailDistribution make_pareto(double, double);
  friend TailDistribution make_exponential(double);
  friend TailDistribution make_deterministic(double);
  friend TailDistribution make_weibull(double, double);

  TailDistribution(DistKind kind, double p0, double p1)
      : kind_(kind), p0_(p0), p1_(p1) {}

  double weibull_lst_complement(double s) const;

  DistKind kind_;
  double p0_;  // nu | rate | value | shape
  double p1_;  // x_m | unused | unused | scale
};

/// tail(x) = min(1, (x / x_m)^-nu) with nu in (1, 2).
TailDistribution make_pareto(double nu, double x_m);
TailDistribution make_exponential(double rate);
TailDistribution make_deterministic(double value);
/// tail(x) = exp(-(x / scale)^shape); heavy-tailed (class S*) for shape < 1.
TailDistribution make_weibull(double shape, double scale);

/// Builds a law from its config name and parameter list.
TailDistribution make_distribution(const std::string& kind,
                                   std::span<const double> params);

/// E[exp(-sX)] by quadrature of exp(-sx) against the density.
double lst_by_quadrature(const TailDistribution& d, double s, double tol = 1e-11);

/// Forward tail by quadrature of the tail function.
double forward_tail_by_quadrature(const TailDistribution& d, double x,
                                  double tol = 1e-12);

struct TailClassRow {
  double x = 0.0;
  double long_tail_ratio = 0.0;  // tail(x+1)/tail(x)
  double dominance_ratio = 0.0;  // tail(2x)/tail(x)
  double irv_ratio_101 = 0.0;    // tail(1.01x)/tail(x)
  double irv_ratio_110 = 0.0;    // tail(1.1x)/tail(x)
};

/// Finite-x evidence about membership in the long-tailed (L), dominated
/// variation (D) and intermediate regularly varying classes, judged at the
/// largest grid point. Not a proof of membership.
struct TailClassReport {
  std::vector<TailClassRow> rows;
  bool long_tailed = false;
  bool dominated = false;
  bool intermediate_regular = false;
};

TailClassReport tail_class_diagnostics(const TailDistribution& d,
                                       std::span<const double> grid);

}  // namespace rosq
