#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rosq {

/// Right-continuous empirical complementary CDF of a sample.
class EmpiricalTail {
 public:
  /// Throws DomainError on an empty sample.
  explicit EmpiricalTail(std::vector<double> samples);

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }

  /// Fraction of samples strictly greater than x.
  double ccdf(double x) const;
  /// Smallest sample x with ccdf(x) <= p.
  double x_at_ccdf(double p) const;
  /// Dvoretzky-Kiefer-Wolfowitz half-width at the given confidence.
  double dkw_halfwidth(double confidence) const;

 private:
  std::vector<double> sorted_;
};

double dkw_halfwidth(std::size_t n, double confidence);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Asymptotic two-sample critical value at significance alpha,
/// sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m)).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Plain mean and standard error for independent samples.
MeanEstimate mean_estimate(std::span<const double> x);

/// Non-overlapping batch means for a correlated sequence.
MeanEstimate batch_means(std::span<const double> x, std::size_t batches = 50);

/// Half-width of the normal-approximation binomial band around p for n
/// trials, at two-sided confidence `confidence`.
double binomial_halfwidth(double p, std::size_t n, double confidence);

/// Standard normal quantile.
double normal_quantile(double p);

/// One-sample KS statistic against a continuous CDF.
template <class Cdf>
double ks_distance_to(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace rosq
