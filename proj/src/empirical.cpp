#include "rosq/empirical.hpp"

#include <boost/math/distributions/normal.hpp>

#include "rosq/errors.hpp"

namespace rosq {

EmpiricalTail::EmpiricalTail(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw DomainError("empirical tail of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalTail::ccdf(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
}

double EmpiricalTail::x_at_ccdf(double p) const {
  const auto n = sorted_.size();
  // ccdf(sorted[k]) <= p  <=>  n - 1 - k <= p n (for distinct values).
  const double need = static_cast<double>(n) * (1.0 - p) - 1.0;
  auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(need)));
  k = std::min(k, n - 1);
  while (k + 1 < n && ccdf(sorted_[k]) > p) ++k;
  return sorted_[k];
}

double EmpiricalTail::dkw_halfwidth(double confidence) const {
  return rosq::dkw_halfwidth(sorted_.size(), confidence);
}

double dkw_halfwidth(std::size_t n, double confidence) {
  if (n == 0 || !(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("dkw_halfwidth needs n > 0 and confidence in (0, 1)");
  }
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_distance of an empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

MeanEstimate mean_estimate(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty sample");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = x.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

MeanEstimate batch_means(std::span<const double> x, std::size_t batches) {
  if (batches < 2 || x.size() < batches) {
    throw DomainError("batch_means needs at least two non-empty batches");
  }
  const std::size_t len = x.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += x[i];
    means[b] = s / static_cast<double>(len);
  }
  return mean_estimate(means);
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double binomial_halfwidth(double p, std::size_t n, double confidence) {
  const double z = normal_quantile(0.5 + 0.5 * confidence);
  return z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace rosq
