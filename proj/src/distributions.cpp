#include "rosq/distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "rosq/numerics.hpp"

namespace rosq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be positive and finite, got " << v;
    throw ConfigError(msg.str());
  }
}

// Upper incomplete gamma Gamma(a, z), not normalized.
double upper_gamma(double a, double z) { return boost::math::tgamma(a, z); }

}  // namespace

TailDistribution make_pareto(double nu, double x_m) {
  if (!(nu > 1.0 && nu < 2.0)) {
    std::ostringstream msg;
    msg << "pareto index must lie in (1, 2), got " << nu;
    throw ConfigError(msg.str());
  }
  require_positive(x_m, "pareto scale");
  return {DistKind::Pareto, nu, x_m};
}

TailDistribution make_exponential(double rate) {
  require_positive(rate, "exponential rate");
  return {DistKind::Exponential, rate, 0.0};
}

TailDistribution make_deterministic(double value) {
  require_positive(value, "deterministic value");
  return {DistKind::Deterministic, value, 0.0};
}

TailDistribution make_weibull(double shape, double scale) {
  require_positive(shape, "weibull shape");
  require_positive(scale, "weibull scale");
  return {DistKind::Weibull, shape, scale};
}

TailDistribution make_distribution(const std::string& kind,
                                   std::span<const double> params) {
  auto expect = [&](std::size_t n) {
    if (params.size() != n) {
      std::ostringstream msg;
      msg << kind << " takes " << n << " parameter(s), got " << params.size();
      throw ConfigError(msg.str());
    }
  };
  if (kind == "pareto") {
    expect(2);
    return make_pareto(params[0], params[1]);
  }
  if (kind == "exponential") {
    expect(1);
    return make_exponential(params[0]);
  }
  if (kind == "deterministic") {
    expect(1);
    return make_deterministic(params[0]);
  }
  if (kind == "weibull") {
    expect(2);
    return make_weibull(params[0], params[1]);
  }
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

std::string TailDistribution::name() const {
  switch (kind_) {
    case DistKind::Pareto: return "pareto";
    case DistKind::Exponential: return "exponential";
    case DistKind::Deterministic: return "deterministic";
    case DistKind::Weibull: return "weibull";
  }
  return {};
}

std::vector<double> TailDistribution::parameters() const {
  switch (kind_) {
    case DistKind::Pareto:
    case DistKind::Weibull: return {p0_, p1_};
    case DistKind::Exponential:
    case DistKind::Deterministic: return {p0_};
  }
  return {};
}

double TailDistribution::tail(double x) const {
  switch (kind_) {
    case DistKind::Pareto: return x <= p1_ ? 1.0 : std::pow(x / p1_, -p0_);
    case DistKind::Exponential: return x <= 0.0 ? 1.0 : std::exp(-p0_ * x);
    case DistKind::Deterministic: return x < p0_ ? 1.0 : 0.0;
    case DistKind::Weibull: return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / p1_, p0_));
  }
  return 0.0;
}

double TailDistribution::density(double x) const {
  switch (kind_) {
    case DistKind::Pareto:
      return x < p1_ ? 0.0 : p0_ / p1_ * std::pow(x / p1_, -p0_ - 1.0);
    case DistKind::Exponential: return x < 0.0 ? 0.0 : p0_ * std::exp(-p0_ * x);
    case DistKind::Deterministic:
      throw DomainError("deterministic law has no density");
    case DistKind::Weibull: {
      if (x <= 0.0) return 0.0;
      const double r = std::pow(x / p1_, p0_);
      return p0_ / x * r * std::exp(-r);
    }
  }
  return 0.0;
}

double TailDistribution::mean() const {
  switch (kind_) {
    case DistKind::Pareto: return p1_ * p0_ / (p0_ - 1.0);
    case DistKind::Exponential: return 1.0 / p0_;
    case DistKind::Deterministic: return p0_;
    case DistKind::Weibull: return p1_ * std::tgamma(1.0 + 1.0 / p0_);
  }
  return 0.0;
}

double TailDistribution::variance() const {
  switch (kind_) {
    case DistKind::Pareto: return kInf;
    case DistKind::Exponential: return 1.0 / (p0_ * p0_);
    case DistKind::Deterministic: return 0.0;
    case DistKind::Weibull: {
      const double g1 = std::tgamma(1.0 + 1.0 / p0_);
      return p1_ * p1_ * (std::tgamma(1.0 + 2.0 / p0_) - g1 * g1);
    }
  }
  return 0.0;
}

double TailDistribution::support_min() const {
  switch (kind_) {
    case DistKind::Pareto: return p1_;
    case DistKind::Deterministic: return p0_;
    case DistKind::Exponential:
    case DistKind::Weibull: return 0.0;
  }
  return 0.0;
}

double TailDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case DistKind::Pareto: return p1_ * std::pow(rng.uniform_open(), -1.0 / p0_);
    case DistKind::Exponential: return rng.exponential() / p0_;
    case DistKind::Deterministic: return p0_;
    case DistKind::Weibull: return p1_ * std::pow(rng.exponential(), 1.0 / p0_);
  }
  return 0.0;
}

double TailDistribution::lst(double s) const {
  if (s < 0.0) throw DomainError("lst requires s >= 0");
  switch (kind_) {
    case DistKind::Pareto: {
      if (s == 0.0) return 1.0;
      const double y = s * p1_;
      const double nu = p0_;
      return std::exp(-y) -
             (y * std::exp(-y) - std::pow(y, nu) * upper_gamma(2.0 - nu, y)) /
                 (nu - 1.0);
    }
    case DistKind::Exponential: return p0_ / (p0_ + s);
    case DistKind::Deterministic: return std::exp(-s * p0_);
    case DistKind::Weibull: return 1.0 - weibull_lst_complement(s);
  }
  return 0.0;
}

double TailDistribution::lst_complement(double s) const {
  if (s < 0.0) throw DomainError("lst requires s >= 0");
  if (s == 0.0) return 0.0;
  switch (kind_) {
    case DistKind::Pareto: {
      const double y = s * p1_;
      const double nu = p0_;
      return -std::expm1(-y) +
             (y * std::exp(-y) - std::pow(y, nu) * upper_gamma(2.0 - nu, y)) /
                 (nu - 1.0);
    }
    case DistKind::Exponential: return s / (p0_ + s);
    case DistKind::Deterministic: return -std::expm1(-s * p0_);
    case DistKind::Weibull: return weibull_lst_complement(s);
  }
  return 0.0;
}

double TailDistribution::lst_defect(double s) const {
  if (s < 0.0) throw DomainError("lst requires s >= 0");
  if (s == 0.0) return 0.0;
  switch (kind_) {
    case DistKind::Pareto: {
      const double y = s * p1_;
      const double nu = p0_;
      // e^{-y} - 1 + y and y(1 - e^{-y}) are both O(y^2).
      return (std::expm1(-y) + y) - y * std::expm1(-y) / (nu - 1.0) +
             std::pow(y, nu) * upper_gamma(2.0 - nu, y) / (nu - 1.0);
    }
    case DistKind::Exponential: {
      const double t = s / p0_;
      return t * t / (1.0 + t);
    }
    case DistKind::Deterministic: {
      const double y = s * p0_;
      return std::expm1(-y) + y;
    }
    case DistKind::Weibull: return mean() * s - weibull_lst_complement(s);
  }
  return 0.0;
}

double TailDistribution::weibull_lst_complement(double s) const {
  // 1 - E[e^{-sX}] = s * integral of e^{-sx} tail(x).
  if (s == 0.0) return 0.0;
  const double scale = 1.0 / (s + 1.0 / p1_);
  auto f = [&](double x) { return std::exp(-s * x) * tail(x); };
  QuadratureOptions opt;
  opt.abs_tol = 1e-13 / s;
  opt.rel_tol = 1e-13;
  return s * integrate_semi_infinite(f, 0.0, opt, scale).value;
}

double TailDistribution::forward_tail(double x) const {
  if (x <= 0.0) return 1.0;
  switch (kind_) {
    case DistKind::Pareto: {
      const double nu = p0_;
      const double xm = p1_;
      const double integral = x >= xm ? xm * std::pow(x / xm, 1.0 - nu) / (nu - 1.0)
                                      : (xm - x) + xm / (nu - 1.0);
      return integral / mean();
    }
    case DistKind::Exponential: return std::exp(-p0_ * x);
    case DistKind::Deterministic: return x >= p0_ ? 0.0 : 1.0 - x / p0_;
    case DistKind::Weibull: {
      const double k = p0_;
      const double lam = p1_;
      return lam / k * upper_gamma(1.0 / k, std::pow(x / lam, k)) / mean();
    }
  }
  return 0.0;
}

double TailDistribution::partial_expectation(double a, double b) const {
  if (!(b > a)) return 0.0;
  switch (kind_) {
    case DistKind::Pareto: {
      const double nu = p0_;
      const double lo = std::max(a, p1_);
      if (!(b > lo)) return 0.0;
      const double c = std::pow(p1_, nu);
      const double upper = std::isinf(b) ? 0.0 : std::pow(b, 1.0 - nu);
      return nu * c / (nu - 1.0) * (std::pow(lo, 1.0 - nu) - upper);
    }
    case DistKind::Exponential: {
      const double r = p0_;
      const double lo = std::max(a, 0.0);
      auto g = [&](double x) {
        return std::isinf(x) ? 0.0 : (x + 1.0 / r) * std::exp(-r * x);
      };
      return g(lo) - g(b);
    }
    case DistKind::Deterministic: return (a < p0_ && p0_ <= b) ? p0_ : 0.0;
    case DistKind::Weibull: {
      const double k = p0_;
      const double lam = p1_;
      auto g = [&](double x) {
        if (std::isinf(x)) return 0.0;
        return lam * upper_gamma(1.0 + 1.0 / k, std::pow(std::max(x, 0.0) / lam, k));
      };
      return g(a) - g(b);
    }
  }
  return 0.0;
}

std::optional<RegVaryingSpec> TailDistribution::regular_variation() const {
  if (kind_ != DistKind::Pareto) return std::nullopt;
  RegVaryingSpec spec;
  spec.index = p0_;
  spec.scale = p1_;
  spec.tail_coefficient = std::pow(p1_, p0_);
  spec.bingham_C = spec.tail_coefficient * gamma_fn(2.0 - p0_) / (p0_ - 1.0);
  return spec;
}

TailDistribution TailDistribution::scaled(double factor) const {
  require_positive(factor, "scale factor");
  switch (kind_) {
    case DistKind::Pareto: return {kind_, p0_, p1_ * factor};
    case DistKind::Exponential: return {kind_, p0_ / factor, 0.0};
    case DistKind::Deterministic: return {kind_, p0_ * factor, 0.0};
    case DistKind::Weibull: return {kind_, p0_, p1_ * factor};
  }
  return *this;
}

double lst_by_quadrature(const TailDistribution& d, double s, double tol) {
  if (!d.has_density()) return d.lst(s);
  auto f = [&](double x) { return std::exp(-s * x) * d.density(x); };
  const double lo = d.support_min();
  QuadratureOptions opt;
  opt.abs_tol = tol;
  opt.max_subdivisions = 20000;
  const double scale = std::max(d.mean(), lo);
  if (d.kind() == DistKind::Weibull && d.parameters()[0] < 1.0) {
    // Integrable x^{k-1} singularity at 0; remove it with x = w^{1/k}.
    const double k = d.parameters()[0];
    auto g = [&](double w) {
      const double x = std::pow(w, 1.0 / k);
      return f(x) * x / (k * w);
    };
    const double wscale = std::pow(scale, k);
    return integrate_semi_infinite(g, 0.0, opt, wscale).value;
  }
  return integrate_semi_infinite(f, lo, opt, scale).value;
}

double forward_tail_by_quadrature(const TailDistribution& d, double x, double tol) {
  auto f = [&](double u) { return d.tail(u); };
  QuadratureOptions opt;
  opt.abs_tol = tol * d.mean();
  opt.rel_tol = 1e-12;
  opt.max_subdivisions = 20000;
  double total = 0.0;
  double start = std::max(x, 0.0);
  const double kink = d.support_min();
  if (start < kink) {
    total += integrate_adaptive(f, start, kink, opt).value;
    start = kink;
  }
  if (const auto rv = d.regular_variation(); rv && start > 0.0) {
    // t = start v^-m turns a t^-nu tail into a smooth integrand on (0, 1].
    const double m = 2.0 / (rv->index - 1.0);
    auto g = [&](double v) {
      return d.tail(start * std::pow(v, -m)) * m * start * std::pow(v, -m - 1.0);
    };
    total += integrate_adaptive(g, 0.0, 1.0, opt).value;
  } else {
    total += integrate_semi_infinite(f, start, opt, std::max(start, d.mean())).value;
  }
  return total / d.mean();
}

TailClassReport tail_class_diagnostics(const TailDistribution& d,
                                       std::span<const double> grid) {
  TailClassReport report;
  for (double x : grid) {
    const double t = d.tail(x);
    TailClassRow row;
    row.x = x;
    if (t > 0.0) {
      row.long_tail_ratio = d.tail(x + 1.0) / t;
      row.dominance_ratio = d.tail(2.0 * x) / t;
      row.irv_ratio_101 = d.tail(1.01 * x) / t;
      row.irv_ratio_110 = d.tail(1.1 * x) / t;
    }
    report.rows.push_back(row);
  }
  if (!report.rows.empty()) {
    const auto& last = report.rows.back();
    report.long_tailed = last.long_tail_ratio > 0.99;
    report.dominated = last.dominance_ratio > 1e-3;
    report.intermediate_regular = last.irv_ratio_101 > 0.95;
  }
  return report;
}

}  // namespace rosq
