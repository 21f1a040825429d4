#include "rosq/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "rosq/empirical.hpp"
#include "rosq/numerics.hpp"
#include "rosq/parallel.hpp"

namespace rosq {

namespace {

double alpha_of(const QueueModel& m) { return m.arrival().mean(); }

// (1 - u)^e without losing digits for small u.
double pow1m(double u, double e) {
  if (u >= 1.0) return 0.0;
  return std::exp(e * std::log1p(-u));
}

// sum_{m >= m0} f(m) for a smooth, decreasing, integrable f: explicit terms
// up to m_split, then int_{m_split}^inf f + f(m_split)/2 - f'(m_split)/12.
struct Summand {
  std::function<double(double)> f;
  std::function<double(double)> df;  // may be empty
  std::function<double(double)> integral_from;
};

double sum_with_remainder(const Summand& s, long m0, long terms) {
  double sum = 0.0;
  const long m_split = m0 + terms;
  for (long m = m0; m < m_split; ++m) {
    const double t = s.f(static_cast<double>(m));
    sum += t;
    if (t == 0.0) return sum;
  }
  const double ms = static_cast<double>(m_split);
  double tail = s.integral_from(ms) + 0.5 * s.f(ms);
  if (s.df) tail -= s.df(ms) / 12.0;
  return sum + tail;
}

}  // namespace

CurveValue evaluate_clipped(const TailCurve& curve, double x) {
  const double v = curve.eval(x);
  if (v > 1.0) return {1.0, true};
  return {std::max(v, 0.0), false};
}

double busy_count_tail(const QueueModel& model, double n) {
  const double rho = model.load();
  return model.service().tail(n * alpha_of(model) * (1.0 - rho)) / (1.0 - rho);
}

double busy_period_tail(const QueueModel& model, double x) {
  const double rho = model.load();
  return model.service().tail(x * (1.0 - rho)) / (1.0 - rho);
}

double residual_busy_tail(const QueueModel& model, double x) {
  const double rho = model.load();
  return rho / (1.0 - rho) * model.service().forward_tail(x * (1.0 - rho));
}

double residual_busy_tail_sum(const QueueModel& model, double x) {
  const double rho = model.load();
  const double a = alpha_of(model);
  const auto& b = model.service();
  Summand s;
  s.f = [&](double m) { return b.tail((x + m * a) * (1.0 - rho)); };
  if (b.has_density()) {
    s.df = [&](double m) { return -a * (1.0 - rho) * b.density((x + m * a) * (1.0 - rho)); };
  }
  s.integral_from = [&](double m) {
    return rho / (1.0 - rho) * b.forward_tail((x + m * a) * (1.0 - rho));
  };
  return sum_with_remainder(s, 1, 100000);
}

double residual_service_tail(const QueueModel& model, double x) {
  return model.load() * model.service().forward_tail(x);
}

double conditional_w_limit(double y, double rho) {
  if (y <= 0.0) return 1.0;
  if (y >= 1.0) return 0.0;
  return pow1m(y, 1.0 / (1.0 - rho));
}

double ros_tail_four_term(const QueueModel& model, double x) {
  const auto& b = model.service();
  if (!b.has_density()) {
    throw DomainError(
        "four-term tail needs a service density; use ros_tail_single_integral");
  }
  if (!(x > 0.0)) throw DomainError("tail argument must be positive");
  const double rho = model.load();
  const double a = alpha_of(model);
  const double p = 1.0 / (1.0 - rho);
  const double c = (1.0 - rho) / (a * rho);
  const double kink = b.support_min();

  QuadratureOptions inner_opt;
  inner_opt.abs_tol = 1e-300;
  inner_opt.rel_tol = 1e-10;
  QuadratureOptions outer_opt;
  outer_opt.abs_tol = 1e-300;
  outer_opt.rel_tol = 1e-7;

  auto inner = [&](double lo, double hi, const RealFunction& weight) {
    if (!(hi > lo)) return 0.0;
    auto g = [&](double z) { return b.density(z) * weight(z); };
    if (kink > lo && kink < hi) {
      const double pts[] = {lo, kink, hi};
      return integrate_piecewise(g, pts, inner_opt).value;
    }
    if (hi <= kink) return 0.0;
    return integrate_adaptive(g, lo, hi, inner_opt).value;
  };
  // Weight shared by the second and third terms.
  auto weight_a = [&](double v) {
    return [=](double z) {
      const double base = 1.0 - (x + v * a - z) * (1.0 - rho) / (rho * z);
      return base > 0.0 ? std::pow(base, p) : 0.0;
    };
  };
  auto weight_b = [&](double v) {
    return [=](double z) {
      const double base = 1.0 - x * (1.0 - rho) / (z - v * a * (1.0 - rho));
      return base > 0.0 ? std::pow(base, p) : 0.0;
    };
  };

  auto second = [&](double v) {
    return inner((v * a + x) * (1.0 - rho), v * a + x, weight_a(v));
  };
  auto third_fourth = [&](double v) {
    return inner(v * a, v * a + x, weight_a(v)) +
           inner((v * a + x) * (1.0 - rho), v * a, weight_b(v));
  };

  const double t1 = rho * b.forward_tail(x);
  const double t2 = integrate_adaptive(second, 0.0, c * x, outer_opt).value;
  const double t34 = integrate_semi_infinite(third_fourth, c * x, outer_opt, c * x).value;
  return t1 + t2 + t34;
}

double ros_tail_single_integral(const QueueModel& model, double x) {
  if (!(x > 0.0)) throw DomainError("tail argument must be positive");
  const auto& b = model.service();
  const double rho = model.load();
  const double a = alpha_of(model);
  const double p = 1.0 / (1.0 - rho);

  // u = w^m removes the u^{nu-2} endpoint singularity of the tail term.
  int m = 1;
  if (auto rv = b.regular_variation()) m = static_cast<int>(std::ceil(1.0 / (rv->index - 1.0)));
  m = std::clamp(m, 1, 20);

  auto integrand = [&](double w) {
    const double u = std::pow(w, m);
    const double lower = x * (1.0 - rho) / (rho * u + 1.0 - rho);
    const double upper = x * (1.0 - rho) / (rho * u);
    const double jac = m * std::pow(w, m - 1);
    const double first = rho / (a * (1.0 - rho)) * b.partial_expectation(lower, upper) * jac;
    // x/(alpha u^2) * jac = x m w^{-m-1} / alpha.
    const double second = x * m * std::pow(w, -m - 1) / a * b.tail(upper);
    return (first + second) * pow1m(u, p);
  };

  std::vector<double> pts{0.0, 1.0};
  const double kink = b.support_min();
  if (kink > 0.0) {
    const double u_upper = x * (1.0 - rho) / (rho * kink);
    const double u_lower = (x * (1.0 - rho) / kink - (1.0 - rho)) / rho;
    for (double u : {u_upper, u_lower}) {
      if (u > 0.0 && u < 1.0) pts.push_back(std::pow(u, 1.0 / m));
    }
  }
  std::sort(pts.begin(), pts.end());
  QuadratureOptions opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-10;
  const double integral = integrate_piecewise(integrand, pts, opt).value;
  return rho * b.forward_tail(x) + integral;
}

namespace {

void check_h_args(double rho, double nu) {
  if (!(rho > 0.0 && rho < 1.0) || !(nu >= 1.0 && nu <= 2.0)) {
    std::ostringstream msg;
    msg << "h(rho, nu) needs rho in (0, 1) and nu in [1, 2], got (" << rho << ", "
        << nu << ")";
    throw DomainError(msg.str());
  }
}

// 0, (1-rho), 2(1-rho), 4(1-rho), ... , 1: the integrands live on the
// scale 1 - rho near u = 0.
std::vector<double> h_breakpoints(double rho) {
  std::vector<double> pts{0.0};
  for (double u = 1.0 - rho; u < 1.0; u *= 2.0) pts.push_back(u);
  pts.push_back(1.0);
  return pts;
}

QuadratureOptions h_options() {
  QuadratureOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-13;
  opt.max_subdivisions = 4000;
  return opt;
}

}  // namespace

HConstant h_constant(double rho, double nu, HMethod method) {
  check_h_args(rho, nu);
  const double p = 1.0 / (1.0 - rho);
  const double r = rho / (1.0 - rho);
  HConstant out{rho, nu, 0.0, method};

  if (method == HMethod::Direct) {
    auto f = [&](double u) {
      return r * std::pow(r * u, nu - 1.0) * pow1m(u, p) +
             std::pow(1.0 + r * u, nu) * pow1m(u, p - 1.0);
    };
    const auto pts = h_breakpoints(rho);
    out.h = integrate_piecewise(f, pts, h_options()).value;
    return out;
  }

  // At nu = 1 the first part of g degenerates to a point mass rho at u = 0,
  // which the integral below cannot see; use the nu -> 1 limit.
  if (nu == 1.0) {
    out.h = 1.0;
    return out;
  }
  // u = w^m makes the u^{nu-2} singularity of g bounded.
  const int m = nu - 1.0 >= 0.05 ? static_cast<int>(std::ceil(1.0 / (nu - 1.0))) : 20;
  const double coef = std::pow(r, nu - 1.0);
  auto g = [&](double w) {
    const double u = std::pow(w, m);
    const double first = (rho * nu * (1.0 - u) - rho) * coef * m *
                         std::pow(w, m * (nu - 1.0) - 1.0);
    const double second = rho * nu * std::pow(1.0 + r * u, nu - 1.0) * m * std::pow(w, m - 1);
    return (first + second) * pow1m(u, p);
  };
  auto pts = h_breakpoints(rho);
  for (auto& u : pts) u = std::pow(u, 1.0 / m);
  out.h = 1.0 - rho + integrate_piecewise(g, pts, h_options()).value;
  return out;
}

double h_first_term_beta(double rho, double nu) {
  check_h_args(rho, nu);
  const double p = 1.0 / (1.0 - rho);
  return std::pow(rho / (1.0 - rho), nu) * beta_fn(nu, p + 1.0);
}

double h_first_term_quadrature(double rho, double nu) {
  check_h_args(rho, nu);
  const double p = 1.0 / (1.0 - rho);
  const double r = rho / (1.0 - rho);
  auto f = [&](double u) { return r * std::pow(r * u, nu - 1.0) * pow1m(u, p); };
  const auto pts = h_breakpoints(rho);
  return integrate_piecewise(f, pts, h_options()).value;
}

namespace {

double pareto_h(const QueueModel& model) {
  const auto rv = model.service().regular_variation();
  if (!rv) throw DomainError("regularly varying tail needs a Pareto service law");
  return h_constant(model.load(), rv->index).h;
}

}  // namespace

double ros_tail_regular_variation(const QueueModel& model, double x) {
  return pareto_h(model) * fcfs_tail_regular_variation(model, x);
}

double fcfs_tail_regular_variation(const QueueModel& model, double x) {
  const double rho = model.load();
  return rho / (1.0 - rho) * model.service().forward_tail(x);
}

TailCurve make_tail_curve(const std::string& name, const QueueModel& model) {
  const std::string large_x = "asymptotic equivalence as x -> infinity";
  if (name == "busy-period") {
    return {name, [model](double x) { return busy_period_tail(model, x); }, large_x};
  }
  if (name == "busy-count") {
    return {name, [model](double n) { return busy_count_tail(model, n); }, large_x};
  }
  if (name == "residual-busy") {
    return {name, [model](double x) { return residual_busy_tail(model, x); }, large_x};
  }
  if (name == "residual-service") {
    return {name, [model](double x) { return residual_service_tail(model, x); },
            "exact for every x"};
  }
  if (name == "ros-four-term") {
    return {name, [model](double x) { return ros_tail_four_term(model, x); }, large_x};
  }
  if (name == "ros-single-integral") {
    return {name, [model](double x) { return ros_tail_single_integral(model, x); }, large_x};
  }
  if (name == "ros-regular-variation") {
    const double h = pareto_h(model);
    return {name,
            [model, h](double x) { return h * fcfs_tail_regular_variation(model, x); },
            large_x + "; M/G/1 with regularly varying service"};
  }
  if (name == "fcfs-regular-variation") {
    return {name, [model](double x) { return fcfs_tail_regular_variation(model, x); },
            large_x + "; subexponential forward recurrence time"};
  }
  throw ConfigError("unknown tail curve '" + name + "'");
}

AppendixDReport appendix_d_check(double c, double x, const QueueModel& model,
                                 std::uint64_t replications, std::uint64_t seed,
                                 std::size_t jobs) {
  if (!(c > 0.0) || !(x > 0.0)) throw DomainError("appendix_d_check needs c, x > 0");
  if (replications < 2) throw DomainError("appendix_d_check needs two or more replications");
  const auto& b = model.service();
  const double a = alpha_of(model);
  const double rho = model.load();

  AppendixDReport r;
  r.x = x;
  r.c = c;
  r.integrated = rho / c * b.forward_tail(x);

  Summand det;
  det.f = [&](double m) { return b.tail(x + c * m * a); };
  if (b.has_density()) det.df = [&](double m) { return -c * a * b.density(x + c * m * a); };
  det.integral_from = [&](double m) { return rho / c * b.forward_tail(x + c * m * a); };
  r.deterministic_sum = sum_with_remainder(det, 0, 100000);

  // Random epochs: explicit terms until x + c T exceeds 50 x, then the
  // remainder given T, with later gaps replaced by their mean.
  const double stop = 50.0 * x;
  std::vector<double> sums(replications);
  parallel_for(replications, jobs, [&](std::size_t i) {
    Rng rng(seed, Stream::Replication, i);
    double t = 0.0;
    double sum = 0.0;
    while (x + c * t < stop) {
      sum += b.tail(x + c * t);
      t += model.arrival().sample(rng);
    }
    const double y = x + c * t;
    sum += rho / c * b.forward_tail(y) + 0.5 * b.tail(y);
    sums[i] = sum;
  });
  const auto est = mean_estimate(sums);
  r.random_sum = est.mean;
  r.random_sum_se = est.std_error;
  r.ratio_random = r.random_sum / r.integrated;
  r.ratio_deterministic = r.deterministic_sum / r.integrated;
  return r;
}

}  // namespace rosq
