#include "rosq/heavy_traffic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rosq/empirical.hpp"
#include "rosq/numerics.hpp"

namespace rosq {

namespace {

void check_load(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    std::ostringstream msg;
    msg << "load must lie in (0, 1), got " << rho;
    throw DomainError(msg.str());
  }
}

QuadratureOptions ht_options() {
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  return o;
}

}  // namespace

double delta_light(double rho, double sigma2, double lambda) {
  check_load(rho);
  const double beta = rho / lambda;
  return 2.0 * (1.0 - rho) / (lambda * (sigma2 + beta * beta));
}

double delta_heavy(double rho, double nu, double C, double lambda) {
  check_load(rho);
  return std::pow((1.0 - rho) / (lambda * C), 1.0 / (nu - 1.0));
}

double delta_heavy_by_root(double rho, double nu, double C, double lambda) {
  check_load(rho);
  auto f = [&](double x) { return lambda * C * std::pow(x, nu - 1.0) - (1.0 - rho); };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  return find_root_bracketed(f, 0.0, hi, 1e-15).root;
}

double ht_lst_light(double omega) {
  if (omega < 0.0) throw DomainError("omega must be non-negative");
  if (omega == 0.0) return 1.0;
  auto f = [&](double t) { return std::exp(-t) / (1.0 + omega * t); };
  return integrate_semi_infinite(f, 0.0, ht_options()).value;
}

double ht_lst_heavy(double omega, double nu) {
  if (omega < 0.0) throw DomainError("omega must be non-negative");
  if (omega == 0.0) return 1.0;
  auto f = [&](double t) {
    return std::exp(-t) / (1.0 + std::pow(omega * t, nu - 1.0));
  };
  return integrate_semi_infinite(f, 0.0, ht_options()).value;
}

double ht_tail_light(double x) {
  if (x < 0.0) throw DomainError("tail argument must be non-negative");
  if (x == 0.0) return 1.0;
  const double r = 2.0 * std::sqrt(x);
  return r * bessel_k1(r);
}

double ht_tail_light_by_quadrature(double x) {
  if (x <= 0.0) throw DomainError("tail argument must be positive");
  auto f = [&](double t) { return std::exp(-x / t - t); };
  // The integrand peaks at t = sqrt(x).
  const double peak = std::sqrt(x);
  const double pts[] = {0.0, peak};
  QuadratureOptions opt = ht_options();
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-13;
  return integrate_piecewise(f, pts, opt).value +
         integrate_semi_infinite(f, peak, opt, std::max(peak, 1.0)).value;
}

double ht_sample_light(Rng& rng) { return rng.exponential() * rng.exponential(); }

HtLightReport ht_light_check(std::span<const double> scaled_waits,
                             std::span<const double> grid) {
  EmpiricalTail tail({scaled_waits.begin(), scaled_waits.end()});
  HtLightReport r;
  for (double x : grid) {
    const double e = tail.ccdf(x);
    const double l = ht_tail_light(x);
    r.x.push_back(x);
    r.empirical.push_back(e);
    r.limit.push_back(l);
    r.sup_deviation = std::max(r.sup_deviation, std::abs(e - l));
  }
  return r;
}

HtHeavyReport ht_heavy_check(std::span<const double> scaled_waits,
                             std::span<const double> omegas, double nu) {
  if (scaled_waits.empty()) throw DomainError("empty sample");
  HtHeavyReport r;
  for (double w : omegas) {
    double s = 0.0;
    for (double v : scaled_waits) s += std::exp(-w * v);
    const double e = s / static_cast<double>(scaled_waits.size());
    const double l = ht_lst_heavy(w, nu);
    r.omega.push_back(w);
    r.empirical.push_back(e);
    r.limit.push_back(l);
    r.max_deviation = std::max(r.max_deviation, std::abs(e - l));
  }
  return r;
}

}  // namespace rosq
