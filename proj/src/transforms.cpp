#include "rosq/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rosq {

namespace {

QuadratureOptions outer_options() {
  QuadratureOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-11;
  o.max_subdivisions = 4000;
  return o;
}

QuadratureOptions inner_options() {
  QuadratureOptions o;
  o.abs_tol = 1e-12;
  o.rel_tol = 1e-14;
  o.max_subdivisions = 2000;
  return o;
}

}  // namespace

LstEvaluator::LstEvaluator(const QueueModel& model)
    : service_(model.service()),
      lambda_(model.arrival_rate()),
      beta_(model.service().mean()),
      rho_(model.load()) {
  if (!model.poisson_arrivals()) {
    throw ConfigError("transform engine needs Poisson (exponential) arrivals");
  }
}

double LstEvaluator::forward_lst(double s) const {
  if (s <= 0.0) return 1.0;
  return service_.lst_complement(s) / (beta_ * s);
}

double LstEvaluator::epsilon(double s) const {
  if (s < 0.0) throw DomainError("busy-period transform needs s >= 0");
  if (s == 0.0) return 0.0;
  double eps = 1.0;
  for (int it = 0; it < 1000000; ++it) {
    const double next = service_.lst_complement(s + lambda_ * eps);
    const double step = eps - next;
    eps = next;
    if (step <= 1e-16 * (1.0 - rho_) * eps) return eps;
  }
  std::ostringstream msg;
  msg << "busy-period fixed point did not converge at s = " << s;
  throw NumericError(msg.str(), 1.0 - eps);
}

LstEvaluator::Point LstEvaluator::point(double s) const {
  if (!(s > 0.0)) throw DomainError("transform argument must be positive");
  const double eps = epsilon(s);
  // Taylor coefficients of D at v = 1 in w = 1 - v, from derivatives of
  // lst_complement at x = s + lambda eps.
  const double x = s + lambda_ * eps;
  const double h1 = 1e-5 * x;
  const double d1 =
      (service_.lst_complement(x + h1) - service_.lst_complement(x - h1)) / (2.0 * h1);
  const double h2 = 1e-3 * x;
  const double d2 = (service_.lst_complement(x + h2) - 2.0 * service_.lst_complement(x) +
                     service_.lst_complement(x - h2)) /
                    (h2 * h2);
  const double k = eps * (1.0 - lambda_ * d1);
  const double c = 0.5 * lambda_ * lambda_ * eps * eps * d2;
  return {s, eps, k, c};
}

double LstEvaluator::u_of_z(const Point& p, double z) const {
  const double mu = 1.0 - p.eps;
  if (z < mu || z > 1.0) {
    std::ostringstream msg;
    msg << "z = " << z << " outside [mu{s}, 1] = [" << mu << ", 1]";
    throw DomainError(msg.str());
  }
  return std::min((1.0 - z) / p.eps, 1.0);
}

double LstEvaluator::d_of_u(const Point& p, double u) const {
  return service_.lst_complement(p.s + lambda_ * p.eps * u) - p.eps * u;
}

double LstEvaluator::d0_of_u(const Point& p, double u) const {
  const double w = p.eps * u;
  return w * (1.0 - rho_) + service_.lst_defect(lambda_ * w);
}

double LstEvaluator::psi_u(const Point& p, double u) const {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  if (d_of_u(p, u) <= 0.0) return 0.0;
  // v = 1 - e^-y removes the (1 - v)^-1 growth of 1/D near v = 1.
  auto f = [&](double y) {
    const double one_minus_v = std::exp(-y);
    const double d = d_of_u(p, -std::expm1(-y));
    return d > 0.0 ? p.eps * one_minus_v / d : 0.0;
  };
  // Below w = 1 - v = 1e-3, D = k w + c w^2 + O(w^3) and the y-integral of
  // eps / (k + c e^-y) is (eps / k) (y + log(k + c e^-y)).
  const double y_max = -std::log1p(-u);
  const double y_lin = std::min(y_max, -std::log(1e-3));
  const double linear_part =
      p.eps / p.d_slope *
      (y_max - y_lin + std::log((p.d_slope + p.d_curve * (1.0 - u)) /
                                (p.d_slope + p.d_curve * std::exp(-y_lin))));
  // An absolute error e in the exponent is a relative error e in Psi.
  double exponent = 0.0;
  try {
    exponent = integrate_adaptive(f, 0.0, y_lin, inner_options()).value;
  } catch (const QuadratureError& err) {
    // Close to u = 1 the exponent grows like -log(1 - u) and 1/D loses
    // digits; what matters is the absolute error of Psi itself.
    const auto& part = err.partial();
    if (part.error_estimate * std::exp(-part.value) > 1e-13) throw;
    exponent = part.value;
  }
  return std::exp(-exponent - linear_part);
}

double LstEvaluator::phi_u(const Point& p, double u) const {
  if (u <= 0.0) return service_.lst_complement(p.s) / (1.0 - rho_);
  const double w = p.eps * u;
  const double diff =
      service_.lst_complement(p.s + lambda_ * w) - service_.lst_complement(lambda_ * w);
  return w * diff / d0_of_u(p, u);
}

double LstEvaluator::phi_hat_u(const Point& p, double u) const {
  const double w = p.eps * u;
  const double first = (w - beta_ * p.s / (1.0 - rho_)) / d_of_u(p, u);
  const double second = u <= 0.0 ? 1.0 / (1.0 - rho_) : w / d0_of_u(p, u);
  return first + second;
}

double LstEvaluator::fcfs_lst_at(double x) const {
  if (x <= 0.0) return 1.0;
  return (1.0 - rho_) / (1.0 - rho_ * forward_lst(x));
}

double LstEvaluator::psi_weighted(const Point& p, const RealFunction& f) const {
  auto g = [&](double u) {
    const double ps = psi_u(p, u);
    return ps == 0.0 ? 0.0 : f(u) * ps;
  };
  return integrate_adaptive(g, 0.0, 1.0, outer_options()).value;
}

double LstEvaluator::psi(double s, double z) const {
  const Point p = point(s);
  return psi_u(p, u_of_z(p, z));
}

double LstEvaluator::phi(double s, double z) const {
  const Point p = point(s);
  return phi_u(p, u_of_z(p, z));
}

double LstEvaluator::phi_hat(double s, double z) const {
  const Point p = point(s);
  const double u = u_of_z(p, z);
  if (u >= 1.0) throw DomainError("phi_hat is singular at z = mu{s}");
  return phi_hat_u(p, u);
}

double LstEvaluator::wait_lst_ros_complement(double s) const {
  const Point p = point(s);
  const double integral = psi_weighted(p, [&](double u) { return phi_hat_u(p, u); });
  return -rho_ * (1.0 - rho_) * p.eps / (beta_ * s) * integral;
}

double LstEvaluator::wait_lst_ros_unsimplified(double s) const {
  const Point p = point(s);
  // z-step 1e-6 (1 - mu{s}) is a u-step of 1e-6. Near u = 0 d Phi / du can
  // grow like u^(nu - 2), so the step shrinks to 1e-3 u there and u = w^2.
  auto dphi = [&](double u) {
    const double h = std::min(1e-6, 1e-3 * u);
    return (phi_u(p, u + h) - phi_u(p, u - h)) / (2.0 * h);
  };
  QuadratureOptions o = outer_options();
  o.abs_tol = 1e-10;
  o.rel_tol = 1e-9;
  auto g = [&](double w) {
    const double u = w * w;
    const double ps = psi_u(p, u);
    return ps == 0.0 ? 0.0 : 2.0 * w * dphi(u) * ps;
  };
  const double integral = integrate_adaptive(g, 0.0, 1.0, o).value;
  return 1.0 - rho_ + rho_ * forward_lst(s) +
         rho_ * (1.0 - rho_) / (beta_ * s) * integral;
}

double LstEvaluator::fcfs_composed_term(double s) const {
  const Point p = point(s);
  const double integral =
      psi_weighted(p, [&](double u) { return fcfs_lst_at(lambda_ * p.eps * u); });
  return rho_ * p.eps / (beta_ * s) * integral;
}

double LstEvaluator::wait_lst_ros_fcfs_form(double s) const {
  const Point p = point(s);
  const double psi_integral = psi_weighted(p, [](double) { return 1.0; });
  return (1.0 - rho_) + rho_ * (1.0 - rho_) * p.eps / (beta_ * s) * psi_integral +
         fcfs_composed_term(s);
}

double LstEvaluator::wait_lst_fcfs_complement(double s) const {
  if (s < 0.0) throw DomainError("transform argument must be non-negative");
  if (s == 0.0) return 0.0;
  const double fw = forward_lst(s);
  const double one_minus_fw = service_.lst_defect(s) / (beta_ * s);
  return rho_ * one_minus_fw / (1.0 - rho_ * fw);
}

}  // namespace rosq
