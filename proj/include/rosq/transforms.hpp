#pragma once

#include "rosq/desim.hpp"
#include "rosq/numerics.hpp"

namespace rosq {

/// Laplace-Stieltjes transforms of the M/G/1 waiting time under ROS and
/// FCFS, and of the busy period. Requires Poisson arrivals.
///
/// Internally the variable z in [mu{s}, 1] is written z = 1 - eps(s) u with
/// u in [0, 1], and every 1 - LST is evaluated through the service law's
/// lst_complement / lst_defect, so small-s results keep full precision.
class LstEvaluator {
 public:
  /// Throws ConfigError unless the arrival law is exponential.
  explicit LstEvaluator(const QueueModel& model);

  double load() const noexcept { return rho_; }
  double arrival_rate() const noexcept { return lambda_; }
  double service_mean() const noexcept { return beta_; }

  double service_lst(double s) const { return service_.lst(s); }
  /// (1 - beta{s}) / (beta s), the LST of the forward recurrence time.
  double forward_lst(double s) const;

  /// mu{s}, the root in (0, 1) of mu = beta{s + lambda (1 - mu)}.
  double busy_lst(double s) const { return 1.0 - epsilon(s); }
  /// eps(s) = 1 - mu{s}, computed by iterating eps = 1 - beta{s + lambda eps}.
  double epsilon(double s) const;

  /// Psi(s, z) for z in [mu{s}, 1].
  double psi(double s, double z) const;
  /// Phi(s, z) for z in [mu{s}, 1].
  double phi(double s, double z) const;
  /// Phi-hat(s, z) for z in (mu{s}, 1].
  double phi_hat(double s, double z) const;

  /// E[exp(-s W_ROS)] from the simplified Phi-hat integral.
  double wait_lst_ros(double s) const { return 1.0 - wait_lst_ros_complement(s); }
  double wait_lst_ros_complement(double s) const;
  /// The same transform from the unsimplified form with d Phi / dz taken by
  /// central differences. Cross-check only.
  double wait_lst_ros_unsimplified(double s) const;
  /// Exact rewrite in terms of the FCFS transform:
  /// (1 - rho) + rho (1 - rho)/(beta s) int Psi dz + fcfs_composed_term(s).
  double wait_lst_ros_fcfs_form(double s) const;
  /// rho int_0^{eps/(beta s)} E[exp(-rho s t W_FCFS)] Psi(s, 1 - beta s t) dt,
  /// the part that survives as rho -> 1.
  double fcfs_composed_term(double s) const;

  double wait_lst_fcfs(double s) const { return 1.0 - wait_lst_fcfs_complement(s); }
  double wait_lst_fcfs_complement(double s) const;

 private:
  struct Point {
    double s;
    double eps;
    double d_slope;  // D = d_slope w + d_curve w^2 + ... near w = 1 - v = 0
    double d_curve;
  };
  Point point(double s) const;
  double u_of_z(const Point& p, double z) const;

  // D(u) = z - beta{s + lambda (1 - z)}, positive on [0, 1).
  double d_of_u(const Point& p, double u) const;
  // -(z - beta{lambda (1 - z)}) = eps u (1 - rho) + defect(lambda eps u).
  double d0_of_u(const Point& p, double u) const;
  double psi_u(const Point& p, double u) const;
  double phi_u(const Point& p, double u) const;
  double phi_hat_u(const Point& p, double u) const;
  double fcfs_lst_at(double x) const;
  // integral over u in (0, 1) of f(u) Psi(s, 1 - eps u).
  double psi_weighted(const Point& p, const RealFunction& f) const;

  TailDistribution service_;
  double lambda_;
  double beta_;
  double rho_;
};

}  // namespace rosq
