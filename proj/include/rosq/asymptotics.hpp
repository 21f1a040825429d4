#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rosq/desim.hpp"

namespace rosq {

/// An x -> probability approximation valid as x -> infinity.
struct TailCurve {
  std::string label;
  std::function<double(double)> eval;
  std::string validity_note;
};

struct CurveValue {
  double value = 0.0;
  bool clipped = false;  // raw formula exceeded 1
};

CurveValue evaluate_clipped(const TailCurve& curve, double x);

// Busy-period quantities. The mean number served in a busy period is taken
// as 1/(1 - rho), its M/G/1 value.

/// P(tau > n) ~ E[tau] P(B > n alpha (1 - rho)).
double busy_count_tail(const QueueModel& model, double n);
/// P(Z > x) ~ E[tau] P(B > x (1 - rho)).
double busy_period_tail(const QueueModel& model, double x);
/// P(Z^rp > x) ~ rho/(1 - rho) P(B^fw > x (1 - rho)).
double residual_busy_tail(const QueueModel& model, double x);
/// sum_{m >= 1} P(B > (x + m alpha)(1 - rho)): 1e5 explicit terms, then an
/// Euler-Maclaurin remainder.
double residual_busy_tail_sum(const QueueModel& model, double x);
/// P(B^rp > x) = rho P(B^fw > x).
double residual_service_tail(const QueueModel& model, double x);

/// Limit law of W(q)/q scaled by beta/(1 - rho): ((1 - y)^+)^{1/(1 - rho)}.
double conditional_w_limit(double y, double rho);

/// Four-term GI/G/1 ROS tail approximation, evaluated by nested adaptive
/// quadrature against the service density. Throws DomainError when the
/// service law has no density.
double ros_tail_four_term(const QueueModel& model, double x);

/// Single-integral rewrite of the four-term approximation:
/// rho P(B^fw > x) + int_0^1 { rho/(alpha (1 - rho)) E[B 1{a(u) < B <= b(u)}]
///   + x/(alpha u^2) P(B > b(u)) } (1 - u)^{1/(1 - rho)} du,
/// with a(u) = x (1 - rho)/(rho u + 1 - rho) and b(u) = x (1 - rho)/(rho u).
double ros_tail_single_integral(const QueueModel& model, double x);

enum class HMethod { Direct, PartialIntegration };

struct HConstant {
  double rho = 0.0;
  double nu = 0.0;
  double h = 0.0;
  HMethod method = HMethod::Direct;
};

/// h(rho, nu) = int_0^1 f(u) du with
/// f = (rho/(1-rho)) (rho u/(1-rho))^{nu-1} (1-u)^p + (1 + rho u/(1-rho))^nu (1-u)^{p-1},
/// p = 1/(1 - rho). PartialIntegration evaluates 1 - rho + int_0^1 g(u) du
/// instead. rho in (0, 1), nu in [1, 2].
HConstant h_constant(double rho, double nu, HMethod method = HMethod::Direct);

/// First part of f integrated in closed form:
/// (rho/(1-rho))^nu B(nu, p + 1).
double h_first_term_beta(double rho, double nu);
/// The same part by quadrature.
double h_first_term_quadrature(double rho, double nu);

/// P(W_ROS > x) ~ rho/(1 - rho) h P(B^fw > x) for M/G/1 with a Pareto
/// service tail of index nu.
double ros_tail_regular_variation(const QueueModel& model, double x);
/// P(W_FCFS > x) ~ rho/(1 - rho) P(B^fw > x).
double fcfs_tail_regular_variation(const QueueModel& model, double x);

/// Curves by name: busy-period, busy-count, residual-busy, residual-service,
/// ros-four-term, ros-single-integral, ros-regular-variation,
/// fcfs-regular-variation.
TailCurve make_tail_curve(const std::string& name, const QueueModel& model);

struct AppendixDReport {
  double x = 0.0;
  double c = 0.0;
  double random_sum = 0.0;  // sum_m P(B > x + c T_{-m}), Monte Carlo
  double random_sum_se = 0.0;
  double deterministic_sum = 0.0;  // sum_m P(B > x + c m alpha)
  double integrated = 0.0;         // (rho/c) P(B^fw > x)
  double ratio_random = 0.0;         // random_sum / integrated
  double ratio_deterministic = 0.0;  // deterministic_sum / integrated
};

/// Compares the three expressions of the random-vs-deterministic arrival
/// reduction at one x. The random sum averages renewal paths T_{-m} drawn
/// from the model's arrival law.
AppendixDReport appendix_d_check(double c, double x, const QueueModel& model,
                                 std::uint64_t replications, std::uint64_t seed,
                                 std::size_t jobs = 1);

}  // namespace rosq
