#pragma once

#include <span>
#include <vector>

#include "rosq/rng.hpp"

namespace rosq {

/// Scaling for finite service variance: 2 (1 - rho) / (lambda E[B^2]) with
/// E[B^2] = sigma2 + (rho/lambda)^2, i.e. the reciprocal of the M/G/1 FCFS
/// mean wait.
double delta_light(double rho, double sigma2, double lambda);

/// Scaling for a regularly varying service tail: the x solving
/// lambda C x^{nu-1} = 1 - rho, in closed form.
double delta_heavy(double rho, double nu, double C, double lambda);
/// The same root found by bracketing, for cross-checks.
double delta_heavy_by_root(double rho, double nu, double C, double lambda);

/// int_0^inf e^{-t}/(1 + omega t) dt.
double ht_lst_light(double omega);
/// int_0^inf e^{-t}/(1 + (omega t)^{nu-1}) dt.
double ht_lst_heavy(double omega, double nu);
/// 2 sqrt(x) K1(2 sqrt(x)), the tail of a product of two unit exponentials.
double ht_tail_light(double x);
/// int_0^inf exp(-x/t - t) dt by quadrature.
double ht_tail_light_by_quadrature(double x);

/// Product of two independent unit-mean exponentials.
double ht_sample_light(Rng& rng);

struct HtLightReport {
  std::vector<double> x;
  std::vector<double> empirical;
  std::vector<double> limit;
  double sup_deviation = 0.0;
};

/// Empirical ccdf of scaled waits against the light-tailed limit on a grid.
HtLightReport ht_light_check(std::span<const double> scaled_waits,
                             std::span<const double> grid);

struct HtHeavyReport {
  std::vector<double> omega;
  std::vector<double> empirical;  // mean of exp(-omega * scaled wait)
  std::vector<double> limit;
  double max_deviation = 0.0;
};

HtHeavyReport ht_heavy_check(std::span<const double> scaled_waits,
                             std::span<const double> omegas, double nu);

}  // namespace rosq
