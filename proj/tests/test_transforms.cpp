#include <doctest.h>

#include <cmath>
#include <vector>

#include "rosq/desim.hpp"
#include "rosq/empirical.hpp"
#include "rosq/transforms.hpp"

using namespace rosq;

namespace {

QueueModel mm1(double lambda, double mu) {
  return QueueModel(make_exponential(lambda), make_exponential(mu), Discipline::ROS);
}

QueueModel mpareto(double rho) {
  return QueueModel(make_exponential(0.01), make_pareto(1.5, 1.0), Discipline::ROS).with_load(rho);
}

}  // namespace

TEST_CASE("busy-period transform of M/M/1 is the smaller quadratic root") {
  const double lambda = 0.5, mu = 1.0;
  const LstEvaluator e(mm1(lambda, mu));
  for (const double s : {0.01, 0.1, 1.0, 10.0}) {
    const double b = lambda + mu + s;
    const double root = (b - std::sqrt(b * b - 4 * lambda * mu)) / (2 * lambda);
    CAPTURE(s);
    CHECK(e.busy_lst(s) == doctest::Approx(root).epsilon(1e-12));
  }
  CHECK(std::abs(e.busy_lst(1e-8) - 1.0) < 1e-3);
}

TEST_CASE("busy-period transform slope for Pareto service") {
  // 1 - mu{s} ~ s beta/(1 - rho) as s -> 0; the correction decays like
  // s^{nu-1} = sqrt(s), so the approach is slow.
  const double rho = 0.8;
  const auto m = mpareto(rho);
  const LstEvaluator e(m);
  const double target = m.service().mean() / (1 - rho);
  std::vector<double> ratio;
  for (const double s : {1e-3, 1e-4, 1e-5, 1e-6}) ratio.push_back(e.epsilon(s) / s / target);
  MESSAGE("slope ratios at s = 1e-3..1e-6: " << ratio[0] << " " << ratio[1] << " " << ratio[2] << " " << ratio[3]);
  for (std::size_t i = 1; i < ratio.size(); ++i) CHECK(std::abs(ratio[i] - 1) < std::abs(ratio[i - 1] - 1));
  CHECK(std::abs(ratio[2] - 1) < 0.10);
  CHECK(std::abs(ratio[3] - 1) < 0.02);
}

TEST_CASE("Psi endpoints and bounds") {
  const LstEvaluator e(mpareto(0.6));
  for (const double s : {0.1, 1.0}) {
    const double mu = e.busy_lst(s);
    CHECK(e.psi(s, 1.0) == doctest::Approx(1.0));
    CHECK(e.psi(s, mu) == doctest::Approx(0.0).epsilon(1e-10));
    for (int i = 1; i < 20; ++i) {
      const double z = mu + (1 - mu) * i / 20.0;
      const double p = e.psi(s, z);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    CHECK_THROWS_AS(e.psi(s, mu * 0.9), DomainError);
  }
}

TEST_CASE("Phi endpoints and Phi-hat consistency") {
  const LstEvaluator e(mpareto(0.5));
  const double rho = e.load();
  const double beta = e.service_mean();
  const double lambda = e.arrival_rate();
  for (const double s : {0.1, 1.0}) {
    const double mu = e.busy_lst(s);
    CHECK(e.phi(s, 1.0) == doctest::Approx((1 - e.service_lst(s)) / (1 - rho)).epsilon(1e-9));
    CHECK(e.phi(s, mu) == doctest::Approx(1 - mu).epsilon(1e-9));
    for (const double frac : {0.2, 0.5, 0.9}) {
      const double z = mu + (1 - mu) * frac;
      const double d = z - e.service_lst(s + lambda * (1 - z));
      CAPTURE(z);
      CHECK(e.phi_hat(s, z) * d + beta * s / (1 - rho) == doctest::Approx(e.phi(s, z)).epsilon(1e-8));
    }
  }
}

TEST_CASE("FCFS transform of M/M/1 in closed form") {
  const double lambda = 0.5, mu = 1.0, rho = lambda / mu;
  const LstEvaluator e(mm1(lambda, mu));
  for (const double s : {0.1, 1.0, 10.0}) {
    CHECK(e.wait_lst_fcfs(s) == doctest::Approx((1 - rho) * (s + mu) / (s + mu - lambda)).epsilon(1e-10));
  }
  CHECK(std::abs(e.wait_lst_fcfs(1e-9) - 1.0) < 1e-8);
}

TEST_CASE("ROS transform moments of M/M/1") {
  // Mean wait equals FCFS, rho beta/(1 - rho) = 1; second moment is
  // 2 E[W_FCFS^2]/(2 - rho) with E[W_FCFS^2] = 2 rho/(mu^2 (1 - rho)^2) = 4.
  const double rho = 0.5;
  const LstEvaluator e(mm1(0.5, 1.0));
  const double s = 1e-3;
  const double g1 = e.wait_lst_ros_complement(s) / s;
  const double g2 = e.wait_lst_ros_complement(2 * s) / (2 * s);
  const double m1 = 2 * g1 - g2;
  const double m2 = 2 * (g1 - g2) / s;
  CHECK(m1 == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(m2 == doctest::Approx(2 * 4.0 / (2 - rho)).epsilon(1e-2));
  CHECK(std::abs(e.wait_lst_ros(1e-6) - 1.0) < 1e-3);
}

TEST_CASE("ROS evaluators agree") {
  for (const auto& m : {mm1(0.5, 1.0), mpareto(0.3), mpareto(0.5), mpareto(0.8)}) {
    const LstEvaluator e(m);
    for (const double s : {0.1, 1.0, 10.0}) {
      const double simplified = e.wait_lst_ros(s);
      CAPTURE(m.load());
      CAPTURE(s);
      CHECK(e.wait_lst_ros_unsimplified(s) == doctest::Approx(simplified).epsilon(1e-5));
      CHECK(e.wait_lst_ros_fcfs_form(s) == doctest::Approx(simplified).epsilon(1e-6));
    }
  }
}

TEST_CASE("ROS transform is decreasing and convex") {
  const LstEvaluator e(mpareto(0.5));
  double prev2 = e.wait_lst_ros(0.05), prev = e.wait_lst_ros(0.1);
  CHECK(prev < prev2);
  for (double s = 0.2; s <= 12.8; s *= 2) {
    const double v = e.wait_lst_ros(s);
    CHECK(v < prev);
    // Geometric grid: convexity means slopes shrink in magnitude.
    CHECK((prev - v) / (s / 2) < (prev2 - prev) / (s / 4) + 1e-12);
    prev2 = prev;
    prev = v;
  }
}

TEST_CASE("ROS transform of M/Pareto/1 frozen values") {
  const LstEvaluator e(mpareto(0.5));
  CHECK(e.wait_lst_ros(0.1) == doctest::Approx(0.770421386032).epsilon(1e-9));
  CHECK(e.wait_lst_ros(1.0) == doctest::Approx(0.591648446484).epsilon(1e-9));
  CHECK(e.wait_lst_ros(10.0) == doctest::Approx(0.510978759916).epsilon(1e-9));
}

TEST_CASE("ROS transform against simulation") {
  for (const auto& m : {mm1(0.5, 1.0), mpareto(0.5)}) {
    const LstEvaluator e(m);
    const auto run = simulate(m, 400000, 10000, 17);
    for (const double s : {0.1, 1.0, 10.0}) {
      std::vector<double> v;
      v.reserve(run.customers.size());
      for (const auto& c : run.customers) v.push_back(std::exp(-s * c.wait));
      const auto est = batch_means(v);
      CAPTURE(m.load());
      CAPTURE(s);
      CHECK(std::abs(est.mean - e.wait_lst_ros(s)) <= 4 * est.std_error);
    }
  }
}

TEST_CASE("FCFS transform of M/D/1 against simulation") {
  const QueueModel m(make_exponential(0.6), make_deterministic(1.0), Discipline::FCFS);
  const LstEvaluator e(m);
  const auto run = simulate(m, 1000000, 10000, 18);
  std::vector<double> v;
  for (const auto& c : run.customers) v.push_back(std::exp(-c.wait));
  const auto est = batch_means(v);
  CHECK(std::abs(est.mean - e.wait_lst_fcfs(1.0)) <= 4 * est.std_error);
}

TEST_CASE("small-s slope of the ROS transform") {
  const double rho = 0.7;
  const auto m = mpareto(rho);
  const LstEvaluator e(m);
  const double c = m.service().regular_variation()->bingham_C;
  // h(0.7, 1.5), from the asymptotics tests.
  const double h = 0.911517266363;
  const double target = m.arrival_rate() * c * h / (1 - rho);
  const double s = 1e-4;
  CHECK(e.wait_lst_ros_complement(s) / std::sqrt(s) == doctest::Approx(target).epsilon(0.10));
}

TEST_CASE("non-Poisson arrivals are rejected") {
  const QueueModel m(make_deterministic(2.0), make_exponential(1.0), Discipline::ROS);
  CHECK_THROWS_AS(LstEvaluator{m}, ConfigError);
}
