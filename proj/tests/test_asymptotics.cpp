#include <doctest.h>

#include <cmath>
#include <vector>

#include "rosq/asymptotics.hpp"
#include "rosq/empirical.hpp"
#include "rosq/numerics.hpp"

using namespace rosq;

namespace {

QueueModel mpareto(double rho, Discipline d = Discipline::ROS) {
  return QueueModel(make_exponential(0.01), make_pareto(1.5, 1.0), d).with_load(rho);
}

double f_integrand(double u, double rho, double nu) {
  const double p = 1 / (1 - rho);
  const double r = rho / (1 - rho);
  return r * std::pow(r * u, nu - 1) * std::pow(1 - u, p) + std::pow(1 + r * u, nu) * std::pow(1 - u, p - 1);
}

}  // namespace

TEST_CASE("busy-period tails") {
  const auto m = mpareto(0.5);
  CHECK(busy_period_tail(m, 100) == doctest::Approx(2 * std::pow(50.0, -1.5)).epsilon(1e-12));
  double prev = busy_count_tail(m, 1);
  for (double n = 2; n < 1e9; n *= 3) {
    const double t = busy_count_tail(m, n);
    CHECK(t < prev);
    prev = t;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("residual tails") {
  const auto m = mpareto(0.5);
  CHECK(residual_busy_tail(m, 1e3) == doctest::Approx(1.0 * m.service().forward_tail(500)).epsilon(1e-12));
  CHECK(residual_service_tail(m, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(residual_service_tail(m, 4) == doctest::Approx(0.5 / 3).epsilon(1e-12));
}

TEST_CASE("residual busy sum against brute-force summation") {
  const double rho = 0.5;
  const auto m = mpareto(rho);
  const double alpha = m.arrival().mean();
  const double x = 1e3;
  const auto& b = m.service();
  const long terms = 20000000;
  double sum = 0;
  for (long k = terms; k >= 1; --k) sum += b.tail((x + k * alpha) * (1 - rho));
  // Midpoint remainder of the pure power tail.
  sum += 2 / (alpha * std::pow(1 - rho, 1.5)) / std::sqrt(x + (terms + 0.5) * alpha);
  const double lib = residual_busy_tail_sum(m, x);
  CHECK(lib == doctest::Approx(sum).epsilon(1e-7));
  CHECK(lib == doctest::Approx(residual_busy_tail(m, x)).epsilon(0.02));
}

TEST_CASE("conditional wait limit") {
  CHECK(conditional_w_limit(0, 0.5) == 1.0);
  CHECK(conditional_w_limit(1, 0.5) == 0.0);
  CHECK(conditional_w_limit(3, 0.5) == 0.0);
  CHECK(conditional_w_limit(0.5, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("conditional waits approach the limit law") {
  const double rho = 0.5;
  const QueueModel m(make_exponential(0.5), make_exponential(1.0), Discipline::ROS);
  const std::uint64_t q = 500, reps = 3000;
  const auto w = simulate_conditional_wq(m, q, reps, 44);
  for (const double y : {0.25, 0.5, 0.75}) {
    const double threshold = q * y / (1 - rho);
    double hits = 0;
    for (const double v : w) hits += v > threshold;
    const double p = conditional_w_limit(y, rho);
    CAPTURE(y);
    CHECK(std::abs(hits / reps - p) <= binomial_halfwidth(p, reps, 0.999));
  }
}

TEST_CASE("four-term tail evaluators") {
  for (const double rho : {0.3, 0.7}) {
    const auto m = mpareto(rho);
    for (const double x : {1e3, 1e4}) {
      CAPTURE(rho);
      CAPTURE(x);
      CHECK(ros_tail_single_integral(m, x) == doctest::Approx(ros_tail_four_term(m, x)).epsilon(5e-3));
    }
  }
  CHECK(ros_tail_four_term(mpareto(0.3), 1e3) == doctest::Approx(0.00861685328).epsilon(1e-6));
  CHECK(ros_tail_four_term(mpareto(0.7), 1e3) == doctest::Approx(0.0448384319).epsilon(1e-6));
}

TEST_CASE("four-term tail approaches the regular-variation form") {
  const auto m = mpareto(0.5);
  CHECK(ros_tail_four_term(m, 1e4) == doctest::Approx(ros_tail_regular_variation(m, 1e4)).epsilon(0.02));
}

TEST_CASE("four-term tail at vanishing load") {
  const double x = 100;
  double prev = INFINITY;
  for (const double rho : {1e-2, 1e-3, 1e-4}) {
    const auto m = mpareto(rho);
    const double lead = rho * m.service().forward_tail(x);
    const double rel = std::abs(ros_tail_four_term(m, x) / lead - 1);
    CAPTURE(rho);
    CHECK(rel < prev);
    prev = rel;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("four-term tail needs a density") {
  const QueueModel m(make_exponential(0.5), make_deterministic(1.0), Discipline::ROS);
  CHECK_THROWS_AS(ros_tail_four_term(m, 10), DomainError);
}

TEST_CASE("split point of the inner range") {
  // c = (1 - rho)/(alpha rho) makes the lower limit (v alpha + x)(1 - rho)
  // meet v alpha at v = c x.
  const double rho = 0.4, alpha = 2.5, x = 7;
  const double c = (1 - rho) / (alpha * rho);
  CHECK((c * x * alpha + x) * (1 - rho) == doctest::Approx(c * x * alpha));
}

TEST_CASE("h endpoints and bounds") {
  for (const double rho : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(h_constant(rho, 1.0).h - 1) <= 1e-8);
    CHECK(std::abs(h_constant(rho, 2.0).h - 1) <= 1e-8);
  }
  for (int i = 1; i <= 9; ++i) {
    for (int j = 1; j <= 9; ++j) CHECK(h_constant(0.1 * i, 1 + 0.1 * j).h < 1.0);
  }
  CHECK(h_constant(0.999, 1.5).h == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-2));
  CHECK_THROWS_AS(h_constant(1.0, 1.5), DomainError);
  CHECK_THROWS_AS(h_constant(0.5, 2.5), DomainError);
}

TEST_CASE("h is convex in nu") {
  for (const double rho : {0.2, 0.5, 0.8}) {
    for (int k = 1; k < 20; ++k) {
      const double nu = 1 + 0.05 * k;
      CHECK(h_constant(rho, nu).h <= 0.5 * (h_constant(rho, nu - 0.05).h + h_constant(rho, nu + 0.05).h) + 1e-9);
    }
  }
}

TEST_CASE("h against Monte Carlo integration") {
  const double rho = 0.5, nu = 1.5;
  Rng rng(2024, Stream::Sampler);
  const int n = 10000000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = f_integrand(rng.uniform_open(), rho, nu);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  const double h = h_constant(rho, nu).h;
  CHECK(std::abs(h - mean) <= 4 * se);
  CHECK(h == doctest::Approx(0.931090495122).epsilon(1e-10));
}

TEST_CASE("h forms and first term") {
  for (const double rho : {0.2, 0.6}) {
    for (const double nu : {1.2, 1.7}) {
      CHECK(h_constant(rho, nu, HMethod::PartialIntegration).h == doctest::Approx(h_constant(rho, nu).h).epsilon(1e-8));
      CHECK(h_first_term_beta(rho, nu) == doctest::Approx(h_first_term_quadrature(rho, nu)).epsilon(1e-9));
    }
  }
}

TEST_CASE("regular-variation tails") {
  const auto m = mpareto(0.7);
  for (const double x : {1e2, 1e4}) {
    CHECK(ros_tail_regular_variation(m, x) / fcfs_tail_regular_variation(m, x) ==
          doctest::Approx(h_constant(0.7, 1.5).h).epsilon(1e-12));
  }
}

TEST_CASE("pareto truncated expectation") {
  const auto& b = mpareto(0.5).service();
  CHECK(b.partial_expectation(4, 25) == doctest::Approx(3 * (0.5 - 0.2)).epsilon(1e-12));
}

TEST_CASE("tail curves by name") {
  const auto m = mpareto(0.5);
  for (const char* name : {"busy-period", "busy-count", "residual-busy", "residual-service", "ros-four-term",
                           "ros-single-integral", "ros-regular-variation", "fcfs-regular-variation"}) {
    const auto c = make_tail_curve(name, m);
    CAPTURE(name);
    CHECK(c.eval(1e3) > 0);
    CHECK_FALSE(evaluate_clipped(c, 1e3).clipped);
  }
  CHECK(evaluate_clipped(make_tail_curve("busy-period", m), 0.1).clipped);
  CHECK_THROWS_AS(make_tail_curve("nonsense", m), ConfigError);
}

TEST_CASE("random versus deterministic arrival sums") {
  const auto m = mpareto(0.5);
  const auto r = appendix_d_check(0.5, 1e3, m, 1000, 130);
  CHECK(r.random_sum == doctest::Approx(r.integrated).epsilon(0.03));
  CHECK(r.deterministic_sum == doctest::Approx(r.integrated).epsilon(0.03));
  const QueueModel det(make_deterministic(6.0), make_pareto(1.5, 1.0), Discipline::ROS);
  const auto d = appendix_d_check(0.5, 1e3, det, 5, 1);
  CHECK(d.random_sum == doctest::Approx(d.deterministic_sum).epsilon(1e-12));
  const auto a = appendix_d_check(0.5, 1e2, m, 200, 3, 1);
  const auto b = appendix_d_check(0.5, 1e2, m, 200, 3, 4);
  CHECK(a.random_sum == b.random_sum);
}

TEST_CASE("busy periods in simulation follow the tail formula") {
  const auto m = mpareto(0.5);
  struct Busy : SimSink {
    std::vector<double> z;
    void busy_period(const BusyPeriodRecord& b) override { z.push_back(b.length); }
  } sink;
  simulate_stream(m, 10000000, 100000, 80, sink);
  const EmpiricalTail t(std::move(sink.z));
  const double x = t.x_at_ccdf(1e-3);
  const double ratio = t.ccdf(x) / busy_period_tail(m, x);
  CHECK(ratio >= 0.75);
  CHECK(ratio <= 1.25);
}
