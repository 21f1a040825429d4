#include <doctest.h>

#include <cmath>
#include <vector>

#include "rosq/numerics.hpp"

using namespace rosq;

namespace {

// Composite Simpson on a uniform grid; the reference for smooth integrands.
double simpson(const RealFunction& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// K1 from its integral representation int_0^inf exp(-x cosh t) cosh t dt,
// trapezoid rule (spectrally accurate for this integrand).
double k1_reference(double x) {
  const double h = 1e-3;
  double sum = 0.5 * std::exp(-x);
  for (int i = 1; i < 200000; ++i) {
    const double t = i * h;
    const double term = std::exp(-x * std::cosh(t)) * std::cosh(t);
    sum += term;
    if (term < 1e-300) break;
  }
  return sum * h;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("adaptive quadrature on simple integrands") {
  CHECK(integrate_adaptive([](double) { return 1.0; }, 0, 1).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_adaptive([](double u) { return (1 - u) * (1 - u); }, 0, 1).value ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto f = [](double t) { return std::exp(-t) / (1 + t); };
  const double reference = simpson(f, 0, 50, 2000000);
  const auto r = integrate_adaptive(f, 0, 50, QuadratureOptions{1e-13, 0, 4000});
  CHECK(std::abs(r.value - reference) < 1e-10);
  CHECK(r.value == doctest::Approx(0.596347362323).epsilon(1e-11));
}

TEST_CASE("semi-infinite quadrature") {
  CHECK(integrate_semi_infinite([](double t) { return std::exp(-t); }, 0, 1e-12).value ==
        doctest::Approx(1.0).epsilon(1e-11));
  CHECK(integrate_semi_infinite([](double t) { return t * std::exp(-t); }, 0, 1e-12).value ==
        doctest::Approx(1.0).epsilon(1e-11));
  const auto f = [](double t) { return std::exp(-t) / (1 + t); };
  CHECK(std::abs(integrate_semi_infinite(f, 0, 1e-13).value - simpson(f, 0, 60, 2000000)) < 1e-10);
}

TEST_CASE("integrable endpoint singularity") {
  const auto r = integrate_adaptive([](double u) { return 1 / std::sqrt(u); }, 0, 1,
                                    QuadratureOptions{1e-10, 0, 4000});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("non-convergence reports a partial estimate") {
  bool thrown = false;
  try {
    integrate_adaptive([](double x) { return std::sin(1e4 * x); }, 0, 1,
                       QuadratureOptions{1e-14, 0, 3});
  } catch (const QuadratureError& e) {
    thrown = true;
    CHECK(std::isfinite(e.partial().value));
    CHECK(e.partial().evaluations > 0);
    CHECK(e.partial_estimate() == e.partial().value);
  }
  CHECK(thrown);
}

TEST_CASE("quadrature is linear") {
  const auto f = [](double x) { return std::exp(-x * x); };
  const auto g = [](double x) { return std::cos(3 * x); };
  const double a = 2.5, b = -1.25;
  const double lhs = integrate_adaptive([&](double x) { return a * f(x) + b * g(x); }, 0, 2, 1e-12).value;
  const double rhs = a * integrate_adaptive(f, 0, 2, 1e-12).value + b * integrate_adaptive(g, 0, 2, 1e-12).value;
  CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("piecewise quadrature across a kink") {
  const std::vector<double> pts{0.0, 1.0, 3.0};
  const auto r = integrate_piecewise([](double x) { return std::abs(x - 1.0); }, pts);
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("gamma function") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(1.5) == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-12));
  CHECK(gamma_fn(4.0) == doctest::Approx(6.0).epsilon(1e-12));
  for (int n = 1; n <= 9; ++n) {
    CHECK(gamma_fn(n) == doctest::Approx(factorial(n - 1)).epsilon(1e-12));
    const double half = factorial(2 * n) * std::sqrt(M_PI) / (std::pow(4.0, n) * factorial(n));
    CHECK(gamma_fn(n + 0.5) == doctest::Approx(half).epsilon(1e-12));
  }
  for (double x = 0.5; x <= 10; x += 0.37) {
    CHECK(gamma_fn(x + 1) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
  CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("beta function") {
  CHECK(beta_fn(2, 3) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(M_PI).epsilon(1e-12));
  const double q = integrate_adaptive([](double u) { return std::pow(u, 0.5) * std::pow(1 - u, 2.3); },
                                      0, 1, 1e-13).value;
  CHECK(beta_fn(1.5, 3.3) == doctest::Approx(q).epsilon(1e-10));
}

TEST_CASE("bessel K1 against independent references") {
  for (const double x : {1e-6, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 5.0, 12.0, 24.9, 25.0, 25.1, 40.0, 50.0}) {
    CAPTURE(x);
    CHECK(bessel_k1(x) == doctest::Approx(std::cyl_bessel_k(1.0, x)).epsilon(1e-10));
  }
  for (const double x : {0.3, 1.0, 4.0, 20.0}) {
    CAPTURE(x);
    CHECK(bessel_k1(x) == doctest::Approx(k1_reference(x)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(bessel_k1(0.0), DomainError);
}

TEST_CASE("bessel product form near zero and integral identity") {
  const auto prod = [](double x) { return 2 * std::sqrt(x) * bessel_k1(2 * std::sqrt(x)); };
  CHECK(std::abs(prod(1e-10) - 1.0) < 1e-4);
  const double q = integrate_semi_infinite([](double t) { return std::exp(-1.0 / t - t); }, 0, 1e-13).value;
  CHECK(prod(1.0) == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("bessel K1 is decreasing") {
  double prev = bessel_k1(1e-4);
  for (double x = 2e-4; x < 60; x *= 1.1) {
    const double k = bessel_k1(x);
    CHECK(k < prev);
    prev = k;
  }
}

TEST_CASE("bracketed roots") {
  auto r = find_root_bracketed([](double x) { return x - 0.5; }, 0, 1, 1e-14);
  CHECK(r.root == doctest::Approx(0.5).epsilon(1e-12));
  r = find_root_bracketed([](double x) { return std::sqrt(x) - 0.1; }, 0, 1, 1e-14);
  CHECK(r.root == doctest::Approx(0.01).epsilon(1e-10));
  CHECK(std::abs(r.residual) <= 1e-14);
  CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1; }, -1, 1, 1e-12), DomainError);
}
