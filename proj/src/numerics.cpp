#include "rosq/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace rosq {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980119413, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Weights of the Gauss nodes, which are kKronrodNodes[1], [3], ..., [9].
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "integrand is not finite at x = " << x;
    throw DomainError(msg.str());
  }
  return y;
}

Segment gauss_kronrod(const RealFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<double, 10> lower{};
  std::array<double, 10> upper{};
  const double fc = checked(f, center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    lower[j] = checked(f, center - dx);
    upper[j] = checked(f, center + dx);
    const double pair = lower[j] + upper[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(lower[j]) + std::abs(upper[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] *
           (std::abs(lower[j] - mean) + std::abs(upper[j] - mean));
  }

  const double value = kronrod * half;
  abs_sum *= abs_half;
  asc *= abs_half;
  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) {
    error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  }
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * abs_sum, error);
  }
  return {a, b, value, error};
}

bool splittable(const Segment& s) {
  const double mid = 0.5 * (s.a + s.b);
  const double scale = std::max(std::abs(s.a), std::abs(s.b));
  return mid > s.a && mid < s.b && (s.b - s.a) > 8.0 * kEps * scale;
}

}  // namespace

QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureOptions& options) {
  if (!(a < b)) throw DomainError("integrate_adaptive requires a < b");

  auto by_error = [](const Segment& x, const Segment& y) {
    return x.error < y.error;
  };
  std::vector<Segment> heap;
  std::vector<Segment> frozen;
  heap.push_back(gauss_kronrod(f, a, b));
  std::size_t evaluations = 21;

  auto totals = [&]() {
    double value = 0.0;
    double error = 0.0;
    for (const auto& s : heap) {
      value += s.value;
      error += s.error;
    }
    for (const auto& s : frozen) {
      value += s.value;
      error += s.error;
    }
    return std::pair{value, error};
  };

  double value = heap.front().value;
  double error = heap.front().error;
  std::size_t subdivisions = 0;
  while (true) {
    const double target = std::max(options.abs_tol, options.rel_tol * std::abs(value));
    if (error <= target) break;
    if (heap.empty() || subdivisions >= options.max_subdivisions) {
      std::tie(value, error) = totals();
      if (error <= target) break;
      std::ostringstream msg;
      msg << "adaptive quadrature on [" << a << ", " << b
          << "] did not converge: estimate " << value << ", error " << error
          << ", target " << target;
      throw QuadratureError(msg.str(), {value, error, evaluations});
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Segment worst = heap.back();
    heap.pop_back();
    if (!splittable(worst)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    evaluations += 42;
    ++subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    // Resum periodically so that cancellation in the running totals does
    // not mask convergence.
    if (subdivisions % 64 == 0) std::tie(value, error) = totals();
  }
  std::tie(value, error) = totals();
  return {value, error, evaluations};
}

QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    double tol) {
  return integrate_adaptive(f, a, b, QuadratureOptions{tol, 0.0});
}

QuadratureResult integrate_piecewise(const RealFunction& f,
                                     std::span<const double> points,
                                     const QuadratureOptions& options) {
  QuadratureResult total;
  std::size_t segments = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] > points[i]) ++segments;
  }
  if (segments == 0) return total;
  QuadratureOptions per = options;
  per.abs_tol = options.abs_tol / static_cast<double>(segments);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    const auto r = integrate_adaptive(f, points[i], points[i + 1], per);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
  }
  return total;
}

QuadratureResult integrate_semi_infinite(const RealFunction& f, double a,
                                         const QuadratureOptions& options,
                                         double scale) {
  if (!(scale > 0.0)) throw DomainError("semi-infinite scale must be positive");
  auto mapped = [&](double u) {
    const double w = 1.0 - u;
    const double t = a + scale * u / w;
    if (!std::isfinite(t)) return 0.0;
    const double y = f(t) * scale / (w * w);
    return y;
  };
  return integrate_adaptive(mapped, 0.0, 1.0, options);
}

QuadratureResult integrate_semi_infinite(const RealFunction& f, double a,
                                         double tol) {
  return integrate_semi_infinite(f, a, QuadratureOptions{tol, 0.0});
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn requires x > 0");
  return std::tgamma(x);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_fn requires a, b > 0");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

namespace {

double bessel_k1_series(double x) {
  constexpr double euler_gamma = std::numbers::egamma;
  const double q = 0.25 * x * x;
  double term = 1.0;  // q^k / (k! (k+1)!)
  double harmonic = 0.0;
  double i1_sum = 0.0;
  double psi_sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
      harmonic += 1.0 / k;
    }
    const double psi_pair = -2.0 * euler_gamma + 2.0 * harmonic + 1.0 / (k + 1);
    i1_sum += term;
    psi_sum += psi_pair * term;
    if (term < 1e-18 * i1_sum) break;
  }
  const double i1 = 0.5 * x * i1_sum;
  return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * psi_sum;
}

double bessel_k1_continued_fraction(double x) {
  // Steed's method for the CF2 continued fraction, order zero, then K1 from
  // the Wronskian-type relation K1 = K0 (x + 1/2 - h) / x.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  if (i > 100000) throw NumericError("bessel_k1: continued fraction failed", 0.0);
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  return k0 * (x + 0.5 - h) / x;
}

double bessel_k1_asymptotic(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (4.0 - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
}

}  // namespace

double bessel_k1(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k1 requires x > 0");
  if (x <= 2.0) return bessel_k1_series(x);
  if (x < 25.0) return bessel_k1_continued_fraction(x);
  return bessel_k1_asymptotic(x);
}

RootResult find_root_bracketed(const RealFunction& f, double lo, double hi,
                               double tol) {
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, 0.0, 0};
  if (fb == 0.0) return {b, 0.0, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change on [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (std::size_t it = 1; it <= 500; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double half = 0.5 * (c - b);
    if (std::abs(fb) <= tol || std::abs(half) <= tol1 || fb == 0.0) {
      return {b, fb, it};
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * half * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (half > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericError("find_root_bracketed: iteration limit", b);
}

}  // namespace rosq
