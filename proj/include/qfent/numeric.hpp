#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace qfent {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// x*y = hi + lo exactly (barring over/underflow).
inline std::pair<double, double> two_product(double x, double y) {
  const double hi = x * y;
  return {hi, std::fma(x, y, -hi)};
}

// x - 2*round(x/2), exact for finite x.
inline double reduce_mod2(double x) { return x - 2.0 * std::nearbyint(0.5 * x); }

// sin(pi x), exactly zero at integers.
inline double sinpi(double x) {
  double r = reduce_mod2(x);  // [-1, 1]
  if (r > 0.5)
    r = 1.0 - r;
  else if (r < -0.5)
    r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

// cos(pi x), exactly zero at half integers.
inline double cospi(double x) {
  const double a = std::fabs(reduce_mod2(x));  // [0, 1]
  if (a <= 0.25) return std::cos(std::numbers::pi * a);
  if (a <= 0.75) return std::sin(std::numbers::pi * (0.5 - a));
  return -std::cos(std::numbers::pi * (1.0 - a));
}

// pi*k*x reduced through an error-free product; returns k*x mod 2 in [-1, 1].
inline double reduced_product(double k, double x) {
  const auto [hi, lo] = two_product(k, x);
  return reduce_mod2(hi) + lo;
}

inline double sinpi_product(double k, double x) { return sinpi(reduced_product(k, x)); }

// exp(-i pi k x)
inline std::complex<double> phase_product(double k, double x) {
  const double r = reduced_product(k, x);
  return {cospi(r), -sinpi(r)};
}

// Binary entropy in nats, with eta(0) = eta(1) = 0.
inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

// Neumaier compensated summation.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-17) break;
    }
    // Re-evaluate the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace qfent
