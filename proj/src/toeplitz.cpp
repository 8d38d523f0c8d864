#include "qfent/toeplitz.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qfent/numeric.hpp"

namespace qfent {
namespace {

// Maximal run of equal-length pieces with a constant period.
struct Run {
  double first_lo, first_hi, last_hi;
  double width, period;
  long long count;
};

std::vector<Run> find_runs(const IntervalSet& k) {
  const auto& p = k.pieces();
  std::vector<Run> runs;
  std::size_t i = 0;
  while (i < p.size()) {
    Run r{p[i].lo, p[i].hi, p[i].hi, p[i].length(), 0.0, 1};
    std::size_t j = i + 1;
    if (j < p.size() && p[j].length() == r.width) {
      r.period = p[j].lo - p[i].lo;
      while (j < p.size() && p[j].length() == r.width && p[j].lo - p[j - 1].lo == r.period) ++j;
      r.count = static_cast<long long>(j - i);
      r.last_hi = p[j - 1].hi;
    } else {
      j = i + 1;
    }
    runs.push_back(r);
    i = j;
  }
  return runs;
}

constexpr int kMaxGaussOrder = 8;

struct GaussTable {
  std::array<GaussRule, kMaxGaussOrder + 1> rule;
  std::array<double, kMaxGaussOrder + 1> remainder;  // (n!)^4 / ((2n+1) ((2n)!)^3)
  GaussTable() {
    for (int n = 1; n <= kMaxGaussOrder; ++n) {
      rule[n] = gauss_legendre(n);
      remainder[n] = std::exp(4.0 * std::lgamma(n + 1.0) - std::log(2.0 * n + 1.0) -
                              3.0 * std::lgamma(2.0 * n + 1.0));
    }
  }
};

const GaussTable& gauss_table() {
  static const GaussTable t;
  return t;
}

}  // namespace

SymbolCoefficients fourier_coefficients(const IntervalSet& k, int k_max) {
  if (k_max < 1) throw DomainError("fourier_coefficients: need k_max >= 1");
  SymbolCoefficients out;
  out.pieces = k.size();
  out.q.assign(static_cast<std::size_t>(k_max) + 1, {0.0, 0.0});
  out.q[0] = measure(k);
  const std::vector<Run> runs = find_runs(k);
  for (int kk = 1; kk <= k_max; ++kk) {
    const double kd = kk;
    CompensatedSum<double> re, im;
    for (const Run& r : runs) {
      const double amp = sinpi_product(kd, r.width) / (std::numbers::pi * kd);
      std::complex<double> term;
      const double den = r.count > 1 ? sinpi_product(kd, r.period) : 0.0;
      if (r.count == 1 || den == 0.0) {
        term = phase_product(kd, r.first_lo + r.first_hi) * (amp * static_cast<double>(r.count));
      } else {
        const double num = sinpi_product(kd * static_cast<double>(r.count), r.period);
        term = phase_product(kd, r.first_lo + r.last_hi) * (amp * num / den);
      }
      re.add(term.real());
      im.add(term.imag());
    }
    out.q[static_cast<std::size_t>(kk)] = {re.value(), im.value()};
  }
  return out;
}

Eigen::MatrixXcd toeplitz_matrix(const SymbolCoefficients& coeffs, int n) {
  if (n < 0) throw DomainError("toeplitz_matrix: negative size");
  if (n > coeffs.k_max() + 1) throw DomainError("toeplitz_matrix: k_max too small for N=" + std::to_string(n));
  Eigen::MatrixXcd m(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) m(r, c) = coeffs(r - c);
  return m;
}

std::vector<double> symbol_spectrum(const SymbolCoefficients& coeffs, int n) {
  std::vector<double> ev = hermitian_eigenvalues(toeplitz_matrix(coeffs, n));
  const double eps = 1e-9 * n;
  for (double& x : ev) {
    if (x < -eps || x > 1.0 + eps)
      throw NumericalError("Q_N eigenvalue " + format_double(x) + " outside [0, 1]: broken symbol");
    x = std::clamp(x, 0.0, 1.0);
  }
  return ev;
}

double entropy_from_spectrum(const std::vector<double>& lambdas) {
  CompensatedSum<double> s;
  for (double x : lambdas)
    if (x >= 1e-15 && x <= 1.0 - 1e-15) s.add(binary_entropy(x));
  return s.value();
}

double quadratic_from_spectrum(const std::vector<double>& lambdas) {
  CompensatedSum<double> s;
  for (double x : lambdas) s.add(x * (1.0 - x));
  return s.value();
}

double entropy(const SymbolCoefficients& coeffs, int n) {
  return entropy_from_spectrum(symbol_spectrum(coeffs, n));
}

double quadratic_bound_trace(const SymbolCoefficients& coeffs, int n) {
  if (n > coeffs.k_max() + 1) throw DomainError("quadratic_bound_trace: k_max too small");
  const double q0 = coeffs.q0();
  CompensatedSum<double> s;
  s.add(n * q0 * (1.0 - q0));
  for (int k = 1; k < n; ++k) s.add(-2.0 * (n - k) * std::norm(coeffs.q[static_cast<std::size_t>(k)]));
  return s.value();
}

double fejer_kernel(int n, double phi) {
  const double s = sinpi(phi);
  if (s == 0.0) return static_cast<double>(n) * n;
  const double r = sinpi_product(n, phi) / s;
  return r * r;
}

IntegralEstimate quadratic_bound_integral(const LambdaProfile& profile, int n, double abs_tol) {
  if (n < 1) throw DomainError("quadratic_bound_integral: need N >= 1");
  if (!(abs_tol > 0)) throw DomainError("quadratic_bound_integral: need abs_tol > 0");
  IntegralEstimate est;
  if (n == 1) {
    est.value = profile.integral(0.0, 1.0);
    est.err_bound = profile.integral_error(0.0, 1.0, est.value);
    return est;
  }
  if (!profile.has_pieces())
    throw BudgetError("quadratic_bound_integral: set too fine for an explicit lambda profile");
  const GaussTable& gt = gauss_table();
  const double omega = 2.0 * std::numbers::pi * (n - 1);
  const double n2 = static_cast<double>(n) * n;
  const double density = 0.5 * abs_tol;  // remainder allowance per unit length

  CompensatedSum<double> sum, err;
  double abs_sum = 0.0;
  for (std::size_t j = 0; j < profile.cell_count(); ++j) {
    const double v0 = profile.value_at_node(j), v1 = profile.value_at_node(j + 1);
    if (v0 == 0.0 && v1 == 0.0) continue;
    const double x0 = profile.node(j), x1 = profile.node(j + 1);
    const double w = x1 - x0;
    const double slope = (v1 - v0) / w;
    const double vmax = std::max(std::fabs(v0), std::fabs(v1));

    // Remainder of an n-point rule on `sub` equal pieces of the cell, using
    // |d^r F_N| <= N^2 omega^r and a linear lambda.
    auto remainder = [&](int order, double sub) {
      const double h = w / sub;
      return sub * gt.remainder[order] * std::pow(h, 2 * order + 1) * n2 *
             std::pow(omega, 2 * order - 1) * (omega * vmax + 2.0 * order * std::fabs(slope));
    };
    int order = 1;
    double sub = 1.0;
    while (remainder(order, sub) > density * w) {
      if (order < kMaxGaussOrder)
        ++order;
      else
        sub *= 2.0;
      if (sub > 1e7) throw BudgetError("quadratic_bound_integral: node budget exceeded");
    }
    err.add(remainder(order, sub));

    const GaussRule& rule = gt.rule[order];
    const auto pieces = static_cast<long long>(sub);
    const double h = w / sub;
    for (long long p = 0; p < pieces; ++p) {
      const double a = x0 + static_cast<double>(p) * h;
      const double mid = a + 0.5 * h;
      for (int q = 0; q < order; ++q) {
        const double phi = mid + 0.5 * h * rule.nodes[static_cast<std::size_t>(q)];
        const double lam = v0 + (phi - x0) * slope;
        const double term = 0.5 * h * rule.weights[static_cast<std::size_t>(q)] * fejer_kernel(n, phi) * lam;
        sum.add(term);
        abs_sum += std::fabs(term);
      }
    }
  }
  est.value = sum.value();
  est.err_bound = err.value() + 16.0 * kEps * abs_sum + profile.value_error() * n;
  if (est.err_bound > abs_tol)
    throw NumericalError("quadratic_bound_integral: error bound " + format_double(est.err_bound) +
                         " exceeds tolerance");
  return est;
}

IntegralEstimate quadratic_bound_integral(const IntervalSet& k, int n, double abs_tol) {
  return quadratic_bound_integral(LambdaProfile::build(k), n, abs_tol);
}

}  // namespace qfent
