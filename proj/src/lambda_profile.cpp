#include "qfent/lambda_profile.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>

#include <unsupported/Eigen/FFT>

#include "qfent/errors.hpp"
#include "qfent/numeric.hpp"

namespace qfent {
namespace {

using i128 = __int128;

constexpr int kMaxCountingExp = 60;

// Smallest e <= max_e with x * 2^e an integer, or -1.
int dyadic_exponent(double x, int max_e) {
  for (int e = 0; e <= max_e; ++e) {
    const double y = std::ldexp(x, e);
    if (y == std::floor(y)) return e;
  }
  return -1;
}

}  // namespace

// K on the grid of T = 2^L cells, plus the prefix count P(y) = |K~ cap [0, y)|
// and 2 Q(y) = 2 int_0^y P of K~ = K u (K + T) at every endpoint of K~. All
// counts are exact integers: T <= 2^60, so 2 Q < 2^123.
struct LambdaProfile::Counting {
  IntervalSet set;
  int log2_cells = 0;
  std::vector<std::int64_t> lo, hi;
  std::vector<i128> x, p, q2;
  std::vector<char> rising;
  i128 occupied = 0;

  // (P(y), 2 Q(y)) for integer y >= 0.
  std::pair<i128, i128> eval(i128 y) const {
    const auto it = std::upper_bound(x.begin(), x.end(), y);
    const auto i = static_cast<std::size_t>(it - x.begin()) - 1;
    const i128 d = y - x[i];
    const i128 slope = rising[i] ? 1 : 0;
    return {p[i] + slope * d, q2[i] + 2 * p[i] * d + slope * d * d};
  }

  // 2 sum_{j=0}^{J} A_j, A_j = #{c in K : c + j in K~}. Over a run of cells
  // [a, b) with P piecewise linear on integer breakpoints,
  // sum_{c=a}^{b-1} P(c + s) = Q(b + s) - Q(a + s) - (P(b + s) - P(a + s)) / 2.
  i128 pair_count2(i128 j) const {
    if (j < 0) return 0;
    i128 total = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      auto run = [&](i128 s) {
        const auto [pb, qb] = eval(hi[i] + s);
        const auto [pa, qa] = eval(lo[i] + s);
        return (qb - qa) - (pb - pa);
      };
      total += run(j + 1) - run(0);
    }
    return total;
  }

  i128 autocorrelation(i128 j) const { return (pair_count2(j) - pair_count2(j - 1)) / 2; }
};

double LambdaProfile::antiderivative(const Counting& c, double x) {
  if (!(x > 0.0)) return 0.0;
  const int L = c.log2_cells;
  const double h = std::ldexp(1.0, -L);
  const auto j = static_cast<i128>(std::floor(std::ldexp(x, L)));
  const i128 m = c.occupied;
  const i128 aj = c.autocorrelation(j);
  // Trapezoid over the nodes 0..J is exact since lambda is linear between them:
  // 2 F(J h) / h^2 = 2 (J + 1) M - 2 sum A - (M - A_J).
  const i128 twice = 2 * (j + 1) * m - c.pair_count2(j) - (m - aj);
  double f = static_cast<double>(std::ldexp(static_cast<long double>(twice), -2 * L - 1));
  const double t = x - static_cast<double>(j) * h;
  if (t > 0.0) {
    const double l0 = h * static_cast<double>(m - aj);
    const double l1 = h * static_cast<double>(m - c.autocorrelation(j + 1));
    const double lx = l0 + (t / h) * (l1 - l0);
    f += 0.5 * t * (l0 + lx);
  }
  return f;
}

LambdaProfile LambdaProfile::build_counting(const IntervalSet& k, int log2_cells) {
  auto c = std::make_shared<Counting>();
  c->set = k;
  c->log2_cells = log2_cells;
  const i128 cells = static_cast<i128>(1) << log2_cells;
  for (const Interval& p : k.pieces()) {
    c->lo.push_back(static_cast<std::int64_t>(std::ldexp(p.lo, log2_cells)));
    c->hi.push_back(static_cast<std::int64_t>(std::ldexp(p.hi, log2_cells)));
    c->occupied += c->hi.back() - c->lo.back();
  }
  c->x.push_back(0);
  c->p.push_back(0);
  c->q2.push_back(0);
  c->rising.push_back(0);
  i128 pos = 0, p = 0, q2 = 0;
  bool in = false;
  auto mark = [&](i128 at, bool start) {
    const i128 d = at - pos;
    q2 += 2 * p * d + (in ? d * d : 0);
    p += in ? d : 0;
    pos = at;
    in = start;
    c->x.push_back(at);
    c->p.push_back(p);
    c->q2.push_back(q2);
    c->rising.push_back(start ? 1 : 0);
  };
  for (i128 shift : {i128{0}, cells})
    for (std::size_t i = 0; i < c->lo.size(); ++i) {
      mark(c->lo[i] + shift, true);
      mark(c->hi[i] + shift, false);
    }

  LambdaProfile prof;
  prof.uniform_ = false;
  prof.values_.clear();
  // Interpolation inside a grid cell rounds a handful of times.
  prof.value_err_ = 8.0 * kEps * std::min(measure(k), 1.0 - measure(k));
  prof.counting_ = std::move(c);
  return prof;
}

LambdaProfile LambdaProfile::build(const IntervalSet& k, const LambdaIntegralOptions& opts) {
  LambdaProfile prof;
  if (k.empty() || k.is_full()) return prof;

  int e = 0;
  for (const Interval& p : k.pieces()) {
    const int ea = dyadic_exponent(p.lo, kMaxCountingExp);
    const int eb = dyadic_exponent(p.hi, kMaxCountingExp);
    if (ea < 0 || eb < 0) {
      e = -1;
      break;
    }
    e = std::max({e, ea, eb});
  }

  if (e >= 0 && opts.force_counting) return build_counting(k, e);
  if (e >= 0 && e <= opts.max_grid_log2) {
    const std::size_t cells = std::size_t{1} << std::max(e, 1);
    const double dcells = static_cast<double>(cells);
    std::vector<double> occ(cells, 0.0);
    std::size_t occupied = 0;
    for (const Interval& p : k.pieces()) {
      const auto c0 = static_cast<std::size_t>(p.lo * dcells);
      const auto c1 = static_cast<std::size_t>(p.hi * dcells);
      std::fill(occ.begin() + c0, occ.begin() + c1, 1.0);
      occupied += c1 - c0;
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, occ);
    for (auto& z : spec) z = std::norm(z);
    std::vector<double> corr;
    fft.inv(corr, spec);

    prof.uniform_ = true;
    prof.step_ = 1.0 / dcells;
    prof.values_.assign(cells + 1, 0.0);
    for (std::size_t j = 0; j < cells; ++j) {
      const double r = std::nearbyint(corr[j]);
      if (std::fabs(corr[j] - r) > 0.25)
        throw NumericalError("autocorrelation rounding is ambiguous");
      prof.values_[j] = (static_cast<double>(occupied) - r) / dcells;
    }
    prof.values_[0] = 0.0;
    prof.values_[cells] = 0.0;
    prof.value_err_ = 0.0;
    return prof;
  }

  std::vector<double> ends;
  ends.reserve(2 * k.size());
  for (const Interval& p : k.pieces()) {
    ends.push_back(p.lo);
    ends.push_back(p.hi);
  }
  const double pairs = static_cast<double>(ends.size()) * static_cast<double>(ends.size());
  if (pairs > 4.0 * static_cast<double>(opts.max_breakpoints)) {
    if (e >= 0) return build_counting(k, e);
    throw BudgetError("lambda profile: " + std::to_string(ends.size()) +
                      " endpoints exceed the breakpoint budget");
  }
  std::vector<double> nodes{0.0, 1.0};
  nodes.reserve(ends.size() * ends.size() + 2);
  for (double x : ends)
    for (double y : ends) {
      double d = x - y;
      d -= std::floor(d);
      if (d < 1.0) nodes.push_back(d);
    }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.size() > opts.max_breakpoints) {
    if (e >= 0) return build_counting(k, e);
    throw BudgetError("lambda profile: " + std::to_string(nodes.size()) +
                      " breakpoints exceed the budget");
  }
  prof.uniform_ = false;
  prof.values_.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) prof.values_[j] = lambda(k, nodes[j]);
  prof.values_.front() = 0.0;
  prof.values_.back() = 0.0;
  prof.nodes_ = std::move(nodes);
  prof.value_err_ = 8.0 * static_cast<double>(k.size() + 2) * kEps;
  return prof;
}

std::size_t LambdaProfile::cell_of(double phi) const {
  const std::size_t n = cell_count();
  if (uniform_) {
    const auto j = static_cast<std::size_t>(phi / step_);
    return std::min(j, n - 1);
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), phi);
  const auto j = static_cast<std::size_t>(it - nodes_.begin());
  return std::min(j == 0 ? 0 : j - 1, n - 1);
}

double LambdaProfile::operator()(double phi) const {
  phi = std::clamp(phi, 0.0, 1.0);
  if (counting_) return lambda(counting_->set, phi);
  const std::size_t j = cell_of(phi);
  const double x0 = node(j), x1 = node(j + 1);
  const double t = (phi - x0) / (x1 - x0);
  return values_[j] + t * (values_[j + 1] - values_[j]);
}

double LambdaProfile::integral(double lo, double hi) const {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (!(lo < hi)) return 0.0;
  if (counting_) return antiderivative(*counting_, hi) - antiderivative(*counting_, lo);
  CompensatedSum<double> sum;
  const std::size_t j0 = cell_of(lo);
  const std::size_t j1 = cell_of(hi);
  for (std::size_t j = j0; j <= j1; ++j) {
    const double a = std::max(lo, node(j));
    const double b = std::min(hi, node(j + 1));
    if (!(a < b)) continue;
    const double va = (a == node(j)) ? values_[j] : (*this)(a);
    const double vb = (b == node(j + 1)) ? values_[j + 1] : (*this)(b);
    sum.add(0.5 * (b - a) * (va + vb));
  }
  return sum.value();
}

double LambdaProfile::integral_error(double lo, double hi, double value) const {
  if (counting_) {
    // Both antiderivatives are within a few ulps; F(lo) <= lo * min(|K|, 1 - |K|).
    const double m = std::min(measure(counting_->set), 1.0 - measure(counting_->set));
    return 8.0 * kEps * (std::fabs(value) + 2.0 * std::fabs(lo) * m) + std::fabs(hi - lo) * value_err_ + 1e-300;
  }
  return std::fabs(hi - lo) * value_err_ + 8.0 * kEps * std::fabs(value) + 1e-300;
}

IntegralEstimate lambda_integral(const IntervalSet& k, double lo, double hi, double abs_tol,
                                 const LambdaIntegralOptions& opts) {
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
    throw DomainError("lambda_integral: need 0 <= lo <= hi <= 1");
  const LambdaProfile prof = LambdaProfile::build(k, opts);
  IntegralEstimate est;
  est.value = prof.integral(lo, hi);
  est.err_bound = prof.integral_error(lo, hi, est.value);
  if (est.err_bound > abs_tol)
    throw NumericalError("lambda_integral: error bound " + format_double(est.err_bound) +
                         " exceeds tolerance");
  return est;
}

}  // namespace qfent
