#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qfent/construction.hpp"
#include "qfent/errors.hpp"
#include "qfent/lambda_profile.hpp"
#include "qfent/toeplitz.hpp"

using namespace qfent;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

IntervalSet half() { return IntervalSet::normalize(std::vector<Interval>{{0.0, 0.5}}); }

IntervalSet random_set(std::mt19937_64& rng, int pieces) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> pts(2 * pieces);
  for (double& p : pts) p = u(rng);
  std::sort(pts.begin(), pts.end());
  std::vector<Interval> raw;
  for (int i = 0; i < pieces; ++i) raw.push_back({pts[2 * i], pts[2 * i + 1]});
  return IntervalSet::normalize(raw);
}

using Vec = std::vector<cd>;
using Mat = std::vector<Vec>;

Vec matvec(const Mat& a, const Vec& v) {
  Vec w(v.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) w[r] += a[r][c] * v[c];
  return w;
}

cd dot(const Vec& a, const Vec& b) {
  cd s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Gaussian elimination with partial pivoting; false if singular.
bool solve(Mat a, Vec& b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a[r][k]) > std::abs(a[p][k])) p = r;
    if (a[p][k] == 0.0) return false;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const cd f = a[r][k] / a[k][k];
      for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t c = k + 1; c < n; ++c) b[k] -= a[k][c] * b[c];
    b[k] /= a[k][k];
  }
  return true;
}

// Power iteration, then Rayleigh-shifted inverse iteration, with deflation by
// projecting out the eigenvectors already found.
std::vector<double> power_iteration_spectrum(const Mat& h) {
  const std::size_t n = h.size();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<Vec> found;
  std::vector<double> out;
  auto project = [&](Vec v) {
    for (const Vec& u : found) {
      const cd c = dot(u, v);
      for (std::size_t i = 0; i < n; ++i) v[i] -= c * u[i];
    }
    double norm = 0;
    for (const cd& x : v) norm += std::norm(x);
    norm = std::sqrt(norm);
    for (cd& x : v) x /= norm;
    return v;
  };
  for (std::size_t e = 0; e < n; ++e) {
    Vec v(n);
    for (cd& x : v) x = {g(rng), g(rng)};
    v = project(v);
    for (int it = 0; it < 20; ++it) v = project(matvec(h, v));
    double lam = dot(v, matvec(h, v)).real();
    for (int it = 0; it < 50; ++it) {
      Mat shifted = h;
      for (std::size_t i = 0; i < n; ++i) shifted[i][i] -= lam;
      Vec w = v;
      if (!solve(shifted, w)) break;
      bool finite = true;
      for (const cd& x : w) finite = finite && std::isfinite(x.real()) && std::isfinite(x.imag());
      if (!finite) break;
      v = project(w);
      const double next = dot(v, matvec(h, v)).real();
      const bool done = std::fabs(next - lam) <= 1e-15;
      lam = next;
      if (done) break;
    }
    found.push_back(v);
    out.push_back(lam);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double eta(double x) { return -x * std::log(x) - (1 - x) * std::log(1 - x); }

}  // namespace

TEST_CASE("Fourier coefficients of the half circle") {
  const SymbolCoefficients c = fourier_coefficients(half(), 16);
  CHECK(c.q0() == 0.5);
  CHECK(c.k_max() == 16);
  CHECK(std::abs(c(1) - cd(0, -0.31830988618379067154)) <= 1e-16);
  for (int k = 1; k <= 16; ++k) {
    const cd expect = k % 2 ? cd(0, -1 / (pi * k)) : cd(0, 0);
    CHECK(std::abs(c(k) - expect) <= 1e-16);
    CHECK(c(-k) == std::conj(c(k)));
  }
  const SymbolCoefficients empty = fourier_coefficients(IntervalSet{}, 8);
  for (int k = 0; k <= 8; ++k) CHECK(empty(k) == cd(0, 0));
}

TEST_CASE("Fourier coefficients against direct quadrature") {
  std::mt19937_64 rng(21);
  const IntervalSet k = random_set(rng, 5);
  const SymbolCoefficients c = fourier_coefficients(k, 40);
  for (int m : {1, 2, 7, 40}) {
    // Exact integral per piece, evaluated without any shared helpers.
    cd direct = 0;
    for (const Interval& p : k.pieces())
      direct += (std::exp(cd(0, -2 * pi * m * p.hi)) - std::exp(cd(0, -2 * pi * m * p.lo))) / cd(0, -2 * pi * m);
    CHECK(std::abs(c(m) - direct) <= 1e-14);
    CHECK(std::abs(c(m)) <= std::min(c.q0(), static_cast<double>(k.size()) / (pi * m)) + 1e-15);
  }
}

TEST_CASE("translation multiplies by a phase") {
  std::mt19937_64 rng(22);
  const IntervalSet k = random_set(rng, 4);
  const double shift = 0.3125;
  const SymbolCoefficients a = fourier_coefficients(k, 20), b = fourier_coefficients(translate(k, shift), 20);
  for (int m = 1; m <= 20; ++m) {
    CHECK(std::abs(b(m) - a(m) * std::exp(cd(0, -2 * pi * m * shift))) <= 1e-14);
    CHECK(std::abs(b(m)) == doctest::Approx(std::abs(a(m))).epsilon(1e-12));
  }
}

TEST_CASE("combs are summed exactly") {
  // Equal pieces in arithmetic progression use the Dirichlet factor; compare
  // to the piecewise sum including resonant k.
  std::vector<Interval> raw;
  for (int i = 0; i < 64; ++i) raw.push_back({i / 128.0, i / 128.0 + 1 / 256.0});
  const IntervalSet comb = IntervalSet::normalize(raw);
  const SymbolCoefficients c = fourier_coefficients(comb, 300);
  for (int m : {1, 2, 63, 64, 128, 129, 256, 300}) {
    cd direct = 0;
    for (const Interval& p : comb.pieces())
      direct += (std::exp(cd(0, -2 * pi * m * p.hi)) - std::exp(cd(0, -2 * pi * m * p.lo))) / cd(0, -2 * pi * m);
    CHECK(std::abs(c(m) - direct) <= 1e-13);
  }
}

TEST_CASE("Toeplitz matrix layout") {
  const SymbolCoefficients c = fourier_coefficients(half(), 4);
  const Eigen::MatrixXcd q1 = toeplitz_matrix(c, 1);
  CHECK(q1.rows() == 1);
  CHECK(q1(0, 0) == cd(0.5, 0));
  const Eigen::MatrixXcd q2 = toeplitz_matrix(c, 2);
  CHECK(q2(0, 0) == cd(0.5, 0));
  CHECK(std::abs(q2(0, 1) - cd(0, 1 / pi)) <= 1e-16);
  CHECK(std::abs(q2(1, 0) - cd(0, -1 / pi)) <= 1e-16);
  const Eigen::MatrixXcd q5 = toeplitz_matrix(c, 5);
  CHECK(q5.trace().real() == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(q5.isApprox(q5.adjoint(), 0.0));
  CHECK_THROWS(toeplitz_matrix(c, 6));
}

TEST_CASE("Hermitian eigenvalues") {
  Eigen::Matrix2d d;
  d << 0.7, 0, 0, 0.2;
  CHECK(hermitian_eigenvalues(d) == std::vector<double>{0.2, 0.7});

  const SymbolCoefficients c = fourier_coefficients(half(), 4);
  const std::vector<double> ev = hermitian_eigenvalues(toeplitz_matrix(c, 2));
  CHECK(ev[0] == doctest::Approx(0.5 - 1 / pi).epsilon(1e-15));
  CHECK(ev[1] == doctest::Approx(0.5 + 1 / pi).epsilon(1e-15));

  Eigen::Matrix2cd bad;
  bad << 1, cd(0, 1), cd(0, 1), 1;
  CHECK_THROWS_AS(hermitian_eigenvalues(bad), DomainError);
}

TEST_CASE("Q_64 spectrum against power iteration") {
  const int n = 64;
  const SymbolCoefficients c = fourier_coefficients(half(), n);
  const Eigen::MatrixXcd q = toeplitz_matrix(c, n);
  Mat h(n, Vec(n));
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) h[r][col] = q(r, col);
  const std::vector<double> oracle = power_iteration_spectrum(h);
  const std::vector<double> ev = hermitian_eigenvalues(q);
  for (int i = 0; i < n; ++i) {
    CHECK(std::fabs(ev[i] - oracle[i]) <= 1e-8);
    CHECK(ev[i] >= -1e-9 * n);
    CHECK(ev[i] <= 1 + 1e-9 * n);
    // Particle-hole symmetry of the half circle.
    CHECK(std::fabs(ev[i] + ev[n - 1 - i] - 1) <= 1e-12);
  }
}

TEST_CASE("entropy examples") {
  for (const IntervalSet& k : {IntervalSet{}, IntervalSet::full()}) {
    const SymbolCoefficients c = fourier_coefficients(k, 1024);
    for (int n : {1, 2, 17, 256, 1024}) {
      CHECK(entropy(c, n) == 0.0);
      CHECK(quadratic_bound_trace(c, n) == 0.0);
    }
  }
  const SymbolCoefficients c = fourier_coefficients(half(), 1024);
  CHECK(entropy(c, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(entropy(c, 2) == doctest::Approx(eta(0.5 - 1 / pi) + eta(0.5 + 1 / pi)).epsilon(1e-14));
  CHECK(entropy(c, 2) == doctest::Approx(0.94789326746755503592).epsilon(1e-14));

  // Independent LAPACK eigensolve.
  const std::vector<std::pair<int, double>> lapack{{64, 2.1123572579270835},
                                                   {128, 2.343409372219583},
                                                   {256, 2.574459195493599},
                                                   {512, 2.8055084464292395},
                                                   {1024, 3.0365575543181462}};
  double prev = 0;
  for (const auto& [n, s] : lapack) {
    const double got = entropy(c, n);
    CHECK(got == doctest::Approx(s).epsilon(1e-10));
    CHECK(got > prev);
    prev = got;
  }
  const double step = entropy(c, 1024) - entropy(c, 512);
  CHECK(std::fabs(step - std::log(2.0) / 3) <= 0.1 * std::log(2.0) / 3);

  const SymbolCoefficients c3 = fourier_coefficients(IntervalSet::normalize(std::vector<Interval>{{0.0, 0.3}}), 8);
  const double s3[] = {0.6108643020548934, 0.8622689164757407, 1.0097385160297498, 1.1113672233704124,
                       1.1884192366442008};
  for (int n = 1; n <= 5; ++n) CHECK(entropy(c3, n) == doctest::Approx(s3[n - 1]).epsilon(1e-13));
}

TEST_CASE("quadratic bound by three routes") {
  const SymbolCoefficients c = fourier_coefficients(half(), 512);
  CHECK(quadratic_bound_trace(c, 1) == 0.25);
  CHECK(quadratic_bound_trace(c, 2) == doctest::Approx(0.5 - 2 / (pi * pi)).epsilon(1e-15));
  CHECK(quadratic_bound_trace(c, 2) == doctest::Approx(0.29735763271532445711).epsilon(1e-15));

  const LambdaProfile profile = LambdaProfile::build(half());
  const std::vector<std::pair<int, double>> integral{
      {2, 0.29735763271532445711}, {3, 0.34471526543064891422}, {5, 0.39439889368692548559}};
  for (const auto& [n, expect] : integral) {
    const IntegralEstimate e = quadratic_bound_integral(profile, n, 1e-10);
    CHECK(std::fabs(e.value - expect) <= e.err_bound + 1e-12);
    CHECK(std::fabs(e.value - quadratic_bound_trace(c, n)) <= e.err_bound + 1e-9);
  }
  for (int n = 1; n <= 512; n *= 2) {
    const double tr = quadratic_bound_trace(c, n);
    const double eig = quadratic_from_spectrum(symbol_spectrum(c, n));
    CHECK(std::fabs(eig - tr) <= 1e-10 * std::max(1.0, tr));
    const IntegralEstimate e = quadratic_bound_integral(profile, n, 1e-9);
    CHECK(std::fabs(e.value - tr) <= e.err_bound + 1e-9);
  }
  CHECK(quadratic_bound_integral(IntervalSet{}, 8, 1e-9).value == 0.0);
}

TEST_CASE("three routes on a constructed set") {
  const Construction k = build_set(make_power_target(1.0, 0.5), 1.0 / 13);
  const SymbolCoefficients c = fourier_coefficients(k.set, 128);
  const int n = 128;
  const double tr = quadratic_bound_trace(c, n);
  const double eig = quadratic_from_spectrum(symbol_spectrum(c, n));
  const IntegralEstimate in = quadratic_bound_integral(k.set, n, 1e-9);
  CHECK(std::fabs(eig - tr) <= 1e-10 * std::max(1.0, tr));
  CHECK(std::fabs(in.value - tr) <= in.err_bound + 1e-9);
}

TEST_CASE("fejer kernel") {
  CHECK(fejer_kernel(7, 0.0) == 49.0);
  CHECK(fejer_kernel(7, 1.0) == 49.0);
  CHECK(fejer_kernel(8, 0.5) == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(fejer_kernel(3, 0.25) == doctest::Approx(std::pow(std::sin(0.75 * pi), 2) / 0.5).epsilon(1e-14));
  // Integral over a period is N.
  double sum = 0;
  const int m = 4096;
  for (int j = 0; j < m; ++j) sum += fejer_kernel(9, (j + 0.5) / m) / m;
  CHECK(sum == doctest::Approx(9.0).epsilon(1e-10));
}

TEST_CASE("invariances and inequalities on random sets") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 3; ++t) {
    const IntervalSet k = random_set(rng, 4);
    const double shift = std::uniform_real_distribution<double>(0, 1)(rng);
    const SymbolCoefficients a = fourier_coefficients(k, 256);
    const SymbolCoefficients b = fourier_coefficients(complement(k), 256);
    const SymbolCoefficients d = fourier_coefficients(translate(k, shift), 256);
    for (int n : {8, 64, 256}) {
      const double s = entropy(a, n), q = quadratic_bound_trace(a, n);
      CHECK(std::fabs(entropy(b, n) - s) <= 1e-10);
      CHECK(std::fabs(entropy(d, n) - s) <= 1e-10);
      CHECK(std::fabs(quadratic_bound_trace(b, n) - q) <= 1e-10);
      CHECK(std::fabs(quadratic_bound_trace(d, n) - q) <= 1e-10);
      CHECK(s >= q - 1e-12);
      CHECK(s >= 0.0);
      CHECK(s <= n * std::log(2.0));
    }
    CHECK(entropy(a, 256) / 256 < entropy(a, 8) / 8);
  }
}

TEST_CASE("Parseval convergence") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 4; ++t) {
    const IntervalSet k = random_set(rng, 5);
    const int kmax = 4096;
    const SymbolCoefficients c = fourier_coefficients(k, kmax);
    const double m = static_cast<double>(k.size());
    const double total = c.q0() - c.q0() * c.q0();
    double partial = 0, prev = -1;
    for (int j = 1; j <= kmax; ++j) {
      partial += 2 * std::norm(c(j));
      if (j % 256 == 0) {
        CHECK(partial >= prev);
        CHECK(partial <= total + 1e-14);
        CHECK(total - partial <= m * m / (pi * pi * j));
        prev = partial;
      }
    }
  }
}
