#include "qfent/gaussian_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "qfent/errors.hpp"
#include "qfent/numeric.hpp"
#include "qfent/parallel.hpp"

namespace qfent {
namespace {

constexpr int kMaxSites = 16;
constexpr int kMaxRhoSites = 8;

// Appends m_b for each b in `bits` (ascending) to the sorted monomial.
void multiply_into(MajoranaMonomial& acc, std::uint64_t bits) {
  while (bits) {
    const int b = std::countr_zero(bits);
    bits &= bits - 1;
    const std::uint64_t above = b >= 63 ? 0 : (~std::uint64_t{0} << (b + 1));
    if (std::popcount(acc.mask & above) % 2 == 1) acc.phase = -acc.phase;
    acc.mask ^= std::uint64_t{1} << b;
  }
}

std::vector<double> density_spectrum(const Eigen::MatrixXcd& rho) {
  // General complex Schur route, deliberately not the Hermitian solver used for Q_N.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(rho, false);
  if (es.info() != Eigen::Success) throw NumericalError("oracle: eigenvalues of rho did not converge");
  std::vector<double> mu(static_cast<std::size_t>(rho.rows()));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) mu[static_cast<std::size_t>(i)] = es.eigenvalues()(i).real();
  std::sort(mu.begin(), mu.end());
  return mu;
}

// c_site |x>, or false if the site is empty. Occupied is bit 0.
bool apply_c(int site, std::uint32_t& x, double& sign) {
  const std::uint32_t bit = std::uint32_t{1} << site;
  if (x & bit) return false;
  if (std::popcount(x & (bit - 1)) % 2 == 1) sign = -sign;
  x |= bit;
  return true;
}

bool apply_cdag(int site, std::uint32_t& x, double& sign) {
  const std::uint32_t bit = std::uint32_t{1} << site;
  if (!(x & bit)) return false;
  if (std::popcount(x & (bit - 1)) % 2 == 1) sign = -sign;
  x &= ~bit;
  return true;
}

}  // namespace

bool MajoranaMonomial::odd() const { return std::popcount(mask) % 2 == 1; }

MajoranaCovariance majorana_covariance(const Eigen::MatrixXcd& q) {
  const Eigen::Index n = q.rows();
  MajoranaCovariance cov;
  cov.gamma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = q(i, j).real(), im = q(i, j).imag();
      const double d = i == j ? 1.0 : 0.0;
      if (i != j) {
        cov.gamma(2 * i, 2 * j) = 2.0 * im;
        cov.gamma(2 * i + 1, 2 * j + 1) = 2.0 * im;
      }
      cov.gamma(2 * i, 2 * j + 1) = 2.0 * re - d;
      cov.gamma(2 * i + 1, 2 * j) = d - 2.0 * re;
    }
  // Exact antisymmetry regardless of rounding in q.
  const Eigen::MatrixXd g = 0.5 * (cov.gamma - cov.gamma.transpose());
  cov.gamma = g;
  return cov;
}

MajoranaCovariance majorana_covariance(const SymbolCoefficients& coeffs, int n) {
  if (n < 1 || n > kMaxSites) throw DomainError("majorana_covariance: need 1 <= N <= 16");
  return majorana_covariance(toeplitz_matrix(coeffs, n));
}

PauliString parse_pauli(const std::string& text) {
  PauliString p;
  for (char ch : text) {
    switch (ch) {
      case 'I': case 'i': p.word.push_back(Pauli::kI); break;
      case 'X': case 'x': p.word.push_back(Pauli::kX); break;
      case 'Y': case 'y': p.word.push_back(Pauli::kY); break;
      case 'Z': case 'z': p.word.push_back(Pauli::kZ); break;
      default: throw ParseError(std::string("bad Pauli letter '") + ch + "'");
    }
  }
  return p;
}

MajoranaMonomial jordan_wigner(const PauliString& p) {
  if (p.word.size() > static_cast<std::size_t>(kMaxSites)) throw DomainError("jordan_wigner: too many sites");
  MajoranaMonomial acc;
  for (std::size_t k = 0; k < p.word.size(); ++k) {
    const Pauli op = p.word[k];
    if (op == Pauli::kI) continue;
    const std::uint64_t even = std::uint64_t{1} << (2 * k), odd = even << 1;
    if (op == Pauli::kZ) {
      // Z_k = -i m_{2k} m_{2k+1}
      acc.phase *= std::complex<double>(0.0, -1.0);
      multiply_into(acc, even | odd);
      continue;
    }
    // String factor prod_{m<k} Z_m, each -i m_{2m} m_{2m+1}, in site order.
    for (std::size_t m = 0; m < k; ++m) {
      acc.phase *= std::complex<double>(0.0, -1.0);
      multiply_into(acc, (std::uint64_t{3}) << (2 * m));
    }
    multiply_into(acc, op == Pauli::kX ? even : odd);
  }
  return acc;
}

double pauli_expectation(const PauliString& p, const MajoranaCovariance& cov) {
  if (static_cast<int>(p.word.size()) != cov.sites()) throw DomainError("pauli_expectation: length mismatch");
  const MajoranaMonomial mono = jordan_wigner(p);
  if (mono.odd()) return 0.0;
  std::vector<Eigen::Index> idx;
  for (std::uint64_t m = mono.mask; m; m &= m - 1) idx.push_back(std::countr_zero(m));
  const auto r = static_cast<Eigen::Index>(idx.size());
  std::complex<double> value = mono.phase;
  if (r > 0) {
    Eigen::MatrixXd sub(r, r);
    for (Eigen::Index a = 0; a < r; ++a)
      for (Eigen::Index b = 0; b < r; ++b) sub(a, b) = cov.gamma(idx[a], idx[b]);
    static constexpr std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    value *= ipow[(r / 2) % 4] * pfaffian(sub);
  }
  if (std::fabs(value.imag()) > 1e-8)
    throw NumericalError("pauli_expectation: imaginary part " + format_double(value.imag()));
  return value.real();
}

double pauli_expectation(const PauliString& p, const SymbolCoefficients& coeffs, int n) {
  return pauli_expectation(p, majorana_covariance(coeffs, n));
}

Eigen::MatrixXcd pauli_operator(int n, const PauliString& p) {
  if (static_cast<int>(p.word.size()) != n) throw DomainError("pauli_operator: length mismatch");
  const std::uint32_t dim = std::uint32_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint32_t x = 0; x < dim; ++x) {
    std::uint32_t y = x;
    std::complex<double> c = 1.0;
    for (int k = 0; k < n; ++k) {
      const bool one = (x >> k) & 1u;
      switch (p.word[static_cast<std::size_t>(k)]) {
        case Pauli::kI: break;
        case Pauli::kX: y ^= 1u << k; break;
        case Pauli::kY: y ^= 1u << k; c *= one ? std::complex<double>(0, -1) : std::complex<double>(0, 1); break;
        case Pauli::kZ: if (one) c = -c; break;
      }
    }
    m(y, x) = c;
  }
  return m;
}

Eigen::MatrixXcd annihilation(int n, int site) {
  const std::uint32_t dim = std::uint32_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint32_t x = 0; x < dim; ++x) {
    std::uint32_t y = x;
    double sign = 1.0;
    if (apply_c(site, y, sign)) m(y, x) = sign;
  }
  return m;
}

Eigen::MatrixXcd reduced_density_matrix(const SymbolCoefficients& coeffs, int n, unsigned workers) {
  if (n < 1 || n > kMaxRhoSites) throw DomainError("reduced_density_matrix: need 1 <= N <= 8");
  const MajoranaCovariance cov = majorana_covariance(coeffs, n);
  const std::size_t strings = std::size_t{1} << (2 * n);
  std::vector<double> expect(strings, 0.0);
  parallel_for(strings, workers, [&](std::size_t s) {
    PauliString p;
    p.word.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) p.word[static_cast<std::size_t>(k)] = static_cast<Pauli>((s >> (2 * k)) & 3u);
    expect[s] = pauli_expectation(p, cov);
  });

  const std::uint32_t dim = std::uint32_t{1} << n;
  const double norm = 1.0 / dim;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t s = 0; s < strings; ++s) {
    if (expect[s] == 0.0) continue;
    std::uint32_t flip = 0;
    for (int k = 0; k < n; ++k) {
      const auto op = static_cast<Pauli>((s >> (2 * k)) & 3u);
      if (op == Pauli::kX || op == Pauli::kY) flip |= 1u << k;
    }
    for (std::uint32_t x = 0; x < dim; ++x) {
      std::complex<double> c = expect[s] * norm;
      for (int k = 0; k < n; ++k) {
        const auto op = static_cast<Pauli>((s >> (2 * k)) & 3u);
        const bool one = (x >> k) & 1u;
        if (op == Pauli::kY) c *= one ? std::complex<double>(0, -1) : std::complex<double>(0, 1);
        else if (op == Pauli::kZ && one) c = -c;
      }
      rho(x ^ flip, x) += c;
    }
  }
  return rho;
}

double oracle_entropy(const Eigen::MatrixXcd& rho) {
  CompensatedSum<double> s;
  for (double mu : density_spectrum(rho))
    if (mu > 0.0) s.add(-mu * std::log(mu));
  return s.value();
}

double wick_check(const Eigen::MatrixXcd& rho, const SymbolCoefficients& coeffs, int n) {
  const std::uint32_t dim = std::uint32_t{1} << n;
  if (rho.rows() != static_cast<Eigen::Index>(dim)) throw DomainError("wick_check: size mismatch");
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::complex<double> tr = 0.0;
      for (std::uint32_t x = 0; x < dim; ++x) {
        std::uint32_t y = x;
        double sign = 1.0;
        if (!apply_c(j, y, sign) || !apply_cdag(i, y, sign)) continue;
        tr += rho(x, y) * sign;
      }
      worst = std::max(worst, std::abs(tr - coeffs(i - j)));
    }
  return worst;
}

OracleReport run_oracle(const SymbolCoefficients& coeffs, int n, unsigned workers) {
  if (n < 1 || n > kMaxRhoSites) throw DomainError("oracle: need 1 <= N <= 8");
  OracleReport r;
  r.n = n;
  r.s_spectral = entropy(coeffs, n);
  const Eigen::MatrixXcd rho = reduced_density_matrix(coeffs, n, workers);
  const auto mu = density_spectrum(rho);
  r.psd_min_eig = mu.front();
  r.trace_error = std::abs(rho.trace() - 1.0);
  r.s_oracle = oracle_entropy(rho);
  r.diff = std::fabs(r.s_oracle - r.s_spectral);
  r.wick_residual = wick_check(rho, coeffs, n);
  return r;
}

std::string format_oracle_report(const OracleReport& r) {
  return "N=" + std::to_string(r.n) + "\nS_spectral=" + format_double(r.s_spectral) +
         "\nS_oracle=" + format_double(r.s_oracle) + "\ndiff=" + format_double(r.diff) +
         "\nwick_residual=" + format_double(r.wick_residual) + "\npsd_min_eig=" + format_double(r.psd_min_eig) +
         "\ntrace_error=" + format_double(r.trace_error) + '\n';
}

}  // namespace qfent
