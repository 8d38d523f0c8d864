#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qfent/toeplitz.hpp"

namespace qfent {

// Majoranas m_{2k} = c_k + c_k^*, m_{2k+1} = i (c_k - c_k^*), with
// <m_a m_b> = delta_ab + i Gamma_ab.
struct MajoranaCovariance {
  Eigen::MatrixXd gamma;
  int sites() const { return static_cast<int>(gamma.rows() / 2); }
};

MajoranaCovariance majorana_covariance(const SymbolCoefficients& coeffs, int n);
MajoranaCovariance majorana_covariance(const Eigen::MatrixXcd& q);

// Pfaffian by skew-symmetric Parlett-Reid elimination with pivoting.
template <typename Derived>
typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& a_in) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = a_in;
  const Eigen::Index n = a.rows();
  if (n % 2 == 1) return Scalar(0);
  Scalar pf(1);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == Scalar(0)) return Scalar(0);
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const auto rest = n - k - 2;
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

enum class Pauli : std::uint8_t { kI = 0, kX = 1, kY = 2, kZ = 3 };

struct PauliString {
  std::vector<Pauli> word;
};

PauliString parse_pauli(const std::string& text);  // "IXYZ..." one letter per site

// Jordan-Wigner image of a Pauli string: phase * m_{a_1} ... m_{a_r} with
// a_1 < ... < a_r encoded as a bit mask.
struct MajoranaMonomial {
  std::uint64_t mask = 0;
  std::complex<double> phase{1.0, 0.0};
  bool odd() const;
};

MajoranaMonomial jordan_wigner(const PauliString& p);

double pauli_expectation(const PauliString& p, const MajoranaCovariance& cov);
double pauli_expectation(const PauliString& p, const SymbolCoefficients& coeffs, int n);

// rho_N = 2^-N sum_P <P> P over all 4^N strings, site k on bit k.
Eigen::MatrixXcd reduced_density_matrix(const SymbolCoefficients& coeffs, int n, unsigned workers = 1);

// Dense operators on 2^N sites; bit k = 0 is the occupied state e0 of site k.
Eigen::MatrixXcd annihilation(int n, int site);
Eigen::MatrixXcd pauli_operator(int n, const PauliString& p);

double oracle_entropy(const Eigen::MatrixXcd& rho);
// max |Tr(rho c_i^* c_j) - Q_ij|
double wick_check(const Eigen::MatrixXcd& rho, const SymbolCoefficients& coeffs, int n);

struct OracleReport {
  int n = 0;
  double s_spectral = 0, s_oracle = 0, diff = 0, wick_residual = 0, psd_min_eig = 0, trace_error = 0;
};

OracleReport run_oracle(const SymbolCoefficients& coeffs, int n, unsigned workers = 1);
std::string format_oracle_report(const OracleReport& r);

}  // namespace qfent
