#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qfent/errors.hpp"
#include "qfent/interval_set.hpp"
#include "qfent/lambda_profile.hpp"

namespace qfent {

// q_k = integral_0^1 chi_K(theta) exp(-2 pi i k theta) dtheta for 0 <= k <= k_max.
struct SymbolCoefficients {
  std::vector<std::complex<double>> q;  // q[0] = |K|
  std::size_t pieces = 0;

  double q0() const { return q.empty() ? 0.0 : q[0].real(); }
  int k_max() const { return static_cast<int>(q.size()) - 1; }
  std::complex<double> operator()(int k) const {
    return k >= 0 ? q[static_cast<std::size_t>(k)] : std::conj(q[static_cast<std::size_t>(-k)]);
  }
};

// Closed form per piece; arithmetic progressions of equal pieces are summed
// as one Dirichlet factor.
SymbolCoefficients fourier_coefficients(const IntervalSet& k, int k_max);

// Entry (r, c) = q_{r-c}.
Eigen::MatrixXcd toeplitz_matrix(const SymbolCoefficients& coeffs, int n);

// Ascending eigenvalues of a Hermitian (or real symmetric) matrix.
template <typename Derived>
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw DomainError("hermitian_eigenvalues: matrix is not square");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 0) return out;

  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-13 * scale)
    throw DomainError("hermitian_eigenvalues: matrix is not Hermitian");

  bool diagonal = true;
  for (Eigen::Index c = 0; c < n && diagonal; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      if (r != c && h(r, c) != Scalar(0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::real(h(i, i));
    std::sort(out.begin(), out.end());
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(h), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eigenvalues: QR iteration did not converge");
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  std::sort(out.begin(), out.end());
  return out;
}

// Spectrum of Q_N, checked against [-1e-9 N, 1 + 1e-9 N] and clamped to [0, 1].
std::vector<double> symbol_spectrum(const SymbolCoefficients& coeffs, int n);

double entropy_from_spectrum(const std::vector<double>& lambdas);
double quadratic_from_spectrum(const std::vector<double>& lambdas);

double entropy(const SymbolCoefficients& coeffs, int n);

// Tr Q_N - Tr Q_N^2; the diagonal contributes N q0^2 and the k-th off
// diagonal pair 2 (N - k) |q_k|^2 to Tr Q_N^2.
double quadratic_bound_trace(const SymbolCoefficients& coeffs, int n);

// integral_0^1 sin^2(N pi phi) / sin^2(pi phi) lambda_K(phi) dphi with a
// rigorous Gauss-Legendre remainder on each linear piece of lambda_K.
IntegralEstimate quadratic_bound_integral(const LambdaProfile& profile, int n, double abs_tol);
IntegralEstimate quadratic_bound_integral(const IntervalSet& k, int n, double abs_tol);

// sin^2(N pi phi) / sin^2(pi phi), equal to N^2 at integers.
double fejer_kernel(int n, double phi);

}  // namespace qfent
