#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "qfent/interval_set.hpp"

namespace qfent {

// lambda(K, .) on [0, 1] as an exact piecewise-linear function.
//
// When every endpoint of K is a multiple of 2^-e the profile lives on the
// uniform grid of 2^e cells and the grid values come from an FFT
// autocorrelation of the cell occupancy (integers, so rounding is exact).
// Otherwise the breakpoints are all pairwise endpoint differences mod 1.
// Dyadic sets too fine for the grid and too large for the breakpoint list
// fall back to exact pair counting: integrals stay exact, point values come
// from the sweep, and there is no explicit list of linear pieces.
class LambdaProfile {
 public:
  LambdaProfile() = default;
  static LambdaProfile build(const IntervalSet& k, const LambdaIntegralOptions& opts = {});

  std::size_t cell_count() const { return counting_ ? 0 : values_.size() - 1; }
  double node(std::size_t j) const { return uniform_ ? static_cast<double>(j) * step_ : nodes_[j]; }
  double value_at_node(std::size_t j) const { return values_[j]; }
  bool uniform() const { return uniform_; }
  // False in counting mode; node/value_at_node/cell_count are then unusable.
  bool has_pieces() const { return !counting_; }

  double operator()(double phi) const;  // phi in [0, 1]
  double integral(double lo, double hi) const;
  // Absolute error bound on any single node value.
  double value_error() const { return value_err_; }
  // Bound on the integral over [lo, hi], rounding of the summation included.
  double integral_error(double lo, double hi, double value) const;

 private:
  std::size_t cell_of(double phi) const;
  struct Counting;
  static LambdaProfile build_counting(const IntervalSet& k, int log2_cells);
  static double antiderivative(const Counting& c, double x);

  bool uniform_ = true;
  double step_ = 1.0;
  std::vector<double> nodes_;
  std::vector<double> values_{0.0, 0.0};
  double value_err_ = 0.0;
  std::shared_ptr<const Counting> counting_;
};

}  // namespace qfent
