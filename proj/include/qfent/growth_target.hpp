#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qfent {

enum class TargetFamily { kPower, kNearLinear, kCustom };

// Continuous, strictly increasing lift of h: running max over a geometric
// grid, linearly interpolated, plus x. Also integrates itself so that the
// matching g can be recovered as (1/x) * integral_0^x.
class MonotoneEnvelope {
 public:
  explicit MonotoneEnvelope(const std::function<double(double)>& h, int grid = 4096,
                            double x_min = 0x1p-40, double x_max = 0.5);
  double operator()(double x) const;
  double g(double x) const;  // (1/x) * integral_0^x envelope

 private:
  double integral_to(double x) const;
  std::vector<double> xs_, runmax_, cum_;
};

// f on N, together with g, h on (0, 1/2] satisfying integral_0^x h = x g(x).
// Immutable after construction.
class GrowthTarget {
 public:
  using Fn = std::function<double(double)>;

  GrowthTarget(TargetFamily family, std::string spec, Fn f, Fn g, Fn h);

  double f(double n) const { return f_(n); }
  double g(double x) const { return g_(x); }
  double h(double x) const { return h_(x); }
  // Lower bound on the entropy certified by g at N.
  double certified(double n) const;

  TargetFamily family() const { return family_; }
  const std::string& spec() const { return spec_; }
  bool envelope_applied() const { return envelope_applied_; }

  // Replaces g, h with the monotone envelope pair when h fails the grid check.
  void apply_envelope_if_needed();

 private:
  TargetFamily family_;
  std::string spec_;
  Fn f_, g_, h_;
  bool envelope_applied_ = false;
};

// f = c N^alpha, 0 < alpha < 1, c > 0.
GrowthTarget make_power_target(double c, double alpha);
// f = c N / ln(N + e), c > 0.
GrowthTarget make_near_linear_target(double c);
// f from (N, f_N) samples, log-log interpolated; empty samples means
// f_N = (2N/pi^2) g(1/(2N)).
GrowthTarget make_custom_target(std::vector<std::pair<double, double>> f_samples,
                                GrowthTarget::Fn g, GrowthTarget::Fn h, std::string spec = "custom");
// Table file: "x,g(x),h(x)" rows, optional "f,N,f_N" rows, '#' comments.
GrowthTarget read_custom_target(const std::filesystem::path& path);

// power:c=<r>,alpha=<r> | nearlinear:c=<r> | custom:<path>
GrowthTarget parse_target_spec(const std::string& spec);

struct TargetCheck {
  bool ok = true;
  std::string reason;
};

// Checks g(0) = 0, monotone g and h on a grid, the defining relation by
// central differences (rel. tol 1e-5), sublinearity of f, and
// (2N/pi^2) g(1/(2N)) >= f_N for dyadic N up to 2^20.
TargetCheck validate_target(const GrowthTarget& t);

}  // namespace qfent
