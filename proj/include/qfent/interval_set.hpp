#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qfent {

// Half-open [lo, hi) on the unit circle, 0 <= lo < hi <= 1 once canonical.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Finite union of disjoint half-open intervals in [0, 1), sorted, no two touching.
class IntervalSet {
 public:
  IntervalSet() = default;

  // Accepts arbitrary finite intervals, wraps modulo 1, merges overlaps and
  // touching neighbours, drops empty pieces. lo > hi or non-finite input throws.
  static IntervalSet normalize(std::span<const Interval> raw);
  // Same, but trusts the input to be canonical already (checked in debug only).
  static IntervalSet from_canonical(std::vector<Interval> pieces);

  static IntervalSet full() { return from_canonical({{0.0, 1.0}}); }

  const std::vector<Interval>& pieces() const& { return pieces_; }
  std::vector<Interval> pieces() && { return std::move(pieces_); }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  bool is_full() const { return pieces_.size() == 1 && pieces_[0].lo == 0.0 && pieces_[0].hi == 1.0; }
  bool contains(double x) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> pieces_;
};

double measure(const IntervalSet& k);

// Number of maximal arcs on the circle; a piece ending at 1 glued to one starting at 0 counts once.
std::size_t arc_count(const IntervalSet& k);

IntervalSet translate(const IntervalSet& k, double phi);
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet difference(const IntervalSet& a, const IntervalSet& b);
IntervalSet complement(const IntervalSet& k);

// |(K + phi) \ K|
double lambda(const IntervalSet& k, double phi);

struct IntegralEstimate {
  double value = 0.0;
  double err_bound = 0.0;
};

struct LambdaIntegralOptions {
  int max_grid_log2 = 23;             // dyadic grid path, cells = 2^e
  std::size_t max_breakpoints = 1u << 22;  // generic path
  bool force_counting = false;             // dyadic sets: skip both paths above
};

// Integral of lambda over [lo, hi], 0 <= lo <= hi <= 1. The integrand is
// piecewise linear, so the value is exact up to rounding; throws BudgetError
// if the breakpoint set exceeds the budget or the rounding bound exceeds abs_tol.
IntegralEstimate lambda_integral(const IntervalSet& k, double lo, double hi, double abs_tol,
                                 const LambdaIntegralOptions& opts = {});

// Set file: one "a,b" per line, '#' comments, 17 significant digits on output.
IntervalSet parse_set(std::istream& in);
void write_set(std::ostream& out, const IntervalSet& k);
IntervalSet read_set_file(const std::filesystem::path& path);
void write_set_file(const std::filesystem::path& path, const IntervalSet& k);

std::string format_double(double x);  // shortest text that round-trips, at most 17 digits
double parse_double(const std::string& text);

}  // namespace qfent
