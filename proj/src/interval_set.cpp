#include "qfent/interval_set.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qfent/errors.hpp"
#include "qfent/numeric.hpp"

namespace qfent {
namespace {

// Sorted by lo on entry; merges overlapping or touching pieces and drops empties.
std::vector<Interval> merge_sorted(std::vector<Interval> v) {
  std::vector<Interval> out;
  out.reserve(v.size());
  for (const Interval& p : v) {
    if (!(p.lo < p.hi)) continue;
    if (!out.empty() && p.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, p.hi);
    else
      out.push_back(p);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

IntervalSet IntervalSet::normalize(std::span<const Interval> raw) {
  std::vector<Interval> pieces;
  pieces.reserve(raw.size() + 1);
  for (const Interval& r : raw) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi))
      throw DomainError("interval endpoint is not finite");
    if (r.lo > r.hi)
      throw DomainError("interval [" + format_double(r.lo) + ", " + format_double(r.hi) +
                        ") has lo > hi");
    if (r.lo == r.hi) continue;
    if (r.hi - r.lo >= 1.0) return full();
    const double fl = std::floor(r.lo);
    double a = r.lo - fl;
    double b = r.hi - fl;
    if (a >= 1.0) {
      a -= 1.0;
      b -= 1.0;
    }
    if (b <= 1.0) {
      pieces.push_back({a, b});
    } else {
      pieces.push_back({a, 1.0});
      pieces.push_back({0.0, b - 1.0});
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  IntervalSet s;
  s.pieces_ = merge_sorted(std::move(pieces));
  return s;
}

IntervalSet IntervalSet::from_canonical(std::vector<Interval> pieces) {
#ifndef NDEBUG
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    assert(pieces[i].lo < pieces[i].hi);
    assert(pieces[i].lo >= 0.0 && pieces[i].hi <= 1.0);
    if (i > 0) assert(pieces[i - 1].hi < pieces[i].lo);
  }
#endif
  IntervalSet s;
  s.pieces_ = std::move(pieces);
  return s;
}

bool IntervalSet::contains(double x) const {
  x -= std::floor(x);
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Interval& p) { return v < p.lo; });
  if (it == pieces_.begin()) return false;
  --it;
  return x < it->hi;
}

double measure(const IntervalSet& k) {
  CompensatedSum<double> s;
  for (const Interval& p : k.pieces()) s.add(p.hi - p.lo);
  return s.value();
}

std::size_t arc_count(const IntervalSet& k) {
  const auto& p = k.pieces();
  if (p.size() >= 2 && p.front().lo == 0.0 && p.back().hi == 1.0) return p.size() - 1;
  return p.size();
}

IntervalSet translate(const IntervalSet& k, double phi) {
  double t = phi - std::floor(phi);
  if (t >= 1.0) t = 0.0;
  if (t == 0.0 || k.empty() || k.is_full()) return k;
  std::vector<Interval> wrapped, straight;
  for (const Interval& p : k.pieces()) {
    const double a = p.lo + t;
    const double b = p.hi + t;
    if (a >= 1.0) {
      wrapped.push_back({a - 1.0, b - 1.0});
    } else if (b > 1.0) {
      straight.push_back({a, 1.0});
      wrapped.insert(wrapped.begin(), Interval{0.0, b - 1.0});
    } else {
      straight.push_back({a, b});
    }
  }
  wrapped.insert(wrapped.end(), straight.begin(), straight.end());
  return IntervalSet::from_canonical(merge_sorted(std::move(wrapped)));
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  const auto& A = a.pieces();
  const auto& B = b.pieces();
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < A.size() && j < B.size()) {
    const double lo = std::max(A[i].lo, B[j].lo);
    const double hi = std::min(A[i].hi, B[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (A[i].hi < B[j].hi)
      ++i;
    else
      ++j;
  }
  return IntervalSet::from_canonical(merge_sorted(std::move(out)));
}

IntervalSet difference(const IntervalSet& a, const IntervalSet& b) {
  const auto& A = a.pieces();
  const auto& B = b.pieces();
  std::vector<Interval> out;
  std::size_t j = 0;
  for (const Interval& p : A) {
    double lo = p.lo;
    while (j < B.size() && B[j].hi <= lo) ++j;
    for (std::size_t k = j; k < B.size() && B[k].lo < p.hi; ++k) {
      if (B[k].lo > lo) out.push_back({lo, B[k].lo});
      lo = std::max(lo, B[k].hi);
      if (lo >= p.hi) break;
    }
    if (lo < p.hi) out.push_back({lo, p.hi});
  }
  return IntervalSet::from_canonical(merge_sorted(std::move(out)));
}

IntervalSet complement(const IntervalSet& k) {
  std::vector<Interval> out;
  double cur = 0.0;
  for (const Interval& p : k.pieces()) {
    if (p.lo > cur) out.push_back({cur, p.lo});
    cur = p.hi;
  }
  if (cur < 1.0) out.push_back({cur, 1.0});
  return IntervalSet::from_canonical(std::move(out));
}

double lambda(const IntervalSet& k, double phi) {
  return measure(difference(translate(k, phi), k));
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError("not a number: '" + text + "'");
  return v;
}

IntervalSet parse_set(std::istream& in) {
  std::vector<Interval> raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ParseError("set file line " + std::to_string(lineno) + ": expected 'a,b'");
    try {
      raw.push_back({parse_double(line.substr(0, comma)), parse_double(line.substr(comma + 1))});
    } catch (const ParseError& e) {
      throw ParseError("set file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    return IntervalSet::normalize(raw);
  } catch (const DomainError& e) {
    throw ParseError(std::string("set file: ") + e.what());
  }
}

void write_set(std::ostream& out, const IntervalSet& k) {
  for (const Interval& p : k.pieces()) out << format_double(p.lo) << ',' << format_double(p.hi) << '\n';
}

IntervalSet read_set_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open set file " + path.string());
  return parse_set(in);
}

void write_set_file(const std::filesystem::path& path, const IntervalSet& k) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << k.size() << " intervals, measure " << format_double(measure(k)) << '\n';
  write_set(out, k);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace qfent
