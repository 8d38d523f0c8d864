#include "qfent/construction.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "qfent/errors.hpp"

namespace qfent {
namespace {

constexpr int kNoPrev = kNoPreviousBlock;

// Smallest e with 2^-e <= x.
int dyadic_floor_exp(double x) {
  int p = 0;
  std::frexp(x, &p);  // x = f 2^p, f in [0.5, 1)
  return 1 - p;
}

QuantizedBlock quantize_with_exp(double s, double s_next_exact, int e, int ell_floor_exp) {
  const bool terminal = s_next_exact == 0.0;
  for (; e <= ell_floor_exp; ++e) {
    const double ell = std::ldexp(1.0, -e);
    const double target = std::ldexp(3.0 * (s - s_next_exact), e);
    long long n = terminal ? static_cast<long long>(std::floor(std::ldexp(3.0 * s, e)))
                           : static_cast<long long>(std::ceil(target));
    if (n < 1) n = 1;
    double s_next = s - static_cast<double>(n) * ell / 3.0;
    if (terminal) {
      while (n > 1 && s_next < 0) s_next = s - static_cast<double>(--n) * ell / 3.0;
    } else {
      // Rounding of 3(s - t) can leave s_next an ulp above the exact root.
      while (s_next > s_next_exact) s_next = s - static_cast<double>(++n) * ell / 3.0;
    }
    if (s_next >= 0.0) return {{e, n}, s_next};
  }
  throw ConstructionError("quantize_block: block length would fall below 2^-" +
                          std::to_string(ell_floor_exp));
}

// Intervals needed to drive s below tol with terminal blocks, capped at cap + 1.
long long closure_cost(double s, int ell_prev_exp, double tol, int ell_floor_exp, long long cap) {
  long long total = 0;
  try {
    while (s > tol) {
      const QuantizedBlock q = quantize_block(s, 0.0, ell_prev_exp, ell_floor_exp);
      total += q.block.n;
      if (total > cap) return cap + 1;
      s = q.s_next;
      ell_prev_exp = q.block.ell_exp;
    }
  } catch (const ConstructionError&) {
    return cap + 1;
  }
  return total;
}

}  // namespace

double Block::ell() const { return std::ldexp(1.0, -ell_exp); }

long long ConstructionLedger::interval_count() const {
  long long total = 0;
  for (const Block& b : blocks) total += b.n;
  return total;
}

double solve_recursion_step(const GrowthTarget::Fn& h, double s, double tol) {
  if (!(s > 0 && s < 0.5)) throw DomainError("solve_recursion_step: need 0 < s < 1/2");
  auto F = [&](double t) { return h(6.0 * (s - t)) - t; };
  double lo = 0.0, hi = s;
  double flo = F(lo), fhi = F(hi);
  if (!(flo >= 0.0) || !(fhi < 0.0))
    throw ConstructionError("solve_recursion_step: root not bracketed (h not increasing from 0?)");
  const double slack = 1e-13 * (std::fabs(flo) + std::fabs(fhi));
  for (int it = 0; it < 200 && flo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = F(mid);
    if (!(fm <= flo + slack && fm >= fhi - slack))
      throw ConstructionError("solve_recursion_step: h violates monotonicity near " +
                              format_double(6.0 * (s - mid)));
    if (fm >= 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return lo;
}

QuantizedBlock quantize_block(double s, double s_next_exact, int ell_prev_exp, int ell_floor_exp) {
  if (!(s_next_exact >= 0.0 && s_next_exact < s))
    throw DomainError("quantize_block: need 0 <= s_next_exact < s");
  const double room = s - s_next_exact;
  int e = dyadic_floor_exp(room);
  if (ell_prev_exp != kNoPrev) e = std::max(e, ell_prev_exp + 1);
  return quantize_with_exp(s, s_next_exact, e, ell_floor_exp);
}

IntervalSet layout_blocks(const std::vector<Block>& blocks) {
  std::vector<Interval> pieces;
  double pos = 0.0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double ell = blocks[i].ell();
    if (i > 0) pos += blocks[i - 1].ell();
    for (long long k = 0; k < blocks[i].n; ++k) {
      if (k > 0) pos += ell;
      pieces.push_back({pos, pos + ell});
      pos += ell;
    }
  }
  return IntervalSet::normalize(pieces);
}

Construction build_set(const GrowthTarget& target, double s0, const ConstructionOptions& opts) {
  if (!(s0 > 0.0)) throw ConstructionError("build_set: need s0 > 0");
  if (s0 > 1.0 / 13.0) throw ConstructionError("build_set: s0 > 1/13 breaks the span constraint");
  if (!(opts.trunc_tol > 0.0)) throw DomainError("build_set: need trunc_tol > 0");

  ConstructionLedger L;
  L.target_spec = target.spec();
  L.s0 = s0;
  L.trunc_tol = opts.trunc_tol;
  L.s.push_back(s0);

  const auto cap = static_cast<long long>(opts.max_intervals);
  const auto h = [&target](double x) { return target.h(x); };
  double s = s0;
  int ell_prev = kNoPrev;
  long long total = 0;
  bool closing = false;
  bool can_close = opts.tail == TailPolicy::kClose;

  while (s > opts.trunc_tol) {
    QuantizedBlock q;
    if (closing) {
      q = quantize_block(s, 0.0, ell_prev, opts.ell_floor_exp);
    } else {
      const double t = solve_recursion_step(h, s, opts.recursion_tol);
      q = quantize_block(s, t, ell_prev, opts.ell_floor_exp);
      if (!L.blocks.empty()) {
        const Block& prev = L.blocks.back();
        while (static_cast<double>(q.block.n) * q.block.ell() > static_cast<double>(prev.n) * prev.ell())
          q = quantize_with_exp(s, t, q.block.ell_exp + 1, opts.ell_floor_exp);
      }
      if (can_close) {
        const long long after =
            closure_cost(q.s_next, q.block.ell_exp, opts.trunc_tol, opts.ell_floor_exp, cap);
        if (total + q.block.n + after > cap) {
          if (!L.blocks.empty() &&
              total + closure_cost(s, ell_prev, opts.trunc_tol, opts.ell_floor_exp, cap) <= cap) {
            closing = true;
            L.closure_depth = L.blocks.size();
            continue;
          }
          can_close = false;
        }
      }
    }
    if (total + q.block.n > cap) {
      L.budget_exhausted = true;
      break;
    }
    total += q.block.n;
    L.blocks.push_back(q.block);
    L.s.push_back(q.s_next);
    s = q.s_next;
    ell_prev = q.block.ell_exp;
  }
  if (!closing) L.closure_depth = L.blocks.size();

  if (L.s.size() >= 2) {
    const double d = L.s[0] - L.s[1];
    L.phi_max = 6.0 * d;
    L.n_min = static_cast<long long>(std::ceil(1.0 / (12.0 * d)));
  } else {
    L.phi_max = 0.0;
    L.n_min = 1;
  }
  return {layout_blocks(L.blocks), std::move(L)};
}

ValidityReport validity_report(const ConstructionLedger& ledger) {
  return {ledger.n_min, ledger.phi_max, 3.0 * ledger.s_residual()};
}

void write_ledger(std::ostream& out, const ConstructionLedger& L) {
  out << "# construction ledger\n";
  out << "target = " << L.target_spec << '\n';
  out << "s0 = " << format_double(L.s0) << '\n';
  out << "trunc_tol = " << format_double(L.trunc_tol) << '\n';
  out << "depth = " << L.depth() << '\n';
  out << "closure_depth = " << L.closure_depth << '\n';
  out << "s_residual = " << format_double(L.s_residual()) << '\n';
  out << "N_min = " << L.n_min << '\n';
  out << "phi_max = " << format_double(L.phi_max) << '\n';
  out << "budget_exhausted = " << (L.budget_exhausted ? 1 : 0) << '\n';
  out << "s =";
  for (double v : L.s) out << ' ' << format_double(v);
  out << "\nell_exp =";
  for (const Block& b : L.blocks) out << ' ' << b.ell_exp;
  out << "\nn =";
  for (const Block& b : L.blocks) out << ' ' << b.n;
  out << '\n';
}

ConstructionLedger parse_ledger(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ParseError("ledger: expected 'key = value': " + line);
      continue;
    }
    auto strip = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      return v.substr(b, v.find_last_not_of(" \t\r") - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    if (kv.count(key)) throw ParseError("ledger: duplicate key " + key);
    kv[key] = strip(line.substr(eq + 1));
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("ledger: missing key " + key);
    return it->second;
  };
  auto integer = [&](const std::string& key) {
    const std::string& v = get(key);
    std::size_t used = 0;
    long long x = 0;
    try {
      x = std::stoll(v, &used);
    } catch (const std::exception&) {
      throw ParseError("ledger: bad integer for " + key);
    }
    if (used != v.size()) throw ParseError("ledger: bad integer for " + key);
    return x;
  };
  auto words = [&](const std::string& key) {
    std::vector<std::string> out;
    std::stringstream ss(get(key));
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
  };

  ConstructionLedger L;
  L.target_spec = get("target");
  L.s0 = parse_double(get("s0"));
  L.trunc_tol = parse_double(get("trunc_tol"));
  const long long depth = integer("depth");
  L.closure_depth = static_cast<std::size_t>(integer("closure_depth"));
  L.n_min = integer("N_min");
  L.phi_max = parse_double(get("phi_max"));
  L.budget_exhausted = integer("budget_exhausted") != 0;
  for (const auto& w : words("s")) L.s.push_back(parse_double(w));
  const auto ells = words("ell_exp");
  const auto ns = words("n");
  if (depth < 0 || ells.size() != static_cast<std::size_t>(depth) || ns.size() != ells.size() ||
      L.s.size() != ells.size() + 1)
    throw ParseError("ledger: array lengths disagree with depth");
  for (std::size_t i = 0; i < ells.size(); ++i) {
    Block b;
    try {
      b.ell_exp = std::stoi(ells[i]);
      b.n = std::stoll(ns[i]);
    } catch (const std::exception&) {
      throw ParseError("ledger: bad block entry");
    }
    if (b.n < 1) throw ParseError("ledger: n must be positive");
    L.blocks.push_back(b);
  }
  if (L.s.front() != L.s0) throw ParseError("ledger: s[0] != s0");
  if (parse_double(get("s_residual")) != L.s.back()) throw ParseError("ledger: s_residual != s[depth]");
  if (L.closure_depth > L.blocks.size()) throw ParseError("ledger: closure_depth out of range");
  return L;
}

void write_ledger_file(const std::filesystem::path& path, const ConstructionLedger& ledger) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_ledger(out, ledger);
  if (!out) throw Error("write failed: " + path.string());
}

ConstructionLedger read_ledger_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ledger " + path.string());
  return parse_ledger(in);
}

}  // namespace qfent
