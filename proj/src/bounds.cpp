#include "qfent/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "qfent/errors.hpp"
#include "qfent/numeric.hpp"
#include "qfent/parallel.hpp"

namespace qfent {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  if (n == 1) {
    xs[0] = hi;
    return xs;
  }
  const double r = std::log(hi / lo);
  for (std::size_t j = 0; j < n; ++j) xs[j] = lo * std::exp(r * static_cast<double>(j) / static_cast<double>(n - 1));
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

}  // namespace

bool ChainRecord::ok() const {
  if (!error.empty()) return false;
  if (!s_ge_q || !q_ge_b1) return false;
  return !in_window || (b1_ge_b2 && b2_ge_f && s_ge_f);
}

ChainRecord bound_chain(const PreparedSymbol& sym, const ConstructionLedger& ledger, const GrowthTarget& target,
                        long long n, const ChainOptions& opts) {
  ChainRecord r;
  r.n = n;
  r.in_window = n >= ledger.n_min;
  try {
    if (n < 1) throw DomainError("bound_chain: need N >= 1");
    const int ni = static_cast<int>(n);
    const double nd = static_cast<double>(n);
    r.s = entropy(sym.coeffs, ni);
    r.q = quadratic_bound_trace(sym.coeffs, ni);
    const double x = 0.5 / nd;
    const double scale = 4.0 * nd * nd / kPi2;
    const double li = sym.profile.integral(0.0, x);
    const double li_err = sym.profile.integral_error(0.0, x, li);
    if (li_err > opts.tol_integral) throw NumericalError("bound_chain: lambda integral error exceeds tolerance");
    r.b1 = scale * li;
    r.b1_err = scale * li_err;
    r.b2 = target.certified(nd);
    r.f = target.f(nd);
    r.truncation_slack = 3.0 * ledger.s_residual() * scale * x;

    const double t = opts.tol_chain;
    r.margin_s_q = r.s - r.q;
    r.s_ge_q = r.margin_s_q >= -t * std::max(1.0, r.s);
    r.margin_q_b1 = r.q - (r.b1 - r.b1_err);
    r.q_ge_b1 = r.margin_q_b1 >= -t * std::max(1.0, r.q);
    r.margin_b1_b2 = (r.b1 - r.b1_err) + r.truncation_slack - r.b2 * (1.0 - opts.slack_policy);
    r.b1_ge_b2 = r.margin_b1_b2 >= -t * std::max(1.0, r.b2);
    r.margin_b2_f = r.b2 - r.f;
    r.b2_ge_f = r.margin_b2_f >= -t * std::max(1.0, r.f);
    r.margin_s_f = r.s - r.f;
    r.s_ge_f = r.margin_s_f >= -t * std::max(1.0, r.f);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

ChainRecord bound_chain(const IntervalSet& k, const ConstructionLedger& ledger, const GrowthTarget& target,
                        long long n, const ChainOptions& opts) {
  const PreparedSymbol sym = prepare_symbol(k, static_cast<int>(std::max(1LL, n - 1)));
  return bound_chain(sym, ledger, target, n, opts);
}

std::vector<ChainRecord> bound_chain_scan(const PreparedSymbol& sym, const ConstructionLedger& ledger,
                                          const GrowthTarget& target, const std::vector<long long>& n_list,
                                          const ChainOptions& opts, unsigned workers) {
  std::vector<long long> ns = n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<ChainRecord> out(ns.size());
  parallel_for(ns.size(), workers, [&](std::size_t i) { out[i] = bound_chain(sym, ledger, target, ns[i], opts); });
  return out;
}

void write_chain(std::ostream& out, const std::vector<ChainRecord>& rows) {
  out << "N,in_window,S_N,q_N,B1,B1_err,B2,f_N,trunc_slack,m_s_q,m_q_b1,m_b1_b2,m_b2_f,m_s_f,ok\n";
  for (const ChainRecord& r : rows) {
    out << r.n << ',' << (r.in_window ? 1 : 0);
    for (double v : {r.s, r.q, r.b1, r.b1_err, r.b2, r.f, r.truncation_slack, r.margin_s_q, r.margin_q_b1,
                     r.margin_b1_b2, r.margin_b2_f, r.margin_s_f})
      out << ',' << format_double(v);
    out << ',' << (r.ok() ? 1 : 0) << '\n';
  }
  for (const ChainRecord& r : rows)
    if (!r.error.empty()) out << "# N=" << r.n << " failed: " << r.error << '\n';
}

std::size_t i_phi(const ConstructionLedger& ledger, double phi) {
  std::size_t i = std::min(ledger.closure_depth, ledger.depth());
  while (i > 0 && 6.0 * (ledger.s[i - 1] - ledger.s[i]) < phi) --i;
  return i;
}

MarginTable lambda_vs_h(const IntervalSet& k, const ConstructionLedger& ledger, const GrowthTarget& target,
                        std::size_t grid_size) {
  MarginTable t;
  // Terminal closure blocks have no window of their own; the grid ends at
  // the last regular block.
  const std::size_t d = std::min(ledger.closure_depth, ledger.depth());
  if (d == 0 || grid_size == 0) return t;
  t.hi = ledger.phi_max;
  t.lo = std::min(t.hi, 6.0 * (ledger.s[d - 1] - ledger.s[d]));
  t.slack = 3.0 * ledger.s_residual();
  t.min_margin = std::numeric_limits<double>::infinity();
  for (double phi : log_grid(t.lo, t.hi, grid_size)) {
    MarginRow row;
    row.phi = phi;
    row.lambda = lambda(k, phi);
    row.h = target.h(phi);
    row.margin = row.lambda - (row.h - t.slack);
    row.i_phi = i_phi(ledger, phi);
    if (row.margin < t.min_margin) {
      t.min_margin = row.margin;
      t.argmin_phi = phi;
    }
    t.rows.push_back(row);
  }
  return t;
}

void write_margins(std::ostream& out, const MarginTable& t) {
  out << "# lambda_vs_h window=[" << format_double(t.lo) << ", " << format_double(t.hi)
      << "] slack=" << format_double(t.slack) << " min_margin=" << format_double(t.min_margin)
      << " argmin_phi=" << format_double(t.argmin_phi) << '\n';
  out << "phi,lambda,h,margin,i_phi\n";
  for (const MarginRow& r : t.rows)
    out << format_double(r.phi) << ',' << format_double(r.lambda) << ',' << format_double(r.h) << ','
        << format_double(r.margin) << ',' << r.i_phi << '\n';
}

LogProbe log_lower_bound_probe(const IntervalSet& k, const std::vector<long long>& n_list,
                               std::vector<double> phi_list, unsigned workers) {
  if (k.empty() || k.is_full()) throw DomainError("log_lower_bound_probe: K is trivial");
  LogProbe p;
  double shortest = 1.0;
  for (const Interval& piece : k.pieces()) shortest = std::min(shortest, piece.length());
  const IntervalSet gaps = complement(k);
  for (const Interval& gap : gaps.pieces()) shortest = std::min(shortest, gap.length());
  p.phi0 = 0.5 * shortest;
  if (phi_list.empty()) phi_list = log_grid(p.phi0 / 1024.0, p.phi0, 32);
  p.c_hat = std::numeric_limits<double>::infinity();
  for (double phi : phi_list)
    if (phi > 0.0 && phi <= p.phi0) p.c_hat = std::min(p.c_hat, lambda(k, phi) / phi);

  long long nmax = 1;
  for (long long n : n_list) {
    if (n < 1) throw DomainError("log_lower_bound_probe: N must be positive");
    nmax = std::max(nmax, n);
  }
  const SymbolCoefficients coeffs = fourier_coefficients(k, static_cast<int>(std::max(1LL, nmax - 1)));
  p.entropies.assign(n_list.size(), 0.0);
  parallel_for(n_list.size(), workers,
               [&](std::size_t i) { p.entropies[i] = entropy(coeffs, static_cast<int>(n_list[i])); });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n_list.size());
  p.min_s_over_ln = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const double x = std::log(static_cast<double>(n_list[i]));
    const double y = p.entropies[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    if (n_list[i] > 1) p.min_s_over_ln = std::min(p.min_s_over_ln, y / x);
  }
  const double den = m * sxx - sx * sx;
  p.log_fit = den > 0 ? (m * sxy - sx * sy) / den : 0.0;
  return p;
}

}  // namespace qfent
