#include "qfent/scan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qfent/parallel.hpp"

namespace qfent {

PreparedSymbol prepare_symbol(const IntervalSet& k, int k_max, const LambdaIntegralOptions& opts) {
  return {k, fourier_coefficients(k, std::max(1, k_max)), LambdaProfile::build(k, opts)};
}

EntropyReport entropy_scan(const PreparedSymbol& sym, const std::vector<long long>& n_list,
                           const GrowthTarget* target, const ScanOptions& opts) {
  std::vector<long long> ns = n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  EntropyReport rep;
  std::ostringstream hdr;
  hdr << "# entropy report\n"
      << "# set: pieces=" << sym.set.size() << " measure=" << format_double(sym.coeffs.q0()) << '\n'
      << "# k_max=" << sym.coeffs.k_max() << " tol_integral=" << format_double(opts.tol_integral)
      << " tol_chain=" << format_double(opts.tol_chain) << '\n'
      << "# target=" << (target ? target->spec() : std::string("none")) << '\n';
  rep.header = hdr.str();
  rep.rows.resize(ns.size());

  parallel_for(ns.size(), opts.workers, [&](std::size_t i) {
    ReportRow& row = rep.rows[i];
    row.n = ns[i];
    try {
      if (row.n < 1) throw DomainError("N must be positive");
      const int n = static_cast<int>(row.n);
      const auto ev = symbol_spectrum(sym.coeffs, n);
      row.s = entropy_from_spectrum(ev);
      row.q_eig = quadratic_from_spectrum(ev);
      row.q_trace = quadratic_bound_trace(sym.coeffs, n);
      try {
        const IntegralEstimate qi = quadratic_bound_integral(sym.profile, n, opts.tol_integral);
        row.q_integral = qi.value;
        row.q_integral_err = qi.err_bound;
      } catch (const BudgetError& e) {
        row.q_integral = row.q_integral_err = std::numeric_limits<double>::quiet_NaN();
        row.note = std::string("qN_integral skipped: ") + e.what();
      }
      const double x = 0.5 / n;
      const double scale = 4.0 * n * static_cast<double>(n) / (std::numbers::pi * std::numbers::pi);
      const double li = sym.profile.integral(0.0, x);
      const double li_err = sym.profile.integral_error(0.0, x, li);
      if (li_err > opts.tol_integral) throw NumericalError("lambda integral error bound exceeds tolerance");
      row.lower_integral = scale * li;
      row.lower_integral_err = scale * li_err;
      const double rel = opts.tol_chain;
      bool ok = row.s >= row.q_trace - rel * std::max(1.0, row.s);
      ok = ok && row.q_trace >= row.lower_integral - row.lower_integral_err - rel * std::max(1.0, row.q_trace);
      if (target) {
        row.lower_g = target->certified(row.n);
        row.f = target->f(row.n);
        ok = ok && row.s >= row.f;
      }
      row.chain_ok = ok;
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.s = row.q_eig = row.q_trace = row.q_integral = row.q_integral_err = nan;
      row.lower_integral = row.lower_integral_err = row.lower_g = row.f = nan;
      row.chain_ok = false;
      row.error = e.what();
    }
  });
  return rep;
}

EntropyReport entropy_scan(const IntervalSet& k, const std::vector<long long>& n_list,
                           const GrowthTarget* target, const ScanOptions& opts) {
  long long nmax = 1;
  for (long long n : n_list) nmax = std::max(nmax, n);
  const int k_max = opts.k_max > 0 ? opts.k_max : static_cast<int>(std::max(1LL, nmax - 1));
  return entropy_scan(prepare_symbol(k, k_max), n_list, target, opts);
}

void write_report(std::ostream& out, const EntropyReport& report) {
  out << report.header;
  out << "N,S_N,qN_eig,qN_trace,qN_integral,qN_integral_err,lower_integral,lower_g,f_N,chain_ok\n";
  for (const ReportRow& r : report.rows) {
    out << r.n << ',' << format_double(r.s) << ',' << format_double(r.q_eig) << ','
        << format_double(r.q_trace) << ',' << format_double(r.q_integral) << ','
        << format_double(r.q_integral_err) << ',' << format_double(r.lower_integral) << ','
        << format_double(r.lower_g) << ',' << format_double(r.f) << ',' << (r.chain_ok ? 1 : 0) << '\n';
  }
  for (const ReportRow& r : report.rows)
    if (!r.error.empty())
      out << "# N=" << r.n << " failed: " << r.error << '\n';
    else if (!r.note.empty())
      out << "# N=" << r.n << ' ' << r.note << '\n';
}

void write_report_file(const std::filesystem::path& path, const EntropyReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_report(out, report);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace qfent
