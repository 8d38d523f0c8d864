#include "qfent/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>

#include "qfent/bounds.hpp"
#include "qfent/construction.hpp"
#include "qfent/errors.hpp"
#include "qfent/gaussian_oracle.hpp"
#include "qfent/growth_target.hpp"
#include "qfent/interval_set.hpp"
#include "qfent/scan.hpp"

namespace qfent {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

long long parse_count(const std::string& text) {
  const double v = parse_double(text);
  if (v != std::floor(v) || std::fabs(v) > 9e15) throw ParseError("not an integer: '" + text + "'");
  return static_cast<long long>(v);
}

// Writes to `path`, or to `fallback` when path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  fn(f);
  if (!f) throw Error("write failed: " + path);
}

struct Tolerances {
  double integral = 1e-9;
  double chain = 1e-12;
  double oracle = 1e-8;
};

void add_tolerances(CLI::App* cmd, Tolerances& tol) {
  cmd->add_option("--tol-integral", tol.integral, "absolute tolerance for lambda integrals")->capture_default_str();
  cmd->add_option("--tol-chain", tol.chain, "relative slack on chain inequalities")->capture_default_str();
}

}  // namespace

std::vector<long long> parse_n_spec(const std::string& spec) {
  std::vector<long long> out;
  for (const std::string& raw : split(spec, ',')) {
    const std::string item = raw;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(item));
      continue;
    }
    const long long a = parse_count(item.substr(0, dots));
    std::string rest = item.substr(dots + 2);
    std::string step = "+1";
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = rest.substr(colon + 1);
      rest = rest.substr(0, colon);
    }
    const long long b = parse_count(rest);
    if (a < 1 || b < a) throw ParseError("N range '" + item + "': need 1 <= a <= b");
    if (step.size() < 2 || (step[0] != 'x' && step[0] != '+'))
      throw ParseError("N range '" + item + "': step must be xK or +K");
    const long long k = parse_count(step.substr(1));
    if ((step[0] == 'x' && k < 2) || (step[0] == '+' && k < 1))
      throw ParseError("N range '" + item + "': bad step");
    for (long long n = a; n <= b; n = step[0] == 'x' ? n * k : n + k) out.push_back(n);
  }
  if (out.empty()) throw ParseError("empty N spec");
  for (long long n : out)
    if (n < 1) throw ParseError("N must be positive");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_phi_spec(const std::string& spec) {
  std::vector<double> out;
  for (const std::string& item : split(spec, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_double(item));
      continue;
    }
    const double lo = parse_double(item.substr(0, dots));
    const std::string rest = item.substr(dots + 2);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ParseError("phi range '" + item + "': missing :logN or :linN");
    const double hi = parse_double(rest.substr(0, colon));
    const std::string mode = rest.substr(colon + 1);
    if (mode.size() < 4 || (mode.compare(0, 3, "log") != 0 && mode.compare(0, 3, "lin") != 0))
      throw ParseError("phi range '" + item + "': expected logN or linN");
    const long long n = parse_count(mode.substr(3));
    if (n < 1 || hi < lo) throw ParseError("phi range '" + item + "': bad bounds or count");
    const bool log = mode[1] == 'o';
    if (log && !(lo > 0)) throw ParseError("phi range '" + item + "': log grid needs lo > 0");
    for (long long j = 0; j < n; ++j) {
      const double t = n == 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(n - 1);
      out.push_back(log ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
    }
  }
  if (out.empty()) throw ParseError("empty phi spec");
  return out;
}

double parse_real_or_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_double(text);
  const double den = parse_double(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  return parse_double(text.substr(0, slash)) / den;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy growth of translation-invariant quasifree fermion states"};
  app.require_subcommand(1);

  Tolerances tol;
  unsigned workers = 1;

  // construct
  std::string c_target, c_s0 = "1/13", c_out, c_set, c_ledger, c_tail = "close";
  double c_trunc = 1e-6;
  std::size_t c_max_intervals = std::size_t{1} << 17;
  auto* construct = app.add_subcommand("construct", "build K and its ledger for a growth target");
  construct->add_option("--target", c_target, "power:c=..,alpha=.. | nearlinear:c=.. | custom:PATH")->required();
  construct->add_option("--s0", c_s0, "starting value, at most 1/13")->capture_default_str();
  construct->add_option("--trunc-tol", c_trunc, "stop once s_D <= this")->capture_default_str();
  construct->add_option("--max-intervals", c_max_intervals, "interval budget")->capture_default_str();
  construct->add_option("--tail", c_tail, "close | truncate")->capture_default_str();
  construct->add_option("--out", c_out, "output prefix: PREFIX.set and PREFIX.ledger");
  construct->add_option("--set", c_set, "set file to write");
  construct->add_option("--ledger", c_ledger, "ledger file to write");

  // scan
  std::string s_set, s_n, s_target, s_out;
  int s_kmax = 0;
  auto* scan = app.add_subcommand("scan", "entropy report over N");
  scan->add_option("--set", s_set, "set file")->required();
  scan->add_option("--n", s_n, "N list, e.g. 1..1024:x2")->required();
  scan->add_option("--target", s_target, "optional growth target");
  scan->add_option("--out", s_out, "report file (default stdout)");
  scan->add_option("--kmax", s_kmax, "Fourier cutoff (default max N - 1)");
  scan->add_option("--workers", workers, "worker threads")->capture_default_str();
  add_tolerances(scan, tol);

  // verify
  std::string v_set, v_ledger, v_target, v_n = "1..1024:x2", v_out, v_margins;
  std::size_t v_grid = 1000;
  auto* verify = app.add_subcommand("verify", "check the bound chain on a constructed set");
  verify->add_option("--set", v_set, "set file")->required();
  verify->add_option("--ledger", v_ledger, "ledger file")->required();
  verify->add_option("--target", v_target, "growth target (default: the ledger's)");
  verify->add_option("--n", v_n, "N list")->capture_default_str();
  verify->add_option("--out", v_out, "chain table (default stdout)");
  verify->add_option("--margins", v_margins, "lambda vs h margin table");
  verify->add_option("--grid", v_grid, "margin grid size")->capture_default_str();
  verify->add_option("--workers", workers, "worker threads")->capture_default_str();
  add_tolerances(verify, tol);

  // oracle
  std::string o_set;
  long long o_n = 0;
  auto* oracle = app.add_subcommand("oracle", "compare the spectral entropy with the spin-chain density matrix");
  oracle->add_option("--set", o_set, "set file")->required();
  oracle->add_option("--n", o_n, "sites, at most 8")->required();
  oracle->add_option("--tol-oracle", tol.oracle, "allowed entropy difference")->capture_default_str();
  oracle->add_option("--workers", workers, "worker threads")->capture_default_str();

  // lambda
  std::string l_set, l_phi, l_out;
  auto* lam = app.add_subcommand("lambda", "print lambda_K on a phi grid");
  lam->add_option("--set", l_set, "set file")->required();
  lam->add_option("--phi", l_phi, "phi grid, e.g. 0.001..0.5:log50")->required();
  lam->add_option("--out", l_out, "output file (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (construct->parsed()) {
      if (c_out.empty() && (c_set.empty() || c_ledger.empty()))
        throw ParseError("construct: need --out PREFIX or both --set and --ledger");
      if (c_tail != "close" && c_tail != "truncate") throw ParseError("construct: --tail must be close or truncate");
      const GrowthTarget target = parse_target_spec(c_target);
      if (const TargetCheck chk = validate_target(target); !chk.ok)
        throw DomainError("target " + target.spec() + " rejected: " + chk.reason);
      ConstructionOptions opts;
      opts.trunc_tol = c_trunc;
      opts.max_intervals = c_max_intervals;
      opts.tail = c_tail == "close" ? TailPolicy::kClose : TailPolicy::kTruncate;
      const Construction built = build_set(target, parse_real_or_fraction(c_s0), opts);
      const std::string set_path = c_set.empty() ? c_out + ".set" : c_set;
      const std::string ledger_path = c_ledger.empty() ? c_out + ".ledger" : c_ledger;
      write_set_file(set_path, built.set);
      write_ledger_file(ledger_path, built.ledger);
      const auto& L = built.ledger;
      out << "N_min=" << L.n_min << "\ndepth=" << L.depth() << "\nclosure_depth=" << L.closure_depth
          << "\nintervals=" << built.set.size() << "\nmeasure=" << format_double(measure(built.set))
          << "\ns_residual=" << format_double(L.s_residual()) << "\nphi_max=" << format_double(L.phi_max) << '\n';
      if (L.budget_exhausted)
        err << "warning: interval budget exhausted; s_residual=" << format_double(L.s_residual())
            << " is carried as slack\n";
      return kExitOk;
    }

    if (scan->parsed()) {
      const IntervalSet k = read_set_file(s_set);
      const auto ns = parse_n_spec(s_n);
      std::optional<GrowthTarget> target;
      if (!s_target.empty()) target = parse_target_spec(s_target);
      ScanOptions opts;
      opts.k_max = s_kmax;
      opts.workers = workers;
      opts.tol_integral = tol.integral;
      opts.tol_chain = tol.chain;
      const EntropyReport rep = entropy_scan(k, ns, target ? &*target : nullptr, opts);
      emit(s_out, out, [&](std::ostream& o) { write_report(o, rep); });
      for (const ReportRow& r : rep.rows)
        if (!r.error.empty()) return kExitNumerical;
      return kExitOk;
    }

    if (verify->parsed()) {
      const IntervalSet k = read_set_file(v_set);
      const ConstructionLedger ledger = read_ledger_file(v_ledger);
      const GrowthTarget target = parse_target_spec(v_target.empty() ? ledger.target_spec : v_target);
      if (target.spec() != ledger.target_spec)
        err << "warning: target " << target.spec() << " differs from the ledger's " << ledger.target_spec << '\n';
      const auto ns = parse_n_spec(v_n);
      ChainOptions copts;
      copts.tol_integral = tol.integral;
      copts.tol_chain = tol.chain;
      const PreparedSymbol sym = prepare_symbol(k, static_cast<int>(std::max(1LL, ns.back() - 1)));
      const auto rows = bound_chain_scan(sym, ledger, target, ns, copts, workers);
      emit(v_out, out, [&](std::ostream& o) { write_chain(o, rows); });
      const MarginTable margins = lambda_vs_h(k, ledger, target, v_grid);
      if (!v_margins.empty()) emit(v_margins, out, [&](std::ostream& o) { write_margins(o, margins); });
      std::size_t in_window = 0, failed = 0;
      for (const ChainRecord& r : rows) {
        in_window += r.in_window ? 1 : 0;
        failed += r.ok() ? 0 : 1;
      }
      err << "N_min=" << ledger.n_min << " rows=" << rows.size() << " in_window=" << in_window
          << " failed=" << failed << " lambda_vs_h_min_margin=" << format_double(margins.min_margin)
          << " at phi=" << format_double(margins.argmin_phi) << '\n';
      if (in_window == 0) err << "note: no requested N lies in the validity window\n";
      return failed == 0 ? kExitOk : kExitCheckFailed;
    }

    if (oracle->parsed()) {
      if (o_n < 1 || o_n > 8) throw DomainError("oracle: N must be in 1..8");
      const IntervalSet k = read_set_file(o_set);
      const int n = static_cast<int>(o_n);
      const SymbolCoefficients coeffs = fourier_coefficients(k, std::max(1, n - 1));
      const OracleReport rep = run_oracle(coeffs, n, workers);
      out << format_oracle_report(rep);
      const bool ok = rep.diff <= tol.oracle && rep.psd_min_eig >= -1e-10;
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (lam->parsed()) {
      const IntervalSet k = read_set_file(l_set);
      const auto phis = parse_phi_spec(l_phi);
      emit(l_out, out, [&](std::ostream& o) {
        o << "phi,lambda\n";
        for (double phi : phis) o << format_double(phi) << ',' << format_double(lambda(k, phi)) << '\n';
      });
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConstructionError& e) {
    err << "construction failed: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace qfent
