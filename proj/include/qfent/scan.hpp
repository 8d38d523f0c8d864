#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qfent/growth_target.hpp"
#include "qfent/interval_set.hpp"
#include "qfent/lambda_profile.hpp"
#include "qfent/toeplitz.hpp"

namespace qfent {

// K with its Fourier data and lambda profile, computed once and shared
// read-only between scan rows.
struct PreparedSymbol {
  IntervalSet set;
  SymbolCoefficients coeffs;
  LambdaProfile profile;
};

PreparedSymbol prepare_symbol(const IntervalSet& k, int k_max, const LambdaIntegralOptions& opts = {});

struct ScanOptions {
  int k_max = 0;               // 0: max(N_list) - 1, at least 1
  unsigned workers = 1;
  double tol_integral = 1e-9;  // abs tolerance for both lambda integrals
  double tol_chain = 1e-12;    // relative slack on inequality flags
};

struct ReportRow {
  long long n = 0;
  double s = 0, q_eig = 0, q_trace = 0, q_integral = 0, q_integral_err = 0;
  double lower_integral = 0, lower_integral_err = 0;
  double lower_g = std::numeric_limits<double>::quiet_NaN();
  double f = std::numeric_limits<double>::quiet_NaN();
  bool chain_ok = false;
  std::string error;  // non-empty if the row could not be computed
  std::string note;   // qN_integral skipped, the rest of the row stands
};

struct EntropyReport {
  std::string header;  // provenance comment lines, without the column header
  std::vector<ReportRow> rows;
};

// Links flagged per row: S >= q_trace, q_trace >= B1 - err, and with a target
// S >= f_N. Rows never abort the scan; failures land in ReportRow::error.
EntropyReport entropy_scan(const PreparedSymbol& sym, const std::vector<long long>& n_list,
                           const GrowthTarget* target, const ScanOptions& opts);
EntropyReport entropy_scan(const IntervalSet& k, const std::vector<long long>& n_list,
                           const GrowthTarget* target, const ScanOptions& opts);

void write_report(std::ostream& out, const EntropyReport& report);
void write_report_file(const std::filesystem::path& path, const EntropyReport& report);

}  // namespace qfent
