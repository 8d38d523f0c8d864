#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfent/construction.hpp"
#include "qfent/growth_target.hpp"
#include "qfent/scan.hpp"

namespace qfent {

struct ChainOptions {
  double tol_integral = 1e-9;
  double tol_chain = 1e-12;   // relative slack on links that hold with equality
  double slack_policy = 0.0;  // relative discount on B2 in the lambda link
};

// One N of the proof chain S >= q >= B1 (>= B2 >= f_N inside the window).
struct ChainRecord {
  long long n = 0;
  bool in_window = false;  // N >= N_min
  double s = 0, q = 0, b1 = 0, b1_err = 0, b2 = 0, f = 0;
  double truncation_slack = 0;  // 3 s_D (2N / pi^2)
  double margin_s_q = 0, margin_q_b1 = 0, margin_b1_b2 = 0, margin_b2_f = 0, margin_s_f = 0;
  bool s_ge_q = false, q_ge_b1 = false, b1_ge_b2 = false, b2_ge_f = false, s_ge_f = false;
  std::string error;

  // Unconditional links always; window links only for N >= N_min.
  bool ok() const;
};

ChainRecord bound_chain(const PreparedSymbol& sym, const ConstructionLedger& ledger, const GrowthTarget& target,
                        long long n, const ChainOptions& opts = {});
ChainRecord bound_chain(const IntervalSet& k, const ConstructionLedger& ledger, const GrowthTarget& target,
                        long long n, const ChainOptions& opts = {});
std::vector<ChainRecord> bound_chain_scan(const PreparedSymbol& sym, const ConstructionLedger& ledger,
                                          const GrowthTarget& target, const std::vector<long long>& n_list,
                                          const ChainOptions& opts = {}, unsigned workers = 1);
void write_chain(std::ostream& out, const std::vector<ChainRecord>& rows);

struct MarginRow {
  double phi = 0, lambda = 0, h = 0, margin = 0;
  std::size_t i_phi = 0;
};

struct MarginTable {
  double lo = 0, hi = 0, slack = 0;
  std::vector<MarginRow> rows;
  double min_margin = 0, argmin_phi = 0;
};

// lambda_K(phi) - (h(phi) - 3 s_D) on a log grid over [6 (s_{C-1} - s_C), phi_max],
// C the number of regular blocks (C = D without tail closure).
MarginTable lambda_vs_h(const IntervalSet& k, const ConstructionLedger& ledger, const GrowthTarget& target,
                        std::size_t grid_size);
void write_margins(std::ostream& out, const MarginTable& table);

// Smallest i with 2 n_j ell_j < phi for every regular block j >= i.
std::size_t i_phi(const ConstructionLedger& ledger, double phi);

struct LogProbe {
  double c_hat = 0, phi0 = 0, log_fit = 0, min_s_over_ln = 0;
  std::vector<double> entropies;  // aligned with the N list
};

// c_hat = min lambda(phi)/phi over phi_list inside (0, phi0], phi0 = half the
// shortest piece or gap; log_fit = least-squares slope of S_N against ln N.
// An empty phi_list uses a log grid of 32 points in [phi0 / 1024, phi0].
LogProbe log_lower_bound_probe(const IntervalSet& k, const std::vector<long long>& n_list,
                               std::vector<double> phi_list = {}, unsigned workers = 1);

}  // namespace qfent
