#pragma once

#include <climits>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfent/growth_target.hpp"
#include "qfent/interval_set.hpp"

namespace qfent {

// One block: n intervals of length 2^-ell_exp with gaps of the same length.
struct Block {
  int ell_exp = 0;
  long long n = 0;
  double ell() const;

  friend bool operator==(const Block&, const Block&) = default;
};

enum class TailPolicy { kClose, kTruncate };

struct ConstructionOptions {
  double trunc_tol = 1e-6;
  std::size_t max_intervals = std::size_t{1} << 17;
  TailPolicy tail = TailPolicy::kClose;
  int ell_floor_exp = 60;       // smallest block length 2^-60
  double recursion_tol = 1e-15;
};

// Everything needed to rebuild K and to check the construction identities.
// s has depth + 1 entries: s[0] = s0, s[depth] = s_residual.
struct ConstructionLedger {
  std::string target_spec;
  double s0 = 0.0;
  double trunc_tol = 0.0;
  std::vector<double> s;
  std::vector<Block> blocks;
  std::size_t closure_depth = 0;  // blocks at and past this index are terminal
  long long n_min = 0;
  double phi_max = 0.0;
  bool budget_exhausted = false;  // residual above trunc_tol, kept as slack

  std::size_t depth() const { return blocks.size(); }
  double s_residual() const { return s.empty() ? 0.0 : s.back(); }
  long long interval_count() const;

  friend bool operator==(const ConstructionLedger&, const ConstructionLedger&) = default;
};

// Root of h(6 (s - t)) = t on [0, s], rounded down so h(6 (s - t)) >= t.
double solve_recursion_step(const GrowthTarget::Fn& h, double s, double tol);

inline constexpr int kNoPreviousBlock = INT_MIN / 2;  // ell_prev = +inf

struct QuantizedBlock {
  Block block;
  double s_next = 0.0;
};

// Dyadic ell <= min(ell_prev / 2, s - s_next_exact). s_next_exact == 0 marks a
// terminal block, which uses floor instead of ceil so s_next stays >= 0.
QuantizedBlock quantize_block(double s, double s_next_exact, int ell_prev_exp, int ell_floor_exp = 60);

IntervalSet layout_blocks(const std::vector<Block>& blocks);

struct Construction {
  IntervalSet set;
  ConstructionLedger ledger;
};

Construction build_set(const GrowthTarget& target, double s0, const ConstructionOptions& opts = {});

void write_ledger(std::ostream& out, const ConstructionLedger& ledger);
ConstructionLedger parse_ledger(std::istream& in);
void write_ledger_file(const std::filesystem::path& path, const ConstructionLedger& ledger);
ConstructionLedger read_ledger_file(const std::filesystem::path& path);

}  // namespace qfent

namespace qfent {

struct ValidityReport {
  long long n_min = 0;
  double phi_max = 0.0;
  double lambda_slack = 0.0;  // 3 * s_residual
};

ValidityReport validity_report(const ConstructionLedger& ledger);

}  // namespace qfent
