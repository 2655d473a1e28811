#pragma once

// Seeded property-based verification campaigns.
//
// Every check samples random inputs per trial and compares two sides:
//   relation "ge": lhs >= rhs within slack
//   relation "eq": |lhs - rhs| within slack
// The slack is relative for large values: a record fails when the violation
// exceeds slack * max(1, |lhs|, |rhs|). The optimizer only produces lower
// bounds on suprema, so "ge" checks whose lhs is numeric can under-report
// violations but never invent them.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/divergences.hpp"
#include "qfdiv/extended_real.hpp"

namespace qfdiv {

struct CheckConfig {
  std::optional<std::size_t> trials;  // per-check default when absent
  std::uint64_t seed = 0;
  std::optional<double> slack;        // per-check default when absent
  std::vector<std::string> quantities;  // per-check default when empty
  std::vector<double> alphas;           // per-check default when empty
  std::size_t dim_a = 2;
  std::size_t dim_b = 2;
  std::size_t din = 3;   // channel checks
  std::size_t dout = 2;
  double rank_deficient_fraction = 0.25;
  bool numeric = false;  // route optimized quantities through the tau optimizer
  OptimizerOptions optimizer;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string label;
  std::string input_digest;
  std::string relation;  // "ge" or "eq"
  ExtendedReal lhs;
  ExtendedReal rhs;
  double slack = 0.0;
  double violation = 0.0;  // positive means the relation is violated by this much
  bool failed = false;
  std::string error;  // set when evaluation threw
};

struct CheckReport {
  std::string check_name;
  std::size_t trials = 0;
  std::size_t failures = 0;  // trials with at least one failed record
  double worst_violation = 0.0;
  std::uint64_t seed = 0;
  bool expect_violation = false;
  std::string note;
  std::vector<TrialRecord> records;

  // For the negative control a pass means at least one violation was found.
  bool passed() const { return expect_violation ? failures > 0 : failures == 0; }
};

CheckReport check_dpi_channel(const CheckConfig& cfg);
CheckReport check_partial_trace(const CheckConfig& cfg);
CheckReport check_isometric_invariance(const CheckConfig& cfg);
CheckReport check_recovery_chain(const CheckConfig& cfg);
CheckReport check_dominating(const CheckConfig& cfg);
CheckReport check_sandwich_petz(const CheckConfig& cfg);
CheckReport check_duality(const CheckConfig& cfg);
CheckReport check_classical_reduction(const CheckConfig& cfg);
CheckReport check_cq_reduction(const CheckConfig& cfg);
CheckReport check_petz_renyi_dpi(const CheckConfig& cfg);
CheckReport check_reversed_monotonicity(const CheckConfig& cfg);
// Partial-trace check on the sandwiched order 0.3, expected to find violations.
CheckReport check_negative_control(const CheckConfig& cfg);

// Names accepted by run_check, in run_all order; the negative control is last
// and is not part of run_all.
const std::vector<std::string>& check_names();
CheckReport run_check(const std::string& name, const CheckConfig& cfg);
std::vector<CheckReport> run_all(const CheckConfig& cfg);

// hash(master, check name, trial) via FNV-1a and splitmix64.
std::uint64_t trial_seed(std::uint64_t master, const std::string& check, std::size_t trial);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string digest_hex(std::uint64_t h);

// One JSON object per trial record followed by one summary object per report.
void write_jsonl(std::ostream& os, const std::vector<CheckReport>& reports);
std::string summary_json(const std::vector<CheckReport>& reports);

}  // namespace qfdiv
