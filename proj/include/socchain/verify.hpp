#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "socchain/harness.hpp"

namespace soc {

/// Outcome of one verification check. `stat` is compared against `tol`;
/// checks without a natural scale report a discrepancy already divided by
/// their tolerance, with tol = 1.
struct CheckResult {
  int criterion = 0;
  std::string name;
  long n = 0;
  long r = 0;
  double stat = 0.0;
  double tol = 0.0;
  double mean = 0.0;
  double var = 0.0;
  double acc_rate = 0.0;
  double seconds = 0.0;
  std::string detail;
  std::vector<WeightedSample> samples;  // written as a per-check CSV when non-empty

  bool pass() const { return stat <= tol; }
};

struct VerifyConfig {
  std::uint64_t seed = 42;
  /// Multiplies every Monte Carlo budget; 1 is the calibrated setting.
  double budget = 1.0;
  bool record_timing = false;

  static VerifyConfig from_map(const ConfigMap& m);
};

/// Criteria covered by a suite: algebra, cf, regimes or all.
std::vector<int> suite_criteria(const std::string& suite);

/// Runs criterion k (1..12). Criterion 13 compares two runs and lives in
/// the caller.
std::vector<CheckResult> run_criterion(int k, const VerifyConfig& cfg);

/// Tolerance for every check name emitted by run_criterion.
std::map<std::string, double> check_tolerances();

Report to_report(const std::vector<CheckResult>& checks, const VerifyConfig& cfg);

/// Runs a suite and writes report.csv, report.json and per-check sample
/// CSVs into dir (timing.csv too when record_timing). Returns all checks.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyConfig& cfg, const std::string& dir);

}  // namespace soc
