#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "socchain/limits.hpp"
#include "socchain/model.hpp"
#include "socchain/samplers.hpp"

namespace soc {

/// Flat key=value configuration; '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(const std::string& text);
ConfigMap load_config(const std::string& path);

struct ExperimentConfig {
  Regime regime = Regime::Long;
  std::vector<long> n_list;
  /// "const:R", "pow:C:A" for floor(C n^A), or "half" for floor((n-1)/2).
  std::string r_rule = "half";
  long samples = 0;  // proposals per cell
  std::uint64_t seed = 0;
  double lambda = 1.0;
  std::map<std::string, double> tolerances;  // key "ks" by default
  /// Wall-clock seconds go into the report only when set; off keeps reports
  /// bit-identical across runs.
  bool record_timing = false;

  static ExperimentConfig from_map(const ConfigMap& m);
};

/// r for chain length n under the rule; throws RangeError if invalid.
long resolve_r(const std::string& rule, long n);

struct ReportRow {
  long n = 0;
  long r = 0;
  std::string regime;
  double ks = 0.0;  // primary statistic: KS distance or normalized discrepancy
  double mean = 0.0;
  double var = 0.0;
  double acc_rate = 0.0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  std::string verdict;  // "pass", "fail" or "error: ..."
};

struct Report {
  std::vector<ReportRow> rows;
};

/// pass iff ks <= tolerance for the row's label (falling back to "ks").
std::string recompute_verdict(const ReportRow& row, const std::map<std::string, double>& tolerances);

/// Scale of the magnetization limit for (n, r) under the law.
double limit_scale(const LimitLaw& law, long n, long r);

/// CDF of the limit law on its natural scale.
std::function<double(double)> limit_cdf(const LimitLaw& law);

Report run_experiment(const ExperimentConfig& cfg);

/// Deterministic serialization; format is "csv" or "json".
std::string emit_report(const Report& rep, const std::string& format);
Report parse_report(const std::string& text, const std::string& format);

void write_text(const std::string& path, const std::string& text);

/// Shortest decimal string that round-trips the double.
std::string format_double(double x);

}  // namespace soc
