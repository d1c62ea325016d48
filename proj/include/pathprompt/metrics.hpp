#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathprompt/exec_protocol.hpp"

namespace pathprompt {

struct Rates {
  double pass_at_1 = 0;
  double fm_call_at_1 = 0;
  double correct_at_1 = 0;
  double line_cov = 0;
  double branch_cov = 0;

  friend bool operator==(const Rates&, const Rates&) = default;
};

/// Execution outcome of one generated suite (one focal method, one
/// strategy, one sample).
struct SuiteOutcome {
  std::string focal;
  std::string strategy;
  std::size_t sample = 0;
  /// Every test the suite was meant to contain, including tests whose
  /// generation came back empty. A listed test with no execution result
  /// counts as status=error, called_focal=false.
  std::vector<std::string> test_names;
  SuiteExecution execution;
};

/// Per-suite rates. The denominator is test_names.size(); an empty suite
/// scores 0 on the three rates and load coverage only.
Rates suite_rates(const SuiteOutcome& suite);

/// True iff some test passed and called the focal method.
bool has_correct_test(const SuiteOutcome& suite);

/// Drops suites without a single passing test that calls the focal method.
std::vector<SuiteOutcome> filter_suites(const std::vector<SuiteOutcome>& suites);

struct FocalMetrics {
  std::string focal;
  std::string strategy;
  std::size_t samples = 0;
  Rates rates;  // mean over samples
};

struct StrategyRow {
  std::string strategy;
  bool filtered = false;
  std::size_t focal_count = 0;
  std::size_t suite_count = 0;
  Rates rates;  // mean over focal methods
};

struct MetricsReport {
  std::vector<FocalMetrics> per_focal;
  std::vector<StrategyRow> rows;
  int template_version = 0;
};

/// Per-suite rates, averaged over samples per (strategy, focal), then over
/// focal methods per strategy. With `include_filtered`, each strategy also
/// gets a "Filtered" row computed over filter_suites() survivors only.
MetricsReport compute_metrics(const std::vector<SuiteOutcome>& suites, bool include_filtered = true,
                              int template_version = 0);

nlohmann::json to_json(const Rates& r);
nlohmann::json to_json(const MetricsReport& report);

/// Table with one row per strategy and columns Pass@1, FM Call@1,
/// Correct@1, Line Cov., Branch Cov.
std::string render_table(const MetricsReport& report);

}  // namespace pathprompt
