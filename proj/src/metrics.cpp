#include "pathprompt/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

namespace pathprompt {

namespace {

template <typename T>
double covered_fraction(const std::set<T>& denominator, const std::set<T>& covered) {
  // A focal span without branch arms is fully branch-covered by convention.
  if (denominator.empty()) return 1.0;
  std::size_t hit = 0;
  for (const T& x : denominator) hit += covered.contains(x);
  return static_cast<double>(hit) / static_cast<double>(denominator.size());
}

Rates mean(const std::vector<Rates>& xs) {
  Rates m;
  if (xs.empty()) return m;
  for (const Rates& r : xs) {
    m.pass_at_1 += r.pass_at_1;
    m.fm_call_at_1 += r.fm_call_at_1;
    m.correct_at_1 += r.correct_at_1;
    m.line_cov += r.line_cov;
    m.branch_cov += r.branch_cov;
  }
  const double n = static_cast<double>(xs.size());
  m.pass_at_1 /= n;
  m.fm_call_at_1 /= n;
  m.correct_at_1 /= n;
  m.line_cov /= n;
  m.branch_cov /= n;
  return m;
}

void aggregate(const std::vector<SuiteOutcome>& suites, bool filtered, MetricsReport& out) {
  // (strategy, focal) -> per-sample rates; std::map keeps output ordering stable.
  std::map<std::pair<std::string, std::string>, std::vector<Rates>> by_focal;
  for (const SuiteOutcome& s : suites) by_focal[{s.strategy, s.focal}].push_back(suite_rates(s));

  std::map<std::string, std::vector<Rates>> by_strategy;
  std::map<std::string, std::size_t> suite_counts;
  for (const auto& [key, samples] : by_focal) {
    const Rates r = mean(samples);
    by_strategy[key.first].push_back(r);
    suite_counts[key.first] += samples.size();
    if (!filtered) out.per_focal.push_back({key.second, key.first, samples.size(), r});
  }
  for (const auto& [strategy, focal_rates] : by_strategy) {
    out.rows.push_back({strategy, filtered, focal_rates.size(), suite_counts[strategy], mean(focal_rates)});
  }
}

}  // namespace

Rates suite_rates(const SuiteOutcome& suite) {
  Rates r;
  std::map<std::string, const TestResult*, std::less<>> by_name;
  for (const TestResult& t : suite.execution.tests) by_name.emplace(t.test_name, &t);

  Coverage covered = suite.execution.module_load_coverage;
  for (const TestResult& t : suite.execution.tests) {
    covered.lines.insert(t.covered_lines.begin(), t.covered_lines.end());
    covered.branches.insert(t.covered_branches.begin(), t.covered_branches.end());
  }
  r.line_cov = covered_fraction(suite.execution.executable_lines, covered.lines);
  r.branch_cov = covered_fraction(suite.execution.branch_arms, covered.branches);

  const std::size_t n = suite.test_names.size();
  if (n == 0) return r;
  std::size_t pass = 0, call = 0, correct = 0;
  for (const std::string& name : suite.test_names) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) continue;  // never executed: error, no call
    const bool passed = it->second->status == TestStatus::Pass;
    pass += passed;
    call += it->second->called_focal;
    correct += passed && it->second->called_focal;
  }
  const double d = static_cast<double>(n);
  r.pass_at_1 = static_cast<double>(pass) / d;
  r.fm_call_at_1 = static_cast<double>(call) / d;
  r.correct_at_1 = static_cast<double>(correct) / d;
  return r;
}

bool has_correct_test(const SuiteOutcome& suite) {
  const std::set<std::string> listed(suite.test_names.begin(), suite.test_names.end());
  return std::any_of(suite.execution.tests.begin(), suite.execution.tests.end(), [&](const TestResult& t) {
    return listed.contains(t.test_name) && t.status == TestStatus::Pass && t.called_focal;
  });
}

std::vector<SuiteOutcome> filter_suites(const std::vector<SuiteOutcome>& suites) {
  std::vector<SuiteOutcome> out;
  std::copy_if(suites.begin(), suites.end(), std::back_inserter(out), has_correct_test);
  return out;
}

MetricsReport compute_metrics(const std::vector<SuiteOutcome>& suites, bool include_filtered,
                              int template_version) {
  MetricsReport report;
  report.template_version = template_version;
  aggregate(suites, false, report);
  if (include_filtered) aggregate(filter_suites(suites), true, report);
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const StrategyRow& a, const StrategyRow& b) {
    return std::tie(a.strategy, a.filtered) < std::tie(b.strategy, b.filtered);
  });
  return report;
}

nlohmann::json to_json(const Rates& r) {
  return {{"pass_at_1", r.pass_at_1},
          {"fm_call_at_1", r.fm_call_at_1},
          {"correct_at_1", r.correct_at_1},
          {"line_cov", r.line_cov},
          {"branch_cov", r.branch_cov}};
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json per_focal = nlohmann::json::array();
  for (const FocalMetrics& f : report.per_focal) {
    per_focal.push_back(
        {{"focal", f.focal}, {"strategy", f.strategy}, {"samples", f.samples}, {"rates", to_json(f.rates)}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const StrategyRow& r : report.rows) {
    rows.push_back({{"strategy", r.strategy},
                    {"filtered", r.filtered},
                    {"focal_count", r.focal_count},
                    {"suite_count", r.suite_count},
                    {"rates", to_json(r.rates)}});
  }
  return {{"template_version", report.template_version},
          {"per_focal", std::move(per_focal)},
          {"aggregate", std::move(rows)},
          {"notes",
           {"rates are fractions of tests per suite, averaged over samples, then over focal methods",
            "coverage counts every executed test regardless of status, plus coverage on module load"}}};
}

std::string render_table(const MetricsReport& report) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-22s %8s %10s %10s %10s %12s\n", "Strategy", "Pass@1", "FM Call@1",
                "Correct@1", "Line Cov.", "Branch Cov.");
  out += buf;
  for (const StrategyRow& r : report.rows) {
    const std::string label = r.strategy + (r.filtered ? " Filtered" : "");
    std::snprintf(buf, sizeof buf, "%-22s %8.2f %10.2f %10.2f %10.2f %12.2f\n", label.c_str(),
                  r.rates.pass_at_1, r.rates.fm_call_at_1, r.rates.correct_at_1, r.rates.line_cov,
                  r.rates.branch_cov);
    out += buf;
  }
  return out;
}

}  // namespace pathprompt
