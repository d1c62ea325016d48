#include <random>

#include "doctest.h"
#include "pathprompt/metrics.hpp"
#include "random_results.hpp"

using namespace pathprompt;

namespace {

TestResult result(const std::string& name, TestStatus status, bool called,
                  std::set<std::uint32_t> lines = {}) {
  return {name, status, called, std::move(lines), {}};
}

SuiteOutcome four_tests() {
  SuiteOutcome s{"m.f", "symprompt", 0, {"t0", "t1", "t2", "t3"}, {}};
  s.execution.tests = {result("t0", TestStatus::Pass, true, {11}), result("t1", TestStatus::Pass, true),
                       result("t2", TestStatus::Fail, true, {12}), result("t3", TestStatus::Error, false)};
  s.execution.executable_lines = {11, 12, 13, 14};
  return s;
}

SuiteOutcome noop_suite(const std::string& focal, std::size_t sample) {
  SuiteOutcome s{focal, "noop", sample, {"test_noop"}, {}};
  s.execution.tests = {result("test_noop", TestStatus::Pass, false)};
  s.execution.module_load_coverage.lines = {10};
  s.execution.executable_lines = {10, 11, 12};
  s.execution.branch_arms = {{11, 12}, {11, -10}};
  return s;
}

}  // namespace

TEST_CASE("rates follow the per-test definitions") {
  const Rates r = suite_rates(four_tests());
  CHECK(r.pass_at_1 == 0.5);
  CHECK(r.fm_call_at_1 == 0.75);
  CHECK(r.correct_at_1 == 0.5);
  CHECK(r.line_cov == 0.5);
  CHECK(r.branch_cov == 1.0);  // no branch arms in the focal span
}

TEST_CASE("no-op suites pass without calling the focal method") {
  std::vector<SuiteOutcome> suites;
  for (std::size_t k = 0; k < 10; ++k) {
    suites.push_back(noop_suite("m.f", k));
    suites.push_back(noop_suite("m.g", k));
  }
  const MetricsReport report = compute_metrics(suites);
  REQUIRE(report.rows.size() == 1);  // nothing survives filtering
  CHECK(report.rows[0].strategy == "noop");
  CHECK(report.rows[0].rates.pass_at_1 == 1.0);
  CHECK(report.rows[0].rates.fm_call_at_1 == 0.0);
  CHECK(report.rows[0].rates.correct_at_1 == 0.0);
  CHECK(report.rows[0].rates.line_cov == doctest::Approx(1.0 / 3));
  CHECK(report.rows[0].rates.branch_cov == 0.0);
  CHECK(report.rows[0].focal_count == 2);
  CHECK(report.rows[0].suite_count == 20);
}

TEST_CASE("empty suites score zero rates and load coverage only") {
  SuiteOutcome s{"m.f", "symprompt", 0, {}, {}};
  s.execution.module_load_coverage.lines = {10};
  s.execution.executable_lines = {10, 11};
  const Rates r = suite_rates(s);
  CHECK(r.pass_at_1 == 0);
  CHECK(r.fm_call_at_1 == 0);
  CHECK(r.correct_at_1 == 0);
  CHECK(r.line_cov == 0.5);
}

TEST_CASE("listed tests without results count as errors") {
  SuiteOutcome s = four_tests();
  s.test_names.push_back("t4_empty");
  const Rates r = suite_rates(s);
  CHECK(r.pass_at_1 == 0.4);
  CHECK(r.fm_call_at_1 == 0.6);
  CHECK(r.correct_at_1 == 0.4);
}

TEST_CASE("identical samples average to the common value") {
  std::vector<SuiteOutcome> suites;
  for (std::size_t k = 0; k < 10; ++k) {
    SuiteOutcome s = four_tests();
    s.sample = k;
    suites.push_back(s);
  }
  const MetricsReport report = compute_metrics(suites, false);
  REQUIRE(report.per_focal.size() == 1);
  CHECK(report.per_focal[0].samples == 10);
  CHECK(report.per_focal[0].rates == suite_rates(four_tests()));
  CHECK(report.rows.at(0).rates == suite_rates(four_tests()));
}

TEST_CASE("averaging goes over samples first, then focal methods") {
  SuiteOutcome a0 = four_tests(), a1 = four_tests(), b0 = four_tests();
  a1.sample = 1;
  a1.execution.tests[0].status = TestStatus::Fail;  // a1: pass 0.25
  b0.focal = "m.g";
  b0.execution.tests[1].status = TestStatus::Fail;  // b0: pass 0.25
  const MetricsReport report = compute_metrics({a0, a1, b0}, false);
  // focal a: (0.5 + 0.25) / 2 = 0.375; focal b: 0.25; mean 0.3125
  CHECK(report.rows.at(0).rates.pass_at_1 == doctest::Approx(0.3125));
}

TEST_CASE("filtering keeps suites with a correct test") {
  SuiteOutcome good = four_tests();
  SuiteOutcome bad = four_tests();
  bad.sample = 1;
  for (auto& t : bad.execution.tests) t.status = TestStatus::Error;
  CHECK(has_correct_test(good));
  CHECK_FALSE(has_correct_test(bad));
  const auto kept = filter_suites({good, bad});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].sample == 0);

  const MetricsReport report = compute_metrics({good, bad});
  REQUIRE(report.rows.size() == 2);
  CHECK_FALSE(report.rows[0].filtered);
  CHECK(report.rows[1].filtered);
  CHECK(report.rows[1].suite_count == 1);
  CHECK(report.rows[1].rates.pass_at_1 == 0.5);
  CHECK(report.rows[0].rates.pass_at_1 == 0.25);

  // A correct result under a name the suite never listed does not count.
  SuiteOutcome stray{"m.f", "symprompt", 0, {"t0"}, {}};
  stray.execution.tests = {result("other", TestStatus::Pass, true)};
  CHECK_FALSE(has_correct_test(stray));
}

TEST_CASE("random result matrices respect bounds and the correct-rate inequality") {
  std::mt19937_64 rng(20240611);
  std::vector<SuiteOutcome> suites;
  for (int i = 0; i < 2000; ++i) {
    SuiteOutcome s = testsupport::random_suite(rng, "f" + std::to_string(i % 37), i % 2 ? "a" : "b",
                                               static_cast<std::size_t>(i));
    CHECK(testsupport::rates_in_bounds(suite_rates(s)));
    suites.push_back(std::move(s));
  }
  const MetricsReport report = compute_metrics(suites);
  for (const auto& f : report.per_focal) CHECK(testsupport::rates_in_bounds(f.rates));
  for (const auto& row : report.rows) CHECK(testsupport::rates_in_bounds(row.rates));
}

TEST_CASE("adding a test never lowers coverage") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    SuiteOutcome s = testsupport::random_suite(rng, "f", "a", 0);
    SuiteOutcome extra = testsupport::random_suite(rng, "f", "a", 0);
    const Rates before = suite_rates(s);
    for (auto& t : extra.execution.tests) {
      t.test_name = "added_" + t.test_name;
      s.test_names.push_back(t.test_name);
      s.execution.tests.push_back(t);
    }
    const Rates after = suite_rates(s);
    CHECK(after.line_cov >= before.line_cov);
    CHECK(after.branch_cov >= before.branch_cov);
  }
}

TEST_CASE("filtered means dominate when discarded suites had no correct test") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    std::vector<SuiteOutcome> suites;
    for (int k = 0; k < 6; ++k) suites.push_back(testsupport::random_suite(rng, "f", "a", k));
    const auto kept = filter_suites(suites);
    if (kept.empty()) continue;
    const MetricsReport report = compute_metrics(suites);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[1].rates.correct_at_1 >= report.rows[0].rates.correct_at_1 - 1e-12);
  }
}

TEST_CASE("report rendering is deterministic") {
  const MetricsReport a = compute_metrics({four_tests(), noop_suite("m.f", 0)}, true, 1);
  const MetricsReport b = compute_metrics({noop_suite("m.f", 0), four_tests()}, true, 1);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(render_table(a) == render_table(b));
  const std::string table = render_table(a);
  CHECK(table.find("Pass@1") != std::string::npos);
  CHECK(table.find("symprompt Filtered") != std::string::npos);
  CHECK(to_json(a).at("template_version") == 1);
}
