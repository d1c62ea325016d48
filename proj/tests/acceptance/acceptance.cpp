// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "json.hpp"
#include "pathprompt/errors.hpp"
#include "pathprompt/generation_loop.hpp"
#include "pathprompt/metrics.hpp"
#include "pathprompt/path_analysis.hpp"
#include "pathprompt/path_minimization.hpp"
#include "pathprompt/pipeline.hpp"
#include "pathprompt/prompt_builder.hpp"
#include "pathprompt/python_parser.hpp"
#include "random_methods.hpp"
#include "random_results.hpp"

using namespace pathprompt;
using testsupport::fixture_path;
using testsupport::read_fixture;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::vector<std::string> rendered(const ExecutionPath& p) {
  std::vector<std::string> out;
  for (const Constraint& c : p.constraints) out.push_back(c.render());
  return out;
}

std::set<std::string> union_of(const std::vector<ExecutionPath>& ps) {
  std::set<std::string> out;
  for (const auto& p : ps) {
    for (const auto& c : p.constraints) out.insert(c.render());
  }
  return out;
}

PathAnalysis analyze_all(const std::string& src) {
  AnalysisOptions o;
  o.max_paths = 0;
  return analyze_paths(testsupport::focal_in(src, "f"), o);
}

Verdict minimization_figure() {
  Verdict v;
  const std::string src =
      "def f(a, b, c):\n"
      "    if a:\n        x = 1\n    else:\n        x = 2\n"
      "    if b:\n        y = 1\n    else:\n        y = 2\n"
      "    if c:\n        z = 1\n    else:\n        z = 2\n";
  using testsupport::Stmt;
  std::vector<Stmt> model;
  for (const char* c : {"a", "b", "c"}) {
    Stmt s;
    s.kind = Stmt::If;
    s.conds = {c};
    s.bodies = {{Stmt{}}, {Stmt{}}};
    s.has_else = true;
    model.push_back(s);
  }
  const auto enumerated = testsupport::enumerate_paths(model);
  std::vector<ExecutionPath> full;
  for (const auto& ep : enumerated) {
    ExecutionPath p;
    for (const std::string& c : ep.constraints) {
      if (c.starts_with("not (")) p.constraints.emplace_back(c.substr(5, c.size() - 6), true);
      else p.constraints.emplace_back(c);
    }
    p.return_expr = ep.behavior;
    full.push_back(std::move(p));
  }
  const auto minimized = minimize_paths(full);
  const auto analyzed = analyze_all(src).paths;
  v.detail = std::to_string(full.size()) + " enumerated -> " + std::to_string(minimized.size()) + " minimized";
  v.expect(full.size() == 8, "enumeration did not give 8 paths");
  v.expect(minimized.size() == 4, "minimize_paths did not give 4 paths");
  v.expect(union_of(minimized) == union_of(full), "constraint union changed");
  v.expect(analyzed.size() == 4, "analyzer did not give 4 paths");
  return v;
}

Verdict union_preservation() {
  Verdict v;
  testsupport::MethodGenerator gen(20240601, 10, 4);
  int agree = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const testsupport::Method m = gen.next();
    const auto oracle = testsupport::enumerate_paths(m.body);
    const PathAnalysis a = analyze_all(m.source);
    std::set<testsupport::EnumeratedPath> all(oracle.begin(), oracle.end());
    bool ok = union_of(a.paths) == testsupport::constraint_union(oracle);
    for (const auto& p : a.paths) ok = ok && all.contains({rendered(p), *p.return_expr});
    agree += ok;
  }
  v.detail = std::to_string(agree) + "/" + std::to_string(n) + " methods";
  v.expect(agree == n, "union differs on " + std::to_string(n - agree) + " methods");
  return v;
}

Verdict collection_semantics() {
  Verdict v;
  const PathAnalysis chain = analyze_all(
      "def f(x):\n"
      "    if x == 1:\n        return 'a'\n"
      "    elif x == 2:\n        return 'b'\n"
      "    elif x == 3:\n        return 'c'\n"
      "    else:\n        return 'd'\n");
  const std::vector<std::string> clauses = {"x == 1", "x == 2", "x == 3"};
  v.expect(chain.paths.size() == 4, "if/elif/else did not give 4 paths");
  for (std::size_t k = 0; k < chain.paths.size() && v.pass; ++k) {
    std::vector<std::string> expected;
    for (std::size_t j = 0; j < k && j < clauses.size(); ++j) expected.push_back("not (" + clauses[j] + ")");
    if (k < clauses.size()) expected.push_back(clauses[k]);
    v.expect(rendered(chain.paths[k]) == expected, "clause " + std::to_string(k + 1) + " constraints differ");
  }
  const PathAnalysis loop = analyze_all("def f(n):\n    while n > 0:\n        n -= 1\n    return n\n");
  v.expect(loop.paths.size() == 2 && rendered(loop.paths[0]) == std::vector<std::string>{"n > 0"} &&
               rendered(loop.paths[1]) == std::vector<std::string>{"not (n > 0)"},
           "while did not give taken and skipped families");
  const PathAnalysis none = analyze_all("def f(x):\n    y = x + 1\n    print(y)\n");
  v.expect(none.paths.size() == 1 && none.paths[0].constraints.empty() && none.paths[0].return_expr == "None" &&
               none.paths[0].kind == PathKind::ImplicitNone,
           "method without return did not give one implicit-None path");
  if (v.pass) v.detail = "elif negations, while families, implicit None";
  return v;
}

Verdict exists_as_cli() {
  Verdict v;
  std::ostringstream out, err;
  const int rc = run_cli({"pathprompt", "analyze", fixture_path("corpus/flutils/pathutils.py"), "exists_as"}, out, err);
  v.expect(rc == 0, "analyze exited " + std::to_string(rc) + ": " + err.str());
  if (!v.pass) return v;
  const auto paths = nlohmann::json::parse(out.str()).at("minimized_paths");
  const std::vector<std::string> preds = {"path.is_dir()",         "path.is_file()", "path.is_block_device()",
                                          "path.is_char_device()", "path.is_fifo()", "path.is_socket()"};
  const std::vector<std::string> returns = {"'directory'", "'file'",   "'block device'", "'char device'",
                                            "'FIFO'",      "'socket'", "''"};
  v.expect(paths.size() == 7, "got " + std::to_string(paths.size()) + " paths");
  for (std::size_t i = 0; i < paths.size() && v.pass; ++i) {
    std::vector<std::string> expected;
    for (std::size_t k = 0; k < i && k < preds.size(); ++k) expected.push_back("not (" + preds[k] + ")");
    if (i < preds.size()) expected.push_back(preds[i]);
    std::vector<std::string> got;
    for (const auto& c : paths[i].at("constraints")) got.push_back(c.at("rendered").get<std::string>());
    v.expect(got == expected, "path " + std::to_string(i) + " constraints differ");
    v.expect(paths[i].at("return_expr") == returns[i], "path " + std::to_string(i) + " return differs");
  }
  if (v.pass) v.detail = "7 paths, 'directory' .. fallthrough ''";
  return v;
}

Verdict truncation_repair() {
  Verdict v;
  testsupport::MethodGenerator gen(77, 6, 3);
  std::mt19937_64 rng(5150);
  int cases = 0, empty = 0;
  while (cases < 500) {
    std::string test = gen.next().source;
    test.replace(0, 5, "def test_");  // "def f(" -> "def test_f("
    if (!check_parses(test)) continue;
    // Cut at a line boundary or inside a line.
    std::uniform_int_distribution<std::size_t> at(1, test.size());
    std::size_t cut = at(rng);
    if (cases % 2 == 0) {
      const std::size_t nl = test.find('\n', cut - 1);
      cut = nl == std::string::npos ? test.size() : nl + 1;
    }
    const std::string prefix = test.substr(0, cut);
    const RepairResult r = repair_truncation(prefix);
    ++cases;
    empty += r.code.empty();
    v.expect(r.code.empty() || check_parses(r.code), "repaired code does not parse");
    v.expect(prefix.compare(0, r.code.size(), r.code) == 0, "repaired code is not a prefix");
    v.expect(r.code.empty() || r.code.back() == '\n' || r.code.size() == prefix.size(),
             "repaired code does not end on a line boundary");
    v.expect(count_lines(r.code) + r.dropped_line_count == count_lines(prefix), "dropped line count is off");
    // Longest such prefix: adding the next line back must not parse.
    if (!r.code.empty() && r.code.size() < prefix.size()) {
      const std::size_t nl = prefix.find('\n', r.code.size());
      const std::string longer = prefix.substr(0, nl == std::string::npos ? prefix.size() : nl + 1);
      v.expect(!check_parses(longer), "a longer line prefix also parses");
    }
  }
  if (v.pass) v.detail = std::to_string(cases) + " prefixes, " + std::to_string(empty) + " repaired to empty";
  return v;
}

Verdict golden_prompts() {
  Verdict v;
  std::map<std::string, PreparedFocal> prepared;
  for (const auto& s : load_manifest(fixture_path("corpus/manifest.jsonl"))) {
    PreparedFocal p = prepare_focal(s, Config{});
    prepared.emplace(p.focal.qualified_name, std::move(p));
  }
  std::istringstream index(read_fixture("golden/prompts/index.jsonl"));
  int n = 0;
  for (std::string line; std::getline(index, line); ++n) {
    const auto j = nlohmann::json::parse(line);
    const PreparedFocal& p = prepared.at(j.at("focal").get<std::string>());
    const std::size_t i = j.at("path_index").get<std::size_t>();
    const std::string a = render_path_prompt(p.focal, p.analysis.paths.at(i), i).text;
    const std::string b = render_path_prompt(p.focal, p.analysis.paths.at(i), i).text;
    v.expect(a == b, "rendering is not stable for " + j.at("golden").get<std::string>());
    v.expect(a == read_fixture("golden/prompts/" + j.at("golden").get<std::string>()),
             "mismatch against " + j.at("golden").get<std::string>());
  }
  v.expect(n == 10, "expected 10 goldens, found " + std::to_string(n));
  if (v.pass) v.detail = "10/10 byte-identical";
  return v;
}

Verdict metrics_identities() {
  Verdict v;
  std::vector<SuiteOutcome> noop;
  for (std::size_t k = 0; k < 5; ++k) {
    SuiteOutcome s{"m.f" + std::to_string(k % 2), "noop", k, {"test_noop"}, {}};
    s.execution.tests = {{"test_noop", TestStatus::Pass, false, {}, {}}};
    s.execution.module_load_coverage.lines = {1};
    s.execution.executable_lines = {1, 2, 3};
    noop.push_back(std::move(s));
  }
  const MetricsReport r = compute_metrics(noop);
  v.expect(r.rows.size() == 1 && r.rows[0].rates.pass_at_1 == 1.0 && r.rows[0].rates.fm_call_at_1 == 0.0 &&
               r.rows[0].rates.correct_at_1 == 0.0,
           "No-Op row is not 1.00 / 0.00 / 0.00");

  std::mt19937_64 rng(31337);
  int ok = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    ok += testsupport::rates_in_bounds(suite_rates(testsupport::random_suite(rng, "f", "s", 0)));
  }
  v.expect(ok == n, std::to_string(n - ok) + " random matrices violate the bounds");
  if (v.pass) v.detail = "No-Op 1.00/0.00/0.00; " + std::to_string(ok) + "/" + std::to_string(n) + " random matrices";
  return v;
}

Verdict end_to_end() {
  Verdict v;
  const std::string conf = fixture_path("e2e/pipeline.conf");
  const std::string manifest = fixture_path("corpus/manifest.jsonl");
  std::string reports[2];
  for (int round = 0; round < 2; ++round) {
    const fs::path out = fs::temp_directory_path() / ("pathprompt_acceptance_" + std::to_string(round));
    fs::remove_all(out);
    std::ostringstream o, e;
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"pathprompt", "generate", "--config", conf, "--manifest", manifest, "--out",
                                   out.string()},
          std::vector<std::string>{"pathprompt", "run", "--config", conf, "--out", out.string()},
          std::vector<std::string>{"pathprompt", "report", "--out", out.string()}}) {
      const int rc = run_cli(args, o, e);
      v.expect(rc == 0, args[1] + " exited " + std::to_string(rc) + ": " + e.str());
    }
    v.expect(o.str().find("generated 35 suites, 0 failures") != std::string::npos &&
                 o.str().find("executed 35 suites, 0 failures") != std::string::npos,
             "stage failures: " + o.str());
    if (!v.pass) return v;
    reports[round] = read_file((out / "report.json").string());
  }
  v.expect(reports[0] == reports[1], "reports differ between runs");
  v.expect(reports[0] == read_fixture("e2e/report.golden.json"), "report differs from the pinned golden");
  if (v.pass) v.detail = "5 focal methods, 35 suites, identical report.json";
  return v;
}

struct Criterion {
  std::string name;
  double limit_seconds;  // 0 = no limit
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"path minimization figure: 3 if-else branches, 8 paths -> 4", 1, minimization_figure},
      {"constraint-union preservation on 1000 random methods", 30, union_preservation},
      {"path collection semantics: elif negations, loops, implicit None", 0, collection_semantics},
      {"exists_as: analyze emits the 7 expected paths", 0, exists_as_cli},
      {"truncation repair on 500 random prefixes", 0, truncation_repair},
      {"golden prompts for 10 (focal, path) pairs", 0, golden_prompts},
      {"metrics identities: No-Op row and 10000 random matrices", 0, metrics_identities},
      {"end-to-end replay pipeline gives a bit-identical report", 10, end_to_end},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      v.expect(false, "took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_seconds) + " s");
    }
    failed += !v.pass;
    std::printf("%s  %s (%s; %.2f s)\n", v.pass ? "PASS" : "FAIL", c.name.c_str(), v.detail.c_str(), secs);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
