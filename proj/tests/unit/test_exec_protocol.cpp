#include "doctest.h"
#include "fixtures.hpp"
#include "pathprompt/errors.hpp"
#include "pathprompt/exec_protocol.hpp"
#include "pathprompt/llm_client.hpp"

using namespace pathprompt;
using nlohmann::json;

namespace {

ExecutionJob sample_job() {
  ExecutionJob job;
  job.suite_file = "/tmp/suite.py";
  job.repo_root = "/repo";
  job.focal = {"/repo/pkg/m.py", "pkg.m", "pkg.m.f", 10, 14};
  job.timeout = 2;
  job.suite_timeout = 20;
  return job;
}

std::vector<std::string> stub(const std::string& mode) {
  return {"python3", testsupport::fixture_path("sandbox/stub_sandbox.py"), mode};
}

template <class Fn>
Error error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorCode::InvalidInput, "");
}

}  // namespace

TEST_CASE("job documents round-trip and carry the protocol version") {
  const ExecutionJob job = sample_job();
  const json j = to_json(job);
  CHECK(j.at("protocol_version") == kProtocolVersion);
  const ExecutionJob back = parse_job(j);
  CHECK(back.suite_file == job.suite_file);
  CHECK(back.focal.module_name == "pkg.m");
  CHECK(back.focal.last_line == 14);
  CHECK(back.timeout == 2);

  json wrong = j;
  wrong["protocol_version"] = kProtocolVersion + 1;
  CHECK(error_of([&] { parse_job(wrong); }).code() == ErrorCode::ProtocolError);
}

TEST_CASE("job validation") {
  ExecutionJob job = sample_job();
  job.timeout = 0;
  CHECK(error_of([&] { job.validate(); }).code() == ErrorCode::InvalidInput);
  job = sample_job();
  job.focal.last_line = 3;
  CHECK(error_of([&] { job.validate(); }).code() == ErrorCode::InvalidInput);
}

TEST_CASE("result documents round-trip") {
  SuiteExecution r;
  r.tests.push_back({"test_x", TestStatus::Timeout, true, {3, 4}, {{3, 4}, {3, -1}}});
  r.module_load_coverage = {{1, 2}, {}};
  r.executable_lines = {3, 4, 5};
  r.branch_arms = {{3, 4}, {3, -1}};
  const SuiteExecution back = parse_suite_execution(to_json(r));
  REQUIRE(back.tests.size() == 1);
  CHECK(back.tests[0].status == TestStatus::Timeout);
  CHECK(back.tests[0].covered_branches == r.tests[0].covered_branches);
  CHECK(back.executable_lines == r.executable_lines);
  CHECK(to_json(back) == to_json(r));
}

TEST_CASE("malformed results are protocol errors") {
  CHECK(error_of([] { parse_suite_execution_text("nope"); }).code() == ErrorCode::ProtocolError);
  CHECK(error_of([] { parse_suite_execution_text("{}"); }).code() == ErrorCode::ProtocolError);
  json j = to_json(SuiteExecution{});
  j["protocol_version"] = 99;
  CHECK(error_of([&] { parse_suite_execution(j); }).code() == ErrorCode::ProtocolError);
  j = to_json(SuiteExecution{});
  j["tests"] = json::array({{{"test_name", "t"}, {"status", "exploded"}, {"called_focal", false},
                             {"covered_lines", json::array()}, {"covered_branches", json::array()}}});
  CHECK(error_of([&] { parse_suite_execution(j); }).code() == ErrorCode::ProtocolError);
}

TEST_CASE("process sandbox exchanges one job and one result") {
  ProcessSandbox sandbox(stub("ok"));
  const SuiteExecution r = sandbox.run(sample_job());
  REQUIRE(r.tests.size() == 2);
  CHECK(r.tests[0].status == TestStatus::Pass);
  CHECK(r.tests[0].called_focal);
  CHECK(r.tests[0].covered_lines == std::set<std::uint32_t>{11});
  CHECK(r.tests[0].covered_branches == std::set<BranchArm>{{11, -10}});
  CHECK(r.tests[1].test_name == "/tmp/suite.py");
  CHECK(r.tests[1].status == TestStatus::Fail);
  CHECK(r.executable_lines == std::set<std::uint32_t>{11, 12, 13, 14});
}

TEST_CASE("process sandbox failures") {
  CHECK(error_of([] { ProcessSandbox(stub("garbage")).run(sample_job()); }).code() ==
        ErrorCode::ProtocolError);
  CHECK(error_of([] { ProcessSandbox(stub("version")).run(sample_job()); }).code() ==
        ErrorCode::ProtocolError);

  const Error crash = error_of([] { ProcessSandbox(stub("crash")).run(sample_job()); });
  CHECK(crash.code() == ErrorCode::SandboxCrash);
  CHECK(std::string(crash.what()).find("exit status 3") != std::string::npos);
  CHECK(std::string(crash.what()).find("tracer blew up") != std::string::npos);

  const Error missing = error_of([] { ProcessSandbox({"no-such-sandbox-binary-xyz"}); });
  CHECK(missing.code() == ErrorCode::InvalidConfig);
  CHECK(std::string(missing.what()).find("protocol_version 1") != std::string::npos);
  CHECK(error_of([] { ProcessSandbox({}); }).code() == ErrorCode::InvalidConfig);
}

TEST_CASE("process sandbox enforces the suite deadline") {
  ExecutionJob job = sample_job();
  job.suite_timeout = 0.01;  // deadline is suite_timeout plus a fixed grace
  job.timeout = 0.01;
  // Grace period keeps this from being instant; just check the error class.
  const Error e = error_of([&] { ProcessSandbox(stub("sleep")).run(job); });
  CHECK(e.code() == ErrorCode::SandboxCrash);
}

TEST_CASE("recorded sandbox serves results by suite hash") {
  const std::string dir = "/tmp/pathprompt_test_exec";
  const std::string suite = "def test_a():\n    pass\n";
  write_file(dir + "/suite.py", suite);

  SuiteExecution r;
  r.tests.push_back({"test_a", TestStatus::Pass, false, {}, {}});
  const std::string jsonl =
      json{{"suite_sha256", sha256_hex(suite)}, {"result", to_json(r)}}.dump() + "\n";
  RecordedSandbox recorded = RecordedSandbox::from_jsonl(jsonl);

  ExecutionJob job = sample_job();
  job.suite_file = dir + "/suite.py";
  CHECK(recorded.run(job).tests.at(0).test_name == "test_a");

  write_file(dir + "/suite.py", suite + "\n# edited\n");
  CHECK(error_of([&] { recorded.run(job); }).code() == ErrorCode::ReplayMiss);
  CHECK(error_of([] { RecordedSandbox::from_jsonl("{\"suite_sha256\": \"x\"}\n"); }).code() ==
        ErrorCode::InvalidInput);
}
