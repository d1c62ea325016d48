#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pathprompt {

/// Version of the job/result documents exchanged with the sandbox process.
inline constexpr int kProtocolVersion = 1;

struct FocalGeometry {
  std::string module_path;  // focal source file
  std::string module_name;  // dotted import name
  std::string qualified_name;
  std::uint32_t first_line = 0;
  std::uint32_t last_line = 0;
};

struct ExecutionJob {
  std::string suite_file;
  std::string repo_root;  // prepended to the import path inside the sandbox
  FocalGeometry focal;
  double timeout = 10;         // per test, seconds
  double suite_timeout = 120;  // whole suite, seconds

  /// Throws Error{InvalidInput} unless timeouts are positive and the line
  /// span is well-formed.
  void validate() const;
};

enum class TestStatus { Pass, Fail, Error, Timeout };

std::string_view to_string(TestStatus s);
TestStatus parse_test_status(std::string_view s);

/// A branch arm as a (from line, to line) arc; negative lines denote
/// function exit.
using BranchArm = std::pair<std::int64_t, std::int64_t>;

struct TestResult {
  std::string test_name;
  TestStatus status = TestStatus::Error;
  bool called_focal = false;
  std::set<std::uint32_t> covered_lines;
  std::set<BranchArm> covered_branches;
};

struct Coverage {
  std::set<std::uint32_t> lines;
  std::set<BranchArm> branches;
};

/// Result document for one suite run.
struct SuiteExecution {
  std::vector<TestResult> tests;
  Coverage module_load_coverage;
  /// Coverage denominators for the focal span as reported by the tracer.
  std::set<std::uint32_t> executable_lines;
  std::set<BranchArm> branch_arms;
};

nlohmann::json to_json(const ExecutionJob& job);
ExecutionJob parse_job(const nlohmann::json& j);

nlohmann::json to_json(const SuiteExecution& result);
/// Throws Error{ProtocolError} on schema or version mismatch.
SuiteExecution parse_suite_execution(const nlohmann::json& j);
SuiteExecution parse_suite_execution_text(std::string_view document);

class SandboxRunner {
 public:
  virtual ~SandboxRunner() = default;
  /// Throws Error{SandboxCrash} on environment failure.
  virtual SuiteExecution run(const ExecutionJob& job) = 0;
};

/// Spawns `argv` per suite, writes the job to its stdin and reads one
/// result document from its stdout. A nonzero exit is a SandboxCrash.
class ProcessSandbox final : public SandboxRunner {
 public:
  explicit ProcessSandbox(std::vector<std::string> argv);
  SuiteExecution run(const ExecutionJob& job) override;

 private:
  std::vector<std::string> argv_;
  std::string resolved_;
};

/// Serves results recorded earlier, keyed by the SHA-256 of the suite file
/// contents. JSONL lines: {"suite_sha256": ..., "result": {...}}.
class RecordedSandbox final : public SandboxRunner {
 public:
  static RecordedSandbox from_jsonl(std::string_view jsonl);
  static RecordedSandbox from_file(const std::string& path);

  void add(std::string suite_sha256, SuiteExecution result);
  SuiteExecution run(const ExecutionJob& job) override;

 private:
  std::map<std::string, SuiteExecution, std::less<>> table_;
};

}  // namespace pathprompt
