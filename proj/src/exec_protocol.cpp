#include "pathprompt/exec_protocol.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "pathprompt/errors.hpp"
#include "pathprompt/file_io.hpp"
#include "pathprompt/llm_client.hpp"

extern char** environ;

namespace pathprompt {

namespace {

using nlohmann::json;

[[noreturn]] void protocol_error(const std::string& what) {
  throw Error(ErrorCode::ProtocolError, "sandbox result (protocol_version " +
                                            std::to_string(kProtocolVersion) + "): " + what);
}

json arms_to_json(const std::set<BranchArm>& arms) {
  json out = json::array();
  for (const auto& [a, b] : arms) out.push_back({a, b});
  return out;
}

std::set<BranchArm> arms_from_json(const json& j) {
  std::set<BranchArm> out;
  for (const auto& arm : j) {
    if (!arm.is_array() || arm.size() != 2) protocol_error("branch arm must be a [from, to] pair");
    out.emplace(arm[0].get<std::int64_t>(), arm[1].get<std::int64_t>());
  }
  return out;
}

std::set<std::uint32_t> lines_from_json(const json& j) {
  std::set<std::uint32_t> out;
  for (const auto& l : j) out.insert(l.get<std::uint32_t>());
  return out;
}

// Locates an executable the way execvp would.
std::string resolve_program(const std::string& name) {
  namespace fs = std::filesystem;
  if (name.find('/') != std::string::npos) return ::access(name.c_str(), X_OK) == 0 ? name : "";
  const char* path = std::getenv("PATH");
  std::istringstream dirs(path ? path : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    const fs::path candidate = fs::path(dir.empty() ? "." : dir) / name;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  return "";
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) throw Error(ErrorCode::SandboxCrash, "pipe() failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fd[0] >= 0) ::close(fd[0]);
    fd[0] = -1;
  }
  void close_write() {
    if (fd[1] >= 0) ::close(fd[1]);
    fd[1] = -1;
  }
};

}  // namespace

void ExecutionJob::validate() const {
  if (!(timeout > 0) || !(suite_timeout > 0)) {
    throw Error(ErrorCode::InvalidInput, "execution timeouts must be positive");
  }
  if (focal.first_line == 0 || focal.last_line < focal.first_line) {
    throw Error(ErrorCode::InvalidInput, "focal line span is malformed");
  }
}

std::string_view to_string(TestStatus s) {
  switch (s) {
    case TestStatus::Pass: return "pass";
    case TestStatus::Fail: return "fail";
    case TestStatus::Error: return "error";
    case TestStatus::Timeout: return "timeout";
  }
  return "unknown";
}

TestStatus parse_test_status(std::string_view s) {
  if (s == "pass") return TestStatus::Pass;
  if (s == "fail") return TestStatus::Fail;
  if (s == "error") return TestStatus::Error;
  if (s == "timeout") return TestStatus::Timeout;
  protocol_error("unknown test status '" + std::string(s) + "'");
}

json to_json(const ExecutionJob& job) {
  return {{"protocol_version", kProtocolVersion},
          {"suite_file", job.suite_file},
          {"repo_root", job.repo_root},
          {"focal",
           {{"module_path", job.focal.module_path},
            {"module_name", job.focal.module_name},
            {"qualified_name", job.focal.qualified_name},
            {"first_line", job.focal.first_line},
            {"last_line", job.focal.last_line}}},
          {"timeout", job.timeout},
          {"suite_timeout", job.suite_timeout}};
}

ExecutionJob parse_job(const json& j) {
  try {
    if (j.at("protocol_version").get<int>() != kProtocolVersion) {
      throw Error(ErrorCode::ProtocolError, "unsupported job protocol_version");
    }
    ExecutionJob job;
    job.suite_file = j.at("suite_file").get<std::string>();
    job.repo_root = j.value("repo_root", "");
    const auto& f = j.at("focal");
    job.focal.module_path = f.at("module_path").get<std::string>();
    job.focal.module_name = f.at("module_name").get<std::string>();
    job.focal.qualified_name = f.at("qualified_name").get<std::string>();
    job.focal.first_line = f.at("first_line").get<std::uint32_t>();
    job.focal.last_line = f.at("last_line").get<std::uint32_t>();
    job.timeout = j.value("timeout", 10.0);
    job.suite_timeout = j.value("suite_timeout", 120.0);
    return job;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProtocolError, std::string("malformed execution job: ") + e.what());
  }
}

json to_json(const SuiteExecution& result) {
  json tests = json::array();
  for (const TestResult& t : result.tests) {
    tests.push_back({{"test_name", t.test_name},
                     {"status", to_string(t.status)},
                     {"called_focal", t.called_focal},
                     {"covered_lines", t.covered_lines},
                     {"covered_branches", arms_to_json(t.covered_branches)}});
  }
  return {{"protocol_version", kProtocolVersion},
          {"tests", std::move(tests)},
          {"module_load_coverage",
           {{"lines", result.module_load_coverage.lines},
            {"branches", arms_to_json(result.module_load_coverage.branches)}}},
          {"executable_lines", result.executable_lines},
          {"branch_arms", arms_to_json(result.branch_arms)}};
}

SuiteExecution parse_suite_execution(const json& j) {
  try {
    if (!j.is_object()) protocol_error("document is not an object");
    const int version = j.at("protocol_version").get<int>();
    if (version != kProtocolVersion) {
      protocol_error("peer speaks protocol_version " + std::to_string(version));
    }
    SuiteExecution out;
    for (const auto& t : j.at("tests")) {
      TestResult r;
      r.test_name = t.at("test_name").get<std::string>();
      r.status = parse_test_status(t.at("status").get<std::string>());
      r.called_focal = t.at("called_focal").get<bool>();
      r.covered_lines = lines_from_json(t.at("covered_lines"));
      r.covered_branches = arms_from_json(t.value("covered_branches", json::array()));
      out.tests.push_back(std::move(r));
    }
    const auto& load = j.at("module_load_coverage");
    out.module_load_coverage.lines = lines_from_json(load.at("lines"));
    out.module_load_coverage.branches = arms_from_json(load.value("branches", json::array()));
    out.executable_lines = lines_from_json(j.at("executable_lines"));
    out.branch_arms = arms_from_json(j.value("branch_arms", json::array()));
    return out;
  } catch (const json::exception& e) {
    protocol_error(e.what());
  }
}

SuiteExecution parse_suite_execution_text(std::string_view document) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::exception& e) {
    protocol_error(std::string("not valid JSON: ") + e.what());
  }
  return parse_suite_execution(j);
}

ProcessSandbox::ProcessSandbox(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw Error(ErrorCode::InvalidConfig, "sandbox command is empty");
  resolved_ = resolve_program(argv_[0]);
  if (resolved_.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "sandbox executable '" + argv_[0] +
                    "' not found; install an exec sandbox that speaks protocol_version " +
                    std::to_string(kProtocolVersion) +
                    " (ExecutionJob JSON on stdin, one result JSON on stdout), or set "
                    "sandbox_command / --sandbox, or use --recorded-results");
  }
}

SuiteExecution ProcessSandbox::run(const ExecutionJob& job) {
  job.validate();
  const std::string input = to_json(job).dump() + "\n";

  Pipe in, out, err;
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.fd[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.fd[1], STDERR_FILENO);

  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, resolved_.c_str(), &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::SandboxCrash, "cannot start sandbox '" + resolved_ + "': " + std::strerror(rc));
  }
  in.close_read();
  out.close_write();
  err.close_write();
  ::fcntl(in.fd[1], F_SETFL, O_NONBLOCK);

  std::string stdout_buf, stderr_buf;
  std::size_t written = 0;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(static_cast<long>(job.suite_timeout * 1000) + 5000);
  bool timed_out = false;
  ::signal(SIGPIPE, SIG_IGN);
  while (out.fd[0] >= 0 || err.fd[0] >= 0) {
    std::vector<pollfd> fds;
    if (in.fd[1] >= 0) fds.push_back({in.fd[1], POLLOUT, 0});
    if (out.fd[0] >= 0) fds.push_back({out.fd[0], POLLIN, 0});
    if (err.fd[0] >= 0) fds.push_back({err.fd[0], POLLIN, 0});
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    if (::poll(fds.data(), fds.size(), static_cast<int>(left.count())) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const pollfd& p : fds) {
      if (!p.revents) continue;
      if (p.fd == in.fd[1]) {
        const ssize_t n = ::write(p.fd, input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN) written = input.size();
        if (written == input.size()) in.close_write();
        continue;
      }
      char buf[65536];
      const ssize_t n = ::read(p.fd, buf, sizeof buf);
      const bool is_out = p.fd == out.fd[0];
      if (n > 0) {
        (is_out ? stdout_buf : stderr_buf).append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EAGAIN) {
        (is_out ? out : err).close_read();
      }
    }
  }
  in.close_write();
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) throw Error(ErrorCode::SandboxCrash, "sandbox exceeded the suite timeout");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::string why = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                        : "signal " + std::to_string(WTERMSIG(status));
    if (!stderr_buf.empty()) why += ": " + stderr_buf.substr(0, 500);
    throw Error(ErrorCode::SandboxCrash, "sandbox failed (" + why + ")");
  }
  return parse_suite_execution_text(stdout_buf);
}

RecordedSandbox RecordedSandbox::from_jsonl(std::string_view jsonl) {
  RecordedSandbox out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      out.add(j.at("suite_sha256").get<std::string>(), parse_suite_execution(j.at("result")));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidInput,
                  "recorded results line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

RecordedSandbox RecordedSandbox::from_file(const std::string& path) {
  return from_jsonl(read_file(path));
}

void RecordedSandbox::add(std::string suite_sha256, SuiteExecution result) {
  table_.insert_or_assign(std::move(suite_sha256), std::move(result));
}

SuiteExecution RecordedSandbox::run(const ExecutionJob& job) {
  job.validate();
  const std::string key = sha256_hex(read_file(job.suite_file));
  const auto it = table_.find(key);
  if (it == table_.end()) {
    throw Error(ErrorCode::ReplayMiss, "no recorded execution for suite '" + job.suite_file +
                                           "' (sha256 " + key + ")");
  }
  return it->second;
}

}  // namespace pathprompt
