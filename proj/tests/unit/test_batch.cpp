#include <atomic>

#include "doctest.h"
#include "fixtures.hpp"
#include "pathprompt/batch.hpp"
#include "random_methods.hpp"

using namespace pathprompt;

namespace {

// Stateless, thread-safe: the completion depends only on the prompt.
class HashBackend : public Backend {
 public:
  std::string complete(const CompletionRequest& req) override {
    ++calls;
    const std::string h = sha256_hex(req.prompt_text);
    if (h[0] == '0') throw Error(ErrorCode::ReplayMiss, "no completion for " + h);
    return "    assert '" + h.substr(0, 12) + "'\n" + (h[1] < '8' ? "    x = (" : "");
  }
  std::string_view kind() const override { return "hash"; }
  std::atomic<int> calls{0};
};

std::vector<AnalysisJob> random_jobs(std::size_t n) {
  testsupport::MethodGenerator gen(1234);
  std::vector<AnalysisJob> jobs;
  for (std::size_t i = 0; i < n; ++i) {
    jobs.push_back({"m" + std::to_string(i) + ".py", gen.next().source, "f"});
  }
  jobs.push_back({"broken.py", "def f(x):\n    return x +\n", "f"});
  jobs.push_back({"missing.py", "def g():\n    pass\n", "f"});
  return jobs;
}

std::string dump(const AnalysisOutcome& o) {
  if (o.error) return "error " + std::string(to_string(o.error->code)) + " " + o.error->message;
  return to_json(*o.analysis).dump();
}

std::string dump(const GenerationOutcome& o) {
  if (o.error) return "error " + std::string(to_string(o.error->code)) + " " + o.error->message;
  return to_json(*o.suite).dump() + o.suite->render_file();
}

}  // namespace

TEST_CASE("run_indexed isolates per-item failures") {
  for (int threads : {1, 4}) {
    std::vector<int> hit(50, 0);
    const auto errors = run_indexed(hit.size(), threads, [&](std::size_t i) {
      hit[i] = 1;
      if (i % 7 == 3) throw Error(ErrorCode::NotFound, "item " + std::to_string(i));
    });
    REQUIRE(errors.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(hit[i] == 1);
      CHECK(errors[i].has_value() == (i % 7 == 3));
    }
    CHECK(errors[3]->code == ErrorCode::NotFound);
    CHECK(errors[3]->message == "item 3");
  }
}

TEST_CASE("parallel analysis matches the serial reference") {
  const auto jobs = random_jobs(150);
  const auto serial = analyze_batch_serial(jobs, {});
  for (int threads : {2, 4}) {
    const auto parallel = analyze_batch_parallel(jobs, {}, threads);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(dump(parallel[i]) == dump(serial[i]));
  }
  CHECK(serial[150].error->code == ErrorCode::InvalidInput);
  CHECK(serial[151].error->code == ErrorCode::NotFound);
}

TEST_CASE("parallel generation matches the serial reference") {
  struct Prepared {
    FocalMethod focal;
    FocalContext ctx;
    std::vector<ExecutionPath> paths;
  };
  testsupport::MethodGenerator gen(99);
  std::vector<Prepared> prepared;
  for (int i = 0; i < 12; ++i) {
    Prepared p{testsupport::focal_in(gen.next().source, "f", "m" + std::to_string(i) + ".py"), {}, {}};
    p.ctx = build_generation_context(p.focal.tree, p.focal, 0);
    p.paths = analyze_paths(p.focal).paths;
    prepared.push_back(std::move(p));
  }
  std::vector<GenerationJob> jobs;
  for (const auto& p : prepared) {
    for (Strategy s : {Strategy::PathPrompt, Strategy::Baseline, Strategy::NoOp}) {
      for (std::size_t k = 0; k < 3; ++k) jobs.push_back({&p.focal, &p.ctx, &p.paths, s, k});
    }
  }
  HashBackend backend;
  const auto serial = generate_batch_serial(jobs, backend, {});
  const auto parallel = generate_batch_parallel(jobs, backend, {}, 4);
  REQUIRE(parallel.size() == serial.size());
  std::size_t errors = 0;
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(dump(parallel[i]) == dump(serial[i]));
    errors += serial[i].error.has_value();
  }
  CHECK(errors > 0);  // some prompts hash to a miss; they fail alone
  CHECK(errors < serial.size());
}
