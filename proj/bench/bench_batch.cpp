// Serial reference kernels vs. their OpenMP counterparts.
//   pathprompt_bench --benchmark_filter=Analyze
#include <benchmark/benchmark.h>

#include "pathprompt/batch.hpp"
#include "pathprompt/python_parser.hpp"
#include "random_methods.hpp"

using namespace pathprompt;

namespace {

const std::vector<AnalysisJob>& analysis_jobs() {
  static const std::vector<AnalysisJob> jobs = [] {
    testsupport::MethodGenerator gen(42, 10, 4);
    std::vector<AnalysisJob> out;
    for (int i = 0; i < 512; ++i) out.push_back({"m" + std::to_string(i) + ".py", gen.next().source, "f"});
    return out;
  }();
  return jobs;
}

// Answers instantly, so the benchmark measures prompt assembly and repair.
class EchoBackend : public Backend {
 public:
  std::string complete(const CompletionRequest& req) override {
    return "    assert f(" + std::to_string(req.prompt_text.size() % 97) + ") is not None\n";
  }
  std::string_view kind() const override { return "echo"; }
};

struct GenerationWorkload {
  std::vector<FocalMethod> focals;
  std::vector<FocalContext> contexts;
  std::vector<std::vector<ExecutionPath>> paths;
  std::vector<GenerationJob> jobs;

  GenerationWorkload() {
    testsupport::MethodGenerator gen(7, 8, 3);
    for (int i = 0; i < 64; ++i) {
      focals.push_back(locate_focal_method(parse_source(gen.next().source), "f", "m.py"));
    }
    for (const FocalMethod& f : focals) {
      contexts.push_back(build_generation_context(f.tree, f, 0));
      paths.push_back(analyze_paths(f).paths);
    }
    for (std::size_t i = 0; i < focals.size(); ++i) {
      for (std::size_t k = 0; k < 4; ++k) jobs.push_back({&focals[i], &contexts[i], &paths[i], Strategy::PathPrompt, k});
    }
  }
};

const GenerationWorkload& generation_workload() {
  static const GenerationWorkload w;
  return w;
}

void BM_AnalyzeSerial(benchmark::State& state) {
  const auto& jobs = analysis_jobs();
  for (auto _ : state) benchmark::DoNotOptimize(analyze_batch_serial(jobs, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(jobs.size()));
}
BENCHMARK(BM_AnalyzeSerial)->Unit(benchmark::kMillisecond);

void BM_AnalyzeParallel(benchmark::State& state) {
  const auto& jobs = analysis_jobs();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analyze_batch_parallel(jobs, {}, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(jobs.size()));
}
BENCHMARK(BM_AnalyzeParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GenerateSerial(benchmark::State& state) {
  const auto& w = generation_workload();
  EchoBackend backend;
  for (auto _ : state) benchmark::DoNotOptimize(generate_batch_serial(w.jobs, backend, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.jobs.size()));
}
BENCHMARK(BM_GenerateSerial)->Unit(benchmark::kMillisecond);

void BM_GenerateParallel(benchmark::State& state) {
  const auto& w = generation_workload();
  EchoBackend backend;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_batch_parallel(w.jobs, backend, {}, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.jobs.size()));
}
BENCHMARK(BM_GenerateParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
