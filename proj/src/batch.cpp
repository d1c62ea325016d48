#include "pathprompt/batch.hpp"

#include <map>

#include "pathprompt/python_parser.hpp"

namespace pathprompt {

namespace detail {

ItemError capture_current_exception() {
  try {
    throw;
  } catch (const Error& e) {
    return {e.code(), e.what()};
  } catch (const std::exception& e) {
    return {ErrorCode::InvalidInput, e.what()};
  } catch (...) {
    return {ErrorCode::InvalidInput, "unknown exception"};
  }
}

void parallel_for_dynamic(std::size_t n, int threads, void (*fn)(std::size_t, void*), void* ctx) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i), ctx);
}

}  // namespace detail

namespace {

std::vector<AnalysisOutcome> analyze_batch(const std::vector<AnalysisJob>& jobs,
                                           const AnalysisOptions& options, int threads) {
  std::vector<AnalysisOutcome> out(jobs.size());
  const auto errors = run_indexed(jobs.size(), threads, [&](std::size_t i) {
    const SyntaxTree tree = parse_source(jobs[i].source);
    const FocalMethod focal = locate_focal_method(tree, jobs[i].qualified_name, jobs[i].file);
    out[i].analysis = analyze_paths(focal, options);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i].error = errors[i];
  return out;
}

std::vector<GenerationOutcome> generate_batch(const std::vector<GenerationJob>& jobs, Backend& backend,
                                              const GenerationConfig& cfg, int threads) {
  // Group by focal method so that each focal method's jobs stay sequential.
  std::map<const FocalMethod*, std::vector<std::size_t>> groups;
  std::vector<const FocalMethod*> order;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(jobs[i].focal);
    if (inserted) order.push_back(jobs[i].focal);
    it->second.push_back(i);
  }
  std::vector<GenerationOutcome> out(jobs.size());
  run_indexed(order.size(), threads, [&](std::size_t g) {
    for (const std::size_t i : groups.at(order[g])) {
      const GenerationJob& job = jobs[i];
      try {
        out[i].suite =
            generate_suite(*job.focal, *job.context, *job.paths, job.strategy, backend, cfg, job.sample);
      } catch (...) {
        out[i].error = detail::capture_current_exception();
      }
    }
  });
  return out;
}

}  // namespace

std::vector<AnalysisOutcome> analyze_batch_serial(const std::vector<AnalysisJob>& jobs,
                                                  const AnalysisOptions& options) {
  return analyze_batch(jobs, options, 1);
}

std::vector<AnalysisOutcome> analyze_batch_parallel(const std::vector<AnalysisJob>& jobs,
                                                    const AnalysisOptions& options, int threads) {
  return analyze_batch(jobs, options, std::max(threads, 2));
}

std::vector<GenerationOutcome> generate_batch_serial(const std::vector<GenerationJob>& jobs,
                                                     Backend& backend, const GenerationConfig& cfg) {
  return generate_batch(jobs, backend, cfg, 1);
}

std::vector<GenerationOutcome> generate_batch_parallel(const std::vector<GenerationJob>& jobs,
                                                       Backend& backend, const GenerationConfig& cfg,
                                                       int threads) {
  return generate_batch(jobs, backend, cfg, std::max(threads, 2));
}

}  // namespace pathprompt
