// Regenerates tests/fixtures/e2e/replay.jsonl from completions.json.
//
//   make_e2e_fixtures <fixtures-dir> <scratch-out-dir>
//
// Prompts are answered by test name (variant = seed % count) and the
// exchange is recorded; the generated suites land in <scratch-out-dir> so
// trace_suites.py can record their execution results.
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "pathprompt/file_io.hpp"
#include "pathprompt/pipeline.hpp"

using namespace pathprompt;

namespace {

class CuratedBackend : public Backend {
 public:
  explicit CuratedBackend(nlohmann::json table) : table_(std::move(table)) {}

  std::string complete(const CompletionRequest& req) override {
    const std::string& p = req.prompt_text;
    const std::size_t start = p.rfind("\ndef ");
    const std::size_t open = p.find('(', start);
    const std::string name = p.substr(start + 5, open - start - 5);
    if (!table_.contains(name)) {
      std::cerr << "no curated completion for " << name << "\n";
      return "";
    }
    const auto& variants = table_.at(name);
    const std::size_t k = static_cast<std::size_t>(req.seed.value_or(0)) % variants.size();
    return truncate_at_stop(variants.at(k).get<std::string>(), req.stop_sequences);
  }
  std::string_view kind() const override { return "curated"; }

 private:
  nlohmann::json table_;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: make_e2e_fixtures <fixtures-dir> <scratch-out-dir>\n";
    return 2;
  }
  const std::string fixtures = argv[1];
  const std::string out_dir = argv[2];
  try {
    CuratedBackend curated(nlohmann::json::parse(read_file(fixtures + "/e2e/completions.json")));
    RecordingBackend recorder(curated);
    Config cfg = load_config(fixtures + "/e2e/pipeline.conf");
    const auto specs = load_manifest(fixtures + "/corpus/manifest.jsonl");
    const auto summary = generate_stage(specs, cfg, {Strategy::PathPrompt, Strategy::Baseline, Strategy::NoOp},
                                        out_dir, recorder, 1);
    write_file(fixtures + "/e2e/replay.jsonl", recorder.to_jsonl());
    std::cout << summary.ok << " suites, " << summary.failed << " failures\n";
    return summary.failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
