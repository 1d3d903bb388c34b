#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dtopics/cluster.hpp"
#include "dtopics/corpus.hpp"
#include "dtopics/eval.hpp"
#include "dtopics/plda.hpp"
#include "dtopics/preprocess.hpp"
#include "dtopics/topics.hpp"
#include "dtopics/vectorize.hpp"

namespace dtopics {

// Settings for a whole run. The INI file has one section per module
// ([corpus], [preprocess], [vectorize], [cluster], [plda], [topics], [eval])
// plus [run] for the work directory and the global seed.
struct RunConfig {
  std::filesystem::path workdir = "dtopics_work";
  std::uint64_t seed = 42;

  std::optional<std::string> input;
  TranscriptFormat format = TranscriptFormat::tsv;
  Granularity granularity = Granularity::utterance;

  PipelineConfig preprocess;
  bool drop_backchannels = true;

  DictionaryPolicy dictionary;
  bool filter_dictionary = true;

  ElbowOptions elbow;  // seed is derived per run
  ElbowTarget elbow_target = ElbowTarget::terms;

  LdaConfig lda;  // seed is derived per run
  bool topics_from_elbow = false;

  std::size_t top_words = 10;

  std::optional<std::string> gold;
  AlignMethod align = AlignMethod::hungarian;
  std::optional<std::size_t> fixed_k;
  std::size_t kmeans_restarts = 8;
  ElbowTarget compare_elbow_target = ElbowTarget::docs;

  // Unknown sections or keys are UsageErrors.
  static RunConfig from_ini(const std::string& path);
  // DTOPICS_SEED, when set, replaces the configured seed.
  void apply_environment();

  std::uint64_t component_seed(std::string_view component) const;
};

// File names inside the work directory.
namespace artifacts {
inline constexpr const char* documents = "documents.json";
inline constexpr const char* tokens = "tokens.json";
inline constexpr const char* vocabulary = "vocabulary.csv";
inline constexpr const char* matrix = "matrix.csv";
inline constexpr const char* vectorize = "vectorize.json";
inline constexpr const char* elbow_csv = "elbow.csv";
inline constexpr const char* elbow_svg = "elbow.svg";
inline constexpr const char* model = "model.json";
inline constexpr const char* phi = "phi.csv";
inline constexpr const char* theta = "theta.csv";
inline constexpr const char* topics = "topics.json";
inline constexpr const char* report_md = "report.md";
inline constexpr const char* report_json = "report.json";
}  // namespace artifacts

struct IngestSummary {
  std::size_t dialogues = 0;
  std::size_t documents = 0;
  std::size_t dropped_turns = 0;
  std::size_t backchannels_removed = 0;
};

struct VectorizeSummary {
  std::size_t documents = 0;
  std::size_t terms_before_filter = 0;
  std::size_t terms = 0;
  std::size_t nnz = 0;
};

// Stage runners. Each reads the previous stage's artifacts from the work
// directory and writes its own; DataError when an input artifact is absent.
IngestSummary run_ingest(const RunConfig& config);
StageStats run_preprocess(const RunConfig& config);
VectorizeSummary run_vectorize(const RunConfig& config);
ElbowResult run_elbow(const RunConfig& config);
LdaModel run_train(const RunConfig& config);
std::vector<TopicSummary> run_topics(const RunConfig& config);
EvalReport run_eval(const RunConfig& config);
EvalReport run_compare(const RunConfig& config);

// Every stage in order; compare runs when the documents carry gold labels.
void run_all(const RunConfig& config);

// Token store round trip, shared with the tests.
void write_tokens_json(const std::filesystem::path& path, const std::vector<TokenizedDocument>& docs,
                       const std::vector<DocSource>& sources, const StageStats& stats);
std::vector<TokenizedDocument> read_tokens_json(const std::filesystem::path& path,
                                                std::vector<DocSource>* sources = nullptr);

// "dialogue_id<TAB>label" per line; '#' comments and blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_gold_labels(const std::string& path);

}  // namespace dtopics
