#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtopics/cluster.hpp"
#include "dtopics/plda.hpp"
#include "dtopics/preprocess.hpp"
#include "dtopics/vectorize.hpp"

namespace dtopics {

using ClusterId = std::int64_t;

enum class AlignMethod { hungarian, greedy };
AlignMethod parse_align_method(std::string_view name);
std::string_view to_string(AlignMethod method);

struct LabelAlignment {
  AlignMethod method = AlignMethod::hungarian;
  // Every predicted id appears; nullopt marks an id left unmapped.
  std::map<ClusterId, std::optional<std::string>> mapping;

  // Number of documents whose predicted id maps to their gold label.
  std::size_t overlap(std::span<const ClusterId> pred, std::span<const std::string> gold) const;
};

// Hungarian: one-to-one mapping maximizing total overlap. Greedy: repeatedly
// pairs the largest remaining overlap cell (ties to the lowest predicted id,
// then the lexicographically first label). Pairs with zero overlap are left
// unmapped. Throws UsageError on length mismatch or empty input.
LabelAlignment align_labels(std::span<const ClusterId> pred, std::span<const std::string> gold,
                            AlignMethod method = AlignMethod::hungarian);

struct LabelCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct ScoreRow {
  std::string method;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t clusters = 0;
  LabelAlignment alignment;
  std::map<std::string, LabelCounts> counts;  // per gold label
  std::size_t unmapped_fp = 0;                // documents in unmapped clusters
};

// Micro-averaged precision and recall after mapping predictions through the
// alignment; F is their harmonic mean (0 when both are 0).
ScoreRow prf(std::span<const ClusterId> pred, std::span<const std::string> gold,
             const LabelAlignment& alignment);

struct EvalReport {
  std::vector<ScoreRow> rows;
  std::size_t documents = 0;
};

enum class ElbowTarget { docs, terms };
ElbowTarget parse_elbow_target(std::string_view name);
std::string_view to_string(ElbowTarget target);

struct CompareConfig {
  // K for the LDA baseline and k for the k-means baseline; defaults to the
  // number of distinct gold labels.
  std::optional<std::size_t> fixed_k;
  LdaConfig lda;                 // topics is overridden per method
  DictionaryPolicy dictionary;   // vocabulary of the PLDA+Elbow pipeline
  ElbowOptions elbow;
  ElbowTarget elbow_target = ElbowTarget::docs;
  std::size_t kmeans_restarts = 8;
  AlignMethod align = AlignMethod::hungarian;
  std::uint64_t seed = 0;
};

// Runs three pipelines over the same tokenized documents and scores each
// against the gold labels:
//   LDA                   fixed K on the unfiltered vocabulary, argmax theta
//   Clustering (K-means)  fixed k on document TF-IDF rows
//   PLDA+Elbow method     dictionary filter, elbow-selected K, sharded sampler
// Documents with no tokens are left out; any other document without a gold
// label is a DataError.
EvalReport compare_methods(const std::vector<TokenizedDocument>& docs, const CompareConfig& config);

// Scores the dominant topic of each document of a trained model.
ScoreRow evaluate_model(const LdaModel& model, const std::vector<std::optional<std::string>>& gold,
                        AlignMethod align, std::string method_name);

// Markdown table with the columns Methods | Precision | Recall | F-measures.
std::string report_markdown(const EvalReport& report);
void write_report_json(std::ostream& out, const EvalReport& report);

}  // namespace dtopics
