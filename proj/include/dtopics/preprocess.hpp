#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dtopics/corpus.hpp"

namespace dtopics {

enum class Stage { markup, pos_tag, punctuation, number, n_char, stopword, case_fold };

enum class CaseMode { lower, upper };

enum class PosTag { NOUN, VERB, ADJ, ADV, PRON, DET, PREP, CONJ, NUM, OTHER };

Stage parse_stage(std::string_view name);
std::string_view to_string(Stage stage);
PosTag parse_pos_tag(std::string_view name);
std::string_view to_string(PosTag tag);
CaseMode parse_case_mode(std::string_view name);

// Markup filter, tagger, punctuation eraser, number filter, N-char filter,
// stop-word filter, case converter.
std::vector<Stage> default_stages();
const std::unordered_set<std::string>& default_stopwords();
const std::unordered_set<std::string>& default_backchannels();

struct PipelineConfig {
  std::vector<Stage> stages = default_stages();
  std::size_t n_char_min = 3;
  CaseMode case_mode = CaseMode::lower;
  std::unordered_set<std::string> stopwords = default_stopwords();
  std::unordered_set<std::string> backchannels = default_backchannels();
  std::optional<std::set<PosTag>> pos_filter;
  // Opening/closing pairs of the spans removed by the markup filter.
  std::string markup_brackets = "<>[]{}";

  void validate() const;
};

struct TokenizedDocument {
  std::size_t doc_id = 0;
  std::vector<std::string> tokens;
  std::optional<std::vector<PosTag>> pos_tags;  // parallel to tokens
  std::optional<std::string> gold_label;

  // Documents emptied by filtering are kept in place and skipped downstream.
  bool empty() const { return tokens.empty(); }
};

struct BackchannelReport {
  std::size_t removed_utterances = 0;
  std::vector<std::string> emptied_dialogues;
};

// Drops utterances whose case-folded, punctuation-stripped text equals a
// backchannel entry, then re-densifies turn indices. Dialogues left without
// turns are kept (and listed in the report) so ids stay stable.
std::vector<Dialogue> filter_backchannels(const std::vector<Dialogue>& dialogues,
                                          const PipelineConfig& config,
                                          BackchannelReport* report = nullptr);

// NFC-normalizes and splits on white space.
TokenizedDocument tokenize(const RawDocument& doc);

TokenizedDocument apply_stage(TokenizedDocument doc, Stage stage, const PipelineConfig& config);

// Lexicon, plural stems and suffix rules, ignoring case and surrounding
// punctuation. Unknown words default to NOUN.
PosTag tag_word(std::string_view word);
TokenizedDocument pos_tag(TokenizedDocument doc, const PipelineConfig& config);

struct StageStats {
  std::size_t documents = 0;
  std::size_t tokens_in = 0;
  std::size_t tokens_out = 0;
  std::size_t empty_documents = 0;
  std::vector<std::pair<Stage, std::size_t>> removed;  // per configured stage
};

std::vector<TokenizedDocument> run_pipeline(const std::vector<RawDocument>& docs,
                                            const PipelineConfig& config,
                                            StageStats* stats = nullptr);

// One term per line, UTF-8, '#' starts a comment.
std::unordered_set<std::string> load_term_list(const std::string& path);

}  // namespace dtopics
