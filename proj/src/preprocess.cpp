#include "dtopics/preprocess.hpp"

#include <fstream>

#include "dtopics/error.hpp"
#include "unicode.hpp"

namespace dtopics {
namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::markup, "markup"},     {Stage::pos_tag, "pos"},
    {Stage::punctuation, "punctuation"}, {Stage::number, "number"},
    {Stage::n_char, "nchar"},      {Stage::stopword, "stopword"},
    {Stage::case_fold, "case"},
};

constexpr std::pair<PosTag, std::string_view> kTagNames[] = {
    {PosTag::NOUN, "NOUN"}, {PosTag::VERB, "VERB"}, {PosTag::ADJ, "ADJ"},
    {PosTag::ADV, "ADV"},   {PosTag::PRON, "PRON"}, {PosTag::DET, "DET"},
    {PosTag::PREP, "PREP"}, {PosTag::CONJ, "CONJ"}, {PosTag::NUM, "NUM"},
    {PosTag::OTHER, "OTHER"},
};

// Keeps tokens (and their tags) for which keep(index, token) is true.
template <typename Pred>
void retain_tokens(TokenizedDocument& doc, Pred keep) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (!keep(i, doc.tokens[i])) continue;
    if (out != i) {
      doc.tokens[out] = std::move(doc.tokens[i]);
      if (doc.pos_tags) (*doc.pos_tags)[out] = (*doc.pos_tags)[i];
    }
    ++out;
  }
  doc.tokens.resize(out);
  if (doc.pos_tags) doc.pos_tags->resize(out);
}

// Removes bracketed spans from the space-joined token stream. An opener with
// no matching closer is left in place.
void strip_markup(TokenizedDocument& doc, std::string_view brackets) {
  std::string joined;
  std::vector<std::size_t> owner;
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    if (t > 0) {
      joined += ' ';
      owner.push_back(SIZE_MAX);
    }
    joined += doc.tokens[t];
    owner.insert(owner.end(), doc.tokens[t].size(), t);
  }
  std::vector<bool> removed(joined.size(), false);
  for (std::size_t i = 0; i < joined.size(); ++i) {
    std::size_t pair = brackets.size();
    for (std::size_t b = 0; b + 1 < brackets.size(); b += 2) {
      if (joined[i] == brackets[b]) {
        pair = b;
        break;
      }
    }
    if (pair == brackets.size()) continue;
    const std::size_t close = joined.find(brackets[pair + 1], i + 1);
    if (close == std::string::npos) continue;
    for (std::size_t j = i; j <= close; ++j) removed[j] = true;
    i = close;
  }
  for (auto& tok : doc.tokens) tok.clear();
  for (std::size_t i = 0; i < joined.size(); ++i) {
    if (!removed[i] && owner[i] != SIZE_MAX) doc.tokens[owner[i]] += joined[i];
  }
  retain_tokens(doc, [](std::size_t, const std::string& t) { return !t.empty(); });
}

std::string normalize_backchannel(std::string_view text) {
  std::string folded = unicode::to_lower(unicode::strip_punctuation(unicode::nfc(text)));
  std::string out;
  for (const auto& tok : unicode::split_whitespace(folded)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

}  // namespace

Stage parse_stage(std::string_view name) {
  for (const auto& [stage, n] : kStageNames)
    if (n == name) return stage;
  throw UsageError("unknown stage id '" + std::string(name) + "'");
}

std::string_view to_string(Stage stage) {
  for (const auto& [s, n] : kStageNames)
    if (s == stage) return n;
  return "?";
}

PosTag parse_pos_tag(std::string_view name) {
  for (const auto& [tag, n] : kTagNames)
    if (n == name) return tag;
  throw UsageError("unknown POS tag '" + std::string(name) + "'");
}

std::string_view to_string(PosTag tag) {
  for (const auto& [t, n] : kTagNames)
    if (t == tag) return n;
  return "?";
}

CaseMode parse_case_mode(std::string_view name) {
  if (name == "lower") return CaseMode::lower;
  if (name == "upper") return CaseMode::upper;
  throw UsageError("case must be 'lower' or 'upper'");
}

std::vector<Stage> default_stages() {
  return {Stage::markup, Stage::pos_tag, Stage::punctuation, Stage::number,
          Stage::n_char, Stage::stopword, Stage::case_fold};
}

const std::unordered_set<std::string>& default_backchannels() {
  static const std::unordered_set<std::string> list = {"uh-huh", "okay", "right", "oh",
                                                       "um-hum"};
  return list;
}

void PipelineConfig::validate() const {
  if (stages.empty()) throw UsageError("pipeline needs at least one stage");
  if (n_char_min < 1) throw UsageError("n_char_min must be at least 1");
  if (markup_brackets.size() % 2 != 0)
    throw UsageError("markup brackets must be given as open/close pairs");
}

std::vector<Dialogue> filter_backchannels(const std::vector<Dialogue>& dialogues,
                                          const PipelineConfig& config,
                                          BackchannelReport* report) {
  std::unordered_set<std::string> normalized;
  for (const auto& entry : config.backchannels) normalized.insert(normalize_backchannel(entry));

  std::vector<Dialogue> out;
  out.reserve(dialogues.size());
  for (const Dialogue& d : dialogues) {
    Dialogue kept{d.id, {}, d.gold_label};
    for (const Utterance& u : d.utterances) {
      if (normalized.count(normalize_backchannel(u.text))) {
        if (report) ++report->removed_utterances;
        continue;
      }
      Utterance copy = u;
      copy.turn_index = kept.utterances.size();
      kept.utterances.push_back(std::move(copy));
    }
    if (kept.utterances.empty() && report) report->emptied_dialogues.push_back(d.id);
    out.push_back(std::move(kept));
  }
  return out;
}

TokenizedDocument tokenize(const RawDocument& doc) {
  TokenizedDocument out;
  out.doc_id = doc.doc_id;
  out.gold_label = doc.gold_label;
  out.tokens = unicode::split_whitespace(unicode::nfc(doc.text));
  return out;
}

TokenizedDocument pos_tag(TokenizedDocument doc, const PipelineConfig& config) {
  std::vector<PosTag> tags;
  tags.reserve(doc.tokens.size());
  for (const auto& tok : doc.tokens) tags.push_back(tag_word(tok));
  doc.pos_tags = std::move(tags);
  if (config.pos_filter) {
    // retain_tokens only writes below the index it is testing, so reading
    // the live tag vector is safe.
    const auto& keep = *config.pos_filter;
    const auto& assigned = *doc.pos_tags;
    retain_tokens(doc, [&](std::size_t i, const std::string&) { return keep.count(assigned[i]) > 0; });
  }
  return doc;
}

TokenizedDocument apply_stage(TokenizedDocument doc, Stage stage, const PipelineConfig& config) {
  switch (stage) {
    case Stage::markup:
      strip_markup(doc, config.markup_brackets);
      break;
    case Stage::pos_tag:
      doc = pos_tag(std::move(doc), config);
      break;
    case Stage::punctuation:
      for (auto& tok : doc.tokens) tok = unicode::strip_punctuation(tok);
      retain_tokens(doc, [](std::size_t, const std::string& t) { return !t.empty(); });
      break;
    case Stage::number:
      retain_tokens(doc, [](std::size_t, const std::string& t) { return !unicode::has_digit(t); });
      break;
    case Stage::n_char:
      retain_tokens(doc, [&](std::size_t, const std::string& t) {
        return unicode::length(t) >= config.n_char_min;
      });
      break;
    case Stage::stopword:
      retain_tokens(doc, [&](std::size_t, const std::string& t) {
        return config.stopwords.count(unicode::to_lower(t)) == 0;
      });
      break;
    case Stage::case_fold:
      for (auto& tok : doc.tokens)
        tok = config.case_mode == CaseMode::lower ? unicode::to_lower(tok) : unicode::to_upper(tok);
      break;
    default:
      throw UsageError("unknown stage id");
  }
  return doc;
}

std::vector<TokenizedDocument> run_pipeline(const std::vector<RawDocument>& docs,
                                            const PipelineConfig& config, StageStats* stats) {
  config.validate();
  if (stats) {
    *stats = StageStats{};
    for (Stage s : config.stages) stats->removed.emplace_back(s, 0);
  }
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (const RawDocument& raw : docs) {
    TokenizedDocument doc = tokenize(raw);
    if (stats) stats->tokens_in += doc.tokens.size();
    for (std::size_t i = 0; i < config.stages.size(); ++i) {
      const std::size_t before = doc.tokens.size();
      doc = apply_stage(std::move(doc), config.stages[i], config);
      if (stats) stats->removed[i].second += before - doc.tokens.size();
    }
    if (stats) {
      ++stats->documents;
      stats->tokens_out += doc.tokens.size();
      if (doc.empty()) ++stats->empty_documents;
    }
    out.push_back(std::move(doc));
  }
  return out;
}

std::unordered_set<std::string> load_term_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open term list '" + path + "'");
  std::unordered_set<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r\n");
    terms.insert(line.substr(b, e - b + 1));
  }
  return terms;
}

}  // namespace dtopics
