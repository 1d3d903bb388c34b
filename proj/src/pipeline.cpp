#include "dtopics/pipeline.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "dtopics/error.hpp"
#include "dtopics/random.hpp"

namespace dtopics {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    if (auto item = trim(s.substr(start, end - start)); !item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw UsageError("config key '" + key + "' has an invalid value '" + v + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw UsageError("config key '" + key + "' expects a boolean");
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing artifact '" + path.string() + "'; run the earlier stage first");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void require_workdir(const RunConfig& config) {
  if (!fs::is_directory(config.workdir))
    throw DataError("work directory '" + config.workdir.string() + "' does not exist; run ingest first");
}

struct LoadedMatrix {
  Vocabulary vocab;
  DocTermMatrix matrix;
};

LoadedMatrix load_matrix(const RunConfig& config) {
  require_workdir(config);
  const json manifest = read_json(config.workdir / artifacts::vectorize);
  auto vin = open_in(config.workdir / artifacts::vocabulary);
  Vocabulary vocab = read_vocabulary_csv(vin);
  auto min = open_in(config.workdir / artifacts::matrix);
  DocTermMatrix matrix =
      read_matrix_csv(min, manifest.at("documents").get<std::size_t>(), manifest.at("terms").get<std::size_t>());
  if (matrix.n_terms() != vocab.size()) throw DataError("matrix and vocabulary disagree on the term count");
  return {std::move(vocab), std::move(matrix)};
}

LdaModel load_model(const RunConfig& config) {
  require_workdir(config);
  auto in = open_in(config.workdir / artifacts::model);
  return load_checkpoint(in);
}

// Gold label per token-store document: the stored label, replaced by the
// gold file's entry for its dialogue when a gold file is configured.
std::vector<std::optional<std::string>> gold_for(const RunConfig& config,
                                                 const std::vector<TokenizedDocument>& docs,
                                                 const std::vector<DocSource>& sources) {
  std::vector<std::optional<std::string>> gold;
  for (const auto& d : docs) gold.push_back(d.gold_label);
  if (!config.gold) return gold;
  std::map<std::string, std::string> by_dialogue;
  for (auto& [id, label] : read_gold_labels(*config.gold)) by_dialogue[id] = label;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto it = by_dialogue.find(sources[i].dialogue_id);
    gold[i] = it == by_dialogue.end() ? std::nullopt : std::optional<std::string>(it->second);
  }
  return gold;
}

void write_report(const RunConfig& config, const EvalReport& report) {
  auto md = open_out(config.workdir / artifacts::report_md);
  md << report_markdown(report);
  auto js = open_out(config.workdir / artifacts::report_json);
  write_report_json(js, report);
}

json stats_json(const StageStats& stats) {
  json removed = json::array();
  for (const auto& [stage, n] : stats.removed) removed.push_back({{"stage", to_string(stage)}, {"removed", n}});
  return {{"documents", stats.documents},
          {"tokens_in", stats.tokens_in},
          {"tokens_out", stats.tokens_out},
          {"empty_documents", stats.empty_documents},
          {"stages", removed}};
}

}  // namespace

RunConfig RunConfig::from_ini(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw UsageError("config: key '" + section + "' outside any section");
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      const std::string v = node.data();
      if (name == "run.workdir") c.workdir = trim(v);
      else if (name == "run.seed") c.seed = parse_value<std::uint64_t>(name, v);
      else if (name == "corpus.input") c.input = trim(v);
      else if (name == "corpus.format") c.format = parse_format(trim(v));
      else if (name == "corpus.granularity") c.granularity = parse_granularity(trim(v));
      else if (name == "preprocess.stages") {
        c.preprocess.stages.clear();
        for (const auto& s : split_list(v)) c.preprocess.stages.push_back(parse_stage(s));
      } else if (name == "preprocess.n_char_min") c.preprocess.n_char_min = parse_value<std::size_t>(name, v);
      else if (name == "preprocess.case") c.preprocess.case_mode = parse_case_mode(trim(v));
      else if (name == "preprocess.stopwords") c.preprocess.stopwords = load_term_list(trim(v));
      else if (name == "preprocess.backchannels") c.preprocess.backchannels = load_term_list(trim(v));
      else if (name == "preprocess.drop_backchannels") c.drop_backchannels = parse_bool(name, v);
      else if (name == "preprocess.markup_brackets") c.preprocess.markup_brackets = trim(v);
      else if (name == "preprocess.pos_filter") {
        const auto tags = split_list(v);
        if (tags.empty()) {
          c.preprocess.pos_filter.reset();
        } else {
          c.preprocess.pos_filter.emplace();
          for (const auto& t : tags) c.preprocess.pos_filter->insert(parse_pos_tag(t));
        }
      } else if (name == "vectorize.filter") c.filter_dictionary = parse_bool(name, v);
      else if (name == "vectorize.min_df") c.dictionary.min_df = parse_value<std::size_t>(name, v);
      else if (name == "vectorize.max_df_ratio") c.dictionary.max_df_ratio = parse_value<double>(name, v);
      else if (name == "vectorize.top_m") {
        const auto m = parse_value<std::size_t>(name, v);
        c.dictionary.top_m = m == 0 ? std::nullopt : std::optional<std::size_t>(m);
      } else if (name == "cluster.k_min") c.elbow.k_min = parse_value<std::size_t>(name, v);
      else if (name == "cluster.k_max") c.elbow.k_max = parse_value<std::size_t>(name, v);
      else if (name == "cluster.restarts") c.elbow.restarts = parse_value<std::size_t>(name, v);
      else if (name == "cluster.max_iter") c.elbow.max_iter = parse_value<std::size_t>(name, v);
      else if (name == "cluster.tol") c.elbow.tol = parse_value<double>(name, v);
      else if (name == "cluster.target") c.elbow_target = parse_elbow_target(trim(v));
      else if (name == "cluster.workers") c.elbow.workers = parse_value<std::size_t>(name, v);
      else if (name == "plda.topics") {
        if (trim(v) == "from-elbow") c.topics_from_elbow = true;
        else {
          c.topics_from_elbow = false;
          c.lda.topics = parse_value<std::size_t>(name, v);
        }
      } else if (name == "plda.alpha") c.lda.alpha = parse_value<double>(name, v);
      else if (name == "plda.beta") c.lda.beta = parse_value<double>(name, v);
      else if (name == "plda.iterations") c.lda.iterations = parse_value<std::size_t>(name, v);
      else if (name == "plda.workers") c.lda.workers = parse_value<std::size_t>(name, v);
      else if (name == "topics.top") c.top_words = parse_value<std::size_t>(name, v);
      else if (name == "eval.gold") c.gold = trim(v);
      else if (name == "eval.align") c.align = parse_align_method(trim(v));
      else if (name == "eval.fixed_k") {
        const auto k = parse_value<std::size_t>(name, v);
        c.fixed_k = k == 0 ? std::nullopt : std::optional<std::size_t>(k);
      } else if (name == "eval.kmeans_restarts") c.kmeans_restarts = parse_value<std::size_t>(name, v);
      else if (name == "eval.elbow_target") c.compare_elbow_target = parse_elbow_target(trim(v));
      else throw UsageError("config: unknown key '" + name + "'");
    }
  }
  return c;
}

void RunConfig::apply_environment() {
  if (const char* s = std::getenv("DTOPICS_SEED"); s && *s) seed = parse_value<std::uint64_t>("DTOPICS_SEED", s);
}

std::uint64_t RunConfig::component_seed(std::string_view component) const {
  return derive_seed(seed, component);
}

std::vector<std::pair<std::string, std::string>> read_gold_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gold labels '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(n) + ": expected dialogue_id<TAB>label");
    std::string id = trim(line.substr(0, tab)), label = trim(line.substr(tab + 1));
    if (id.empty() || label.empty()) throw DataError(path + ":" + std::to_string(n) + ": empty field");
    if (!seen.insert(id).second) throw DataError(path + ":" + std::to_string(n) + ": duplicate id '" + id + "'");
    out.emplace_back(std::move(id), std::move(label));
  }
  return out;
}

IngestSummary run_ingest(const RunConfig& config) {
  if (!config.input) throw UsageError("no input transcript given");
  config.preprocess.validate();
  const Transcript transcript = parse_transcript_file(*config.input, config.format);
  IngestSummary summary;
  summary.dialogues = transcript.dialogues.size();
  summary.dropped_turns = transcript.dropped_turns;
  std::vector<Dialogue> dialogues = transcript.dialogues;
  if (config.drop_backchannels) {
    BackchannelReport report;
    dialogues = filter_backchannels(dialogues, config.preprocess, &report);
    summary.backchannels_removed = report.removed_utterances;
  }
  const auto docs = segment(dialogues, config.granularity);
  summary.documents = docs.size();

  json items = json::array();
  for (const auto& d : docs) {
    json item = {{"doc_id", d.doc_id}, {"dialogue_id", d.source.dialogue_id}};
    if (d.source.turn_index) item["turn_index"] = *d.source.turn_index;
    item["text"] = d.text;
    if (d.gold_label) item["label"] = *d.gold_label;
    items.push_back(std::move(item));
  }
  fs::create_directories(config.workdir);
  write_json(config.workdir / artifacts::documents,
             {{"granularity", to_string(config.granularity)},
              {"dialogues", summary.dialogues},
              {"dropped_turns", summary.dropped_turns},
              {"backchannels_removed", summary.backchannels_removed},
              {"documents", std::move(items)}});
  return summary;
}

StageStats run_preprocess(const RunConfig& config) {
  require_workdir(config);
  const json store = read_json(config.workdir / artifacts::documents);
  std::vector<RawDocument> docs;
  std::vector<DocSource> sources;
  try {
    for (const auto& item : store.at("documents")) {
      RawDocument d;
      d.doc_id = item.at("doc_id").get<std::size_t>();
      if (d.doc_id != docs.size()) throw DataError("documents.json: doc ids are not dense");
      d.source.dialogue_id = item.at("dialogue_id").get<std::string>();
      if (item.contains("turn_index")) d.source.turn_index = item["turn_index"].get<std::size_t>();
      d.text = item.at("text").get<std::string>();
      if (item.contains("label")) d.gold_label = item["label"].get<std::string>();
      sources.push_back(d.source);
      docs.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("documents.json: ") + e.what());
  }
  StageStats stats;
  const auto tokens = run_pipeline(docs, config.preprocess, &stats);
  write_tokens_json(config.workdir / artifacts::tokens, tokens, sources, stats);
  return stats;
}

void write_tokens_json(const fs::path& path, const std::vector<TokenizedDocument>& docs,
                       const std::vector<DocSource>& sources, const StageStats& stats) {
  if (sources.size() != docs.size()) throw UsageError("token store needs one source per document");
  json items = json::array();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    json item = {{"doc_id", d.doc_id}, {"dialogue_id", sources[i].dialogue_id}};
    if (sources[i].turn_index) item["turn_index"] = *sources[i].turn_index;
    item["tokens"] = d.tokens;
    if (d.pos_tags) {
      json tags = json::array();
      for (PosTag t : *d.pos_tags) tags.push_back(to_string(t));
      item["pos_tags"] = std::move(tags);
    }
    if (d.gold_label) item["label"] = *d.gold_label;
    items.push_back(std::move(item));
  }
  write_json(path, {{"stats", stats_json(stats)}, {"documents", std::move(items)}});
}

std::vector<TokenizedDocument> read_tokens_json(const fs::path& path, std::vector<DocSource>* sources) {
  const json store = read_json(path);
  std::vector<TokenizedDocument> docs;
  if (sources) sources->clear();
  try {
    for (const auto& item : store.at("documents")) {
      TokenizedDocument d;
      d.doc_id = item.at("doc_id").get<std::size_t>();
      if (d.doc_id != docs.size()) throw DataError(path.string() + ": doc ids are not dense");
      d.tokens = item.at("tokens").get<std::vector<std::string>>();
      if (item.contains("pos_tags")) {
        d.pos_tags.emplace();
        for (const auto& t : item["pos_tags"]) d.pos_tags->push_back(parse_pos_tag(t.get<std::string>()));
      }
      if (item.contains("label")) d.gold_label = item["label"].get<std::string>();
      if (sources) {
        DocSource s{item.at("dialogue_id").get<std::string>(), std::nullopt};
        if (item.contains("turn_index")) s.turn_index = item["turn_index"].get<std::size_t>();
        sources->push_back(std::move(s));
      }
      docs.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return docs;
}

VectorizeSummary run_vectorize(const RunConfig& config) {
  require_workdir(config);
  const auto docs = read_tokens_json(config.workdir / artifacts::tokens);
  Vocabulary vocab = build_vocabulary(docs);
  DocTermMatrix matrix = tfidf(bow_counts(docs, vocab));
  VectorizeSummary summary;
  summary.documents = matrix.n_docs();
  summary.terms_before_filter = vocab.size();
  if (config.filter_dictionary) {
    FilteredCorpus filtered = dictionary_filter(vocab, matrix, config.dictionary);
    if (filtered.vocab.size() == 0)
      throw DataError("dictionary filter removed every term; lower min_df or raise max_df_ratio");
    vocab = std::move(filtered.vocab);
    matrix = std::move(filtered.matrix);
  }
  summary.terms = vocab.size();
  summary.nnz = matrix.nnz();
  {
    auto out = open_out(config.workdir / artifacts::vocabulary);
    write_vocabulary_csv(out, vocab);
  }
  {
    auto out = open_out(config.workdir / artifacts::matrix);
    write_matrix_csv(out, matrix);
  }
  json policy = {{"min_df", config.dictionary.min_df}, {"max_df_ratio", config.dictionary.max_df_ratio}};
  policy["top_m"] = config.dictionary.top_m ? json(*config.dictionary.top_m) : json(nullptr);
  write_json(config.workdir / artifacts::vectorize, {{"documents", summary.documents},
                                                      {"terms", summary.terms},
                                                      {"terms_before_filter", summary.terms_before_filter},
                                                      {"nnz", summary.nnz},
                                                      {"filtered", config.filter_dictionary},
                                                      {"policy", policy}});
  return summary;
}

ElbowResult run_elbow(const RunConfig& config) {
  const auto [vocab, matrix] = load_matrix(config);
  const SparseMatrix features =
      config.elbow_target == ElbowTarget::terms ? term_profiles(matrix) : matrix.weight_rows();
  ElbowOptions options = config.elbow;
  options.seed = config.component_seed("cluster");
  const ElbowResult result = elbow(features, options);
  {
    auto out = open_out(config.workdir / artifacts::elbow_csv);
    write_elbow_csv(out, result);
  }
  auto svg = open_out(config.workdir / artifacts::elbow_svg);
  svg << elbow_svg(result);
  return result;
}

LdaModel run_train(const RunConfig& config) {
  const auto [vocab, matrix] = load_matrix(config);
  LdaConfig lda = config.lda;
  lda.seed = config.component_seed("plda");
  if (config.topics_from_elbow) {
    auto in = open_in(config.workdir / artifacts::elbow_csv);
    lda.topics = read_elbow_csv(in).selected_k;
  }
  LdaModel model = train(matrix, lda, [](const LdaModel& m, std::size_t) { m.check_counts(); });
  {
    auto out = open_out(config.workdir / artifacts::model);
    save_checkpoint(out, model);
  }
  {
    auto out = open_out(config.workdir / artifacts::phi);
    write_phi_csv(out, model, vocab);
  }
  auto out = open_out(config.workdir / artifacts::theta);
  write_theta_csv(out, model);
  return model;
}

std::vector<TopicSummary> run_topics(const RunConfig& config) {
  const auto [vocab, matrix] = load_matrix(config);
  const LdaModel model = load_model(config);
  if (model.vocab_size() != vocab.size()) throw DataError("model and vocabulary disagree on the term count");
  const auto summaries = top_words(phi(model), vocab, config.top_words);
  {
    auto out = open_out(config.workdir / artifacts::topics);
    write_topics_json(out, summaries);
  }
  // Clouds of an earlier, larger model would otherwise linger.
  for (const auto& entry : fs::directory_iterator(config.workdir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("topic_") && name.ends_with(".svg")) fs::remove(entry.path());
  }
  for (const auto& s : summaries) {
    auto out = open_out(config.workdir / ("topic_" + std::to_string(s.topic_id) + ".svg"));
    out << tag_cloud_svg(s);
  }
  return summaries;
}

EvalReport run_eval(const RunConfig& config) {
  require_workdir(config);
  std::vector<DocSource> sources;
  const auto docs = read_tokens_json(config.workdir / artifacts::tokens, &sources);
  const LdaModel model = load_model(config);
  if (model.num_docs() != docs.size()) throw DataError("model and token store disagree on the document count");
  const auto gold = gold_for(config, docs, sources);
  EvalReport report;
  report.rows.push_back(evaluate_model(model, gold, config.align,
                                       config.topics_from_elbow ? "PLDA+Elbow method" : "PLDA"));
  for (std::size_t d = 0; d < docs.size(); ++d)
    if (!model.words(d).empty() && gold[d]) ++report.documents;
  write_report(config, report);
  return report;
}

EvalReport run_compare(const RunConfig& config) {
  require_workdir(config);
  std::vector<DocSource> sources;
  auto docs = read_tokens_json(config.workdir / artifacts::tokens, &sources);
  const auto gold = gold_for(config, docs, sources);
  for (std::size_t i = 0; i < docs.size(); ++i) docs[i].gold_label = gold[i];
  CompareConfig cc;
  cc.fixed_k = config.fixed_k;
  cc.lda = config.lda;
  cc.dictionary = config.dictionary;
  cc.elbow = config.elbow;
  cc.elbow_target = config.compare_elbow_target;
  cc.kmeans_restarts = config.kmeans_restarts;
  cc.align = config.align;
  cc.seed = config.component_seed("eval");
  const EvalReport report = compare_methods(docs, cc);
  write_report(config, report);
  return report;
}

void run_all(const RunConfig& config) {
  run_ingest(config);
  run_preprocess(config);
  run_vectorize(config);
  run_elbow(config);
  run_train(config);
  run_topics(config);
  std::vector<DocSource> sources;
  const auto docs = read_tokens_json(config.workdir / artifacts::tokens, &sources);
  const auto gold = gold_for(config, docs, sources);
  bool labelled = false;
  for (std::size_t i = 0; i < docs.size(); ++i) labelled = labelled || (!docs[i].empty() && gold[i]);
  if (labelled) run_compare(config);
}

}  // namespace dtopics
