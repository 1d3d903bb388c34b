// dtopics: dialogue topic modelling from the command line.
//
// Every subcommand reads and writes artifacts in the work directory, so the
// pipeline can be resumed from any stage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dtopics/error.hpp"
#include "dtopics/pipeline.hpp"
#include "dtopics/synth.hpp"

namespace {

using namespace dtopics;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInvariant = 3 };

void print_stats(const StageStats& s) {
  std::cout << "preprocess: " << s.documents << " documents, " << s.tokens_in << " -> " << s.tokens_out
            << " tokens, " << s.empty_documents << " empty\n";
  for (const auto& [stage, n] : s.removed) std::cout << "  " << to_string(stage) << ": -" << n << '\n';
}

void print_report(const EvalReport& r) {
  std::cout << report_markdown(r) << "(" << r.documents << " documents)\n";
}

void print_topics(const std::vector<TopicSummary>& topics) {
  for (const auto& t : topics) {
    std::cout << "topic " << t.topic_id << ':';
    for (const auto& w : t.entries) std::cout << ' ' << w.term;
    std::cout << '\n';
  }
}

void set_topics(RunConfig& c, const std::string& value) {
  if (value == "from-elbow") {
    c.topics_from_elbow = true;
    return;
  }
  try {
    std::size_t pos = 0;
    const long k = std::stol(value, &pos);
    if (pos != value.size() || k < 1) throw std::invalid_argument(value);
    c.lda.topics = static_cast<std::size_t>(k);
    c.topics_from_elbow = false;
  } catch (const std::logic_error&) {
    throw UsageError("--topics expects a positive integer or 'from-elbow'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic extraction from dialogue transcripts"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path, workdir;
  std::optional<std::uint64_t> seed;
  app.add_option("-c,--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("-w,--workdir", workdir, "Directory holding the intermediate artifacts");
  app.add_option("--seed", seed, "Global seed (overrides the config file and DTOPICS_SEED)");

  std::string input, format_tag, granularity_tag;
  auto* ingest = app.add_subcommand("ingest", "Parse a transcript into documents");
  ingest->add_option("input", input, "Transcript file")->required();
  ingest->add_option("--format", format_tag, "tsv|json")->check(CLI::IsMember({"tsv", "json"}));
  ingest->add_option("--granularity", granularity_tag, "utterance|dialogue")
      ->check(CLI::IsMember({"utterance", "dialogue"}));

  auto* preprocess = app.add_subcommand("preprocess", "Run the preprocessing stages");
  auto* vectorize = app.add_subcommand("vectorize", "Build the vocabulary and TF-IDF matrix");

  std::optional<std::size_t> k_min, k_max, restarts, elbow_workers;
  std::optional<std::string> target;
  auto* elbow_cmd = app.add_subcommand("elbow", "WSS curve and knee selection");
  elbow_cmd->add_option("--k-min", k_min);
  elbow_cmd->add_option("--k-max", k_max);
  elbow_cmd->add_option("--restarts", restarts);
  elbow_cmd->add_option("--target", target, "docs|terms")->check(CLI::IsMember({"docs", "terms"}));
  elbow_cmd->add_option("--workers", elbow_workers);

  std::optional<std::string> topics_arg;
  std::optional<double> alpha, beta;
  std::optional<std::size_t> iterations, workers;
  auto* train_cmd = app.add_subcommand("train", "Fit the topic model");
  train_cmd->add_option("--topics", topics_arg, "K or from-elbow");
  train_cmd->add_option("--alpha", alpha);
  train_cmd->add_option("--beta", beta);
  train_cmd->add_option("--iterations", iterations);
  train_cmd->add_option("--workers", workers);

  std::optional<std::size_t> top;
  auto* topics_cmd = app.add_subcommand("topics", "Top words and tag clouds");
  topics_cmd->add_option("--top", top);

  std::optional<std::string> gold, align;
  auto* eval_cmd = app.add_subcommand("eval", "Score the trained model against gold labels");
  eval_cmd->add_option("--gold", gold, "dialogue_id<TAB>label file")->check(CLI::ExistingFile);
  eval_cmd->add_option("--align", align)->check(CLI::IsMember({"hungarian", "greedy"}));

  auto* compare_cmd = app.add_subcommand("compare", "LDA vs k-means vs PLDA+Elbow");
  compare_cmd->add_option("--gold", gold, "dialogue_id<TAB>label file")->check(CLI::ExistingFile);
  compare_cmd->add_option("--align", align)->check(CLI::IsMember({"hungarian", "greedy"}));

  std::optional<std::string> run_input;
  auto* run_all_cmd = app.add_subcommand("run-all", "Every stage from ingest to compare");
  run_all_cmd->add_option("input", run_input, "Transcript file (else [corpus] input)");

  std::string synth_kind, synth_out;
  std::size_t synth_dialogues = 120, synth_turns = 20;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labelled transcript");
  synth_cmd->add_option("kind", synth_kind, "dialogues|planted")
      ->required()
      ->check(CLI::IsMember({"dialogues", "planted"}));
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--dialogues", synth_dialogues);
  synth_cmd->add_option("--turns", synth_turns);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    RunConfig c = config_path ? RunConfig::from_ini(*config_path) : RunConfig{};
    c.apply_environment();
    if (seed) c.seed = *seed;
    if (workdir) c.workdir = *workdir;

    if (ingest->parsed()) {
      c.input = input;
      if (!format_tag.empty()) c.format = parse_format(format_tag);
      if (!granularity_tag.empty()) c.granularity = parse_granularity(granularity_tag);
      const auto s = run_ingest(c);
      std::cout << "ingest: " << s.dialogues << " dialogues, " << s.documents << " documents, "
                << s.dropped_turns << " blank turns dropped, " << s.backchannels_removed
                << " backchannels removed\n";
    } else if (preprocess->parsed()) {
      print_stats(run_preprocess(c));
    } else if (vectorize->parsed()) {
      const auto s = run_vectorize(c);
      std::cout << "vectorize: " << s.documents << " documents, " << s.terms << " terms (of "
                << s.terms_before_filter << "), " << s.nnz << " non-zeros\n";
    } else if (elbow_cmd->parsed()) {
      if (k_min) c.elbow.k_min = *k_min;
      if (k_max) c.elbow.k_max = *k_max;
      if (restarts) c.elbow.restarts = *restarts;
      if (elbow_workers) c.elbow.workers = *elbow_workers;
      if (target) c.elbow_target = parse_elbow_target(*target);
      const auto r = run_elbow(c);
      std::cout << "elbow: selected k = " << r.selected_k << '\n';
    } else if (train_cmd->parsed()) {
      if (topics_arg) set_topics(c, *topics_arg);
      if (alpha) c.lda.alpha = *alpha;
      if (beta) c.lda.beta = *beta;
      if (iterations) c.lda.iterations = *iterations;
      if (workers) c.lda.workers = *workers;
      const auto m = run_train(c);
      std::cout << "train: K = " << m.num_topics() << ", " << m.num_tokens() << " tokens, "
                << m.sweeps_done() << " sweeps\n";
    } else if (topics_cmd->parsed()) {
      if (top) c.top_words = *top;
      print_topics(run_topics(c));
    } else if (eval_cmd->parsed() || compare_cmd->parsed()) {
      if (gold) c.gold = *gold;
      if (align) c.align = parse_align_method(*align);
      print_report(eval_cmd->parsed() ? run_eval(c) : run_compare(c));
    } else if (run_all_cmd->parsed()) {
      if (run_input) c.input = *run_input;
      run_all(c);
      std::cout << "run-all: artifacts in " << c.workdir.string() << '\n';
    } else if (synth_cmd->parsed()) {
      std::ofstream out(synth_out, std::ios::binary);
      if (!out) throw DataError("cannot write '" + synth_out + "'");
      if (synth_kind == "dialogues") {
        DialogueOptions o;
        o.dialogues = synth_dialogues;
        o.turns = synth_turns;
        o.seed = c.seed;
        write_transcript_tsv(out, synthetic_dialogues(o));
      } else {
        // One dialogue per planted document, a single turn holding its text.
        PlantedOptions o;
        o.seed = c.seed;
        const auto corpus = planted_corpus(o);
        std::vector<Dialogue> dialogues;
        for (const auto& d : corpus.docs) {
          Dialogue dlg{"doc" + std::to_string(d.doc_id), {}, d.gold_label};
          std::string text;
          for (const auto& t : d.tokens) text += (text.empty() ? "" : " ") + t;
          dlg.utterances.push_back({dlg.id, 0, Speaker::A, std::move(text)});
          dialogues.push_back(std::move(dlg));
        }
        write_transcript_tsv(out, dialogues);
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
