// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails. Arguments restrict the run to the listed
// criterion numbers.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../unit/oracles.hpp"
#include "dtopics/cluster.hpp"
#include "dtopics/eval.hpp"
#include "dtopics/pipeline.hpp"
#include "dtopics/plda.hpp"
#include "dtopics/synth.hpp"
#include "dtopics/vectorize.hpp"

using namespace dtopics;
namespace fs = std::filesystem;

namespace {

const fs::path kData = DTOPICS_TEST_DATA;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dtopics_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// Top-t term lists of every topic row.
std::vector<std::vector<std::string>> top_lists(const DenseMatrix& phi_m, const Vocabulary& vocab, std::size_t t) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : top_words(phi_m, vocab, t)) {
    std::vector<std::string> words;
    for (const auto& e : s.entries) words.push_back(e.term);
    out.push_back(words);
  }
  return out;
}

// Greedy one-to-one matching on Jaccard; returns the matched scores.
std::vector<double> greedy_jaccard(const std::vector<std::vector<std::string>>& a,
                                   const std::vector<std::vector<std::string>>& b) {
  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  std::vector<double> out;
  for (std::size_t round = 0; round < std::min(a.size(), b.size()); ++round) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (!used_a[i] && !used_b[j] && oracle::jaccard(a[i], b[j]) > best) {
          best = oracle::jaccard(a[i], b[j]);
          bi = i;
          bj = j;
        }
    used_a[bi] = used_b[bj] = true;
    out.push_back(best);
  }
  return out;
}

Outcome reference_configuration() {
  const auto dir = scratch("c1");
  DialogueOptions o;
  o.seed = 1;
  const auto dialogues = synthetic_dialogues(o);
  std::size_t utterances = 0;
  for (const auto& d : dialogues) utterances += d.utterances.size();
  {
    std::ofstream out(dir / "dialogues.tsv", std::ios::binary);
    write_transcript_tsv(out, dialogues);
  }
  RunConfig c;
  c.workdir = dir / "work";
  c.input = (dir / "dialogues.tsv").string();
  c.lda.topics = 3;
  c.lda.alpha = 0.5;
  c.lda.beta = 0.1;
  c.lda.iterations = 1000;
  c.lda.workers = 4;
  c.elbow.workers = 4;
  c.top_words = 10;
  const auto start = std::chrono::steady_clock::now();
  run_all(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto topics = nlohmann::json::parse(slurp(c.workdir / artifacts::topics));
  bool ten_each = topics.size() == 3;
  for (const auto& t : topics) ten_each = ten_each && t.at("words").size() == 10;
  std::size_t svgs = 0;
  for (const auto& e : fs::directory_iterator(c.workdir))
    if (e.path().extension() == ".svg" && e.path().filename().string().rfind("topic_", 0) == 0) ++svgs;
  const auto v = nlohmann::json::parse(slurp(c.workdir / artifacts::vectorize)).at("terms").get<std::size_t>();
  Outcome r;
  r.pass = utterances >= 2000 && secs < 120.0 && ten_each && svgs == 3 && v <= 5000;
  r.detail = std::to_string(utterances) + " utterances, " + fmt(secs, 1) + " s, " + std::to_string(topics.size()) +
             " summaries" + (ten_each ? " of 10 words" : " (wrong sizes)") + ", " + std::to_string(svgs) +
             " clouds, V = " + std::to_string(v);
  fs::remove_all(dir);
  return r;
}

Outcome method_ordering() {
  std::size_t ordered = 0;
  double min_f = 1.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PlantedOptions o;
    o.seed = seed;
    const auto corpus = planted_corpus(o);
    CompareConfig c;
    c.seed = seed;
    const auto r = compare_methods(corpus.docs, c);
    const auto &lda = r.rows[0], &km = r.rows[1], &plda = r.rows[2];
    auto ge = [](const ScoreRow& a, const ScoreRow& b) {
      return a.precision >= b.precision && a.recall >= b.recall && a.f_measure >= b.f_measure;
    };
    const bool ok = ge(plda, km) && ge(km, lda);
    ordered += ok;
    min_f = std::min(min_f, plda.f_measure);
    per_seed += " [" + std::to_string(seed) + ": " + fmt(lda.f_measure) + "/" + fmt(km.f_measure) + "/" +
                fmt(plda.f_measure) + " K=" + std::to_string(plda.clusters) + (ok ? "" : " out of order") + "]";
  }
  Outcome r;
  r.pass = min_f >= 0.85 && ordered >= 4;
  r.detail = "PLDA+Elbow min F " + fmt(min_f) + ", ordering on " + std::to_string(ordered) +
             "/5 seeds; F LDA/KM/PLDA" + per_seed;
  return r;
}

Outcome elbow_blobs() {
  std::size_t hits = 0;
  bool monotone = true;
  std::string picks;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BlobOptions b;
    b.seed = seed;
    const auto blobs = gaussian_blobs(b);
    ElbowOptions o;
    o.k_min = 1;
    o.k_max = 10;
    o.restarts = 8;
    o.seed = seed;
    const auto e = elbow(blobs.rows, o);
    hits += e.selected_k == 5;
    picks += (picks.empty() ? "" : ",") + std::to_string(e.selected_k);
    for (std::size_t i = 1; i < e.wss_curve.size(); ++i) monotone = monotone && e.wss_curve[i] <= e.wss_curve[i - 1];
  }
  return {hits == 10 && monotone, "selected k per seed: " + picks + (monotone ? "; curves non-increasing" : "; curve rises")};
}

Outcome kmeans_oracle() {
  std::ifstream in(kData / "kmeans_small.txt");
  std::string line;
  std::size_t checked = 0, matched = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream h(line);
    std::size_t n, dims, k;
    h >> n >> dims >> k;
    oracle::Rows rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::getline(in, line);
      std::istringstream rs(line);
      std::vector<double> row(dims);
      for (auto& v : row) rs >> v;
      rows.push_back(row);
    }
    if (n > 8 || k > 3) continue;
    KMeansOptions o;
    o.k = k;
    o.restarts = 64;
    o.seed = checked;
    const double got = kmeans(SparseMatrix::from_rows(rows), o).wss;
    const double gap = std::abs(got - oracle::exhaustive_wss(rows, k));
    worst = std::max(worst, gap);
    matched += gap <= 1e-9;
    ++checked;
  }
  std::ostringstream gap;
  gap << worst;
  return {checked > 0 && matched == checked,
          std::to_string(matched) + "/" + std::to_string(checked) + " instances match, worst gap " + gap.str()};
}

bool retally(const LdaModel& m) {
  const std::size_t K = m.num_topics(), V = m.vocab_size();
  std::vector<std::uint64_t> kw(K * V, 0), k_tot(K, 0);
  for (std::size_t d = 0; d < m.num_docs(); ++d) {
    std::vector<std::uint64_t> dk(K, 0);
    for (std::size_t i = 0; i < m.words(d).size(); ++i) {
      const auto k = m.topics(d)[i];
      if (k >= K) return false;
      ++dk[k];
      ++kw[k * V + m.words(d)[i]];
      ++k_tot[k];
    }
    for (std::size_t k = 0; k < K; ++k)
      if (m.n_dk(d, k) != dk[k]) return false;
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (m.n_k(k) != k_tot[k]) return false;
    for (std::size_t w = 0; w < V; ++w)
      if (m.n_kw(k, w) != kw[k * V + w]) return false;
  }
  return true;
}

Outcome sampler_exactness() {
  PlantedOptions po;
  po.seed = 11;
  const auto corpus = planted_corpus(po);
  const auto vocab = build_vocabulary(corpus.docs);
  const auto counts = bow_counts(corpus.docs, vocab);
  std::string detail;
  bool ok = true;
  for (std::size_t workers : {1u, 4u}) {
    LdaConfig c;
    c.iterations = 100;
    c.workers = workers;
    c.seed = 5;
    std::size_t good = 0;
    train(counts, c, [&](const LdaModel& m, std::size_t) { good += retally(m); });
    ok = ok && good == 100;
    detail += "re-tally " + std::to_string(good) + "/100 sweeps with " + std::to_string(workers) + " worker(s); ";
  }
  // Lone token, K=2: removing it leaves all counts zero, so the analytic
  // conditional is uniform.
  LdaConfig c;
  c.topics = 2;
  std::vector<double> observed(2, 0.0);
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    c.seed = static_cast<std::uint64_t>(s);
    LdaModel m(c, 1, {{0}}, {{0}});
    gibbs_sweep(m);
    ++observed[m.topics(0)[0]];
  }
  // Conditional given everything but the resampled token: the empty model.
  const auto cond = conditional(LdaModel(c, 1, {{}}, {{}}), 0, 0);
  double stat = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double e = cond[k] * draws;
    stat += (observed[k] - e) * (observed[k] - e) / e;
  }
  const double p = 1.0 - boost::math::cdf(boost::math::chi_squared(1.0), stat);
  ok = ok && p > 0.01;
  detail += "single-token chi-square p = " + fmt(p);
  return {ok, detail};
}

Outcome parallel_fidelity() {
  PlantedOptions po;
  po.seed = 13;
  const auto corpus = planted_corpus(po);
  const auto full = build_vocabulary(corpus.docs);
  const auto filtered = dictionary_filter(full, tfidf(bow_counts(corpus.docs, full)), DictionaryPolicy{});
  std::vector<std::vector<std::vector<std::string>>> lists;
  for (std::size_t workers : {1u, 4u}) {
    LdaConfig c;
    c.topics = 3;
    c.iterations = 500;
    c.workers = workers;
    c.seed = 9;
    lists.push_back(top_lists(phi(train(filtered.matrix, c)), filtered.vocab, 10));
  }
  const auto scores = greedy_jaccard(lists[0], lists[1]);
  double lo = 1.0;
  std::string detail = "per-topic Jaccard";
  for (double s : scores) {
    lo = std::min(lo, s);
    detail += " " + fmt(s);
  }
  return {lo >= 0.8, detail};
}

Outcome tfidf_oracle() {
  const std::vector<std::vector<std::string>> raw = {{"car", "car", "road", "the"},
                                                     {"car", "rain", "the"},
                                                     {"rain", "rain", "sun", "the"},
                                                     {"road", "sun", "the"},
                                                     {"sun", "the"}};
  std::vector<TokenizedDocument> docs;
  for (const auto& t : raw) {
    TokenizedDocument d;
    d.doc_id = docs.size();
    d.tokens = t;
    docs.push_back(d);
  }
  // ln(5/2) for df = 2, ln(5/3) for df = 3, 0 for "the" (df = 5).
  const double l2 = 0.91629073187415511, l3 = 0.51082562376599068;
  const std::vector<std::map<std::string, double>> expect = {
      {{"car", 2 * l2}, {"road", l2}, {"the", 0.0}},
      {{"car", l2}, {"rain", l2}, {"the", 0.0}},
      {{"rain", 2 * l2}, {"sun", l3}, {"the", 0.0}},
      {{"road", l2}, {"sun", l3}, {"the", 0.0}},
      {{"sun", l3}, {"the", 0.0}}};
  const auto vocab = build_vocabulary(docs);
  const auto m = tfidf(bow_counts(docs, vocab));
  std::size_t checked = 0;
  bool ok = true, zero_exact = true;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto row = m.row(d);
    ok = ok && row.size() == expect[d].size();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& term = vocab.term(row[i].term);
      const double want = expect[d].at(term), got = m.row_weights(d)[i];
      if (want == 0.0) {
        zero_exact = zero_exact && got == 0.0;
      } else {
        ok = ok && std::abs(got - want) <= 1e-12 * std::abs(want);
      }
      ++checked;
    }
  }
  return {ok && zero_exact, std::to_string(checked) + " weights checked; ubiquitous term " +
                                (zero_exact ? "exactly 0" : "non-zero")};
}

Outcome golden_files() {
  const auto dir = scratch("c8");
  RunConfig c;
  c.workdir = dir;
  c.input = (kData / "fixture20.tsv").string();
  const auto ingest = run_ingest(c);
  const auto stats = run_preprocess(c);
  const bool docs_same = slurp(dir / artifacts::documents) == slurp(kData / "golden" / artifacts::documents);
  const bool tokens_same = slurp(dir / artifacts::tokens) == slurp(kData / "golden" / artifacts::tokens);
  fs::remove_all(dir);
  return {docs_same && tokens_same,
          std::string("documents.json ") + (docs_same ? "identical" : "differs") + ", tokens.json " +
              (tokens_same ? "identical" : "differs") + "; " + std::to_string(ingest.backchannels_removed) +
              " backchannels dropped, " + std::to_string(stats.tokens_in - stats.tokens_out) + " tokens filtered"};
}

Outcome metric_properties() {
  std::mt19937_64 rng(2024);
  std::size_t invariant = 0, dominates = 0, optimal = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto parts = oracle::random_partitions(rng, 8, 8);
    // Random injective relabeling of the predicted ids.
    std::set<ClusterId> ids(parts.pred.begin(), parts.pred.end());
    std::vector<ClusterId> fresh(ids.size());
    std::iota(fresh.begin(), fresh.end(), 500);
    std::shuffle(fresh.begin(), fresh.end(), rng);
    std::map<ClusterId, ClusterId> rename;
    std::size_t i = 0;
    for (auto id : ids) rename[id] = fresh[i++];
    std::vector<ClusterId> renamed;
    for (auto p : parts.pred) renamed.push_back(rename[p]);

    const auto h = align_labels(parts.pred, parts.gold, AlignMethod::hungarian);
    const auto g = align_labels(parts.pred, parts.gold, AlignMethod::greedy);
    const auto a = prf(parts.pred, parts.gold, h);
    const auto b = prf(renamed, parts.gold, align_labels(renamed, parts.gold, AlignMethod::hungarian));
    invariant += a.precision == b.precision && a.recall == b.recall && a.f_measure == b.f_measure;
    const auto ho = h.overlap(parts.pred, parts.gold);
    dominates += ho >= g.overlap(parts.pred, parts.gold);
    optimal += ho == oracle::best_overlap(parts.pred, parts.gold);
  }
  return {invariant == trials && dominates == trials && optimal == trials,
          "relabeling invariant " + std::to_string(invariant) + "/1000, hungarian >= greedy " +
              std::to_string(dominates) + "/1000, hungarian = brute force " + std::to_string(optimal) + "/1000"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"reference configuration end to end", reference_configuration},
      {"method ordering on planted corpora", method_ordering},
      {"elbow on five blobs", elbow_blobs},
      {"k-means vs exhaustive optimum", kmeans_oracle},
      {"sampler exactness", sampler_exactness},
      {"parallel fidelity", parallel_fidelity},
      {"tf-idf oracle", tfidf_oracle},
      {"preprocessing golden files", golden_files},
      {"metric properties", metric_properties},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  bool all = true;
  for (std::size_t n = 1; n <= criteria.size(); ++n) {
    if (!only.empty() && !only.count(n)) continue;
    Outcome r;
    try {
      r = criteria[n - 1].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    all = all && r.pass;
    std::cout << "criterion " << n << " " << (r.pass ? "PASS" : "FAIL") << "  " << criteria[n - 1].first << ": "
              << r.detail << std::endl;
  }
  fs::remove_all(fs::temp_directory_path() / ("dtopics_acceptance_" + std::to_string(::getpid())));
  return all ? 0 : 1;
}
