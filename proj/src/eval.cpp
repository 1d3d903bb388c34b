#include "dtopics/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dtopics/error.hpp"
#include "dtopics/random.hpp"

namespace dtopics {
namespace {

struct OverlapTable {
  std::vector<ClusterId> pred_ids;      // sorted
  std::vector<std::string> gold_labels; // sorted
  std::vector<std::vector<std::size_t>> cells;  // [pred][gold]
};

OverlapTable tabulate(std::span<const ClusterId> pred, std::span<const std::string> gold) {
  if (pred.size() != gold.size()) throw UsageError("prediction and gold lengths differ");
  if (pred.empty()) throw UsageError("cannot align empty assignments");
  OverlapTable t;
  t.pred_ids.assign(pred.begin(), pred.end());
  std::sort(t.pred_ids.begin(), t.pred_ids.end());
  t.pred_ids.erase(std::unique(t.pred_ids.begin(), t.pred_ids.end()), t.pred_ids.end());
  t.gold_labels.assign(gold.begin(), gold.end());
  std::sort(t.gold_labels.begin(), t.gold_labels.end());
  t.gold_labels.erase(std::unique(t.gold_labels.begin(), t.gold_labels.end()), t.gold_labels.end());
  t.cells.assign(t.pred_ids.size(), std::vector<std::size_t>(t.gold_labels.size(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = std::lower_bound(t.pred_ids.begin(), t.pred_ids.end(), pred[i]) - t.pred_ids.begin();
    const auto g = std::lower_bound(t.gold_labels.begin(), t.gold_labels.end(), gold[i]) - t.gold_labels.begin();
    ++t.cells[static_cast<std::size_t>(p)][static_cast<std::size_t>(g)];
  }
  return t;
}

// Minimum-cost perfect matching on a square matrix (Kuhn-Munkres with
// potentials). Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<std::int64_t>>& cost) {
  const std::size_t n = cost.size();
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

AlignMethod parse_align_method(std::string_view name) {
  if (name == "hungarian") return AlignMethod::hungarian;
  if (name == "greedy") return AlignMethod::greedy;
  throw UsageError("alignment must be 'hungarian' or 'greedy'");
}

std::string_view to_string(AlignMethod method) {
  return method == AlignMethod::hungarian ? "hungarian" : "greedy";
}

ElbowTarget parse_elbow_target(std::string_view name) {
  if (name == "docs") return ElbowTarget::docs;
  if (name == "terms") return ElbowTarget::terms;
  throw UsageError("elbow target must be 'docs' or 'terms'");
}

std::string_view to_string(ElbowTarget target) {
  return target == ElbowTarget::docs ? "docs" : "terms";
}

std::size_t LabelAlignment::overlap(std::span<const ClusterId> pred,
                                    std::span<const std::string> gold) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto it = mapping.find(pred[i]);
    if (it != mapping.end() && it->second && *it->second == gold[i]) ++n;
  }
  return n;
}

LabelAlignment align_labels(std::span<const ClusterId> pred, std::span<const std::string> gold,
                            AlignMethod method) {
  const OverlapTable t = tabulate(pred, gold);
  const std::size_t P = t.pred_ids.size(), G = t.gold_labels.size();
  LabelAlignment a;
  a.method = method;
  for (ClusterId id : t.pred_ids) a.mapping[id] = std::nullopt;

  if (method == AlignMethod::hungarian) {
    const std::size_t n = std::max(P, G);
    std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t g = 0; g < G; ++g) cost[p][g] = -static_cast<std::int64_t>(t.cells[p][g]);
    const auto match = hungarian(cost);
    for (std::size_t p = 0; p < P; ++p)
      if (match[p] < G && t.cells[p][match[p]] > 0) a.mapping[t.pred_ids[p]] = t.gold_labels[match[p]];
  } else {
    std::vector<bool> row_used(P, false), col_used(G, false);
    for (;;) {
      std::size_t best = 0, bp = P, bg = G;
      for (std::size_t p = 0; p < P; ++p) {
        if (row_used[p]) continue;
        for (std::size_t g = 0; g < G; ++g) {
          if (!col_used[g] && t.cells[p][g] > best) {
            best = t.cells[p][g];
            bp = p;
            bg = g;
          }
        }
      }
      if (best == 0) break;
      row_used[bp] = col_used[bg] = true;
      a.mapping[t.pred_ids[bp]] = t.gold_labels[bg];
    }
  }
  return a;
}

ScoreRow prf(std::span<const ClusterId> pred, std::span<const std::string> gold,
             const LabelAlignment& alignment) {
  if (pred.size() != gold.size()) throw UsageError("prediction and gold lengths differ");
  ScoreRow row;
  row.alignment = alignment;
  for (const auto& g : gold) row.counts[g];
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto it = alignment.mapping.find(pred[i]);
    const std::optional<std::string> mapped =
        it == alignment.mapping.end() ? std::nullopt : it->second;
    if (mapped && *mapped == gold[i]) {
      ++row.counts[gold[i]].tp;
      ++tp;
      continue;
    }
    if (mapped) {
      ++row.counts[*mapped].fp;
    } else {
      ++row.unmapped_fp;
    }
    ++fp;
    ++row.counts[gold[i]].fn;
    ++fn;
  }
  row.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  row.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  const double sum = row.precision + row.recall;
  row.f_measure = sum > 0.0 ? 2.0 * row.precision * row.recall / sum : 0.0;
  std::set<ClusterId> ids(pred.begin(), pred.end());
  row.clusters = ids.size();
  return row;
}

ScoreRow evaluate_model(const LdaModel& model, const std::vector<std::optional<std::string>>& gold,
                        AlignMethod align, std::string method_name) {
  if (gold.size() != model.num_docs()) throw DataError("gold labels do not cover the model's documents");
  const auto topics = dominant_topics(model);
  std::vector<ClusterId> pred;
  std::vector<std::string> labels;
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    if (model.words(d).empty() || !gold[d]) continue;
    pred.push_back(topics[d]);
    labels.push_back(*gold[d]);
  }
  if (pred.empty()) throw DataError("no labeled, non-empty documents to evaluate");
  ScoreRow row = prf(pred, labels, align_labels(pred, labels, align));
  row.method = std::move(method_name);
  row.clusters = model.num_topics();
  return row;
}

EvalReport compare_methods(const std::vector<TokenizedDocument>& docs, const CompareConfig& config) {
  std::vector<TokenizedDocument> kept;
  std::vector<std::string> gold;
  for (const auto& d : docs) {
    if (d.empty()) continue;
    if (!d.gold_label) throw DataError("document " + std::to_string(d.doc_id) + " has no gold label");
    kept.push_back(d);
    gold.push_back(*d.gold_label);
  }
  if (kept.empty()) throw DataError("no non-empty documents to compare on");
  const std::size_t n_labels = std::set<std::string>(gold.begin(), gold.end()).size();
  const std::size_t fixed_k = config.fixed_k.value_or(n_labels);

  const Vocabulary vocab = build_vocabulary(kept);
  const DocTermMatrix weighted = tfidf(bow_counts(kept, vocab));

  EvalReport report;
  report.documents = kept.size();
  auto score = [&](std::string name, const std::vector<ClusterId>& pred, std::size_t clusters) {
    ScoreRow row = prf(pred, gold, align_labels(pred, gold, config.align));
    row.method = std::move(name);
    row.clusters = clusters;
    report.rows.push_back(std::move(row));
  };
  auto lda_labels = [](const LdaModel& model) {
    const auto topics = dominant_topics(model);
    return std::vector<ClusterId>(topics.begin(), topics.end());
  };

  {
    LdaConfig lda = config.lda;
    lda.topics = fixed_k;
    lda.workers = 1;
    lda.seed = derive_seed(config.seed, "compare/lda");
    score("LDA", lda_labels(train(weighted, lda)), fixed_k);
  }
  {
    KMeansOptions km;
    km.k = fixed_k;
    km.restarts = config.kmeans_restarts;
    km.seed = derive_seed(config.seed, "compare/kmeans");
    km.max_iter = config.elbow.max_iter;
    km.tol = config.elbow.tol;
    km.workers = config.elbow.workers;
    const KMeansModel model = kmeans(weighted.weight_rows(), km);
    score("Clustering (K-means)",
          std::vector<ClusterId>(model.assignments.begin(), model.assignments.end()), fixed_k);
  }
  {
    const FilteredCorpus filtered = dictionary_filter(vocab, weighted, config.dictionary);
    const SparseMatrix features = config.elbow_target == ElbowTarget::terms
                                      ? term_profiles(filtered.matrix)
                                      : filtered.matrix.weight_rows();
    ElbowOptions eo = config.elbow;
    eo.seed = derive_seed(config.seed, "compare/elbow");
    eo.k_max = std::min(eo.k_max, features.rows());
    if (eo.k_max <= eo.k_min) throw DataError("too few rows for the elbow range");
    const ElbowResult elbow_result = elbow(features, eo);
    LdaConfig lda = config.lda;
    lda.topics = elbow_result.selected_k;
    lda.seed = derive_seed(config.seed, "compare/plda");
    score("PLDA+Elbow method", lda_labels(train(filtered.matrix, lda)), elbow_result.selected_k);
  }
  return report;
}

std::string report_markdown(const EvalReport& report) {
  std::ostringstream s;
  s << "| Methods | Precision | Recall | F-measures |\n";
  s << "|---|---|---|---|\n";
  for (const auto& row : report.rows)
    s << "| " << row.method << " | " << fmt3(row.precision) << " | " << fmt3(row.recall) << " | "
      << fmt3(row.f_measure) << " |\n";
  return s.str();
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json mapping = json::object();
    for (const auto& [id, label] : row.alignment.mapping)
      mapping[std::to_string(id)] = label ? json(*label) : json(nullptr);
    json counts = json::object();
    for (const auto& [label, c] : row.counts) counts[label] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
    rows.push_back({{"method", row.method},
                    {"precision", row.precision},
                    {"recall", row.recall},
                    {"f_measure", row.f_measure},
                    {"clusters", row.clusters},
                    {"alignment", {{"method", to_string(row.alignment.method)}, {"mapping", mapping}}},
                    {"counts", counts},
                    {"unmapped_fp", row.unmapped_fp}});
  }
  json j = {{"documents", report.documents}, {"rows", rows}};
  out << j.dump(2) << '\n';
}

}  // namespace dtopics
