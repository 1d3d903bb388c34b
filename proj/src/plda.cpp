#include "dtopics/plda.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "csv.hpp"
#include "dtopics/error.hpp"
#include "dtopics/random.hpp"
#include "parallel.hpp"

namespace dtopics {
namespace {

constexpr const char* kCheckpointFormat = "dtopics-lda";
constexpr int kCheckpointVersion = 1;

// Walks the unnormalized weights to the bucket holding u * total.
TopicId draw(std::span<const double> weights, double total, Rng& rng) {
  const double u = uniform01(rng) * total;
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    cum += weights[k];
    if (u < cum) return static_cast<TopicId>(k);
  }
  return static_cast<TopicId>(weights.size() - 1);
}

}  // namespace

void LdaConfig::validate() const {
  if (topics < 1) throw UsageError("topic count must be at least 1");
  if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
  if (!(beta > 0.0)) throw UsageError("beta must be positive");
  if (iterations < 1) throw UsageError("iterations must be positive");
  if (workers < 1) throw UsageError("workers must be positive");
}

LdaModel::LdaModel(LdaConfig config, std::size_t vocab_size,
                   std::vector<std::vector<TermId>> words, std::vector<std::vector<TopicId>> z)
    : config_(config), vocab_size_(vocab_size), words_(std::move(words)), z_(std::move(z)) {
  config_.validate();
  if (words_.size() != z_.size()) throw UsageError("words and topics differ in document count");
  const std::size_t K = config_.topics;
  n_dk_.assign(words_.size() * K, 0);
  n_kw_.assign(K * vocab_size_, 0);
  n_k_.assign(K, 0);
  for (std::size_t d = 0; d < words_.size(); ++d) {
    if (words_[d].size() != z_[d].size())
      throw UsageError("words and topics differ in length for a document");
    for (std::size_t i = 0; i < words_[d].size(); ++i) {
      const TermId w = words_[d][i];
      const TopicId k = z_[d][i];
      if (w >= vocab_size_) throw UsageError("term id out of range");
      if (k >= K) throw UsageError("topic id out of range");
      ++n_dk_[d * K + k];
      ++n_kw_[k * vocab_size_ + w];
      ++n_k_[k];
    }
  }
}

std::size_t LdaModel::num_tokens() const {
  std::size_t n = 0;
  for (const auto& doc : words_) n += doc.size();
  return n;
}

bool LdaModel::counts_consistent() const {
  const std::size_t K = config_.topics;
  std::vector<std::uint32_t> dk(words_.size() * K, 0), kw(K * vocab_size_, 0), k_tot(K, 0);
  for (std::size_t d = 0; d < words_.size(); ++d) {
    for (std::size_t i = 0; i < words_[d].size(); ++i) {
      const TopicId k = z_[d][i];
      if (k >= K) return false;
      ++dk[d * K + k];
      ++kw[k * vocab_size_ + words_[d][i]];
      ++k_tot[k];
    }
  }
  return dk == n_dk_ && kw == n_kw_ && k_tot == n_k_;
}

void LdaModel::check_counts() const {
  if (!counts_consistent())
    throw InvariantError("LDA count tables disagree with a re-tally of topic assignments");
}

LdaModel init_model(const DocTermMatrix& counts, const LdaConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, 0, 0));
  std::vector<std::vector<TermId>> words(counts.n_docs());
  std::vector<std::vector<TopicId>> z(counts.n_docs());
  std::size_t total = 0;
  for (std::size_t d = 0; d < counts.n_docs(); ++d) {
    for (const auto& e : counts.row(d)) words[d].insert(words[d].end(), e.count, e.term);
    z[d].reserve(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i)
      z[d].push_back(static_cast<TopicId>(uniform_index(rng, config.topics)));
    total += words[d].size();
  }
  if (total == 0) throw DataError("cannot train on an empty corpus");
  return LdaModel(config, counts.n_terms(), std::move(words), std::move(z));
}

std::vector<double> conditional(const LdaModel& model, std::size_t doc, TermId word) {
  if (doc >= model.num_docs()) throw UsageError("document index out of range");
  if (word >= model.vocab_size()) throw UsageError("term index out of range");
  const auto& cfg = model.config();
  const double vbeta = static_cast<double>(model.vocab_size()) * cfg.beta;
  std::vector<double> p(model.num_topics());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = (model.n_dk(doc, k) + cfg.alpha) * (model.n_kw(k, word) + cfg.beta) /
           (model.n_k(k) + vbeta);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

void gibbs_sweep(LdaModel& model) {
  const std::size_t K = model.config_.topics;
  const std::size_t V = model.vocab_size_;
  const std::size_t D = model.words_.size();
  const double alpha = model.config_.alpha;
  const double beta = model.config_.beta;
  const double vbeta = static_cast<double>(V) * beta;
  const std::size_t sweep = model.sweeps_done_ + 1;
  const std::size_t shards = std::min<std::size_t>(model.config_.workers, std::max<std::size_t>(D, 1));

  // Resamples documents [begin, end) against the given topic-word tables.
  auto sample_range = [&](std::size_t begin, std::size_t end, std::uint32_t* n_kw,
                          std::uint32_t* n_k, Rng& rng) {
    std::vector<double> weights(K);
    for (std::size_t d = begin; d < end; ++d) {
      std::uint32_t* n_dk = model.n_dk_.data() + d * K;
      auto& z = model.z_[d];
      const auto& words = model.words_[d];
      for (std::size_t i = 0; i < words.size(); ++i) {
        const TermId w = words[i];
        TopicId k = z[i];
        --n_dk[k];
        --n_kw[k * V + w];
        --n_k[k];
        double total = 0.0;
        for (std::size_t t = 0; t < K; ++t) {
          weights[t] = (n_dk[t] + alpha) * (n_kw[t * V + w] + beta) / (n_k[t] + vbeta);
          total += weights[t];
        }
        k = draw(weights, total, rng);
        z[i] = k;
        ++n_dk[k];
        ++n_kw[k * V + w];
        ++n_k[k];
      }
    }
  };

  if (shards <= 1) {
    Rng rng(derive_seed(model.config_.seed, sweep, 0));
    sample_range(0, D, model.n_kw_.data(), model.n_k_.data(), rng);
  } else {
    std::vector<std::vector<std::uint32_t>> local_kw(shards, model.n_kw_);
    std::vector<std::vector<std::uint32_t>> local_k(shards, model.n_k_);
    detail::parallel_for(shards, shards, [&](std::size_t s) {
      Rng rng(derive_seed(model.config_.seed, sweep, s));
      sample_range(D * s / shards, D * (s + 1) / shards, local_kw[s].data(), local_k[s].data(), rng);
    });
    // Apply each shard's delta against the shared snapshot, in shard order.
    const std::vector<std::uint32_t> snapshot_kw = model.n_kw_;
    const std::vector<std::uint32_t> snapshot_k = model.n_k_;
    for (std::size_t s = 0; s < shards; ++s) {
      for (std::size_t i = 0; i < snapshot_kw.size(); ++i)
        model.n_kw_[i] += local_kw[s][i] - snapshot_kw[i];
      for (std::size_t k = 0; k < K; ++k) model.n_k_[k] += local_k[s][k] - snapshot_k[k];
    }
  }
  model.sweeps_done_ = sweep;
}

LdaModel train(const DocTermMatrix& counts, const LdaConfig& config, const SweepObserver& observer) {
  LdaModel model = init_model(counts, config);
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    gibbs_sweep(model);
    if (observer) observer(model, it);
  }
  return model;
}

DenseMatrix phi(const LdaModel& model) {
  const std::size_t K = model.num_topics(), V = model.vocab_size();
  const double beta = model.config().beta;
  DenseMatrix out(K, V);
  for (std::size_t k = 0; k < K; ++k) {
    const double denom = model.n_k(k) + static_cast<double>(V) * beta;
    for (std::size_t w = 0; w < V; ++w) out(k, w) = (model.n_kw(k, w) + beta) / denom;
  }
  return out;
}

DenseMatrix theta(const LdaModel& model) {
  const std::size_t K = model.num_topics(), D = model.num_docs();
  const double alpha = model.config().alpha;
  DenseMatrix out(D, K);
  for (std::size_t d = 0; d < D; ++d) {
    const double denom = static_cast<double>(model.words(d).size()) + static_cast<double>(K) * alpha;
    for (std::size_t k = 0; k < K; ++k) out(d, k) = (model.n_dk(d, k) + alpha) / denom;
  }
  return out;
}

std::vector<TopicId> dominant_topics(const LdaModel& model) {
  std::vector<TopicId> out(model.num_docs(), 0);
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    TopicId best = 0;
    for (std::size_t k = 1; k < model.num_topics(); ++k)
      if (model.n_dk(d, k) > model.n_dk(d, best)) best = static_cast<TopicId>(k);
    out[d] = best;
  }
  return out;
}

double perplexity(const LdaModel& model, const DocTermMatrix& counts) {
  if (counts.n_docs() != model.num_docs() || counts.n_terms() != model.vocab_size())
    throw UsageError("matrix does not match the model's documents and vocabulary");
  const DenseMatrix ph = phi(model);
  const DenseMatrix th = theta(model);
  double log_lik = 0.0;
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < counts.n_docs(); ++d) {
    for (const auto& e : counts.row(d)) {
      double p = 0.0;
      for (std::size_t k = 0; k < model.num_topics(); ++k) p += th(d, k) * ph(k, e.term);
      log_lik += e.count * std::log(p);
      tokens += e.count;
    }
  }
  if (tokens == 0) throw DataError("perplexity of an empty corpus is undefined");
  return std::exp(-log_lik / static_cast<double>(tokens));
}

void save_checkpoint(std::ostream& out, const LdaModel& model) {
  using nlohmann::json;
  const auto& c = model.config();
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["config"] = {{"topics", c.topics}, {"alpha", c.alpha},         {"beta", c.beta},
                 {"iterations", c.iterations}, {"seed", c.seed}, {"workers", c.workers}};
  j["vocab_size"] = model.vocab_size();
  j["sweeps_done"] = model.sweeps_done();
  json docs = json::array();
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    const auto w = model.words(d);
    const auto z = model.topics(d);
    docs.push_back({{"words", std::vector<TermId>(w.begin(), w.end())},
                    {"z", std::vector<TopicId>(z.begin(), z.end())}});
  }
  j["docs"] = std::move(docs);
  json n_dk = json::array(), n_kw = json::array(), n_k = json::array();
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    json row = json::array();
    for (std::size_t k = 0; k < model.num_topics(); ++k) row.push_back(model.n_dk(d, k));
    n_dk.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    json row = json::array();
    for (std::size_t w = 0; w < model.vocab_size(); ++w) row.push_back(model.n_kw(k, w));
    n_kw.push_back(std::move(row));
    n_k.push_back(model.n_k(k));
  }
  j["n_dk"] = std::move(n_dk);
  j["n_kw"] = std::move(n_kw);
  j["n_k"] = std::move(n_k);
  out << j.dump() << '\n';
}

LdaModel load_checkpoint(std::istream& in) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(in);
    if (j.at("format") != kCheckpointFormat) throw DataError("not an LDA checkpoint");
    if (j.at("version") != kCheckpointVersion) throw DataError("unsupported checkpoint version");
    LdaConfig c;
    const auto& jc = j.at("config");
    c.topics = jc.at("topics").get<std::size_t>();
    c.alpha = jc.at("alpha").get<double>();
    c.beta = jc.at("beta").get<double>();
    c.iterations = jc.at("iterations").get<std::size_t>();
    c.seed = jc.at("seed").get<std::uint64_t>();
    c.workers = jc.at("workers").get<std::size_t>();
    std::vector<std::vector<TermId>> words;
    std::vector<std::vector<TopicId>> z;
    for (const auto& doc : j.at("docs")) {
      words.push_back(doc.at("words").get<std::vector<TermId>>());
      z.push_back(doc.at("z").get<std::vector<TopicId>>());
    }
    LdaModel model(c, j.at("vocab_size").get<std::size_t>(), std::move(words), std::move(z));
    model.sweeps_done_ = j.at("sweeps_done").get<std::size_t>();
    std::vector<std::uint32_t> n_dk, n_kw;
    for (const auto& row : j.at("n_dk"))
      for (const auto& v : row) n_dk.push_back(v.get<std::uint32_t>());
    for (const auto& row : j.at("n_kw"))
      for (const auto& v : row) n_kw.push_back(v.get<std::uint32_t>());
    if (n_dk != model.n_dk_ || n_kw != model.n_kw_ ||
        j.at("n_k").get<std::vector<std::uint32_t>>() != model.n_k_)
      throw InvariantError("checkpoint count tables disagree with its topic assignments");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void write_phi_csv(std::ostream& out, const LdaModel& model, const Vocabulary& vocab) {
  if (vocab.size() != model.vocab_size()) throw UsageError("vocabulary does not match the model");
  const DenseMatrix p = phi(model);
  out << "topic_id";
  for (TermId w = 0; w < vocab.size(); ++w) out << ',' << csv::escape(vocab.term(w));
  out << '\n';
  for (std::size_t k = 0; k < p.rows(); ++k) {
    out << k;
    for (double v : p.row(k)) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

void write_theta_csv(std::ostream& out, const LdaModel& model) {
  const DenseMatrix t = theta(model);
  out << "doc_id";
  for (std::size_t k = 0; k < t.cols(); ++k) out << ",topic_" << k;
  out << '\n';
  for (std::size_t d = 0; d < t.rows(); ++d) {
    out << d;
    for (double v : t.row(d)) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

}  // namespace dtopics
