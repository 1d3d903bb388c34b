#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "dtopics/matrix.hpp"
#include "dtopics/vectorize.hpp"

namespace dtopics {

using TopicId = std::uint32_t;

struct LdaConfig {
  std::size_t topics = 3;
  double alpha = 0.5;
  double beta = 0.1;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const;
};

// Collapsed Gibbs state: one topic per token plus the doc-topic,
// topic-word and topic-total count tables derived from it.
class LdaModel {
 public:
  // Tallies the count tables from z. words[d][i] is the term of token i in
  // document d and z[d][i] its topic.
  LdaModel(LdaConfig config, std::size_t vocab_size, std::vector<std::vector<TermId>> words,
           std::vector<std::vector<TopicId>> z);

  const LdaConfig& config() const { return config_; }
  std::size_t num_docs() const { return words_.size(); }
  std::size_t num_topics() const { return config_.topics; }
  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t num_tokens() const;
  std::size_t sweeps_done() const { return sweeps_done_; }

  std::span<const TermId> words(std::size_t d) const { return words_[d]; }
  std::span<const TopicId> topics(std::size_t d) const { return z_[d]; }

  std::uint32_t n_dk(std::size_t d, std::size_t k) const { return n_dk_[d * config_.topics + k]; }
  std::uint32_t n_kw(std::size_t k, std::size_t w) const { return n_kw_[k * vocab_size_ + w]; }
  std::uint32_t n_k(std::size_t k) const { return n_k_[k]; }

  // Re-tallies z from scratch and compares with the stored tables.
  bool counts_consistent() const;
  void check_counts() const;  // throws InvariantError

 private:
  friend void gibbs_sweep(LdaModel& model);
  friend LdaModel load_checkpoint(std::istream& in);

  LdaConfig config_;
  std::size_t vocab_size_;
  std::vector<std::vector<TermId>> words_;
  std::vector<std::vector<TopicId>> z_;
  std::vector<std::uint32_t> n_dk_;  // docs x topics
  std::vector<std::uint32_t> n_kw_;  // topics x vocab
  std::vector<std::uint32_t> n_k_;
  std::size_t sweeps_done_ = 0;
};

// Expands BoW counts into tokens (term order within a document) and draws
// every topic uniformly from the seeded generator.
LdaModel init_model(const DocTermMatrix& counts, const LdaConfig& config);

// p(z = k) proportional to (n_dk + alpha)(n_kw + beta) / (n_k + V beta)
// using the tables as they stand; the caller removes the token being
// resampled first.
std::vector<double> conditional(const LdaModel& model, std::size_t doc, TermId word);

// One pass resampling every token. With workers > 1 documents are split
// into contiguous shards; each shard samples against its own copy of the
// sweep-start topic-word tables (exact doc-topic counts) and the
// topic-word deltas are merged in shard order afterwards. Shard s of sweep
// t draws from derive_seed(seed, t, s), so a fixed seed and worker count
// fix the whole trajectory.
void gibbs_sweep(LdaModel& model);

using SweepObserver = std::function<void(const LdaModel&, std::size_t sweep)>;

LdaModel train(const DocTermMatrix& counts, const LdaConfig& config,
               const SweepObserver& observer = {});

// phi[k][w] = (n_kw + beta) / (n_k + V beta)
DenseMatrix phi(const LdaModel& model);
// theta[d][k] = (n_dk + alpha) / (len_d + K alpha); empty documents are uniform.
DenseMatrix theta(const LdaModel& model);

// argmax_k theta[d][k], ties to the lowest topic.
std::vector<TopicId> dominant_topics(const LdaModel& model);

// exp(-sum over tokens of log sum_k theta[d][k] phi[k][w] / token count).
double perplexity(const LdaModel& model, const DocTermMatrix& counts);

void save_checkpoint(std::ostream& out, const LdaModel& model);
LdaModel load_checkpoint(std::istream& in);

void write_phi_csv(std::ostream& out, const LdaModel& model, const Vocabulary& vocab);
void write_theta_csv(std::ostream& out, const LdaModel& model);

}  // namespace dtopics
