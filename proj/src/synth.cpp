#include "dtopics/synth.hpp"

#include <algorithm>
#include <cmath>

#include "dtopics/error.hpp"
#include "dtopics/random.hpp"

namespace dtopics {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";  // 14
constexpr std::string_view kVowels = "aeiou";                // 5

std::size_t draw(Rng& rng, const std::vector<double>& cdf) {
  const double u = uniform01(rng) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) cdf[i] = acc += weights[i];
  return cdf;
}

std::vector<double> dirichlet(Rng& rng, std::size_t n, double concentration) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) sum += x = gamma_variate(rng, concentration);
  if (sum <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    v[uniform_index(rng, n)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= sum;
  return v;
}

}  // namespace

std::string pseudo_word(std::size_t i) {
  constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();
  std::string w;
  // Multiplying by a prime coprime to 70^3 permutes the codes, so nearby
  // indices differ in every syllable.
  std::size_t x = (i % 343000) * 104729 % 343000;
  for (int s = 0; s < 3; ++s) {
    const std::size_t syl = x % kSyllables;
    x /= kSyllables;
    w += kConsonants[syl % kConsonants.size()];
    w += kVowels[syl / kConsonants.size()];
  }
  return w;
}

PlantedCorpus planted_corpus(const PlantedOptions& o) {
  if (o.topics < 1 || o.docs < 1) throw UsageError("planted corpus needs topics and documents");
  if (o.min_length < 1 || o.max_length < o.min_length) throw UsageError("bad document length range");
  if (o.background_terms + o.noise_terms + o.topics > o.vocab_size)
    throw UsageError("vocabulary too small for the requested blocks");
  if (o.vocab_size > 343000) throw UsageError("vocabulary limited to 343000 pseudo-words");
  if (o.background_rate < 0.0 || o.noise_rate < 0.0 || o.background_rate + o.noise_rate >= 1.0)
    throw UsageError("background and noise rates must leave room for topic words");

  Rng rng(derive_seed(o.seed, "synth/planted"));
  PlantedCorpus c;
  // Scatter term ids so that vocabulary order carries no block structure.
  std::vector<std::size_t> perm(o.vocab_size);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  for (std::size_t i = 0; i < o.vocab_size; ++i) c.terms.push_back(pseudo_word(perm[i]));

  const std::size_t content = o.vocab_size - o.background_terms - o.noise_terms;
  const std::size_t block = content / o.topics;
  c.phi = DenseMatrix(o.topics, o.vocab_size);
  c.topic_of_term.assign(o.vocab_size, o.topics);
  for (std::size_t k = 0; k < o.topics; ++k) {
    const std::size_t begin = k * block, end = k + 1 == o.topics ? content : begin + block;
    double sum = 0.0;
    for (std::size_t w = begin; w < end; ++w) {
      c.phi(k, w) = 1.0 / std::pow(static_cast<double>(w - begin + 1), o.zipf_exponent);
      sum += c.phi(k, w);
      c.topic_of_term[w] = k;
    }
    for (std::size_t w = begin; w < end; ++w) c.phi(k, w) /= sum;
  }
  std::vector<std::vector<double>> topic_cdf;
  for (std::size_t k = 0; k < o.topics; ++k) topic_cdf.push_back(cumulative(c.phi.row(k)));
  std::vector<double> bg_weights(o.background_terms);
  for (std::size_t i = 0; i < bg_weights.size(); ++i) bg_weights[i] = 1.0 / static_cast<double>(i + 1);
  const auto bg_cdf = cumulative(bg_weights);

  c.theta = DenseMatrix(o.docs, o.topics);
  for (std::size_t d = 0; d < o.docs; ++d) {
    const auto th = dirichlet(rng, o.topics, o.alpha);
    std::copy(th.begin(), th.end(), c.theta.row(d).begin());
    const auto th_cdf = cumulative(th);
    const std::size_t len = o.min_length + uniform_index(rng, o.max_length - o.min_length + 1);
    std::vector<std::size_t> z_count(o.topics, 0);
    TokenizedDocument doc;
    doc.doc_id = d;
    for (std::size_t i = 0; i < len; ++i) {
      const double u = uniform01(rng);
      std::size_t w;
      if (u < o.background_rate && o.background_terms > 0) {
        w = content + draw(rng, bg_cdf);
      } else if (u < o.background_rate + o.noise_rate && o.noise_terms > 0) {
        w = content + o.background_terms + uniform_index(rng, o.noise_terms);
      } else {
        const std::size_t k = draw(rng, th_cdf);
        ++z_count[k];
        w = draw(rng, topic_cdf[k]);
      }
      doc.tokens.push_back(c.terms[w]);
    }
    const auto top = std::max_element(z_count.begin(), z_count.end()) - z_count.begin();
    doc.gold_label = "topic_" + std::to_string(top);
    c.docs.push_back(std::move(doc));
  }
  return c;
}

Blobs gaussian_blobs(const BlobOptions& o) {
  if (o.blobs < 1 || o.points_per_blob < 1) throw UsageError("need at least one blob and point");
  if (!(o.deviation > 0.0) || !(o.separation > 0.0)) throw UsageError("blob scales must be positive");
  Rng rng(derive_seed(o.seed, "synth/blobs"));
  // Vertices s/sqrt(2) e_i of the simplex are pairwise s apart.
  const double offset = o.separation / std::sqrt(2.0);
  Blobs b;
  b.rows = SparseMatrix(o.blobs);
  std::vector<std::uint32_t> cols(o.blobs);
  for (std::size_t j = 0; j < o.blobs; ++j) cols[j] = static_cast<std::uint32_t>(j);
  std::vector<double> x(o.blobs);
  for (std::size_t c = 0; c < o.blobs; ++c) {
    for (std::size_t p = 0; p < o.points_per_blob; ++p) {
      for (std::size_t j = 0; j < o.blobs; ++j)
        x[j] = (j == c ? offset : 0.0) + o.deviation * standard_normal(rng);
      b.rows.push_row(cols, x);
      b.labels.push_back(c);
    }
  }
  return b;
}

std::vector<Dialogue> synthetic_dialogues(const DialogueOptions& o) {
  if (o.dialogues < 1 || o.turns < 1) throw UsageError("need at least one dialogue and turn");
  PlantedOptions po;
  po.topics = o.topics;
  po.vocab_size = o.vocab_size;
  po.docs = o.dialogues;
  po.min_length = o.turns * 4;
  po.max_length = o.turns * 8;
  po.alpha = 0.05;
  po.background_terms = std::min<std::size_t>(30, o.vocab_size / 10);
  po.noise_terms = std::min<std::size_t>(60, o.vocab_size / 5);
  po.seed = o.seed;
  const PlantedCorpus planted = planted_corpus(po);

  static const std::vector<std::string> kFunction = {"i", "the", "and", "you", "it's", "that",
                                                     "we", "was", "of", "a", "to", "so"};
  static const std::vector<std::string> kBackchannels = {"uh-huh", "okay", "yeah", "right",
                                                         "Uh-huh.", "Okay!"};
  static const std::vector<std::string> kMarkup = {"<laughter>", "[noise]", "{breath}"};

  Rng rng(derive_seed(o.seed, "synth/dialogues"));
  std::vector<Dialogue> out;
  for (std::size_t d = 0; d < o.dialogues; ++d) {
    const auto& tokens = planted.docs[d].tokens;
    Dialogue dlg;
    dlg.id = "sw" + std::to_string(2000 + d);
    dlg.gold_label = planted.docs[d].gold_label;
    std::size_t pos = 0;
    for (std::size_t t = 0; t < o.turns; ++t) {
      Utterance u;
      u.dialogue_id = dlg.id;
      u.turn_index = t;
      u.speaker = t % 2 == 0 ? Speaker::A : Speaker::B;
      if (t > 0 && uniform01(rng) < o.backchannel_rate) {
        u.text = kBackchannels[uniform_index(rng, kBackchannels.size())];
      } else {
        // Spread the document's tokens evenly over the content turns.
        const std::size_t remaining_turns = o.turns - t;
        const std::size_t take = std::max<std::size_t>(1, (tokens.size() - pos) / remaining_turns);
        std::string text;
        auto append = [&](const std::string& w) {
          if (!text.empty()) text += ' ';
          text += w;
        };
        for (std::size_t i = 0; i < take && pos < tokens.size(); ++i, ++pos) {
          if (uniform01(rng) < 0.4) append(kFunction[uniform_index(rng, kFunction.size())]);
          if (uniform01(rng) < 0.03) append(kMarkup[uniform_index(rng, kMarkup.size())]);
          if (uniform01(rng) < 0.03) append(std::to_string(uniform_index(rng, 100)));
          append(uniform01(rng) < 0.1 ? tokens[pos] + "," : tokens[pos]);
        }
        if (text.empty()) text = kFunction[uniform_index(rng, kFunction.size())];
        u.text = std::move(text);
      }
      dlg.utterances.push_back(std::move(u));
    }
    out.push_back(std::move(dlg));
  }
  return out;
}

}  // namespace dtopics
