#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dtopics/corpus.hpp"
#include "dtopics/matrix.hpp"
#include "dtopics/preprocess.hpp"

namespace dtopics {

// Pronounceable lowercase word of three consonant-vowel syllables, distinct
// for distinct i below 343000 (70^3).
std::string pseudo_word(std::size_t i);

struct PlantedOptions {
  std::size_t topics = 3;
  std::size_t vocab_size = 1000;
  std::size_t docs = 500;
  std::size_t min_length = 60;
  std::size_t max_length = 100;
  double alpha = 0.05;            // doc-topic concentration
  double zipf_exponent = 1.0;     // word ranks inside a topic block
  std::size_t background_terms = 50;
  double background_rate = 0.3;   // share of tokens from shared filler words
  std::size_t noise_terms = 400;
  double noise_rate = 0.01;       // share of tokens from rare words
  std::uint64_t seed = 0;
};

// Documents drawn from an LDA model whose topics own disjoint blocks of the
// vocabulary, diluted with ubiquitous background words and rare noise words.
struct PlantedCorpus {
  std::vector<std::string> terms;
  DenseMatrix phi;    // topics x vocab, content words only
  DenseMatrix theta;  // docs x topics
  std::vector<std::size_t> topic_of_term;  // topics for background/noise words
  std::vector<TokenizedDocument> docs;     // gold_label "topic_<k>" by majority of z
};

PlantedCorpus planted_corpus(const PlantedOptions& options);

struct BlobOptions {
  std::size_t blobs = 5;
  std::size_t points_per_blob = 40;
  double separation = 10.0;  // pairwise centre distance
  double deviation = 1.0;    // per-coordinate standard deviation
  std::uint64_t seed = 0;
};

// Gaussian blobs centred on the vertices of a regular simplex, one dimension
// per blob. labels[i] is the blob of row i.
struct Blobs {
  SparseMatrix rows;
  std::vector<std::size_t> labels;
};

Blobs gaussian_blobs(const BlobOptions& options);

struct DialogueOptions {
  std::size_t dialogues = 120;
  std::size_t turns = 20;
  std::size_t topics = 3;
  std::size_t vocab_size = 600;
  double backchannel_rate = 0.1;
  std::uint64_t seed = 0;
};

// Two-speaker conversations about one planted topic each, with stop words,
// markup, numbers and backchannel turns mixed in. Every turn is non-blank.
std::vector<Dialogue> synthetic_dialogues(const DialogueOptions& options);

}  // namespace dtopics
