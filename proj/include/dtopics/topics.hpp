#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtopics/matrix.hpp"
#include "dtopics/vectorize.hpp"

namespace dtopics {

struct TopicWord {
  std::string term;
  double weight;
};

struct TopicSummary {
  std::size_t topic_id = 0;
  std::vector<TopicWord> entries;  // weight descending, ties by term
};

// The t most probable terms of every topic row of phi.
std::vector<TopicSummary> top_words(const DenseMatrix& phi, const Vocabulary& vocab, std::size_t t);

// Tag cloud as a standalone SVG document. Font sizes map linearly from 12
// (lowest weight in the summary) to 48 (highest); words flow left to right
// in summary order and wrap into rows.
std::string tag_cloud_svg(const TopicSummary& summary);

// [{"topic_id": k, "words": [{"term": ..., "weight": ...}]}]
void write_topics_json(std::ostream& out, const std::vector<TopicSummary>& topics);

}  // namespace dtopics
