#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtopics/matrix.hpp"
#include "dtopics/preprocess.hpp"

namespace dtopics {

using TermId = std::uint32_t;

class Vocabulary {
 public:
  std::optional<TermId> find(const std::string& term) const;
  const std::string& term(TermId id) const { return id_to_term_.at(id); }
  std::size_t size() const { return id_to_term_.size(); }

  std::size_t df(TermId id) const { return df_.at(id); }
  std::size_t cf(TermId id) const { return cf_.at(id); }

  // Builds a vocabulary from explicit columns (used when loading exports).
  static Vocabulary from_columns(std::vector<std::string> terms, std::vector<std::size_t> df,
                                 std::vector<std::size_t> cf);

 private:
  friend Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& docs);

  std::unordered_map<std::string, TermId> term_to_id_;
  std::vector<std::string> id_to_term_;
  std::vector<std::size_t> df_;
  std::vector<std::size_t> cf_;
};

struct SparseEntry {
  TermId term;
  std::uint32_t count;
};

// Document x term counts in compressed rows, with optional TF-IDF weights
// aligned one-to-one with the count entries.
class DocTermMatrix {
 public:
  explicit DocTermMatrix(std::size_t n_terms = 0) : n_terms_(n_terms), row_ptr_{0} {}

  // entries must have strictly increasing term ids, each count >= 1.
  void push_row(std::span<const SparseEntry> entries);

  std::size_t n_docs() const { return row_ptr_.size() - 1; }
  std::size_t n_terms() const { return n_terms_; }
  std::size_t nnz() const { return entries_.size(); }

  std::span<const SparseEntry> row(std::size_t d) const {
    return {entries_.data() + row_ptr_[d], row_ptr_[d + 1] - row_ptr_[d]};
  }
  std::span<const double> row_weights(std::size_t d) const {
    return {weights_.data() + row_ptr_[d], row_ptr_[d + 1] - row_ptr_[d]};
  }
  std::size_t row_length(std::size_t d) const;  // total token count
  bool row_empty(std::size_t d) const { return row_ptr_[d] == row_ptr_[d + 1]; }
  std::size_t non_empty_rows() const;

  bool has_weights() const { return weighted_; }
  void set_weights(std::vector<double> weights);
  const std::vector<double>& weights() const { return weights_; }

  // Document frequency of every term, counted over rows.
  std::vector<std::size_t> document_frequencies() const;

  // TF-IDF rows as features; counts when no weights are present.
  SparseMatrix weight_rows() const;

 private:
  std::size_t n_terms_;
  std::vector<std::size_t> row_ptr_;
  std::vector<SparseEntry> entries_;
  std::vector<double> weights_;
  bool weighted_ = false;
};

// Ids follow first occurrence; df counts documents, cf counts tokens.
// Throws DataError when every document is empty.
Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& docs);

// Row d holds the counts of docs[d]; a token missing from vocab is a DataError.
DocTermMatrix bow_counts(const std::vector<TokenizedDocument>& docs, const Vocabulary& vocab);

// weight = count * ln(N / df), N = number of non-empty rows.
DocTermMatrix tfidf(DocTermMatrix matrix);

struct DictionaryPolicy {
  std::size_t min_df = 5;
  double max_df_ratio = 0.5;
  std::optional<std::size_t> top_m;
};

struct FilteredCorpus {
  Vocabulary vocab;
  DocTermMatrix matrix;
  std::vector<TermId> kept;  // new id -> original id
};

// Keeps the informative frequency band: df >= min_df and df / N <=
// max_df_ratio, then at most top_m terms by collection frequency (ties by
// original id). Surviving ids keep their relative order; weights are
// recomputed on the reduced matrix.
FilteredCorpus dictionary_filter(const Vocabulary& vocab, const DocTermMatrix& matrix,
                                 const DictionaryPolicy& policy);

// CSV exports: "doc_id,term_id,count,weight" and "term_id,term,df,cf".
void write_matrix_csv(std::ostream& out, const DocTermMatrix& matrix);
void write_vocabulary_csv(std::ostream& out, const Vocabulary& vocab);
DocTermMatrix read_matrix_csv(std::istream& in, std::size_t n_docs, std::size_t n_terms);
Vocabulary read_vocabulary_csv(std::istream& in);

}  // namespace dtopics
