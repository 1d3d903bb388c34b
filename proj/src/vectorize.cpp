#include "dtopics/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "csv.hpp"
#include "dtopics/error.hpp"

namespace dtopics {

std::optional<TermId> Vocabulary::find(const std::string& term) const {
  if (auto it = term_to_id_.find(term); it != term_to_id_.end()) return it->second;
  return std::nullopt;
}

Vocabulary Vocabulary::from_columns(std::vector<std::string> terms, std::vector<std::size_t> df,
                                    std::vector<std::size_t> cf) {
  if (terms.size() != df.size() || terms.size() != cf.size())
    throw DataError("vocabulary columns differ in length");
  Vocabulary v;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!v.term_to_id_.emplace(terms[i], static_cast<TermId>(i)).second)
      throw DataError("duplicate vocabulary term '" + terms[i] + "'");
    if (df[i] < 1 || cf[i] < df[i]) throw DataError("inconsistent df/cf for '" + terms[i] + "'");
  }
  v.id_to_term_ = std::move(terms);
  v.df_ = std::move(df);
  v.cf_ = std::move(cf);
  return v;
}

void DocTermMatrix::push_row(std::span<const SparseEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].term >= n_terms_) throw DataError("term id out of range");
    if (entries[i].count == 0) throw DataError("zero count in sparse row");
    if (i > 0 && entries[i].term <= entries[i - 1].term)
      throw DataError("term ids must be strictly increasing within a row");
  }
  entries_.insert(entries_.end(), entries.begin(), entries.end());
  row_ptr_.push_back(entries_.size());
  if (weighted_) weights_.resize(entries_.size(), 0.0);
}

std::size_t DocTermMatrix::row_length(std::size_t d) const {
  std::size_t n = 0;
  for (const auto& e : row(d)) n += e.count;
  return n;
}

std::size_t DocTermMatrix::non_empty_rows() const {
  std::size_t n = 0;
  for (std::size_t d = 0; d < n_docs(); ++d) n += row_empty(d) ? 0 : 1;
  return n;
}

void DocTermMatrix::set_weights(std::vector<double> weights) {
  if (weights.size() != entries_.size()) throw UsageError("weights must align with entries");
  weights_ = std::move(weights);
  weighted_ = true;
}

std::vector<std::size_t> DocTermMatrix::document_frequencies() const {
  std::vector<std::size_t> df(n_terms_, 0);
  for (const auto& e : entries_) ++df[e.term];
  return df;
}

SparseMatrix DocTermMatrix::weight_rows() const {
  SparseMatrix m(n_terms_);
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  for (std::size_t d = 0; d < n_docs(); ++d) {
    cols.clear();
    values.clear();
    const auto r = row(d);
    for (std::size_t i = 0; i < r.size(); ++i) {
      cols.push_back(r[i].term);
      values.push_back(weighted_ ? row_weights(d)[i] : static_cast<double>(r[i].count));
    }
    m.push_row(cols, values);
  }
  return m;
}

Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& docs) {
  Vocabulary v;
  std::vector<std::size_t> last_doc;  // last document (index + 1) that hit each term
  bool any = false;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d].tokens) {
      any = true;
      auto [it, inserted] = v.term_to_id_.emplace(tok, static_cast<TermId>(v.id_to_term_.size()));
      if (inserted) {
        v.id_to_term_.push_back(tok);
        v.df_.push_back(0);
        v.cf_.push_back(0);
        last_doc.push_back(0);
      }
      const TermId id = it->second;
      ++v.cf_[id];
      if (last_doc[id] != d + 1) {
        last_doc[id] = d + 1;
        ++v.df_[id];
      }
    }
  }
  if (!any) throw DataError("cannot build a vocabulary: every document is empty");
  return v;
}

DocTermMatrix bow_counts(const std::vector<TokenizedDocument>& docs, const Vocabulary& vocab) {
  DocTermMatrix m(vocab.size());
  std::map<TermId, std::uint32_t> tally;
  std::vector<SparseEntry> row;
  for (const auto& doc : docs) {
    tally.clear();
    for (const auto& tok : doc.tokens) {
      const auto id = vocab.find(tok);
      if (!id) throw DataError("token '" + tok + "' is not in the vocabulary");
      ++tally[*id];
    }
    row.clear();
    for (const auto& [term, count] : tally) row.push_back({term, count});
    m.push_row(row);
  }
  return m;
}

DocTermMatrix tfidf(DocTermMatrix matrix) {
  const auto df = matrix.document_frequencies();
  const double n = static_cast<double>(matrix.non_empty_rows());
  std::vector<double> idf(df.size(), 0.0);
  for (std::size_t t = 0; t < df.size(); ++t)
    if (df[t] > 0) idf[t] = std::log(n / static_cast<double>(df[t]));
  std::vector<double> weights;
  weights.reserve(matrix.nnz());
  for (std::size_t d = 0; d < matrix.n_docs(); ++d)
    for (const auto& e : matrix.row(d)) weights.push_back(static_cast<double>(e.count) * idf[e.term]);
  matrix.set_weights(std::move(weights));
  return matrix;
}

FilteredCorpus dictionary_filter(const Vocabulary& vocab, const DocTermMatrix& matrix,
                                 const DictionaryPolicy& policy) {
  if (vocab.size() != matrix.n_terms())
    throw UsageError("vocabulary and matrix disagree on the number of terms");
  const std::size_t n = matrix.non_empty_rows();
  if (policy.min_df > n) throw UsageError("min_df exceeds the number of documents");
  if (!(policy.max_df_ratio > 0.0 && policy.max_df_ratio <= 1.0))
    throw UsageError("max_df_ratio must lie in (0, 1]");

  std::vector<TermId> kept;
  for (TermId t = 0; t < vocab.size(); ++t) {
    const std::size_t df = vocab.df(t);
    if (df >= policy.min_df &&
        static_cast<double>(df) / static_cast<double>(n) <= policy.max_df_ratio)
      kept.push_back(t);
  }
  if (policy.top_m && kept.size() > *policy.top_m) {
    std::stable_sort(kept.begin(), kept.end(),
                     [&](TermId a, TermId b) { return vocab.cf(a) > vocab.cf(b); });
    kept.resize(*policy.top_m);
    std::sort(kept.begin(), kept.end());
  }
  if (kept.empty()) throw DataError("dictionary filter removed every term");

  std::vector<std::int64_t> remap(vocab.size(), -1);
  std::vector<std::string> terms;
  std::vector<std::size_t> df, cf;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    remap[kept[i]] = static_cast<std::int64_t>(i);
    terms.push_back(vocab.term(kept[i]));
    df.push_back(vocab.df(kept[i]));
    cf.push_back(vocab.cf(kept[i]));
  }

  DocTermMatrix reduced(kept.size());
  std::vector<SparseEntry> row;
  for (std::size_t d = 0; d < matrix.n_docs(); ++d) {
    row.clear();
    for (const auto& e : matrix.row(d))
      if (remap[e.term] >= 0) row.push_back({static_cast<TermId>(remap[e.term]), e.count});
    reduced.push_row(row);
  }
  return {Vocabulary::from_columns(std::move(terms), std::move(df), std::move(cf)),
          tfidf(std::move(reduced)), std::move(kept)};
}

void write_matrix_csv(std::ostream& out, const DocTermMatrix& matrix) {
  out << "doc_id,term_id,count,weight\n";
  for (std::size_t d = 0; d < matrix.n_docs(); ++d) {
    const auto r = matrix.row(d);
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << d << ',' << r[i].term << ',' << r[i].count << ',';
      if (matrix.has_weights()) out << csv::format_double(matrix.row_weights(d)[i]);
      out << '\n';
    }
  }
}

void write_vocabulary_csv(std::ostream& out, const Vocabulary& vocab) {
  out << "term_id,term,df,cf\n";
  for (TermId t = 0; t < vocab.size(); ++t)
    out << t << ',' << csv::escape(vocab.term(t)) << ',' << vocab.df(t) << ',' << vocab.cf(t)
        << '\n';
}

DocTermMatrix read_matrix_csv(std::istream& in, std::size_t n_docs, std::size_t n_terms) {
  std::string line;
  if (!std::getline(in, line) || csv::split_line(line) !=
                                     std::vector<std::string>{"doc_id", "term_id", "count", "weight"})
    throw DataError("matrix CSV must start with 'doc_id,term_id,count,weight'");
  std::vector<std::vector<std::pair<SparseEntry, double>>> rows(n_docs);
  bool weighted = true;
  bool any = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_line(line);
    if (f.size() != 4) throw DataError("matrix CSV line " + std::to_string(line_no) + ": expected 4 fields");
    const auto d = csv::parse_number<std::size_t>(f[0], "doc_id");
    const auto t = csv::parse_number<TermId>(f[1], "term_id");
    const auto c = csv::parse_number<std::uint32_t>(f[2], "count");
    if (d >= n_docs) throw DataError("matrix CSV line " + std::to_string(line_no) + ": doc_id out of range");
    double w = 0.0;
    if (f[3].empty()) {
      weighted = false;
    } else {
      w = csv::parse_number<double>(f[3], "weight");
    }
    any = true;
    rows[d].push_back({{t, c}, w});
  }
  DocTermMatrix m(n_terms);
  std::vector<double> weights;
  std::vector<SparseEntry> row;
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first.term < b.first.term; });
    row.clear();
    for (const auto& [e, w] : r) {
      row.push_back(e);
      weights.push_back(w);
    }
    m.push_row(row);
  }
  if (weighted && any) m.set_weights(std::move(weights));
  return m;
}

Vocabulary read_vocabulary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      csv::split_line(line) != std::vector<std::string>{"term_id", "term", "df", "cf"})
    throw DataError("vocabulary CSV must start with 'term_id,term,df,cf'");
  std::vector<std::string> terms;
  std::vector<std::size_t> df, cf;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_line(line);
    if (f.size() != 4) throw DataError("vocabulary CSV line " + std::to_string(line_no) + ": expected 4 fields");
    if (csv::parse_number<std::size_t>(f[0], "term_id") != terms.size())
      throw DataError("vocabulary CSV line " + std::to_string(line_no) + ": term ids must be dense");
    terms.push_back(f[1]);
    df.push_back(csv::parse_number<std::size_t>(f[2], "df"));
    cf.push_back(csv::parse_number<std::size_t>(f[3], "cf"));
  }
  return Vocabulary::from_columns(std::move(terms), std::move(df), std::move(cf));
}

}  // namespace dtopics
