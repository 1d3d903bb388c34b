#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dtopics/error.hpp"
#include "dtopics/vectorize.hpp"

using namespace dtopics;

namespace {

std::vector<TokenizedDocument> docs_of(const std::vector<std::vector<std::string>>& tokens) {
  std::vector<TokenizedDocument> out;
  for (const auto& t : tokens) {
    TokenizedDocument d;
    d.doc_id = out.size();
    d.tokens = t;
    out.push_back(std::move(d));
  }
  return out;
}

double weight_of(const DocTermMatrix& m, const Vocabulary& v, std::size_t d, const std::string& term) {
  const auto id = v.find(term);
  const auto row = m.row(d);
  for (std::size_t i = 0; i < row.size(); ++i)
    if (id && row[i].term == *id) return m.row_weights(d)[i];
  return 0.0;
}

std::vector<std::vector<std::string>> random_corpus(std::mt19937_64& rng, std::size_t docs, std::size_t vocab) {
  std::uniform_int_distribution<std::size_t> len(0, 15);
  // Zipf-like draws.
  std::vector<double> w(vocab);
  for (std::size_t i = 0; i < vocab; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::vector<std::vector<std::string>> out(docs);
  for (auto& d : out)
    for (std::size_t i = 0, n = len(rng); i < n; ++i) d.push_back("t" + std::to_string(pick(rng)));
  return out;
}

}  // namespace

TEST(Vectorize, VocabularyCounts) {
  const auto v = build_vocabulary(docs_of({{"a", "b"}, {"a"}}));
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.df(*v.find("a")), 2u);
  EXPECT_EQ(v.df(*v.find("b")), 1u);
  EXPECT_EQ(v.cf(*v.find("a")), 2u);
  EXPECT_EQ(*v.find("a"), 0u);
  const auto single = build_vocabulary(docs_of({{"x", "x", "x"}}));
  EXPECT_EQ(single.size(), 1u);
  EXPECT_EQ(single.df(0), 1u);
  EXPECT_EQ(single.cf(0), 3u);
  EXPECT_THROW(build_vocabulary(docs_of({{}, {}})), DataError);
}

TEST(Vectorize, BowCounts) {
  const auto docs = docs_of({{"a", "b", "a"}, {}});
  const auto v = build_vocabulary(docs);
  const auto m = bow_counts(docs, v);
  ASSERT_EQ(m.row(0).size(), 2u);
  EXPECT_EQ(m.row(0)[0].count, 2u);
  EXPECT_EQ(m.row(0)[1].count, 1u);
  EXPECT_TRUE(m.row_empty(1));
  EXPECT_THROW(bow_counts(docs_of({{"zzz"}}), v), DataError);
}

TEST(Vectorize, BowMatchesTallyOracle) {
  std::mt19937_64 rng(3);
  const auto raw = random_corpus(rng, 20, 30);
  const auto docs = docs_of(raw);
  const auto v = build_vocabulary(docs);
  const auto m = bow_counts(docs, v);
  std::set<std::string> distinct;
  for (std::size_t d = 0; d < raw.size(); ++d) {
    std::map<std::string, std::uint32_t> tally;
    for (const auto& t : raw[d]) ++tally[t];
    distinct.insert(raw[d].begin(), raw[d].end());
    std::map<std::string, std::uint32_t> got;
    for (const auto& e : m.row(d)) got[v.term(e.term)] = e.count;
    EXPECT_EQ(got, tally);
    EXPECT_EQ(m.row_length(d), raw[d].size());
  }
  EXPECT_EQ(v.size(), distinct.size());
}

TEST(Vectorize, TfidfTwoDocuments) {
  const auto docs = docs_of({{"a", "b"}, {"a"}});
  const auto v = build_vocabulary(docs);
  const auto m = tfidf(bow_counts(docs, v));
  EXPECT_NEAR(weight_of(m, v, 0, "b"), 0.6931471805599453, 1e-15);
  EXPECT_EQ(weight_of(m, v, 0, "a"), 0.0);
}

TEST(Vectorize, TfidfScalesWithCounts) {
  const auto base = docs_of({{"a", "b"}, {"a", "c"}, {"c"}});
  const auto tripled = docs_of({{"a", "a", "a", "b", "b", "b"}, {"a", "c"}, {"c"}});
  const auto v1 = build_vocabulary(base);
  const auto v3 = build_vocabulary(tripled);
  const auto m1 = tfidf(bow_counts(base, v1));
  const auto m3 = tfidf(bow_counts(tripled, v3));
  for (const char* t : {"a", "b"})
    EXPECT_NEAR(weight_of(m3, v3, 0, t), 3.0 * weight_of(m1, v1, 0, t), 1e-12);
}

TEST(Vectorize, TfidfPropertyOnRandomCorpora) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto raw = random_corpus(rng, 25, 40);
    const auto docs = docs_of(raw);
    bool any = false;
    for (const auto& d : raw) any = any || !d.empty();
    if (!any) continue;
    const auto v = build_vocabulary(docs);
    const auto m = tfidf(bow_counts(docs, v));
    std::size_t n = 0;
    for (const auto& d : raw) n += d.empty() ? 0 : 1;
    for (std::size_t d = 0; d < raw.size(); ++d) {
      std::map<std::string, int> tally;
      for (const auto& t : raw[d]) ++tally[t];
      for (const auto& [term, count] : tally) {
        std::size_t df = 0;
        for (const auto& other : raw) df += std::count(other.begin(), other.end(), term) > 0;
        const double expect = count * std::log(static_cast<double>(n) / static_cast<double>(df));
        EXPECT_NEAR(weight_of(m, v, d, term), expect, 1e-12 * std::max(1.0, std::abs(expect)));
      }
    }
  }
}

TEST(Vectorize, DictionaryFilterIdentity) {
  const auto docs = docs_of({{"a", "b"}, {"a", "c"}, {"c", "d"}});
  const auto v = build_vocabulary(docs);
  const auto m = tfidf(bow_counts(docs, v));
  const auto f = dictionary_filter(v, m, {1, 1.0, std::nullopt});
  ASSERT_EQ(f.vocab.size(), v.size());
  for (TermId t = 0; t < v.size(); ++t) EXPECT_EQ(f.vocab.term(t), v.term(t));
  EXPECT_EQ(f.matrix.weights(), m.weights());
}

TEST(Vectorize, DictionaryFilterMinDf) {
  const auto docs = docs_of({{"a", "b"}, {"a"}});
  const auto v = build_vocabulary(docs);
  const auto f = dictionary_filter(v, tfidf(bow_counts(docs, v)), {2, 1.0, std::nullopt});
  ASSERT_EQ(f.vocab.size(), 1u);
  EXPECT_EQ(f.vocab.term(0), "a");
  EXPECT_THROW(dictionary_filter(v, tfidf(bow_counts(docs, v)), {3, 1.0, std::nullopt}), UsageError);
  EXPECT_THROW(dictionary_filter(v, tfidf(bow_counts(docs, v)), {1, 0.0, std::nullopt}), UsageError);
  EXPECT_THROW(dictionary_filter(v, tfidf(bow_counts(docs, v)), {2, 0.5, std::nullopt}), DataError);
}

TEST(Vectorize, DictionaryFilterTopMMatchesSortOracle) {
  std::mt19937_64 rng(9);
  const auto docs = docs_of(random_corpus(rng, 400, 300));
  const auto v = build_vocabulary(docs);
  const auto m = tfidf(bow_counts(docs, v));
  const auto f = dictionary_filter(v, m, {1, 1.0, 100});
  std::vector<TermId> ids(v.size());
  for (TermId t = 0; t < v.size(); ++t) ids[t] = t;
  std::sort(ids.begin(), ids.end(), [&](TermId a, TermId b) {
    return v.cf(a) != v.cf(b) ? v.cf(a) > v.cf(b) : a < b;
  });
  std::set<std::string> expect, got;
  for (std::size_t i = 0; i < 100; ++i) expect.insert(v.term(ids[i]));
  for (TermId t = 0; t < f.vocab.size(); ++t) got.insert(f.vocab.term(t));
  EXPECT_EQ(got, expect);
  // Ids stay dense and in the original relative order.
  EXPECT_TRUE(std::is_sorted(f.kept.begin(), f.kept.end()));
  for (TermId t = 0; t < f.vocab.size(); ++t) EXPECT_EQ(*f.vocab.find(f.vocab.term(t)), t);
}

TEST(Vectorize, CsvRoundTrip) {
  const auto docs = docs_of({{"a", "b", "b"}, {}, {"a", "c,d"}});
  const auto v = build_vocabulary(docs);
  const auto m = tfidf(bow_counts(docs, v));
  std::stringstream ms, vs;
  write_matrix_csv(ms, m);
  write_vocabulary_csv(vs, v);
  const auto m2 = read_matrix_csv(ms, m.n_docs(), m.n_terms());
  const auto v2 = read_vocabulary_csv(vs);
  ASSERT_EQ(v2.size(), v.size());
  EXPECT_EQ(v2.term(2), "c,d");
  EXPECT_EQ(m2.n_docs(), 3u);
  EXPECT_EQ(m2.weights(), m.weights());
  std::istringstream bad("doc_id,term_id,count,weight\n0,9,1,0\n");
  EXPECT_THROW(read_matrix_csv(bad, 1, 3), DataError);
}
