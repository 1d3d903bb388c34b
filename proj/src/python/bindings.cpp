// Python bindings for the main operations. Matrices cross the boundary as
// dense NumPy arrays; documents as lists of token lists.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dtopics/error.hpp"
#include "dtopics/pipeline.hpp"
#include "dtopics/synth.hpp"

namespace py = pybind11;
using namespace dtopics;

namespace {

using Docs = std::vector<std::vector<std::string>>;

std::vector<TokenizedDocument> to_documents(const Docs& tokens) {
  std::vector<TokenizedDocument> out;
  for (const auto& t : tokens) {
    TokenizedDocument d;
    d.doc_id = out.size();
    d.tokens = t;
    out.push_back(std::move(d));
  }
  return out;
}

py::array_t<double> to_numpy(const DenseMatrix& m) {
  py::array_t<double> a({m.rows(), m.cols()});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) v(r, c) = m(r, c);
  return a;
}

SparseMatrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
  if (x.ndim() != 2) throw UsageError("expected a 2-d array");
  auto v = x.unchecked<2>();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(v.shape(0)));
  for (py::ssize_t r = 0; r < v.shape(0); ++r)
    for (py::ssize_t c = 0; c < v.shape(1); ++c) rows[r].push_back(v(r, c));
  return SparseMatrix::from_rows(rows);
}

py::array_t<double> weights_dense(const DocTermMatrix& m) {
  py::array_t<double> a({m.n_docs(), m.n_terms()});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.n_docs(); ++r) {
    for (std::size_t c = 0; c < m.n_terms(); ++c) v(r, c) = 0.0;
    const auto row = m.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) v(r, row[i].term) = m.row_weights(r)[i];
  }
  return a;
}

std::vector<std::string> terms_of(const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (TermId t = 0; t < vocab.size(); ++t) out.push_back(vocab.term(t));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dialogue topic modelling core";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  m.def(
      "preprocess",
      [](const std::vector<std::string>& texts, std::size_t n_char_min, const std::string& case_mode) {
        PipelineConfig c;
        c.n_char_min = n_char_min;
        c.case_mode = parse_case_mode(case_mode);
        std::vector<RawDocument> raw;
        for (const auto& t : texts) raw.push_back({raw.size(), {}, t, std::nullopt});
        Docs out;
        for (auto& d : run_pipeline(raw, c)) out.push_back(std::move(d.tokens));
        return out;
      },
      py::arg("texts"), py::arg("n_char_min") = 3, py::arg("case") = "lower",
      "Run the default filter chain over raw texts.");

  m.def(
      "tfidf",
      [](const Docs& docs, bool filter, std::size_t min_df, double max_df_ratio) {
        const auto documents = to_documents(docs);
        const auto vocab = build_vocabulary(documents);
        auto weighted = tfidf(bow_counts(documents, vocab));
        if (!filter) return py::make_tuple(terms_of(vocab), weights_dense(weighted));
        DictionaryPolicy p;
        p.min_df = min_df;
        p.max_df_ratio = max_df_ratio;
        const auto f = dictionary_filter(vocab, weighted, p);
        return py::make_tuple(terms_of(f.vocab), weights_dense(f.matrix));
      },
      py::arg("docs"), py::arg("filter") = false, py::arg("min_df") = 5, py::arg("max_df_ratio") = 0.5,
      "Vocabulary and dense TF-IDF matrix of tokenized documents.");

  m.def(
      "kmeans",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, std::size_t k,
         std::size_t restarts, std::uint64_t seed) {
        KMeansOptions o;
        o.k = k;
        o.restarts = restarts;
        o.seed = seed;
        const auto r = kmeans(from_numpy(x), o);
        py::dict d;
        d["labels"] = std::vector<std::size_t>(r.assignments.begin(), r.assignments.end());
        d["centroids"] = to_numpy(r.centroids);
        d["wss"] = r.wss;
        return d;
      },
      py::arg("x"), py::arg("k"), py::arg("restarts") = 8, py::arg("seed") = 0);

  m.def(
      "elbow",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, std::size_t k_min,
         std::size_t k_max, std::size_t restarts, std::uint64_t seed) {
        ElbowOptions o;
        o.k_min = k_min;
        o.k_max = k_max;
        o.restarts = restarts;
        o.seed = seed;
        const auto r = elbow(from_numpy(x), o);
        py::dict d;
        d["wss_curve"] = r.wss_curve;
        d["selected_k"] = r.selected_k;
        return d;
      },
      py::arg("x"), py::arg("k_min") = 1, py::arg("k_max") = 20, py::arg("restarts") = 8, py::arg("seed") = 0);

  m.def(
      "train_lda",
      [](const Docs& docs, std::size_t topics, double alpha, double beta, std::size_t iterations,
         std::size_t workers, std::uint64_t seed, std::size_t top) {
        const auto documents = to_documents(docs);
        const auto vocab = build_vocabulary(documents);
        LdaConfig c;
        c.topics = topics;
        c.alpha = alpha;
        c.beta = beta;
        c.iterations = iterations;
        c.workers = workers;
        c.seed = seed;
        LdaModel model = [&] {
          py::gil_scoped_release release;
          return train(bow_counts(documents, vocab), c);
        }();
        const auto ph = phi(model);
        py::list words;
        for (const auto& s : top_words(ph, vocab, top)) {
          py::list row;
          for (const auto& e : s.entries) row.append(py::make_tuple(e.term, e.weight));
          words.append(row);
        }
        py::dict d;
        d["vocabulary"] = terms_of(vocab);
        d["phi"] = to_numpy(ph);
        d["theta"] = to_numpy(theta(model));
        d["top_words"] = words;
        d["dominant_topics"] = dominant_topics(model);
        return d;
      },
      py::arg("docs"), py::arg("topics"), py::arg("alpha") = 0.5, py::arg("beta") = 0.1,
      py::arg("iterations") = 1000, py::arg("workers") = 1, py::arg("seed") = 0, py::arg("top") = 10);

  m.def(
      "score",
      [](const std::vector<ClusterId>& pred, const std::vector<std::string>& gold, const std::string& align) {
        const auto a = align_labels(pred, gold, parse_align_method(align));
        const auto r = prf(pred, gold, a);
        py::dict mapping;
        for (const auto& [id, label] : a.mapping) mapping[py::int_(id)] = label ? py::cast(*label) : py::none();
        py::dict d;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        d["f_measure"] = r.f_measure;
        d["mapping"] = mapping;
        return d;
      },
      py::arg("pred"), py::arg("gold"), py::arg("align") = "hungarian",
      "Micro precision, recall and F after aligning cluster ids to labels.");

  m.def(
      "planted_corpus",
      [](std::uint64_t seed, std::size_t docs, std::size_t vocab_size, std::size_t topics) {
        PlantedOptions o;
        o.seed = seed;
        o.docs = docs;
        o.vocab_size = vocab_size;
        o.topics = topics;
        const auto c = planted_corpus(o);
        Docs tokens;
        std::vector<std::string> labels;
        for (const auto& d : c.docs) {
          tokens.push_back(d.tokens);
          labels.push_back(*d.gold_label);
        }
        return py::make_tuple(tokens, labels);
      },
      py::arg("seed") = 0, py::arg("docs") = 500, py::arg("vocab_size") = 1000, py::arg("topics") = 3);

  m.def(
      "run_all",
      [](const std::optional<std::string>& config, const std::optional<std::filesystem::path>& workdir,
         const std::optional<std::string>& input, std::optional<std::uint64_t> seed) {
        RunConfig c = config ? RunConfig::from_ini(*config) : RunConfig{};
        c.apply_environment();
        if (seed) c.seed = *seed;
        if (workdir) c.workdir = *workdir;
        if (input) c.input = *input;
        py::gil_scoped_release release;
        run_all(c);
      },
      py::arg("config") = py::none(), py::arg("workdir") = py::none(), py::arg("input") = py::none(),
      py::arg("seed") = py::none(), "Every pipeline stage, writing artifacts to the work directory.");
}
