#include "dtopics/topics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dtopics/error.hpp"
#include "unicode.hpp"

namespace dtopics {
namespace {

constexpr double kMinFont = 12.0;
constexpr double kMaxFont = 48.0;
constexpr double kCanvasWidth = 600.0;
constexpr double kMargin = 10.0;
constexpr double kGap = 10.0;

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::vector<TopicSummary> top_words(const DenseMatrix& phi, const Vocabulary& vocab, std::size_t t) {
  if (t < 1) throw UsageError("need at least one word per topic");
  if (phi.cols() != vocab.size()) throw UsageError("phi and vocabulary sizes differ");
  std::vector<TopicSummary> out;
  std::vector<TermId> order(vocab.size());
  for (std::size_t k = 0; k < phi.rows(); ++k) {
    std::iota(order.begin(), order.end(), 0);
    const std::size_t n = std::min(t, order.size());
    auto better = [&](TermId a, TermId b) {
      if (phi(k, a) != phi(k, b)) return phi(k, a) > phi(k, b);
      return vocab.term(a) < vocab.term(b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);
    TopicSummary s;
    s.topic_id = k;
    for (std::size_t i = 0; i < n; ++i) s.entries.push_back({vocab.term(order[i]), phi(k, order[i])});
    out.push_back(std::move(s));
  }
  return out;
}

std::string tag_cloud_svg(const TopicSummary& summary) {
  if (summary.entries.empty()) throw UsageError("cannot draw an empty tag cloud");
  const auto [lo, hi] = std::minmax_element(
      summary.entries.begin(), summary.entries.end(),
      [](const TopicWord& a, const TopicWord& b) { return a.weight < b.weight; });
  const double w_min = lo->weight, w_max = hi->weight;
  auto font_size = [&](double w) {
    if (w_max == w_min) return (kMinFont + kMaxFont) / 2.0;
    return kMinFont + (kMaxFont - kMinFont) * (w - w_min) / (w_max - w_min);
  };

  struct Placed {
    const TopicWord* word;
    double size, x, baseline;
  };
  std::vector<Placed> placed;
  double x = kMargin, row_top = kMargin, row_height = 0.0;
  std::size_t row_start = 0;
  auto close_row = [&] {
    for (std::size_t i = row_start; i < placed.size(); ++i) placed[i].baseline = row_top + row_height * 0.8;
    row_top += row_height * 1.2;
    row_start = placed.size();
    row_height = 0.0;
    x = kMargin;
  };
  for (const auto& word : summary.entries) {
    const double size = font_size(word.weight);
    // Width estimate: 0.6 em per character.
    const double width = 0.6 * size * static_cast<double>(unicode::length(word.term));
    if (x > kMargin && x + width > kCanvasWidth - kMargin) close_row();
    placed.push_back({&word, size, x, 0.0});
    row_height = std::max(row_height, size);
    x += width + kGap;
  }
  close_row();
  const double height = row_top + kMargin;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kCanvasWidth) << "\" height=\""
    << fmt(height) << "\" viewBox=\"0 0 " << fmt(kCanvasWidth) << ' ' << fmt(height) << "\">\n";
  s << "<title>topic_" << summary.topic_id << "</title>\n";
  for (const auto& p : placed) {
    s << "<text x=\"" << fmt(p.x) << "\" y=\"" << fmt(p.baseline) << "\" font-family=\"sans-serif\" "
      << "font-size=\"" << fmt(p.size) << "\">" << xml_escape(p.word->term) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_topics_json(std::ostream& out, const std::vector<TopicSummary>& topics) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : topics) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : t.entries) words.push_back({{"term", w.term}, {"weight", w.weight}});
    j.push_back({{"topic_id", t.topic_id}, {"words", std::move(words)}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace dtopics
