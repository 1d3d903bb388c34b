// Slow, obviously-correct reference computations used to check the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

// WSS of a labelling with centroids at the cluster means.
inline double partition_wss(const Rows& rows, const std::vector<std::size_t>& label, std::size_t k) {
  const std::size_t dims = rows.empty() ? 0 : rows[0].size();
  Rows mean(k, std::vector<double>(dims, 0.0));
  std::vector<std::size_t> size(k, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ++size[label[i]];
    for (std::size_t j = 0; j < dims; ++j) mean[label[i]][j] += rows[i][j];
  }
  for (std::size_t c = 0; c < k; ++c)
    for (auto& v : mean[c]) v /= size[c] ? static_cast<double>(size[c]) : 1.0;
  double s = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) s += sq_dist(rows[i], mean[label[i]]);
  return s;
}

// Minimum WSS over every assignment of rows to k non-empty clusters.
inline double exhaustive_wss(const Rows& rows, std::size_t k) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::set<std::size_t> used(label.begin(), label.end());
    if (used.size() == k) best = std::min(best, partition_wss(rows, label, k));
    std::size_t i = 0;
    while (i < n && ++label[i] == k) label[i++] = 0;
    if (i == n) break;
  }
  return best;
}

// Knee by perpendicular distance to the chord, both axes scaled to [0, 1].
inline std::size_t chord_knee(const std::vector<double>& wss, std::size_t k_min) {
  const std::size_t n = wss.size();
  const double lo = *std::min_element(wss.begin(), wss.end());
  const double hi = *std::max_element(wss.begin(), wss.end());
  auto y = [&](std::size_t i) { return hi > lo ? (wss[i] - lo) / (hi - lo) : 0.0; };
  auto x = [&](std::size_t i) { return n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0; };
  const double x0 = x(0), y0 = y(0), x1 = x(n - 1), y1 = y(n - 1);
  const double len = std::hypot(x1 - x0, y1 - y0);
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = len > 0 ? std::abs((y1 - y0) * x(i) - (x1 - x0) * y(i) + x1 * y0 - y1 * x0) / len : 0.0;
    if (d > best_d + 1e-12) {
      best_d = d;
      best = i;
    }
  }
  return best_d < 1e-9 ? k_min : k_min + best;
}

// Largest total overlap of any one-to-one map from predicted ids to labels.
inline std::size_t best_overlap(const std::vector<std::int64_t>& pred, const std::vector<std::string>& gold) {
  std::vector<std::int64_t> ids(pred.begin(), pred.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::string> labels(gold.begin(), gold.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::map<std::pair<std::int64_t, std::string>, std::size_t> cell;
  for (std::size_t i = 0; i < pred.size(); ++i) ++cell[{pred[i], gold[i]}];
  // Pad the label side with "unmapped" slots and enumerate permutations.
  std::vector<int> slot(std::max(ids.size(), labels.size()));
  for (std::size_t i = 0; i < slot.size(); ++i) slot[i] = static_cast<int>(i);
  std::size_t best = 0;
  do {
    std::size_t total = 0;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      const auto g = static_cast<std::size_t>(slot[p]);
      if (g < labels.size()) {
        const auto it = cell.find({ids[p], labels[g]});
        if (it != cell.end()) total += it->second;
      }
    }
    best = std::max(best, total);
  } while (std::next_permutation(slot.begin(), slot.end()));
  return best;
}

inline double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end()), uni = sa;
  uni.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (const auto& x : sa) inter += sb.count(x);
  return uni.empty() ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni.size());
}

struct Partitions {
  std::vector<std::int64_t> pred;
  std::vector<std::string> gold;
};

// Random labelling pair with up to max_pred predicted ids and max_gold labels.
inline Partitions random_partitions(std::mt19937_64& rng, std::size_t max_pred, std::size_t max_gold) {
  std::uniform_int_distribution<std::size_t> n_dist(1, 60), p_dist(1, max_pred), g_dist(1, max_gold);
  const std::size_t n = n_dist(rng), np = p_dist(rng), ng = g_dist(rng);
  std::uniform_int_distribution<std::int64_t> pick_p(0, static_cast<std::int64_t>(np) - 1);
  std::uniform_int_distribution<std::size_t> pick_g(0, ng - 1);
  Partitions out;
  for (std::size_t i = 0; i < n; ++i) {
    out.pred.push_back(pick_p(rng) * 7 - 3);  // ids need not be dense
    out.gold.push_back("g" + std::to_string(pick_g(rng)));
  }
  return out;
}

}  // namespace oracle
