#include "dtopics/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "dtopics/error.hpp"
#include "dtopics/random.hpp"
#include "parallel.hpp"

namespace dtopics {
namespace {

double dot(const SparseMatrix::RowView& x, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.cols.size(); ++i) s += x.values[i] * c[x.cols[i]];
  return s;
}

double squared_norm(std::span<const double> c) {
  double s = 0.0;
  for (double v : c) s += v * v;
  return s;
}

std::size_t count_distinct_rows(const SparseMatrix& rows, std::size_t stop_at) {
  std::set<std::vector<std::pair<std::uint32_t, double>>> seen;
  std::vector<std::pair<std::uint32_t, double>> key;
  for (std::size_t r = 0; r < rows.rows() && seen.size() < stop_at; ++r) {
    const auto view = rows.row(r);
    key.clear();
    for (std::size_t i = 0; i < view.cols.size(); ++i) key.emplace_back(view.cols[i], view.values[i]);
    seen.insert(key);
  }
  return seen.size();
}

// One Lloyd run. Distances use ||x||^2 + ||c||^2 - 2 x.c so each
// assignment pass costs O(nnz * k).
class LloydRun {
 public:
  LloydRun(const SparseMatrix& rows, std::size_t k)
      : rows_(rows),
        k_(k),
        row_norm_(rows.rows()),
        centroids_(k, rows.cols()),
        centroid_norm_(k, 0.0),
        assignments_(rows.rows(), 0),
        dist_(rows.rows(), 0.0) {
    for (std::size_t r = 0; r < rows.rows(); ++r) row_norm_[r] = rows.row_squared_norm(r);
  }

  void seed_plus_plus(Rng& rng) {
    const std::size_t n = rows_.rows();
    set_centroid_to_row(0, uniform_index(rng, n));
    std::vector<double> nearest(n);
    for (std::size_t r = 0; r < n; ++r) nearest[r] = distance(r, 0);
    for (std::size_t c = 1; c < k_; ++c) {
      double total = 0.0;
      for (double d : nearest) total += d;
      std::size_t pick = n;
      if (total > 0.0) {
        const double u = uniform01(rng) * total;
        double cum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (nearest[r] <= 0.0) continue;
          cum += nearest[r];
          pick = r;
          if (cum > u) break;
        }
      }
      if (pick == n) throw DataError("k-means++ seeding ran out of distinct rows");
      set_centroid_to_row(c, pick);
      for (std::size_t r = 0; r < n; ++r) nearest[r] = std::min(nearest[r], distance(r, c));
    }
  }

  // Returns true when any assignment changed.
  bool assign() {
    bool changed = false;
    for (std::size_t r = 0; r < rows_.rows(); ++r) {
      std::uint32_t best = 0;
      double best_d = distance(r, 0);
      for (std::size_t c = 1; c < k_; ++c) {
        const double d = distance(r, c);
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
      if (best != assignments_[r]) changed = true;
      assignments_[r] = best;
      dist_[r] = best_d;
    }
    return changed;
  }

  // Moves every centroid to the mean of its rows, repairing empty clusters.
  // Returns the largest centroid displacement.
  double update() {
    const DenseMatrix previous = centroids_;
    std::vector<std::size_t> sizes = recompute_means();
    for (std::size_t c = 0; c < k_; ++c) {
      if (sizes[c] != 0) continue;
      refresh_distances();
      std::size_t far = rows_.rows();
      for (std::size_t r = 0; r < rows_.rows(); ++r) {
        if (sizes[assignments_[r]] < 2) continue;
        if (far == rows_.rows() || dist_[r] > dist_[far]) far = r;
      }
      if (far == rows_.rows()) throw InvariantError("no donor row for an empty cluster");
      assignments_[far] = static_cast<std::uint32_t>(c);
      sizes = recompute_means();
    }
    refresh_distances();
    double shift = 0.0;
    for (std::size_t c = 0; c < k_; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < rows_.cols(); ++j) {
        const double diff = centroids_(c, j) - previous(c, j);
        s += diff * diff;
      }
      shift = std::max(shift, std::sqrt(s));
    }
    return shift;
  }

  double current_wss() const {
    double s = 0.0;
    for (double d : dist_) s += d;
    return s;
  }

  KMeansModel take_model() && {
    KMeansModel m;
    m.k = k_;
    m.centroids = std::move(centroids_);
    m.assignments = std::move(assignments_);
    return m;
  }

 private:
  double distance(std::size_t r, std::size_t c) const {
    const double d = row_norm_[r] + centroid_norm_[c] - 2.0 * dot(rows_.row(r), centroids_.row(c));
    // Cancellation noise on (near-)identical vectors.
    const double scale = row_norm_[r] + centroid_norm_[c];
    return d <= 1e-12 * scale ? 0.0 : d;
  }

  void set_centroid_to_row(std::size_t c, std::size_t r) {
    auto dst = centroids_.row(c);
    std::fill(dst.begin(), dst.end(), 0.0);
    const auto view = rows_.row(r);
    for (std::size_t i = 0; i < view.cols.size(); ++i) dst[view.cols[i]] = view.values[i];
    centroid_norm_[c] = squared_norm(dst);
  }

  std::vector<std::size_t> recompute_means() {
    std::vector<std::size_t> sizes(k_, 0);
    DenseMatrix sums(k_, rows_.cols());
    for (std::size_t r = 0; r < rows_.rows(); ++r) {
      const auto c = assignments_[r];
      ++sizes[c];
      const auto view = rows_.row(r);
      for (std::size_t i = 0; i < view.cols.size(); ++i) sums(c, view.cols[i]) += view.values[i];
    }
    for (std::size_t c = 0; c < k_; ++c) {
      if (sizes[c] == 0) continue;  // keeps its previous position until repaired
      const double inv = 1.0 / static_cast<double>(sizes[c]);
      for (std::size_t j = 0; j < rows_.cols(); ++j) centroids_(c, j) = sums(c, j) * inv;
      centroid_norm_[c] = squared_norm(centroids_.row(c));
    }
    return sizes;
  }

  void refresh_distances() {
    for (std::size_t r = 0; r < rows_.rows(); ++r) dist_[r] = distance(r, assignments_[r]);
  }

  const SparseMatrix& rows_;
  std::size_t k_;
  std::vector<double> row_norm_;
  DenseMatrix centroids_;
  std::vector<double> centroid_norm_;
  std::vector<std::uint32_t> assignments_;
  std::vector<double> dist_;
};

KMeansModel run_once(const SparseMatrix& rows, const KMeansOptions& options, std::uint64_t seed) {
  Rng rng(seed);
  LloydRun run(rows, options.k);
  run.seed_plus_plus(rng);
  run.assign();
  std::vector<double> trace{run.current_wss()};
  std::size_t iterations = 0;
  bool changed = true;
  while (iterations < options.max_iter) {
    ++iterations;
    const double shift = run.update();
    trace.push_back(run.current_wss());
    changed = run.assign();
    trace.push_back(run.current_wss());
    if (!changed || shift < options.tol) break;
  }
  if (changed) {
    // Stopped on tolerance or the iteration cap: report the means of the
    // final partition.
    run.update();
    trace.push_back(run.current_wss());
  }
  KMeansModel model = std::move(run).take_model();
  model.iterations_run = iterations;
  model.seed = seed;
  model.wss_trace = std::move(trace);
  model.wss = wss(rows, model);
  return model;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

KMeansModel kmeans(const SparseMatrix& rows, const KMeansOptions& options) {
  if (options.k < 1) throw UsageError("k must be at least 1");
  if (options.restarts < 1) throw UsageError("restarts must be at least 1");
  if (rows.rows() == 0) throw DataError("k-means needs at least one row");
  if (count_distinct_rows(rows, options.k) < options.k)
    throw DataError("k = " + std::to_string(options.k) + " exceeds the number of distinct rows");

  std::vector<KMeansModel> runs(options.restarts);
  detail::parallel_for(options.restarts, options.workers, [&](std::size_t r) {
    runs[r] = run_once(rows, options, derive_seed(options.seed, r));
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].wss < runs[best].wss) best = r;
  return std::move(runs[best]);
}

double wss(const SparseMatrix& rows, const KMeansModel& model) {
  if (model.assignments.size() != rows.rows() || model.centroids.cols() != rows.cols())
    throw UsageError("model and matrix dimensions differ");
  double total = 0.0;
  std::vector<double> diff(rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto a = model.assignments[r];
    if (a >= model.k) throw UsageError("assignment out of range");
    const auto c = model.centroids.row(a);
    std::copy(c.begin(), c.end(), diff.begin());
    const auto view = rows.row(r);
    for (std::size_t i = 0; i < view.cols.size(); ++i) diff[view.cols[i]] -= view.values[i];
    total += squared_norm(diff);
  }
  return total;
}

std::size_t select_knee(std::span<const double> curve, std::size_t k_min,
                        std::vector<double>* distances) {
  const std::size_t n = curve.size();
  std::vector<double> dist(n, 0.0);
  std::size_t selected = k_min;
  if (n >= 3) {
    const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
    const double range = *hi - *lo;
    if (range > 0.0) {
      // Points (x_i, y_i) scaled to [0,1]^2; chord from first to last.
      auto y = [&](std::size_t i) { return (curve[i] - *lo) / range; };
      const double x0 = 0.0, y0 = y(0), x1 = 1.0, y1 = y(n - 1);
      const double len = std::hypot(x1 - x0, y1 - y0);
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n - 1);
        dist[i] = std::abs((y1 - y0) * x - (x1 - x0) * y(i) + x1 * y0 - y1 * x0) / len;
        if (dist[i] > best) {
          best = dist[i];
          selected = k_min + i;
        }
      }
      if (best < 1e-9) selected = k_min;
    }
  }
  if (distances) *distances = std::move(dist);
  return selected;
}

ElbowResult elbow(const SparseMatrix& rows, const ElbowOptions& options) {
  if (options.k_min < 1 || options.k_max <= options.k_min)
    throw UsageError("elbow needs k_max > k_min >= 1");
  if (options.k_max > rows.rows())
    throw DataError("k_max = " + std::to_string(options.k_max) + " exceeds the " +
                    std::to_string(rows.rows()) + " rows");
  ElbowResult result;
  result.k_min = options.k_min;
  result.k_max = options.k_max;
  const std::size_t n = options.k_max - options.k_min + 1;
  result.wss_curve.resize(n);
  detail::parallel_for(n, options.workers, [&](std::size_t i) {
    KMeansOptions km;
    km.k = options.k_min + i;
    km.seed = derive_seed(options.seed, km.k);
    km.restarts = options.restarts;
    km.max_iter = options.max_iter;
    km.tol = options.tol;
    result.wss_curve[i] = kmeans(rows, km).wss;
  });
  result.selected_k = select_knee(result.wss_curve, options.k_min, &result.distances);
  return result;
}

SparseMatrix term_profiles(const DocTermMatrix& matrix) {
  if (matrix.n_terms() == 0) throw DataError("empty vocabulary");
  if (!matrix.has_weights()) throw UsageError("term profiles need TF-IDF weights");
  std::vector<std::vector<std::uint32_t>> cols(matrix.n_terms());
  std::vector<std::vector<double>> values(matrix.n_terms());
  for (std::size_t d = 0; d < matrix.n_docs(); ++d) {
    const auto r = matrix.row(d);
    const auto w = matrix.row_weights(d);
    for (std::size_t i = 0; i < r.size(); ++i) {
      cols[r[i].term].push_back(static_cast<std::uint32_t>(d));
      values[r[i].term].push_back(w[i]);
    }
  }
  SparseMatrix out(matrix.n_docs());
  for (std::size_t t = 0; t < matrix.n_terms(); ++t) {
    const double norm = std::sqrt(squared_norm(values[t]));
    if (norm > 0.0)
      for (double& v : values[t]) v /= norm;
    out.push_row(cols[t], values[t]);
  }
  return out;
}

void write_elbow_csv(std::ostream& out, const ElbowResult& result) {
  out << "k,wss,chord_distance,selected\n";
  for (std::size_t i = 0; i < result.wss_curve.size(); ++i) {
    const std::size_t k = result.k_min + i;
    out << k << ',' << csv::format_double(result.wss_curve[i]) << ','
        << csv::format_double(i < result.distances.size() ? result.distances[i] : 0.0) << ','
        << (k == result.selected_k ? 1 : 0) << '\n';
  }
}

ElbowResult read_elbow_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      csv::split_line(line) != std::vector<std::string>{"k", "wss", "chord_distance", "selected"})
    throw DataError("elbow CSV must start with 'k,wss,chord_distance,selected'");
  ElbowResult result;
  bool first = true;
  bool have_selection = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split_line(line);
    if (f.size() != 4) throw DataError("elbow CSV: expected 4 fields");
    const auto k = csv::parse_number<std::size_t>(f[0], "k");
    if (first) {
      result.k_min = k;
      first = false;
    } else if (k != result.k_max + 1) {
      throw DataError("elbow CSV: k values must be consecutive");
    }
    result.k_max = k;
    result.wss_curve.push_back(csv::parse_number<double>(f[1], "wss"));
    result.distances.push_back(csv::parse_number<double>(f[2], "chord_distance"));
    if (f[3] == "1") {
      result.selected_k = k;
      have_selection = true;
    }
  }
  if (first || !have_selection) throw DataError("elbow CSV has no selected row");
  return result;
}

std::string elbow_svg(const ElbowResult& result) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double y_max = result.wss_curve.empty()
                           ? 1.0
                           : std::max(*std::max_element(result.wss_curve.begin(), result.wss_curve.end()), 1e-12);
  const double span = static_cast<double>(std::max<std::size_t>(result.k_max - result.k_min, 1));
  auto px = [&](std::size_t k) { return kLeft + plot_w * static_cast<double>(k - result.k_min) / span; };
  auto py = [&](double w) { return kTop + plot_h * (1.0 - w / y_max); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
    << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (std::size_t k = result.k_min; k <= result.k_max; ++k)
    s << "<text x=\"" << fmt2(px(k)) << "\" y=\"" << kTop + plot_h + 18
      << "\" font-size=\"11\" text-anchor=\"middle\">" << k << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double w = y_max * i / 4.0;
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt2(py(w) + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << fmt2(w) << "</text>\n";
  }
  s << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
    << "\" font-size=\"13\" text-anchor=\"middle\">number of clusters k</text>\n";
  s << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16 " << kTop + plot_h / 2 << ")\">WSS</text>\n";
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < result.wss_curve.size(); ++i) {
    if (i) s << ' ';
    s << fmt2(px(result.k_min + i)) << ',' << fmt2(py(result.wss_curve[i]));
  }
  s << "\"/>\n";
  for (std::size_t i = 0; i < result.wss_curve.size(); ++i) {
    const std::size_t k = result.k_min + i;
    const bool sel = k == result.selected_k;
    s << "<circle cx=\"" << fmt2(px(k)) << "\" cy=\"" << fmt2(py(result.wss_curve[i]))
      << "\" r=\"" << (sel ? 6 : 3) << "\" fill=\"" << (sel ? "crimson" : "steelblue") << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace dtopics
