#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dtopics/matrix.hpp"
#include "dtopics/vectorize.hpp"

namespace dtopics {

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t restarts = 1;
  std::size_t max_iter = 300;
  double tol = 1e-10;  // stop when no centroid moves farther than this
  std::size_t workers = 1;
};

struct KMeansModel {
  std::size_t k = 0;
  DenseMatrix centroids;               // k x dims
  std::vector<std::uint32_t> assignments;
  double wss = 0.0;
  std::size_t iterations_run = 0;
  std::uint64_t seed = 0;              // seed of the winning restart
  std::vector<double> wss_trace;       // after seeding and each half-step
};

// Lloyd iterations from k-means++ seeding, best of `restarts` runs by WSS.
// Restart r draws from derive_seed(seed, r). Nearest-centroid ties go to
// the lowest cluster id; an emptied cluster takes the point farthest from
// its centroid. Throws DataError for zero rows or k above the number of
// distinct rows.
KMeansModel kmeans(const SparseMatrix& rows, const KMeansOptions& options);

// Sum of squared Euclidean distances to the assigned centroids.
double wss(const SparseMatrix& rows, const KMeansModel& model);

struct ElbowOptions {
  std::size_t k_min = 1;
  std::size_t k_max = 20;
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
  std::size_t max_iter = 300;
  double tol = 1e-10;
  std::size_t workers = 1;
};

struct ElbowResult {
  std::size_t k_min = 1;
  std::size_t k_max = 1;
  std::vector<double> wss_curve;  // index i holds k = k_min + i
  std::vector<double> distances;  // normalized chord distance per k
  std::size_t selected_k = 1;
};

// Knee of a WSS curve: after min-max scaling both axes, the point farthest
// from the chord joining the end points. Equal distances resolve to the
// smaller k; a curve with every distance below 1e-9 selects k_min.
std::size_t select_knee(std::span<const double> curve, std::size_t k_min,
                        std::vector<double>* distances = nullptr);

ElbowResult elbow(const SparseMatrix& rows, const ElbowOptions& options);

// One L2-normalized row per term holding its TF-IDF profile across documents.
SparseMatrix term_profiles(const DocTermMatrix& matrix);

void write_elbow_csv(std::ostream& out, const ElbowResult& result);
ElbowResult read_elbow_csv(std::istream& in);
std::string elbow_svg(const ElbowResult& result);

}  // namespace dtopics
