#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

// Sliding-window (delay) embeddings of uniformly sampled series, greedy
// maxmin landmarking, and PCA projection.

namespace twisty::slidingwindow {

struct TimeSeries {
  std::vector<double> values;
  double t0 = 0.0;
  double dt = 1.0;
};

struct SlidingWindowConfig {
  std::size_t delays = 0;     // N; each window has N+1 coordinates
  std::size_t tau_steps = 1;  // delay expressed as an integer multiple of dt
  std::size_t stride = 1;     // spacing between consecutive window starts
};

struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> data;         // row-major, size() x dim
  std::vector<double> start_times;  // per-point provenance; may be empty

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
};

// Row j = (g(t_j), g(t_j + tau), ..., g(t_j + N tau)) with
// tau = tau_steps * dt and t_j advancing by stride * dt.
PointCloud sliding_window(const TimeSeries& ts, const SlidingWindowConfig& cfg);

double point_distance(const PointCloud& cloud, std::size_t i, std::size_t j);

struct LandmarkSet {
  std::vector<std::size_t> indices;
  double cover_radius = 0.0;  // max over cloud points of distance to the set
};

// Greedy maxmin: start at seed_index, repeatedly add the point farthest from
// the chosen set. Deterministic; ties resolved toward the lowest index.
LandmarkSet maxmin_landmarks(const PointCloud& cloud, std::size_t k,
                             std::size_t seed_index);

// Mean-centered principal-component projection to R^k. Second element lists
// the per-component explained variance fractions, non-increasing.
std::pair<PointCloud, std::vector<double>> pca_project(const PointCloud& cloud,
                                                       std::size_t k);

}  // namespace twisty::slidingwindow
