#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "twisty/slidingwindow.hpp"

using namespace twisty::slidingwindow;

namespace {

TimeSeries sine_series(std::size_t n, double omega, double dt) {
  TimeSeries ts;
  ts.dt = dt;
  ts.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    ts.values[i] = std::sin(omega * static_cast<double>(i) * dt);
  return ts;
}

PointCloud random_cloud(std::mt19937& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  PointCloud cloud;
  cloud.dim = dim;
  cloud.data.resize(n * dim);
  for (double& x : cloud.data) x = dist(rng);
  return cloud;
}

}  // namespace

TEST_CASE("sliding_window row count and content") {
  TimeSeries ts;
  ts.t0 = 2.0;
  ts.dt = 0.5;
  ts.values.resize(100);
  for (std::size_t i = 0; i < 100; ++i) ts.values[i] = static_cast<double>(i);

  const PointCloud cloud = sliding_window(ts, {3, 7, 5});
  CHECK(cloud.dim == 4);
  CHECK(cloud.size() == (100 - 21 - 1) / 5 + 1);
  // Row r starts at index 5r and strides by 7.
  const auto row = cloud.point(2);
  CHECK(row[0] == 10.0);
  CHECK(row[1] == 17.0);
  CHECK(row[3] == 31.0);
  CHECK(cloud.start_times[2] == doctest::Approx(2.0 + 10 * 0.5));

  // N = 0 reproduces the series itself.
  const PointCloud flat = sliding_window(ts, {0, 1, 1});
  CHECK(flat.dim == 1);
  CHECK(flat.size() == 100);

  CHECK_THROWS_AS(sliding_window(ts, {50, 2, 1}), std::invalid_argument);
}

TEST_CASE("sine window cloud is planar") {
  const TimeSeries ts = sine_series(2000, 1.0, 0.05);
  const PointCloud cloud = sliding_window(ts, {20, 6, 1});
  const auto [projected, variance] = pca_project(cloud, 2);
  CHECK(variance.size() == 2);
  CHECK(variance[0] + variance[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("circular shift of a periodic series permutes the cloud") {
  // Period-25 series, window span 10, exactly 4 periods of window starts.
  const std::size_t period = 25, reps = 4;
  auto sample = [&](std::size_t i) {
    return std::sin(2.0 * 3.14159265358979 * (i % period) / period) +
           0.3 * std::cos(4.0 * 3.14159265358979 * (i % period) / period);
  };
  TimeSeries ts, shifted;
  ts.dt = shifted.dt = 1.0;
  for (std::size_t i = 0; i < period * reps + 10; ++i) {
    ts.values.push_back(sample(i));
    shifted.values.push_back(sample(i + 7));
  }

  const SlidingWindowConfig cfg{5, 2, 1};
  auto rows_of = [&](const TimeSeries& series) {
    const PointCloud cloud = sliding_window(series, cfg);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < period * reps; ++i) {
      const auto p = cloud.point(i);
      rows.emplace_back(p.begin(), p.end());
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  CHECK(rows_of(ts) == rows_of(shifted));
}

TEST_CASE("maxmin landmarks") {
  // 10x10 unit grid.
  PointCloud grid;
  grid.dim = 2;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      grid.data.push_back(i);
      grid.data.push_back(j);
    }

  SUBCASE("k = J covers exactly") {
    const LandmarkSet all = maxmin_landmarks(grid, 100, 0);
    CHECK(all.indices.size() == 100);
    CHECK(all.cover_radius == 0.0);
  }

  SUBCASE("k = 1 is the seed") {
    const LandmarkSet one = maxmin_landmarks(grid, 1, 0);
    CHECK(one.indices == std::vector<std::size_t>{0});
    CHECK(one.cover_radius == doctest::Approx(std::sqrt(81.0 + 81.0)));
  }

  SUBCASE("cover radius matches brute-force recomputation") {
    const LandmarkSet set = maxmin_landmarks(grid, 4, 0);
    double brute = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double nearest = 1e300;
      for (const std::size_t l : set.indices)
        nearest = std::min(nearest, point_distance(grid, p, l));
      brute = std::max(brute, nearest);
    }
    CHECK(set.cover_radius == doctest::Approx(brute).epsilon(1e-12));
  }

  SUBCASE("deterministic") {
    const LandmarkSet a = maxmin_landmarks(grid, 17, 3);
    const LandmarkSet b = maxmin_landmarks(grid, 17, 3);
    CHECK(a.indices == b.indices);
  }
}

TEST_CASE("pca_project") {
  std::mt19937 rng(50);

  SUBCASE("affine subspace captures all variance") {
    // Rank-2 cloud in R^5.
    PointCloud cloud;
    cloud.dim = 5;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double a = dist(rng), b = dist(rng);
      const double basis1[5] = {1, 0, 2, -1, 0.5};
      const double basis2[5] = {0, 1, -1, 0.5, 2};
      for (int k = 0; k < 5; ++k)
        cloud.data.push_back(3.0 + a * basis1[k] + b * basis2[k]);
    }
    const auto [projected, variance] = pca_project(cloud, 2);
    double total = 0.0;
    for (const double v : variance) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(variance[0] >= variance[1]);
  }

  SUBCASE("duplicated 1D data loads on the first component") {
    PointCloud cloud;
    cloud.dim = 3;
    for (int i = 0; i < 100; ++i) {
      const double x = static_cast<double>(i) / 10.0;
      cloud.data.insert(cloud.data.end(), {x, x, x});
    }
    const auto [projected, variance] = pca_project(cloud, 1);
    CHECK(variance[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("projection is non-expansive") {
    const PointCloud cloud = random_cloud(rng, 60, 6);
    const auto [projected, variance] = pca_project(cloud, 3);
    for (std::size_t i = 0; i < cloud.size(); i += 5)
      for (std::size_t j = i + 1; j < cloud.size(); j += 7)
        CHECK(point_distance(projected, i, j) <=
              point_distance(cloud, i, j) + 1e-9);
  }

  SUBCASE("degenerate k is rejected") {
    const PointCloud cloud = random_cloud(rng, 10, 3);
    CHECK_THROWS_AS(pca_project(cloud, 0), std::invalid_argument);
    CHECK_THROWS_AS(pca_project(cloud, 4), std::invalid_argument);
  }
}
