#include "twisty/slidingwindow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "twisty/kernels.hpp"

namespace twisty::slidingwindow {

PointCloud sliding_window(const TimeSeries& ts, const SlidingWindowConfig& cfg) {
  if (cfg.tau_steps < 1 || cfg.stride < 1)
    throw std::invalid_argument("sliding_window: tau_steps and stride must be >= 1");
  const std::size_t len = ts.values.size();
  const std::size_t span = cfg.delays * cfg.tau_steps;
  if (span + 1 > len)
    throw std::invalid_argument("sliding_window: window longer than series");

  PointCloud cloud;
  cloud.dim = cfg.delays + 1;
  const std::size_t rows = (len - span - 1) / cfg.stride + 1;
  cloud.data.reserve(rows * cloud.dim);
  cloud.start_times.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t j = r * cfg.stride;
    for (std::size_t k = 0; k <= cfg.delays; ++k)
      cloud.data.push_back(ts.values[j + k * cfg.tau_steps]);
    cloud.start_times.push_back(ts.t0 + static_cast<double>(j) * ts.dt);
  }
  return cloud;
}

double point_distance(const PointCloud& cloud, std::size_t i, std::size_t j) {
  double acc = 0.0;
  const double* a = cloud.data.data() + i * cloud.dim;
  const double* b = cloud.data.data() + j * cloud.dim;
  for (std::size_t k = 0; k < cloud.dim; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

LandmarkSet maxmin_landmarks(const PointCloud& cloud, std::size_t k,
                             std::size_t seed_index) {
  const std::size_t n = cloud.size();
  if (k < 1 || k > n)
    throw std::invalid_argument("maxmin_landmarks: need 1 <= k <= cloud size");
  if (seed_index >= n)
    throw std::invalid_argument("maxmin_landmarks: seed out of range");

  LandmarkSet set;
  set.indices.reserve(k);
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
  std::vector<double> scratch(n);

  std::size_t current = seed_index;
  for (std::size_t step = 0; step < k; ++step) {
    set.indices.push_back(current);
    kernels::sqdist_rows(cloud.data.data(), n, cloud.dim,
                         cloud.point(current).data(), scratch.data());
    kernels::min_update(min_sq.data(), scratch.data(), n);
    current = kernels::argmax(min_sq.data(), n);
  }
  set.cover_radius = std::sqrt(min_sq[kernels::argmax(min_sq.data(), n)]);
  return set;
}

std::pair<PointCloud, std::vector<double>> pca_project(const PointCloud& cloud,
                                                       std::size_t k) {
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dim;
  if (k < 1 || k > d)
    throw std::invalid_argument("pca_project: need 1 <= k <= dim");
  if (n == 0) throw std::invalid_argument("pca_project: empty cloud");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      x(cloud.data.data(), static_cast<Eigen::Index>(n),
        static_cast<Eigen::Index>(d));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("pca_project: eigendecomposition failed");

  const double total = std::max(cov.trace(), 0.0);
  Eigen::MatrixXd basis(d, k);
  std::vector<double> fractions(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    // Eigen sorts ascending; take from the top. Pin the sign so output is
    // reproducible: largest-magnitude entry positive.
    Eigen::VectorXd vec = eig.eigenvectors().col(static_cast<Eigen::Index>(d - 1 - c));
    Eigen::Index argmax = 0;
    vec.cwiseAbs().maxCoeff(&argmax);
    if (vec[argmax] < 0.0) vec = -vec;
    basis.col(static_cast<Eigen::Index>(c)) = vec;
    const double lambda =
        std::max(eig.eigenvalues()[static_cast<Eigen::Index>(d - 1 - c)], 0.0);
    fractions[c] = total > 0.0 ? lambda / total : 0.0;
  }

  const Eigen::MatrixXd projected = centered * basis;
  PointCloud out;
  out.dim = k;
  out.data.resize(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c)
      out.data[i * k + c] = projected(static_cast<Eigen::Index>(i),
                                      static_cast<Eigen::Index>(c));
  out.start_times = cloud.start_times;
  return {std::move(out), std::move(fractions)};
}

}  // namespace twisty::slidingwindow
