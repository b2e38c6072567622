#include "twisty/coordinates.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "twisty/kernels.hpp"

namespace twisty::coordinates {

using slidingwindow::PointCloud;

CoordinateCover CoordinateCover::build(const PointCloud& cloud,
                                       const slidingwindow::LandmarkSet& set,
                                       double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("CoordinateCover: alpha must be > 0");
  CoordinateCover cover;
  cover.alpha = alpha;
  cover.landmarks.dim = cloud.dim;
  cover.landmarks.data.reserve(set.indices.size() * cloud.dim);
  for (const std::size_t idx : set.indices) {
    const auto pt = cloud.point(idx);
    cover.landmarks.data.insert(cover.landmarks.data.end(), pt.begin(), pt.end());
    if (!cloud.start_times.empty())
      cover.landmarks.start_times.push_back(cloud.start_times[idx]);
  }
  cover.landmark_dist = persistence::DistanceMatrix::from_points(
      cover.landmarks.data.data(), cover.landmarks.size(), cover.landmarks.dim);
  return cover;
}

std::vector<std::pair<int, int>> cover_edges(const CoordinateCover& cover) {
  const int n = static_cast<int>(cover.size());
  const double limit = 2.0 * cover.alpha;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (cover.landmark_dist(i, j) <= limit) edges.emplace_back(i, j);
  return edges;
}

IntegerCochain lift_cocycle(const persistence::CocycleRep& mu,
                            const CoordinateCover& cover) {
  if (mu.field_char <= 2)
    throw std::invalid_argument("lift_cocycle: requires a prime q > 2");
  const int q = mu.field_char;
  const int n = static_cast<int>(cover.size());

  IntegerCochain lift;
  lift.edges = cover_edges(cover);
  lift.values.assign(lift.edges.size(), 0);

  // Dense edge index for lookups; n is the landmark count, a few hundred.
  std::vector<long long> value(static_cast<std::size_t>(n) * n, 0);
  for (const persistence::CocycleTerm& t : mu.terms) {
    if (t.i >= n || t.j >= n) continue;
    if (cover.landmark_dist(t.i, t.j) > 2.0 * cover.alpha) continue;
    long long v = t.coeff;
    if (2 * v > q) v -= q;  // lift into (-q/2, q/2)
    value[static_cast<std::size_t>(t.i) * n + t.j] = v;
    value[static_cast<std::size_t>(t.j) * n + t.i] = -v;
  }
  for (std::size_t e = 0; e < lift.edges.size(); ++e)
    lift.values[e] =
        value[static_cast<std::size_t>(lift.edges[e].first) * n +
              lift.edges[e].second];

  // delta(lift) must vanish over Z on every triangle of R_{2 alpha}(L).
  const double limit = 2.0 * cover.alpha;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (cover.landmark_dist(i, j) > limit) continue;
      for (int k = j + 1; k < n; ++k) {
        if (cover.landmark_dist(i, k) > limit ||
            cover.landmark_dist(j, k) > limit)
          continue;
        const long long jk = value[static_cast<std::size_t>(j) * n + k];
        const long long ik = value[static_cast<std::size_t>(i) * n + k];
        const long long ij = value[static_cast<std::size_t>(i) * n + j];
        if (jk - ik + ij != 0) {
          std::ostringstream msg;
          msg << "lift_cocycle: lift is not an integer cocycle at triangle ("
              << i << "," << j << "," << k << "); Z -> Z/" << q
              << " is not surjective onto this class, retry another prime";
          throw LiftFailure(msg.str());
        }
      }
    }
  return lift;
}

namespace {

std::vector<int> graph_components(int n,
                                  const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  // Tiny union-find, path halving.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [i, j] : edges) {
    const int a = find(i), b = find(j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  for (int i = 0; i < n; ++i) comp[i] = find(i);
  return comp;
}

void laplacian_apply(const std::vector<std::pair<int, int>>& edges,
                     const std::vector<double>& x, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& [i, j] : edges) {
    const double diff = x[i] - x[j];
    out[i] += diff;
    out[j] -= diff;
  }
}

// Anchored gauge: tau0 vanishes at the lowest-index landmark of each
// component. Under an integer-coboundary change of the input cocycle the
// whole tau0 then shifts by integers, so the circular coordinates move by
// exact multiples of 2 pi; a mean-zero gauge would leak the non-integer
// constant mean(eta) into the angles.
void anchor_components(std::vector<double>& x, const std::vector<int>& comp) {
  const std::vector<double> snapshot = x;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= snapshot[comp[i]];
}

}  // namespace

HarmonicDecomposition harmonic_decompose(const IntegerCochain& mu_int,
                                         const CoordinateCover& cover) {
  const int n = static_cast<int>(cover.size());
  HarmonicDecomposition hd;
  hd.edges = mu_int.edges;
  hd.tau0.assign(n, 0.0);

  // Normal equations for min_t ||mu + delta0 t||: Lap t = -delta0^T mu.
  std::vector<double> b(n, 0.0);
  for (std::size_t e = 0; e < hd.edges.size(); ++e) {
    const auto [i, j] = hd.edges[e];
    const double v = static_cast<double>(mu_int.values[e]);
    b[i] += v;   // -(delta0^T mu)_i = sum_{e=(i,j)} mu_e - sum_{e=(k,i)} mu_e
    b[j] -= v;
  }

  const std::vector<int> comp = graph_components(n, hd.edges);
  const double bnorm = std::sqrt(kernels::dot(b.data(), b.data(), n));
  double residual = 0.0;
  if (bnorm > 0.0) {
    std::vector<double> x(n, 0.0), r = b, p = b, ap(n);
    double rs = kernels::dot(r.data(), r.data(), n);
    const std::size_t max_iters = 10 * static_cast<std::size_t>(n);
    for (std::size_t it = 0; it < max_iters; ++it) {
      if (std::sqrt(rs) / bnorm < 1e-10) break;
      laplacian_apply(hd.edges, p, ap);
      const double denom = kernels::dot(p.data(), ap.data(), n);
      if (denom <= 0.0) break;  // numerically in the kernel of the Laplacian
      const double alpha = rs / denom;
      kernels::axpy(alpha, p.data(), x.data(), n);
      kernels::axpy(-alpha, ap.data(), r.data(), n);
      const double rs_next = kernels::dot(r.data(), r.data(), n);
      const double beta = rs_next / rs;
      rs = rs_next;
      for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    residual = std::sqrt(rs) / bnorm;
    if (residual >= 1e-10) {
      std::ostringstream msg;
      msg << "harmonic_decompose: conjugate gradient stalled, relative residual "
          << residual;
      throw std::runtime_error(msg.str());
    }
    hd.tau0 = std::move(x);
  }
  anchor_components(hd.tau0, comp);
  hd.residual = residual;

  hd.theta.resize(hd.edges.size());
  for (std::size_t e = 0; e < hd.edges.size(); ++e) {
    const auto [i, j] = hd.edges[e];
    hd.theta[e] =
        static_cast<double>(mu_int.values[e]) + (hd.tau0[j] - hd.tau0[i]);
  }
  return hd;
}

namespace {

struct QueryContext {
  std::vector<double> dist;     // query -> landmark distances
  std::vector<double> support;  // |alpha - d|_+
};

// Distances to all landmarks plus the nearest covering landmark (lowest
// index wins ties). Throws when the query is not within alpha of any.
int locate_query(const CoordinateCover& cover, std::span<const double> query,
                 QueryContext& ctx) {
  const std::size_t n = cover.size();
  ctx.dist.resize(n);
  ctx.support.resize(n);
  kernels::sqdist_rows(cover.landmarks.data.data(), n, cover.landmarks.dim,
                       query.data(), ctx.dist.data());
  int nearest = 0;
  for (std::size_t k = 0; k < n; ++k) {
    ctx.dist[k] = std::sqrt(ctx.dist[k]);
    if (ctx.dist[k] < ctx.dist[nearest]) nearest = static_cast<int>(k);
  }
  if (ctx.dist[nearest] >= cover.alpha)
    throw std::invalid_argument(
        "coordinates: query not covered by any landmark ball");
  kernels::clamp_radius(ctx.dist.data(), cover.alpha, ctx.support.data(), n);
  return nearest;
}

}  // namespace

std::vector<double> circular_coords(const PointCloud& queries,
                                    const CoordinateCover& cover,
                                    const HarmonicDecomposition& hd) {
  const std::size_t n = cover.size();
  // Dense antisymmetric theta for O(1) edge lookups.
  std::vector<double> theta(n * n, 0.0);
  for (std::size_t e = 0; e < hd.edges.size(); ++e) {
    const auto [i, j] = hd.edges[e];
    theta[i * n + j] = hd.theta[e];
    theta[j * n + i] = -hd.theta[e];
  }

  constexpr double kTwoPi = 6.28318530717958647692;
  std::vector<double> angles;
  angles.reserve(queries.size());
  QueryContext ctx;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const int j = locate_query(cover, queries.point(qi), ctx);
    const double total = kernels::sum(ctx.support.data(), n);
    double acc = hd.tau0[j];
    for (std::size_t k = 0; k < n; ++k) {
      if (ctx.support[k] == 0.0 || static_cast<int>(k) == j) continue;
      acc += theta[j * n + k] * (ctx.support[k] / total);
    }
    double angle = (acc - std::floor(acc)) * kTwoPi;
    if (angle >= kTwoPi) angle = 0.0;
    angles.push_back(angle);
  }
  return angles;
}

ProjectivePoint canonicalize(std::vector<double> h) {
  double norm_sq = 0.0;
  for (const double x : h) norm_sq += x * x;
  if (norm_sq == 0.0)
    throw std::invalid_argument("ProjectivePoint: zero homogeneous vector");
  const double norm = std::sqrt(norm_sq);
  double sign = 1.0;
  for (const double x : h) {
    if (x != 0.0) {
      sign = x > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  for (double& x : h) x = x * sign / norm;
  return {std::move(h)};
}

double projective_distance(const ProjectivePoint& a, const ProjectivePoint& b) {
  // Chord form of arccos|<x,y>| for unit vectors: stable near 0 where
  // acos(1 - eps) loses half the significant digits.
  const std::size_t n = std::min(a.h.size(), b.h.size());
  double minus = 0.0, plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.h[i] - b.h[i];
    const double s = a.h[i] + b.h[i];
    minus += d * d;
    plus += s * s;
  }
  const double chord = std::sqrt(std::min(minus, plus));
  return 2.0 * std::asin(std::max(0.0, std::min(1.0, chord / 2.0)));
}

std::vector<ProjectivePoint> projective_coords(
    const PointCloud& queries, const CoordinateCover& cover,
    const persistence::CocycleRep& mu) {
  if (mu.field_char != 2)
    throw std::invalid_argument("projective_coords: cocycle must be over Z/2");
  const std::size_t n = cover.size();
  // The class must be alive at 2 alpha, where the cochain lives; its image
  // in the Cech nerve of the alpha-balls is then the class the map realizes.
  if (!(mu.birth <= 2.0 * cover.alpha && 2.0 * cover.alpha < mu.death))
    throw std::invalid_argument(
        "projective_coords: cocycle class is not alive at scale 2 alpha");

  // Sign table (-1)^{mu_{jk}} restricted to R_{2 alpha}.
  std::vector<signed char> sign(n * n, 1);
  for (const persistence::CocycleTerm& t : mu.terms) {
    if (static_cast<std::size_t>(t.i) >= n || static_cast<std::size_t>(t.j) >= n)
      continue;
    if (cover.landmark_dist(t.i, t.j) > 2.0 * cover.alpha) continue;
    if (t.coeff % 2 == 1) {
      sign[t.i * n + t.j] = -1;
      sign[t.j * n + t.i] = -1;
    }
  }

  std::vector<ProjectivePoint> out;
  out.reserve(queries.size());
  QueryContext ctx;
  std::vector<double> h(n);
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const int j = locate_query(cover, queries.point(qi), ctx);
    for (std::size_t k = 0; k < n; ++k)
      h[k] = static_cast<double>(sign[j * n + k]) * ctx.support[k];
    out.push_back(canonicalize(h));
  }
  return out;
}

std::pair<std::vector<ProjectivePoint>, std::vector<double>> ppca_reduce(
    const std::vector<ProjectivePoint>& points, std::size_t k) {
  if (points.empty())
    throw std::invalid_argument("ppca_reduce: no points");
  const std::size_t ambient = points.front().h.size();
  if (k + 1 > ambient)
    throw std::invalid_argument("ppca_reduce: k exceeds ambient dimension");

  std::vector<Eigen::VectorXd> current;
  current.reserve(points.size());
  for (const ProjectivePoint& p : points) {
    if (p.h.size() != ambient)
      throw std::invalid_argument("ppca_reduce: inconsistent dimensions");
    current.push_back(
        Eigen::Map<const Eigen::VectorXd>(p.h.data(), static_cast<Eigen::Index>(ambient)));
  }

  std::vector<double> distortions;
  for (std::size_t dim = ambient; dim > k + 1; --dim) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (const Eigen::VectorXd& x : current) cov += x * x.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("ppca_reduce: eigendecomposition failed");
    Eigen::VectorXd v = eig.eigenvectors().col(0);  // smallest eigenvalue
    Eigen::Index amax = 0;
    v.cwiseAbs().maxCoeff(&amax);
    if (v[amax] < 0.0) v = -v;
    distortions.push_back(std::max(eig.eigenvalues()[0], 0.0));

    // Householder reflection sending v to the last basis vector, then drop
    // that coordinate.
    Eigen::VectorXd w = v;
    w[static_cast<Eigen::Index>(dim - 1)] -= 1.0;
    const double wnorm = w.norm();
    const bool aligned = wnorm < 1e-14;
    for (Eigen::VectorXd& x : current) {
      Eigen::VectorXd y = x;
      if (!aligned) y -= 2.0 * (w.dot(x) / (wnorm * wnorm)) * w;
      Eigen::VectorXd reduced = y.head(static_cast<Eigen::Index>(dim - 1));
      const double norm = reduced.norm();
      if (norm < 1e-14)
        throw std::runtime_error(
            "ppca_reduce: point coincides with the removed direction");
      x = reduced / norm;
    }
  }

  std::vector<ProjectivePoint> out;
  out.reserve(current.size());
  for (const Eigen::VectorXd& x : current) {
    std::vector<double> h(x.data(), x.data() + x.size());
    out.push_back(canonicalize(std::move(h)));
  }
  return {std::move(out), std::move(distortions)};
}

std::vector<std::pair<double, double>> rp2_stereograph(
    const std::vector<ProjectivePoint>& points, int hemisphere_axis) {
  if (hemisphere_axis < 0 || hemisphere_axis > 2)
    throw std::invalid_argument("rp2_stereograph: axis must be 0, 1 or 2");
  std::vector<std::pair<double, double>> out;
  out.reserve(points.size());
  const int a1 = (hemisphere_axis + 1) % 3;
  const int a2 = (hemisphere_axis + 2) % 3;
  for (const ProjectivePoint& p : points) {
    if (p.h.size() != 3)
      throw std::invalid_argument("rp2_stereograph: points must be in RP^2");
    double x = p.h[a1], y = p.h[a2], z = p.h[hemisphere_axis];
    if (z < 0.0) {
      x = -x;
      y = -y;
      z = -z;
    }
    out.emplace_back(x / (1.0 + z), y / (1.0 + z));
  }
  return out;
}

double circular_correlation(std::span<const double> a,
                            std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("circular_correlation: size mismatch");
  std::complex<double> plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    plus += std::exp(std::complex<double>(0.0, a[i] - b[i]));
    minus += std::exp(std::complex<double>(0.0, a[i] + b[i]));
  }
  const double n = static_cast<double>(a.size());
  return std::max(std::abs(plus), std::abs(minus)) / n;
}

}  // namespace twisty::coordinates
