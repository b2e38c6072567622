#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twisty/persistence.hpp"
#include "twisty/slidingwindow.hpp"

// Circular and real-projective coordinates built from representative
// 1-cocycles of the landmark Rips complex, following the ball-cover
// construction: landmarks carry balls of radius alpha, cochains live on
// R_{2 alpha}(L), and queries are mapped through a partition of unity.

namespace twisty::coordinates {

// Landmarks resolved to explicit points plus the ball radius alpha.
// Queries must lie within alpha of some landmark.
struct CoordinateCover {
  slidingwindow::PointCloud landmarks;
  persistence::DistanceMatrix landmark_dist;
  double alpha = 0.0;

  std::size_t size() const { return landmarks.size(); }

  static CoordinateCover build(const slidingwindow::PointCloud& cloud,
                               const slidingwindow::LandmarkSet& set,
                               double alpha);
};

// Edges of R_{2 alpha}(L) with i < j, in lexicographic order.
std::vector<std::pair<int, int>> cover_edges(const CoordinateCover& cover);

// Thrown when the entrywise integer lift of a Z/q cocycle fails to be a
// cocycle over Z; callers retry with a different prime.
struct LiftFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegerCochain {
  std::vector<std::pair<int, int>> edges;  // R_{2 alpha} edges, i < j
  std::vector<long long> values;           // aligned with edges
};

// Entrywise lift of a Z/q cocycle (q > 2) to integers in (-q/2, q/2),
// restricted to R_{2 alpha}(L); verifies the lift is a cocycle over Z on
// every triangle of the complex.
IntegerCochain lift_cocycle(const persistence::CocycleRep& mu,
                            const CoordinateCover& cover);

struct HarmonicDecomposition {
  std::vector<std::pair<int, int>> edges;
  std::vector<double> theta;  // harmonic representative, oriented i -> j
  std::vector<double> tau0;   // 0-cochain, anchored to 0 per component
  double residual = 0.0;      // relative normal-equation residual
};

// Least-squares harmonic smoothing: tau0 minimizes ||mu + delta0 t||_2 via
// conjugate gradient on the graph Laplacian (relative residual < 1e-10, at
// most 10 |L| iterations); theta = mu + delta0 tau0. The gauge pins tau0 to
// zero at the lowest-index landmark of each component, which makes the
// resulting angles invariant mod 2 pi under integer-coboundary changes of
// the input cocycle.
HarmonicDecomposition harmonic_decompose(const IntegerCochain& mu_int,
                                         const CoordinateCover& cover);

// Angle in [0, 2pi) per query: 2pi (tau0_j + sum_k theta_{jk} phi_k(b)) with
// j the nearest covering landmark and phi the ball partition of unity.
std::vector<double> circular_coords(const slidingwindow::PointCloud& queries,
                                    const CoordinateCover& cover,
                                    const HarmonicDecomposition& hd);

// Point of RP^n stored as a unit vector with the first nonzero coordinate
// positive; canonicalization is idempotent.
struct ProjectivePoint {
  std::vector<double> h;
};

ProjectivePoint canonicalize(std::vector<double> h);

// Geodesic distance arccos(|<x,y>|) on RP^n.
double projective_distance(const ProjectivePoint& a, const ProjectivePoint& b);

// f_mu(b) = [(-1)^{mu_{j0}} |alpha - d(b,l_0)|_+ : ... ] for a Z/2 cocycle mu
// on R_{2 alpha}(L); independent of the admissible covering landmark j.
std::vector<ProjectivePoint> projective_coords(
    const slidingwindow::PointCloud& queries, const CoordinateCover& cover,
    const persistence::CocycleRep& mu);

// Principal projective component analysis: repeatedly removes the direction
// minimizing sum_i <v, x_i>^2 (the smallest covariance eigenvector) until the
// points live in RP^k. Returns the reduced points and per-stage distortion.
std::pair<std::vector<ProjectivePoint>, std::vector<double>> ppca_reduce(
    const std::vector<ProjectivePoint>& points, std::size_t k);

// Hemisphere-selected stereographic projection of RP^2 points to the plane;
// the pole aligned with hemisphere_axis (0, 1 or 2) maps to the origin.
std::vector<std::pair<double, double>> rp2_stereograph(
    const std::vector<ProjectivePoint>& points, int hemisphere_axis);

// |mean exp(i(a - s b))| maximized over orientation s = +-1; equals 1 when
// a = s b + const mod 2pi.
double circular_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace twisty::coordinates
