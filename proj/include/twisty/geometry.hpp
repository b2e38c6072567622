#pragma once

#include <optional>
#include <string_view>
#include <vector>

// The five model surfaces, their fundamental-domain charts, the metrics used
// as observation distances, and the flows that generate trajectories.
//
// Chart conventions:
//   Torus   (u,v) in [0,2pi)^2
//   Klein   (u,v) in [0,2pi) x [0,pi], quotient of the torus by
//           kappa(u,v) = (u+pi, -v); on the circles v=0 and v=pi kappa acts
//           as u -> u+pi, so there u is stored mod pi.
//   Sphere  (u,v) = (azimuth phi in [0,2pi), elevation-from-north theta in [0,pi])
//   RP2     upper-hemisphere chart, theta in [0,pi/2]; on the equator the
//           antipodal identification makes u canonical mod pi.
//   Genus2  point inside the regular octagon of circumradius 1 centered at
//           the origin, opposite sides identified by translation.

namespace twisty::geometry {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

enum class Manifold { Torus, Klein, Sphere, RP2, Genus2 };

const char* manifold_name(Manifold m);
std::optional<Manifold> manifold_from_name(std::string_view name);

struct ManifoldPoint {
  Manifold manifold;
  double u = 0.0;
  double v = 0.0;
};

// Reduces chart coordinates to the fundamental domain. Idempotent; half-open
// intervals with the lower boundary winning ties.
ManifoldPoint reduce(const ManifoldPoint& p);

bool in_fundamental_domain(const ManifoldPoint& p, double tol = 1e-12);

// Weights for the flat metrics d_{a,b} on the torus and Klein bottle.
// Ignored by the curved surfaces.
struct MetricParams {
  double weight_u = 1.0;
  double weight_v = 1.0;
};

// Torus: weighted flat geodesic. Klein: the torus metric descended through
// kappa. Sphere: arc length. RP2: arc length with antipodal identification
// (range [0, pi/2]). Genus2: SQUARED Euclidean distance minimized over the
// octagon and its 8 side-pairing translates; not a metric, by construction.
double manifold_distance(Manifold m, const MetricParams& params,
                         const ManifoldPoint& p, const ManifoldPoint& q);

// The smoothing profile for the Klein vector field X_eps. A single pinned
// profile keeps trajectories reproducible.
enum class BumpProfile { Smoothstep };

struct KleinBumpParams {
  double epsilon = 0.3;  // must be < pi/4
  BumpProfile profile = BumpProfile::Smoothstep;
};

struct FlowSpec {
  Manifold manifold;
  double alpha = 0.0;  // horizontal rate (azimuth rate on the sphere family)
  double beta = 0.0;   // vertical rate (elevation rate on the sphere family)
  std::optional<KleinBumpParams> klein_params;  // selects X_eps on the Klein bottle
  double dt = 0.1;
};

struct Trajectory {
  Manifold manifold;
  std::vector<ManifoldPoint> points;
  double t0 = 0.0;
  double dt = 0.0;
};

// n samples of the integral curve from p0 (the first sample is p0 reduced).
// Linear flows advance on the covering chart and reduce per sample, the
// Klein X_eps field integrates with RK4 at substep dt/4, and the genus-2
// flow traces straight segments across the octagon's side identifications.
Trajectory flow_trajectory(const FlowSpec& flow, const ManifoldPoint& p0,
                           std::size_t n);

// The vector field X_eps at a point of the Klein fundamental domain:
// (alpha, rho(v)) for v <= eps, (alpha, beta) mid-domain, mirrored at the top.
// Vertical speed vanishes exactly on the circles v = 0 and v = pi.
struct Tangent {
  double du = 0.0;
  double dv = 0.0;
};
Tangent klein_field_eval(const KleinBumpParams& params, double alpha,
                         double beta, const ManifoldPoint& p);

// Same field extended kappa-invariantly to the whole torus chart
// (v in [0, 2pi)); used to check the pushforward identity in tests.
Tangent klein_field_eval_torus(const KleinBumpParams& params, double alpha,
                               double beta, double u, double v);

// Octagon geometry for the genus-2 chart (circumradius 1).
namespace octagon {
inline constexpr double kApothem = 0.92387953251128675613;  // cos(pi/8)
// Outward unit normal of side k, k = 0..7, at angle k*pi/4.
void side_normal(int k, double& nx, double& ny);
bool inside(double x, double y, double tol = 0.0);
}  // namespace octagon

double wrap_angle(double x, double period);  // into [0, period)

}  // namespace twisty::geometry
