#include "twisty/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string_view>

namespace twisty::geometry {

namespace {

double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

// Shortest circular difference, in [-period/2, period/2].
double circ_diff(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d > period / 2) d -= period;
  if (d < -period / 2) d += period;
  return d;
}

void sphere_unit(double phi, double theta, double out[3]) {
  const double s = std::sin(theta);
  out[0] = std::cos(phi) * s;
  out[1] = std::sin(phi) * s;
  out[2] = std::cos(theta);
}

// exp(-1/u) for u > 0, extended by 0; building block of the flat bump.
double bump_f(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

// Smoothstep with all derivatives vanishing at 0 and 1; S(0)=0, S(1)=1.
double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = bump_f(u);
  return a / (a + bump_f(1.0 - u));
}

double klein_vertical(const KleinBumpParams& params, double beta, double v) {
  // rho(v) ramps 0 -> beta over [0, eps]; the top branch mirrors it so the
  // vertical speed vanishes exactly on the circle v = pi.
  const double eps = params.epsilon;
  if (v <= eps) return beta * smoothstep(v / eps);
  if (v <= kPi - eps) return beta;
  return beta * smoothstep((kPi - v) / eps);
}

}  // namespace

const char* manifold_name(Manifold m) {
  switch (m) {
    case Manifold::Torus: return "torus";
    case Manifold::Klein: return "klein";
    case Manifold::Sphere: return "sphere";
    case Manifold::RP2: return "rp2";
    case Manifold::Genus2: return "genus2";
  }
  return "?";
}

std::optional<Manifold> manifold_from_name(std::string_view name) {
  if (name == "torus") return Manifold::Torus;
  if (name == "klein") return Manifold::Klein;
  if (name == "sphere") return Manifold::Sphere;
  if (name == "rp2") return Manifold::RP2;
  if (name == "genus2") return Manifold::Genus2;
  return std::nullopt;
}

double wrap_angle(double x, double period) {
  double y = x - period * std::floor(x / period);
  if (y >= period) y -= period;  // floor rounding can land exactly on period
  if (y < 0.0) y = 0.0;
  return y;
}

namespace octagon {

void side_normal(int k, double& nx, double& ny) {
  static const std::array<double, 8> cs = {
      1.0, 0.70710678118654752440, 0.0, -0.70710678118654752440,
      -1.0, -0.70710678118654752440, 0.0, 0.70710678118654752440};
  static const std::array<double, 8> sn = {
      0.0, 0.70710678118654752440, 1.0, 0.70710678118654752440,
      0.0, -0.70710678118654752440, -1.0, -0.70710678118654752440};
  nx = cs[k];
  ny = sn[k];
}

bool inside(double x, double y, double tol) {
  for (int k = 0; k < 8; ++k) {
    double nx, ny;
    side_normal(k, nx, ny);
    if (x * nx + y * ny > kApothem + tol) return false;
  }
  return true;
}

}  // namespace octagon

namespace {

ManifoldPoint reduce_genus2(double x, double y) {
  // Iterate the worst-violated side pairing; points near the octagon settle
  // in one or two steps. Ties on the upper sides (k = 0..3) move to the
  // opposite side so the lower boundary representative wins.
  for (int iter = 0; iter < 128; ++iter) {
    int worst = -1;
    double worst_excess = 0.0;
    for (int k = 0; k < 8; ++k) {
      double nx, ny;
      octagon::side_normal(k, nx, ny);
      const double excess = x * nx + y * ny - octagon::kApothem;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = k;
      }
    }
    if (worst < 0) break;
    double nx, ny;
    octagon::side_normal(worst, nx, ny);
    x -= 2.0 * octagon::kApothem * nx;
    y -= 2.0 * octagon::kApothem * ny;
  }
  for (int k = 0; k < 4; ++k) {
    double nx, ny;
    octagon::side_normal(k, nx, ny);
    if (x * nx + y * ny == octagon::kApothem) {
      x -= 2.0 * octagon::kApothem * nx;
      y -= 2.0 * octagon::kApothem * ny;
    }
  }
  return {Manifold::Genus2, x, y};
}

}  // namespace

ManifoldPoint reduce(const ManifoldPoint& p) {
  switch (p.manifold) {
    case Manifold::Torus:
      return {Manifold::Torus, wrap_angle(p.u, kTwoPi), wrap_angle(p.v, kTwoPi)};
    case Manifold::Klein: {
      double u = wrap_angle(p.u, kTwoPi);
      double v = wrap_angle(p.v, kTwoPi);
      if (v > kPi) {
        u = wrap_angle(u + kPi, kTwoPi);
        v = kTwoPi - v;
      }
      if (v == 0.0 || v == kPi) u = wrap_angle(u, kPi);
      return {Manifold::Klein, u, v};
    }
    case Manifold::Sphere: {
      double phi = p.u;
      double theta = wrap_angle(p.v, kTwoPi);
      if (theta > kPi) {
        theta = kTwoPi - theta;
        phi += kPi;
      }
      return {Manifold::Sphere, wrap_angle(phi, kTwoPi), theta};
    }
    case Manifold::RP2: {
      ManifoldPoint s = reduce({Manifold::Sphere, p.u, p.v});
      double phi = s.u;
      double theta = s.v;
      if (theta > kPi / 2) {
        theta = kPi - theta;
        phi = wrap_angle(phi + kPi, kTwoPi);
      }
      if (theta == kPi / 2) phi = wrap_angle(phi, kPi);
      return {Manifold::RP2, phi, theta};
    }
    case Manifold::Genus2:
      return reduce_genus2(p.u, p.v);
  }
  throw std::invalid_argument("unknown manifold");
}

bool in_fundamental_domain(const ManifoldPoint& p, double tol) {
  const ManifoldPoint r = reduce(p);
  return std::abs(r.u - p.u) <= tol && std::abs(r.v - p.v) <= tol;
}

double manifold_distance(Manifold m, const MetricParams& params,
                         const ManifoldPoint& p, const ManifoldPoint& q) {
  if (p.manifold != m || q.manifold != m)
    throw std::invalid_argument("manifold_distance: point manifold mismatch");
  if ((m == Manifold::Torus || m == Manifold::Klein) &&
      (params.weight_u <= 0.0 || params.weight_v <= 0.0))
    throw std::invalid_argument("manifold_distance: weights must be > 0");
  // Identical chart coordinates short-circuit to 0; acos(dot) would other-
  // wise pick up ~1e-8 rounding noise on the curved surfaces.
  if (p.u == q.u && p.v == q.v) return 0.0;
  switch (m) {
    case Manifold::Torus: {
      const double du = params.weight_u * circ_diff(p.u, q.u, kTwoPi);
      const double dv = params.weight_v * circ_diff(p.v, q.v, kTwoPi);
      return std::sqrt(du * du + dv * dv);
    }
    case Manifold::Klein: {
      const ManifoldPoint pt{Manifold::Torus, p.u, p.v};
      const ManifoldPoint qt{Manifold::Torus, q.u, q.v};
      const ManifoldPoint qk{Manifold::Torus, q.u + kPi, -q.v};
      const double d1 = manifold_distance(Manifold::Torus, params, pt, qt);
      const double d2 = manifold_distance(Manifold::Torus, params, pt, qk);
      return std::min(d1, d2);
    }
    case Manifold::Sphere: {
      double a[3], b[3];
      sphere_unit(p.u, p.v, a);
      sphere_unit(q.u, q.v, b);
      return std::acos(clamp_unit(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]));
    }
    case Manifold::RP2: {
      double a[3], b[3];
      sphere_unit(p.u, p.v, a);
      sphere_unit(q.u, q.v, b);
      return std::acos(
          clamp_unit(std::abs(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])));
    }
    case Manifold::Genus2: {
      double best = (p.u - q.u) * (p.u - q.u) + (p.v - q.v) * (p.v - q.v);
      for (int k = 0; k < 8; ++k) {
        double nx, ny;
        octagon::side_normal(k, nx, ny);
        const double qx = q.u - 2.0 * octagon::kApothem * nx;
        const double qy = q.v - 2.0 * octagon::kApothem * ny;
        const double d = (p.u - qx) * (p.u - qx) + (p.v - qy) * (p.v - qy);
        best = std::min(best, d);
      }
      return best;
    }
  }
  throw std::invalid_argument("unknown manifold");
}

Tangent klein_field_eval(const KleinBumpParams& params, double alpha,
                         double beta, const ManifoldPoint& p) {
  if (p.manifold != Manifold::Klein)
    throw std::invalid_argument("klein_field_eval: point not on Klein bottle");
  if (p.v < -1e-12 || p.v > kPi + 1e-12)
    throw std::invalid_argument("klein_field_eval: point off fundamental domain");
  return {alpha, klein_vertical(params, beta, p.v)};
}

Tangent klein_field_eval_torus(const KleinBumpParams& params, double alpha,
                               double beta, double u, double v) {
  (void)u;  // the field does not depend on u
  v = wrap_angle(v, kTwoPi);
  if (v <= kPi) return {alpha, klein_vertical(params, beta, v)};
  // kappa-extension: X(u, v) = kappa_* X(u - pi, 2pi - v) for v in (pi, 2pi)
  return {alpha, -klein_vertical(params, beta, kTwoPi - v)};
}

namespace {

Trajectory flow_linear_cover(const FlowSpec& flow, const ManifoldPoint& p0,
                             std::size_t n) {
  // The shallow Klein winding and the sphere/RP2 helix are flows on the
  // covering chart; reduction is applied per emitted sample so the stored
  // trajectory zigzags through the fundamental domain.
  Trajectory traj{flow.manifold, {}, 0.0, flow.dt};
  traj.points.reserve(n);
  const ManifoldPoint start = reduce(p0);
  double u = start.u;
  double v = start.v;
  for (std::size_t k = 0; k < n; ++k) {
    traj.points.push_back(reduce({flow.manifold, u, v}));
    u = wrap_angle(u + flow.alpha * flow.dt, kTwoPi);
    v += flow.beta * flow.dt;
  }
  return traj;
}

Trajectory flow_klein_bump(const FlowSpec& flow, const ManifoldPoint& p0,
                           std::size_t n) {
  const KleinBumpParams& params = *flow.klein_params;
  if (!(params.epsilon > 0.0) || params.epsilon >= kPi / 4)
    throw std::invalid_argument("flow_trajectory: epsilon must be in (0, pi/4)");
  Trajectory traj{Manifold::Klein, {}, 0.0, flow.dt};
  traj.points.reserve(n);
  ManifoldPoint p = reduce(p0);
  double u = p.u;
  double v = p.v;
  const double h = flow.dt / 4.0;  // RK4 substep
  auto vert = [&](double y) { return klein_vertical(params, flow.beta, y); };
  for (std::size_t k = 0; k < n; ++k) {
    traj.points.push_back(reduce({Manifold::Klein, u, v}));
    for (int sub = 0; sub < 4; ++sub) {
      const double k1 = vert(v);
      const double k2 = vert(v + 0.5 * h * k1);
      const double k3 = vert(v + 0.5 * h * k2);
      const double k4 = vert(v + h * k3);
      v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      v = std::clamp(v, 0.0, kPi);  // circles v = 0, pi are invariant
      u = wrap_angle(u + flow.alpha * h, kTwoPi);
    }
  }
  return traj;
}

Trajectory flow_genus2(const FlowSpec& flow, const ManifoldPoint& p0,
                       std::size_t n) {
  // Straight-line flow on the translation surface: trace each dt segment,
  // jumping through the side identification at the first crossing.
  Trajectory traj{Manifold::Genus2, {}, 0.0, flow.dt};
  traj.points.reserve(n);
  ManifoldPoint p = reduce(p0);
  double x = p.u;
  double y = p.v;
  const double vx = flow.alpha;
  const double vy = flow.beta;
  for (std::size_t k = 0; k < n; ++k) {
    traj.points.push_back({Manifold::Genus2, x, y});
    double remaining = flow.dt;
    int guard = 0;
    while (remaining > 0.0 && guard++ < 64) {
      // First side crossed by the segment from (x,y) along (vx,vy).
      double t_exit = remaining;
      int side = -1;
      for (int s = 0; s < 8; ++s) {
        double nx, ny;
        octagon::side_normal(s, nx, ny);
        const double speed = vx * nx + vy * ny;
        if (speed <= 0.0) continue;
        const double t = (octagon::kApothem - (x * nx + y * ny)) / speed;
        if (t >= 0.0 && t < t_exit) {
          t_exit = t;
          side = s;
        }
      }
      x += vx * t_exit;
      y += vy * t_exit;
      remaining -= t_exit;
      if (side >= 0) {
        double nx, ny;
        octagon::side_normal(side, nx, ny);
        x -= 2.0 * octagon::kApothem * nx;
        y -= 2.0 * octagon::kApothem * ny;
      }
    }
  }
  return traj;
}

}  // namespace

Trajectory flow_trajectory(const FlowSpec& flow, const ManifoldPoint& p0,
                           std::size_t n) {
  if (p0.manifold != flow.manifold)
    throw std::invalid_argument("flow_trajectory: manifold mismatch");
  if (n < 1) throw std::invalid_argument("flow_trajectory: n must be >= 1");
  if (!(flow.dt > 0.0))
    throw std::invalid_argument("flow_trajectory: dt must be > 0");
  if (flow.klein_params.has_value() && flow.manifold != Manifold::Klein)
    throw std::invalid_argument("flow_trajectory: bump field is Klein-only");
  switch (flow.manifold) {
    case Manifold::Klein:
      if (flow.klein_params.has_value()) return flow_klein_bump(flow, p0, n);
      return flow_linear_cover(flow, p0, n);
    case Manifold::Torus:
    case Manifold::Sphere:
    case Manifold::RP2:
      return flow_linear_cover(flow, p0, n);
    case Manifold::Genus2:
      return flow_genus2(flow, p0, n);
  }
  throw std::invalid_argument("unknown manifold");
}

}  // namespace twisty::geometry
