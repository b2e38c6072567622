#pragma once

#include <array>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "twisty/geometry.hpp"
#include "twisty/slidingwindow.hpp"

// Observation functions G: M -> R (distance-to-point and Fourier series),
// time-series synthesis along flows, and the numeric / algebraic checkers
// for when such observations give faithful window embeddings.

namespace twisty::observations {

struct FourierTerm {
  int n = 0;
  int m = 0;
  std::complex<double> coeff;
};

// Fourier support on the torus chart: G(u,v) = sum c_{n,m} exp(i(nu + mv)).
// Stores nonzero terms only; construction enforces conjugate symmetry
// (so G is real-valued) and a canonical (n, m) ordering.
class FourierSupport {
 public:
  static FourierSupport from_terms(std::vector<FourierTerm> terms);

  const std::vector<FourierTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double eval(double u, double v) const;

  // True when the support satisfies c_{n,m} = (-1)^n c_{n,-m}, the Fourier
  // form of G(u + pi, -v) = G(u, v).
  bool kappa_invariant(double tol = 1e-12) const;

 private:
  std::vector<FourierTerm> terms_;
};

struct DistanceObservation {
  geometry::Manifold manifold;
  geometry::ManifoldPoint x_hat;
  geometry::MetricParams metric;
};

struct ObservationFn {
  std::variant<DistanceObservation, FourierSupport> fn;

  static ObservationFn distance_to(geometry::Manifold m,
                                   geometry::ManifoldPoint x_hat,
                                   geometry::MetricParams params = {});
  static ObservationFn fourier(FourierSupport support);
};

double observe(const ObservationFn& obs, const geometry::ManifoldPoint& p);

slidingwindow::TimeSeries observe_trajectory(const ObservationFn& obs,
                                             const geometry::Trajectory& traj);

// ---------------------------------------------------------------------------
// Goodness checkers

enum class Verdict { Good, Bad };

struct GoodnessFinding {
  std::string code;  // e.g. "lattice-index", "boundary-shift", "constant-boundary"
  bool failure = false;
  std::string detail;
  std::vector<double> values;  // structured payload (SNF diagonal, witness shift, ...)
};

struct GoodnessReport {
  std::vector<GoodnessFinding> findings;
  Verdict verdict() const;
  std::array<long long, 2> snf_diagonal{0, 0};
};

// Smith normal form diagonal (d1, d2), d1 | d2, of an integer matrix whose
// rows are the given vectors. d2 = 0 when the rank is < 2.
std::array<long long, 2> lattice_snf_diagonal(
    const std::vector<std::array<long long, 2>>& rows);

// Good iff the support vectors generate Z^2, i.e. the SNF diagonal is (1,1).
GoodnessReport fourier_support_generates(const FourierSupport& support);

// Checks the Klein-bottle conditions for a kappa-invariant support: the
// boundary restrictions G(x,0), G(x,pi) must be pi-periodic, non-constant,
// and not related by any shift in x; and the support must generate Z^2.
// A non-kappa-invariant support is a contract violation, not a Bad verdict.
GoodnessReport klein_observation_check(const FourierSupport& support);

// ---------------------------------------------------------------------------
// Numeric diagnostics

struct RankDiagnosticEntry {
  geometry::ManifoldPoint point;
  double sigma1 = 0.0;  // largest singular value of the 2-column Jacobian
  double sigma2 = 0.0;
  double ratio = 0.0;   // sigma2 / sigma1; 0 when sigma1 == 0
  bool deficient = false;
};

struct RankDiagnosticReport {
  std::vector<RankDiagnosticEntry> entries;
  bool any_deficient = false;
};

// Central-difference Jacobian (step 1e-4) of p -> (G(psi_{k tau}(p)))_{k=0..N}
// in chart coordinates; points with sigma2/sigma1 < 1e-4 are rank-deficient.
RankDiagnosticReport takens_rank_diagnostic(
    const ObservationFn& obs, const geometry::FlowSpec& flow,
    const std::vector<geometry::ManifoldPoint>& base_points, std::size_t delays,
    double tau);

struct SeparationEntry {
  geometry::ManifoldPoint p;
  geometry::ManifoldPoint q;
  double separation = 0.0;  // sup_k |g_p - g_q| over the horizon
  bool indistinguishable = false;
};

struct SeparationReport {
  std::vector<SeparationEntry> entries;
  bool any_indistinguishable = false;
};

// Pairs whose observation curves stay within 1e-6 of each other over the
// horizon are reported as indistinguishable.
SeparationReport curve_separation_diagnostic(
    const ObservationFn& obs, const geometry::FlowSpec& flow,
    const std::vector<std::pair<geometry::ManifoldPoint,
                                geometry::ManifoldPoint>>& pairs,
    std::size_t horizon);

}  // namespace twisty::observations
