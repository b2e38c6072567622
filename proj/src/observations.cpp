#include "twisty/observations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace twisty::observations {

using geometry::FlowSpec;
using geometry::Manifold;
using geometry::ManifoldPoint;
using geometry::Trajectory;
using geometry::kPi;
using geometry::kTwoPi;

FourierSupport FourierSupport::from_terms(std::vector<FourierTerm> terms) {
  std::map<std::pair<int, int>, std::complex<double>> combined;
  for (const FourierTerm& t : terms) combined[{t.n, t.m}] += t.coeff;

  FourierSupport support;
  for (const auto& [nm, c] : combined) {
    if (std::abs(c) == 0.0) continue;  // support holds nonzero terms only
    support.terms_.push_back({nm.first, nm.second, c});
  }
  for (const FourierTerm& t : support.terms_) {
    const auto it = combined.find({-t.n, -t.m});
    if (it == combined.end() ||
        std::abs(it->second - std::conj(t.coeff)) >
            1e-12 * std::max(1.0, std::abs(t.coeff)))
      throw std::invalid_argument(
          "FourierSupport: support is not conjugate-symmetric");
  }
  return support;
}

double FourierSupport::eval(double u, double v) const {
  std::complex<double> acc = 0.0;
  for (const FourierTerm& t : terms_)
    acc += t.coeff * std::exp(std::complex<double>(0.0, t.n * u + t.m * v));
  return acc.real();  // imaginary part cancels by conjugate symmetry
}

bool FourierSupport::kappa_invariant(double tol) const {
  for (const FourierTerm& t : terms_) {
    const double sign = (t.n % 2 == 0) ? 1.0 : -1.0;
    bool found = false;
    for (const FourierTerm& s : terms_) {
      if (s.n == t.n && s.m == -t.m) {
        found = std::abs(s.coeff - sign * t.coeff) <= tol;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

ObservationFn ObservationFn::distance_to(Manifold m, ManifoldPoint x_hat,
                                         geometry::MetricParams params) {
  if (x_hat.manifold != m)
    throw std::invalid_argument("ObservationFn: x_hat manifold mismatch");
  return {DistanceObservation{m, geometry::reduce(x_hat), params}};
}

ObservationFn ObservationFn::fourier(FourierSupport support) {
  return {std::move(support)};
}

double observe(const ObservationFn& obs, const ManifoldPoint& p) {
  if (const auto* d = std::get_if<DistanceObservation>(&obs.fn)) {
    if (p.manifold != d->manifold)
      throw std::invalid_argument("observe: manifold mismatch");
    return geometry::manifold_distance(d->manifold, d->metric, p, d->x_hat);
  }
  const auto& support = std::get<FourierSupport>(obs.fn);
  if (p.manifold != Manifold::Torus && p.manifold != Manifold::Klein)
    throw std::invalid_argument("observe: Fourier observation needs a torus chart");
  if (p.manifold == Manifold::Klein && !support.kappa_invariant())
    throw std::invalid_argument(
        "observe: Fourier support does not descend to the Klein bottle");
  return support.eval(p.u, p.v);
}

slidingwindow::TimeSeries observe_trajectory(const ObservationFn& obs,
                                             const Trajectory& traj) {
  slidingwindow::TimeSeries ts;
  ts.t0 = traj.t0;
  ts.dt = traj.dt;
  ts.values.reserve(traj.points.size());
  for (const ManifoldPoint& p : traj.points) ts.values.push_back(observe(obs, p));
  return ts;
}

Verdict GoodnessReport::verdict() const {
  for (const GoodnessFinding& f : findings)
    if (f.failure) return Verdict::Bad;
  return Verdict::Good;
}

std::array<long long, 2> lattice_snf_diagonal(
    const std::vector<std::array<long long, 2>>& rows) {
  long long d1 = 0;
  for (const auto& r : rows) {
    d1 = std::gcd(d1, std::abs(r[0]));
    d1 = std::gcd(d1, std::abs(r[1]));
  }
  long long minors = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      minors = std::gcd(minors, std::abs(rows[i][0] * rows[j][1] -
                                         rows[i][1] * rows[j][0]));
  const long long d2 = (d1 > 0 && minors > 0) ? minors / d1 : 0;
  return {d1, d2};
}

GoodnessReport fourier_support_generates(const FourierSupport& support) {
  if (support.empty())
    throw std::invalid_argument("fourier_support_generates: empty support");
  std::vector<std::array<long long, 2>> rows;
  rows.reserve(support.terms().size());
  for (const FourierTerm& t : support.terms()) rows.push_back({t.n, t.m});

  GoodnessReport report;
  report.snf_diagonal = lattice_snf_diagonal(rows);
  const bool generates =
      report.snf_diagonal[0] == 1 && report.snf_diagonal[1] == 1;
  GoodnessFinding finding;
  finding.code = "lattice-index";
  finding.failure = !generates;
  finding.values = {static_cast<double>(report.snf_diagonal[0]),
                    static_cast<double>(report.snf_diagonal[1])};
  finding.detail = generates ? "support generates Z^2 (SNF diagonal 1,1)"
                             : "support spans a proper sublattice";
  report.findings.push_back(std::move(finding));
  return report;
}

namespace {

// Boundary restriction of a kappa-invariant support: coefficients of
// G(x, c) = sum_n b(n) exp(inx) for c in {0, pi}.
std::map<int, std::complex<double>> boundary_coeffs(
    const FourierSupport& support, bool top) {
  std::map<int, std::complex<double>> b;
  for (const FourierTerm& t : support.terms()) {
    const double factor = top ? ((t.m % 2 == 0) ? 1.0 : -1.0) : 1.0;
    b[t.n] += factor * t.coeff;
  }
  return b;
}

double eval_curve(const std::map<int, std::complex<double>>& b, double x) {
  std::complex<double> acc = 0.0;
  for (const auto& [n, c] : b)
    acc += c * std::exp(std::complex<double>(0.0, n * x));
  return acc.real();
}

bool curve_is_constant(const std::map<int, std::complex<double>>& b) {
  for (const auto& [n, c] : b)
    if (n != 0 && std::abs(c) > 1e-12) return false;
  return true;
}

}  // namespace

GoodnessReport klein_observation_check(const FourierSupport& support) {
  if (support.empty())
    throw std::invalid_argument("klein_observation_check: empty support");
  if (!support.kappa_invariant())
    throw std::invalid_argument(
        "klein_observation_check: support is not kappa-invariant");

  GoodnessReport report;
  const auto b0 = boundary_coeffs(support, false);
  const auto bpi = boundary_coeffs(support, true);

  // kappa-invariance makes odd-n boundary coefficients cancel; verify.
  double odd_residual = 0.0;
  for (const auto* b : {&b0, &bpi})
    for (const auto& [n, c] : *b)
      if (n % 2 != 0) odd_residual = std::max(odd_residual, std::abs(c));
  report.findings.push_back({"boundary-periodicity", odd_residual > 1e-12,
                             odd_residual > 1e-12
                                 ? "boundary curves are not pi-periodic"
                                 : "boundary curves are pi-periodic",
                             {odd_residual}});

  const bool const0 = curve_is_constant(b0);
  const bool constpi = curve_is_constant(bpi);
  if (const0 || constpi) {
    report.findings.push_back(
        {"constant-boundary", true,
         "a limit-cycle restriction is constant and maps the circle to a point",
         {const0 ? 1.0 : 0.0, constpi ? 1.0 : 0.0}});
  } else {
    report.findings.push_back(
        {"constant-boundary", false, "boundary curves are non-constant", {}});
  }

  // Shift equivalence G(x, pi) == G(x + s, 0): grid candidates plus the
  // algebraic phases read off the lowest common harmonic. The curves are
  // finite trig polynomials, so the 1024-point grid comparison is exact in
  // effect at tolerance 1e-9.
  constexpr int kGrid = 1024;
  std::vector<double> candidates;
  candidates.reserve(kGrid + 4);
  for (int j = 0; j < kGrid; ++j) candidates.push_back(kTwoPi * j / kGrid);
  for (const auto& [n, c0] : b0) {
    if (n <= 0 || std::abs(c0) < 1e-12) continue;
    const auto it = bpi.find(n);
    if (it == bpi.end() || std::abs(it->second) < 1e-12) continue;
    const double base = std::arg(it->second / c0);
    for (int k = 0; k < n; ++k)
      candidates.push_back(geometry::wrap_angle((base + kTwoPi * k) / n, kTwoPi));
    break;
  }
  bool equivalent = false;
  double witness = 0.0;
  for (const double s : candidates) {
    double err = 0.0;
    for (int j = 0; j < kGrid && err < 1e-9; ++j) {
      const double x = kTwoPi * j / kGrid;
      err = std::max(err, std::abs(eval_curve(bpi, x) - eval_curve(b0, x + s)));
    }
    if (err < 1e-9) {
      equivalent = true;
      witness = s;
      break;
    }
  }
  report.findings.push_back(
      {"boundary-shift", equivalent,
       equivalent ? "boundary curves differ by a shift" :
                    "boundary curves are not shift-equivalent",
       equivalent ? std::vector<double>{witness} : std::vector<double>{}});

  GoodnessReport lattice = fourier_support_generates(support);
  report.snf_diagonal = lattice.snf_diagonal;
  for (GoodnessFinding& f : lattice.findings)
    report.findings.push_back(std::move(f));
  return report;
}

namespace {

std::vector<double> takens_window(const ObservationFn& obs,
                                  const FlowSpec& flow, const ManifoldPoint& p,
                                  std::size_t delays, std::size_t tau_steps) {
  const Trajectory traj =
      geometry::flow_trajectory(flow, p, delays * tau_steps + 1);
  std::vector<double> w(delays + 1);
  for (std::size_t k = 0; k <= delays; ++k)
    w[k] = observe(obs, traj.points[k * tau_steps]);
  return w;
}

}  // namespace

RankDiagnosticReport takens_rank_diagnostic(
    const ObservationFn& obs, const FlowSpec& flow,
    const std::vector<ManifoldPoint>& base_points, std::size_t delays,
    double tau) {
  const double steps = tau / flow.dt;
  const auto tau_steps = static_cast<std::size_t>(std::llround(steps));
  if (tau_steps < 1 || std::abs(steps - static_cast<double>(tau_steps)) >
                           1e-9 * std::max(1.0, steps))
    throw std::invalid_argument(
        "takens_rank_diagnostic: tau must be a positive multiple of dt");

  constexpr double kStep = 1e-4;       // finite-difference step in chart coords
  constexpr double kThreshold = 1e-4;  // sigma2/sigma1 rank-deficiency cutoff

  RankDiagnosticReport report;
  for (const ManifoldPoint& base : base_points) {
    if (base.manifold != flow.manifold)
      throw std::invalid_argument("takens_rank_diagnostic: base point off-manifold");
    const ManifoldPoint p = geometry::reduce(base);

    std::vector<double> cols[2];
    for (int axis = 0; axis < 2; ++axis) {
      ManifoldPoint plus = p;
      ManifoldPoint minus = p;
      (axis == 0 ? plus.u : plus.v) += kStep;
      (axis == 0 ? minus.u : minus.v) -= kStep;
      const auto wp = takens_window(obs, flow, plus, delays, tau_steps);
      const auto wm = takens_window(obs, flow, minus, delays, tau_steps);
      cols[axis].resize(wp.size());
      for (std::size_t i = 0; i < wp.size(); ++i)
        cols[axis][i] = (wp[i] - wm[i]) / (2.0 * kStep);
    }

    double a = 0.0, b = 0.0, c = 0.0;  // Gram matrix of the two columns
    for (std::size_t i = 0; i < cols[0].size(); ++i) {
      a += cols[0][i] * cols[0][i];
      b += cols[0][i] * cols[1][i];
      c += cols[1][i] * cols[1][i];
    }
    const double mean = 0.5 * (a + c);
    const double disc = std::sqrt(std::max(0.25 * (a - c) * (a - c) + b * b, 0.0));
    const double sigma1 = std::sqrt(std::max(mean + disc, 0.0));
    const double sigma2 = std::sqrt(std::max(mean - disc, 0.0));

    RankDiagnosticEntry entry;
    entry.point = p;
    entry.sigma1 = sigma1;
    entry.sigma2 = sigma2;
    entry.ratio = sigma1 > 0.0 ? sigma2 / sigma1 : 0.0;
    entry.deficient = sigma1 == 0.0 || entry.ratio < kThreshold;
    report.any_deficient = report.any_deficient || entry.deficient;
    report.entries.push_back(entry);
  }
  return report;
}

SeparationReport curve_separation_diagnostic(
    const ObservationFn& obs, const FlowSpec& flow,
    const std::vector<std::pair<ManifoldPoint, ManifoldPoint>>& pairs,
    std::size_t horizon) {
  constexpr double kIndistinguishable = 1e-6;
  SeparationReport report;
  for (const auto& [rp, rq] : pairs) {
    const ManifoldPoint p = geometry::reduce(rp);
    const ManifoldPoint q = geometry::reduce(rq);
    if (p.u == q.u && p.v == q.v)
      throw std::invalid_argument("curve_separation_diagnostic: degenerate pair");
    const Trajectory tp = geometry::flow_trajectory(flow, p, horizon);
    const Trajectory tq = geometry::flow_trajectory(flow, q, horizon);
    double sep = 0.0;
    for (std::size_t k = 0; k < horizon; ++k)
      sep = std::max(sep, std::abs(observe(obs, tp.points[k]) -
                                   observe(obs, tq.points[k])));
    SeparationEntry entry{p, q, sep, sep < kIndistinguishable};
    report.any_indistinguishable |= entry.indistinguishable;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace twisty::observations
