#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "twisty/observations.hpp"

#include "lattice_oracle.hpp"

using namespace twisty;
using namespace twisty::observations;
using geometry::Manifold;
using geometry::ManifoldPoint;
using geometry::kPi;
using geometry::kTwoPi;

namespace {

FourierSupport cos_x_plus_cos_y() {
  return FourierSupport::from_terms({{1, 0, {0.5, 0.0}},
                                     {-1, 0, {0.5, 0.0}},
                                     {0, 1, {0.5, 0.0}},
                                     {0, -1, {0.5, 0.0}}});
}

FourierSupport klein_good() {
  return FourierSupport::from_terms({{2, 0, {0.5, 0.0}},
                                     {-2, 0, {0.5, 0.0}},
                                     {1, 1, {0.0, -0.25}},
                                     {1, -1, {0.0, 0.25}},
                                     {-1, 1, {0.0, -0.25}},
                                     {-1, -1, {0.0, 0.25}},
                                     {0, 1, {0.5, 0.0}},
                                     {0, -1, {0.5, 0.0}}});
}

// Support with the cos(2x) term removed: cos x sin y + cos y.
FourierSupport klein_no_double() {
  return FourierSupport::from_terms({{1, 1, {0.0, -0.25}},
                                     {1, -1, {0.0, 0.25}},
                                     {-1, 1, {0.0, -0.25}},
                                     {-1, -1, {0.0, 0.25}},
                                     {0, 1, {0.5, 0.0}},
                                     {0, -1, {0.5, 0.0}}});
}

// Conjugate-symmetric random support built from random vector/coefficient
// pairs; optionally forced kappa-invariant.
FourierSupport random_support(std::mt19937& rng, int max_entry, int n_vectors) {
  std::uniform_int_distribution<int> entry(-max_entry, max_entry);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<FourierTerm> terms;
  for (int i = 0; i < n_vectors; ++i) {
    int n = 0, m = 0;
    while (n == 0 && m == 0) {
      n = entry(rng);
      m = entry(rng);
    }
    const std::complex<double> c{coeff(rng), coeff(rng)};
    terms.push_back({n, m, c});
    terms.push_back({-n, -m, std::conj(c)});
  }
  return FourierSupport::from_terms(terms);
}

bool brute_force_generates(const FourierSupport& support) {
  return lattice_brute_force_generates(support);
}

}  // namespace

TEST_CASE("observe: distance variant") {
  const auto obs = ObservationFn::distance_to(
      Manifold::Klein, {Manifold::Klein, 4.5, 2.5}, {1.0, 0.5});
  CHECK(observe(obs, {Manifold::Klein, 4.5, 2.5}) == 0.0);
  CHECK_THROWS_AS(observe(obs, {Manifold::Torus, 1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("observe: Fourier examples") {
  const auto obs = ObservationFn::fourier(cos_x_plus_cos_y());
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int i = 0; i < 200; ++i) {
    const double u = angle(rng), v = angle(rng);
    CHECK(observe(obs, {Manifold::Torus, u, v}) ==
          doctest::Approx(std::cos(u) + std::cos(v)).epsilon(1e-12));
  }
  // The Klein good observation restricted to the circle y = 0.
  const auto klein = ObservationFn::fourier(klein_good());
  for (int i = 0; i < 100; ++i) {
    const double x = angle(rng) / 2.0;
    CHECK(observe(klein, {Manifold::Klein, x, 0.0}) ==
          doctest::Approx(std::cos(2.0 * x) + 1.0).epsilon(1e-12));
  }
}

TEST_CASE("Fourier evaluation is real for conjugate-symmetric supports") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    const FourierSupport support = random_support(rng, 3, 3);
    for (int i = 0; i < 500; ++i) {
      const double u = angle(rng), v = angle(rng);
      std::complex<double> acc = 0.0;
      for (const FourierTerm& t : support.terms())
        acc += t.coeff * std::exp(std::complex<double>(0.0, t.n * u + t.m * v));
      CHECK(std::abs(acc.imag()) < 1e-12);
      CHECK(support.eval(u, v) == doctest::Approx(acc.real()).epsilon(1e-12));
    }
  }
}

TEST_CASE("non-conjugate-symmetric support is rejected") {
  CHECK_THROWS_AS(FourierSupport::from_terms({{1, 0, {0.5, 0.1}}}),
                  std::invalid_argument);
}

TEST_CASE("kappa invariance of the Klein observations") {
  const auto dist = ObservationFn::distance_to(
      Manifold::Klein, {Manifold::Klein, 4.5, 2.5}, {1.0, 0.5});
  const FourierSupport fourier = klein_good();
  std::mt19937 rng(44);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int i = 0; i < 10000; ++i) {
    const double u = angle(rng);
    const double v = angle(rng) / 2.0;
    const auto p = geometry::reduce({Manifold::Klein, u, v});
    const auto q = geometry::reduce({Manifold::Klein, u + kPi, -v});
    CHECK(std::abs(observe(dist, p) - observe(dist, q)) < 1e-12);
    CHECK(std::abs(fourier.eval(u, v) - fourier.eval(u + kPi, -v)) < 1e-12);
  }
}

TEST_CASE("fourier_support_generates truth table") {
  // Standard basis.
  const auto basis = FourierSupport::from_terms(
      {{1, 0, {0.5, 0.0}}, {-1, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}, {0, -1, {0.5, 0.0}}});
  auto report = fourier_support_generates(basis);
  CHECK(report.verdict() == Verdict::Good);
  CHECK(report.snf_diagonal == std::array<long long, 2>{1, 1});

  // cos x + cos y.
  report = fourier_support_generates(cos_x_plus_cos_y());
  CHECK(report.verdict() == Verdict::Good);

  // Doubled lattice {(+-2,0),(0,+-2)}.
  const auto doubled = FourierSupport::from_terms(
      {{2, 0, {0.5, 0.0}}, {-2, 0, {0.5, 0.0}}, {0, 2, {0.5, 0.0}}, {0, -2, {0.5, 0.0}}});
  report = fourier_support_generates(doubled);
  CHECK(report.verdict() == Verdict::Bad);
  CHECK(report.snf_diagonal == std::array<long long, 2>{2, 2});
  CHECK(!brute_force_generates(doubled));

  // The Klein good observation support.
  report = fourier_support_generates(klein_good());
  CHECK(report.verdict() == Verdict::Good);

  CHECK_THROWS_AS(fourier_support_generates(FourierSupport::from_terms({})),
                  std::invalid_argument);
}

TEST_CASE("lattice checker agrees with brute-force enumeration") {
  std::mt19937 rng(45);
  std::uniform_int_distribution<int> count(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const FourierSupport support = random_support(rng, 3, count(rng));
    const auto report = fourier_support_generates(support);
    CHECK((report.verdict() == Verdict::Good) == brute_force_generates(support));
  }
}

TEST_CASE("adding support vectors never breaks goodness") {
  std::mt19937 rng(46);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    FourierSupport good = random_support(rng, 2, 3);
    if (fourier_support_generates(good).verdict() != Verdict::Good) continue;
    std::vector<FourierTerm> terms = good.terms();
    int n = 0, m = 0;
    while (n == 0 && m == 0) {
      n = entry(rng);
      m = entry(rng);
    }
    terms.push_back({n, m, {0.25, 0.0}});
    terms.push_back({-n, -m, {0.25, 0.0}});
    const auto extended = FourierSupport::from_terms(terms);
    CHECK(fourier_support_generates(extended).verdict() == Verdict::Good);
  }
}

TEST_CASE("klein_observation_check") {
  // The full good observation passes.
  auto report = klein_observation_check(klein_good());
  CHECK(report.verdict() == Verdict::Good);

  // Without cos 2x the limit cycles map to single points.
  report = klein_observation_check(klein_no_double());
  CHECK(report.verdict() == Verdict::Bad);
  bool constant_boundary = false;
  for (const auto& f : report.findings)
    if (f.code == "constant-boundary" && f.failure) constant_boundary = true;
  CHECK(constant_boundary);

  // cos 2x + cos y: boundaries fine but the lattice has index 2.
  const auto sparse = FourierSupport::from_terms(
      {{2, 0, {0.5, 0.0}}, {-2, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}, {0, -1, {0.5, 0.0}}});
  report = klein_observation_check(sparse);
  CHECK(report.verdict() == Verdict::Bad);
  CHECK(report.snf_diagonal == std::array<long long, 2>{1, 2});

  // A non-kappa-invariant support violates the contract.
  CHECK_THROWS_AS(klein_observation_check(cos_x_plus_cos_y()),
                  std::invalid_argument);
}

TEST_CASE("shift-equivalent boundaries are detected") {
  // G = cos(2x) cos(y): boundaries cos 2x and -cos 2x = cos(2(x + pi/2)),
  // which differ by the shift pi/2.
  const auto support = FourierSupport::from_terms({{2, 1, {0.25, 0.0}},
                                                   {2, -1, {0.25, 0.0}},
                                                   {-2, 1, {0.25, 0.0}},
                                                   {-2, -1, {0.25, 0.0}}});
  const auto report = klein_observation_check(support);
  bool shifted = false;
  for (const auto& f : report.findings)
    if (f.code == "boundary-shift" && f.failure) shifted = true;
  CHECK(shifted);
  CHECK(report.verdict() == Verdict::Bad);
}

TEST_CASE("takens_rank_diagnostic") {
  const geometry::FlowSpec flow{Manifold::Torus, std::sqrt(2.0), 1.0,
                                std::nullopt, 0.1};
  std::vector<ManifoldPoint> base = {{Manifold::Torus, 0.3, 1.1},
                                     {Manifold::Torus, 2.0, 4.0},
                                     {Manifold::Torus, 5.5, 0.7}};
  const auto obs = ObservationFn::fourier(cos_x_plus_cos_y());
  auto report = takens_rank_diagnostic(obs, flow, base, 8, 0.5);
  CHECK(!report.any_deficient);
  for (const auto& e : report.entries) CHECK(e.ratio >= 1e-4);

  // Constant observation: both singular values vanish.
  const auto constant = ObservationFn::fourier(
      FourierSupport::from_terms({{0, 0, {2.5, 0.0}}}));
  report = takens_rank_diagnostic(constant, flow, base, 8, 0.5);
  CHECK(report.any_deficient);
  for (const auto& e : report.entries) CHECK(e.sigma1 == 0.0);

  // tau must be a multiple of dt.
  CHECK_THROWS_AS(takens_rank_diagnostic(obs, flow, base, 8, 0.55),
                  std::invalid_argument);
}

TEST_CASE("curve_separation_diagnostic on the Klein distance observations") {
  const geometry::FlowSpec flow{Manifold::Klein, 1.0, 0.05, std::nullopt, 0.2};
  std::vector<std::pair<ManifoldPoint, ManifoldPoint>> pairs;
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> angle(0.1, kPi - 0.1);
  for (int i = 0; i < 40; ++i) {
    const double u = angle(rng) * 2.0, v = angle(rng);
    pairs.push_back({{Manifold::Klein, u, v}, {Manifold::Klein, u + kPi, v}});
  }

  // x_hat on the circle v = 0: the shifted partner has an identical curve.
  const auto bad = ObservationFn::distance_to(
      Manifold::Klein, {Manifold::Klein, kPi, 0.0}, {1.0, 0.5});
  auto report = curve_separation_diagnostic(bad, flow, pairs, 500);
  CHECK(report.any_indistinguishable);
  for (const auto& e : report.entries) CHECK(e.separation < 1e-6);

  // Generic x_hat separates the same pairs.
  const auto good = ObservationFn::distance_to(
      Manifold::Klein, {Manifold::Klein, 4.5, 2.5}, {1.0, 0.5});
  report = curve_separation_diagnostic(good, flow, pairs, 2000);
  CHECK(!report.any_indistinguishable);

  CHECK_THROWS_AS(
      curve_separation_diagnostic(
          good, flow, {{ManifoldPoint{Manifold::Klein, 1.0, 1.0},
                        ManifoldPoint{Manifold::Klein, 1.0, 1.0}}}, 10),
      std::invalid_argument);
}
