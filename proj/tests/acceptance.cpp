// Acceptance suite: runs every preset-level criterion and prints one
// PASS/FAIL line per criterion. Exit code 0 iff all pass.

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "twisty/coordinates.hpp"
#include "twisty/geometry.hpp"
#include "twisty/observations.hpp"
#include "twisty/persistence.hpp"
#include "twisty/pipeline.hpp"

#include "lattice_oracle.hpp"

using namespace twisty;
namespace fs = std::filesystem;

namespace {

// Pinned at build time from the measured sphere-dist PCA-3 variance. The
// acceptance bound is this value minus 0.05 slack.
constexpr double kSpherePca3Pinned = 0.99;

fs::path out_root() {
  const fs::path root = fs::current_path() / "acceptance_out";
  fs::create_directories(root);
  return root;
}

class Runner {
 public:
  const pipeline::ExperimentBundle& bundle(const std::string& name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    pipeline::ExperimentConfig cfg = pipeline::preset(name);
    cfg.output.directory = (out_root() / name).string();
    const auto start = std::chrono::steady_clock::now();
    pipeline::ExperimentBundle b =
        pipeline::run_experiment(cfg, pipeline::Stage::Full);
    seconds_[name] = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    pipeline::write_bundle(b);
    return cache_.emplace(name, std::move(b)).first->second;
  }
  double seconds(const std::string& name) const { return seconds_.at(name); }

 private:
  std::map<std::string, pipeline::ExperimentBundle> cache_;
  std::map<std::string, double> seconds_;
};

std::array<std::size_t, 3> counts(const pipeline::ExperimentBundle& b,
                                  persistence::Coeff field) {
  for (const auto& fsry : b.summary)
    if (fsry.field == field) return fsry.significant;
  throw std::runtime_error("field not computed");
}

std::string show(const std::array<std::size_t, 3>& c) {
  std::ostringstream s;
  s << "(H1=" << c[1] << ", H2=" << c[2] << ")";
  return s.str();
}

bool signature(const pipeline::ExperimentBundle& b, persistence::Coeff field,
               std::size_t h1, std::size_t h2, std::string& detail) {
  const auto c = counts(b, field);
  std::ostringstream s;
  s << "Z/" << field << " " << show(c) << " want (H1=" << h1 << ", H2=" << h2
    << ")";
  detail += (detail.empty() ? "" : "; ") + s.str();
  return c[1] == h1 && c[2] == h2;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool brute_force_generates(const observations::FourierSupport& support) {
  return lattice_brute_force_generates(support);
}

observations::FourierSupport support_of(
    std::initializer_list<observations::FourierTerm> terms) {
  return observations::FourierSupport::from_terms(terms);
}

}  // namespace

int main() {
  Runner runner;
  int failures = 0;
  const auto report = [&](int id, const std::string& name, bool pass,
                          const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " [" << name
              << "] " << detail << "\n"
              << std::flush;
    if (!pass) ++failures;
  };
  const auto guarded = [&](int id, const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("exception: ") + e.what());
    }
  };

  // 1. torus-dist signature, cloud size, runtime.
  guarded(1, "torus-dist", [&] {
    const auto& b = runner.bundle("torus-dist");
    std::string detail;
    bool pass = signature(b, 2, 2, 1, detail);
    const std::size_t cloud = b.landmarks.indices.size();
    pass = pass && cloud <= 600;
    const double secs = runner.seconds("torus-dist");
    pass = pass && secs <= 120.0;
    std::ostringstream extra;
    extra << detail << "; persistence input " << cloud << " pts; "
          << static_cast<int>(secs) << "s";
    report(1, "torus-dist", pass, extra.str());
  });

  // 2. klein-dist signatures over Z/2 and Z/3, runtime.
  guarded(2, "klein-dist", [&] {
    const auto& b = runner.bundle("klein-dist");
    std::string detail;
    bool pass = signature(b, 2, 2, 1, detail);
    pass = signature(b, 3, 1, 0, detail) && pass;
    const double secs = runner.seconds("klein-dist");
    pass = pass && secs <= 180.0;
    std::ostringstream extra;
    extra << detail << "; " << static_cast<int>(secs) << "s";
    report(2, "klein-dist", pass, extra.str());
  });

  // 3. klein-fail degenerates to a cylinder.
  guarded(3, "klein-fail", [&] {
    const auto& b = runner.bundle("klein-fail");
    std::string detail;
    bool pass = signature(b, 2, 1, 0, detail);
    pass = signature(b, 3, 1, 0, detail) && pass;
    report(3, "klein-fail", pass, detail);
  });

  // 4. sphere-dist signature and PCA-3 variance.
  guarded(4, "sphere-dist", [&] {
    const auto& b = runner.bundle("sphere-dist");
    std::string detail;
    bool pass = signature(b, 2, 0, 1, detail);
    double variance = 0.0;
    for (const double v : b.pca3_variance) variance += v;
    pass = pass && kSpherePca3Pinned >= 0.8 &&
           variance >= kSpherePca3Pinned - 0.05;
    std::ostringstream extra;
    extra << detail << "; PCA3 variance " << variance << " (pinned "
          << kSpherePca3Pinned << ")";
    report(4, "sphere-dist", pass, extra.str());
  });

  // 5. rp2-dist signatures.
  guarded(5, "rp2-dist", [&] {
    const auto& b = runner.bundle("rp2-dist");
    std::string detail;
    bool pass = signature(b, 2, 1, 1, detail);
    pass = signature(b, 3, 0, 0, detail) && pass;
    report(5, "rp2-dist", pass, detail);
  });

  // 6. genus2-dist signature and runtime.
  guarded(6, "genus2-dist", [&] {
    const auto& b = runner.bundle("genus2-dist");
    std::string detail;
    bool pass = signature(b, 2, 4, 1, detail);
    const double secs = runner.seconds("genus2-dist");
    pass = pass && secs <= 300.0;
    std::ostringstream extra;
    extra << detail << "; " << static_cast<int>(secs) << "s";
    report(6, "genus2-dist", pass, extra.str());
  });

  // 7. torus-fourier signature.
  guarded(7, "torus-fourier", [&] {
    const auto& b = runner.bundle("torus-fourier");
    std::string detail;
    const bool pass = signature(b, 2, 2, 1, detail);
    report(7, "torus-fourier", pass, detail);
  });

  // 8. klein-fourier signatures.
  guarded(8, "klein-fourier", [&] {
    const auto& b = runner.bundle("klein-fourier");
    std::string detail;
    bool pass = signature(b, 2, 2, 1, detail);
    pass = signature(b, 3, 1, 0, detail) && pass;
    report(8, "klein-fourier", pass, detail);
  });

  // 9. Fourier checker truth table plus brute-force agreement.
  guarded(9, "fourier-checker", [&] {
    using observations::Verdict;
    bool pass = true;
    std::string detail;

    auto r1 = observations::fourier_support_generates(support_of(
        {{1, 0, {0.5, 0}}, {-1, 0, {0.5, 0}}, {0, 1, {0.5, 0}}, {0, -1, {0.5, 0}}}));
    pass = pass && r1.verdict() == Verdict::Good &&
           r1.snf_diagonal == std::array<long long, 2>{1, 1};

    auto r2 = observations::fourier_support_generates(support_of(
        {{2, 0, {0.5, 0}}, {-2, 0, {0.5, 0}}, {0, 2, {0.5, 0}}, {0, -2, {0.5, 0}}}));
    pass = pass && r2.verdict() == Verdict::Bad &&
           r2.snf_diagonal == std::array<long long, 2>{2, 2};

    auto r3 = observations::fourier_support_generates(
        support_of({{2, 0, {0.5, 0}},
                    {-2, 0, {0.5, 0}},
                    {1, 1, {0.0, -0.25}},
                    {1, -1, {0.0, 0.25}},
                    {-1, 1, {0.0, -0.25}},
                    {-1, -1, {0.0, 0.25}},
                    {0, 1, {0.5, 0}},
                    {0, -1, {0.5, 0}}}));
    pass = pass && r3.verdict() == Verdict::Good;

    std::mt19937 rng(90);
    std::uniform_int_distribution<int> entry(-3, 3), nvec(1, 3);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    int agreements = 0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<observations::FourierTerm> terms;
      const int k = nvec(rng);
      for (int i = 0; i < k; ++i) {
        int n = 0, m = 0;
        while (n == 0 && m == 0) {
          n = entry(rng);
          m = entry(rng);
        }
        const std::complex<double> c{coeff(rng), coeff(rng)};
        terms.push_back({n, m, c});
        terms.push_back({-n, -m, std::conj(c)});
      }
      const auto support = observations::FourierSupport::from_terms(terms);
      const bool checker = observations::fourier_support_generates(support)
                               .verdict() == Verdict::Good;
      if (checker == brute_force_generates(support)) ++agreements;
    }
    pass = pass && agreements == 200;
    std::ostringstream extra;
    extra << "truth table ok, brute-force agreement " << agreements << "/200";
    report(9, "fourier-checker", pass, extra.str());
  });

  // 10. Persistence vs the dense Betti oracle.
  guarded(10, "oracle-equivalence", [&] {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(91);
    std::uniform_int_distribution<std::size_t> size(4, 12);
    std::uniform_real_distribution<double> coord(0.0, 1.0), frac(0.05, 0.95);
    int checks = 0, matches = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = size(rng);
      std::vector<double> data(n * 3);
      for (double& x : data) x = coord(rng);
      const auto d = persistence::DistanceMatrix::from_points(data.data(), n, 3);
      double top = 0.0;
      for (const double x : d.entries) top = std::max(top, x);
      top *= 1.01;
      for (const persistence::Coeff field : {2, 3, 5}) {
        const auto res = persistence::rips_persistence(d, 2, field, top);
        for (int s = 0; s < 3; ++s) {
          const double scale = frac(rng) * top;
          ++checks;
          if (persistence::betti_from_diagrams(res, scale) ==
              persistence::betti_oracle(d, scale, 2, field))
            ++matches;
        }
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool pass = matches == checks && secs <= 60.0;
    std::ostringstream extra;
    extra << matches << "/" << checks << " exact in " << secs << "s";
    report(10, "oracle-equivalence", pass, extra.str());
  });

  // 11. Circular coordinates on torus-dist recover the chart angles.
  guarded(11, "circular-coordinates", [&] {
    const auto& b = runner.bundle("torus-dist");
    if (b.circular_angles.size() < 2)
      throw std::runtime_error("fewer than two recovered circular coordinates");
    std::vector<double> truth_u, truth_v;
    const auto& cfg = b.config;
    for (const double t : b.cloud.start_times) {
      truth_u.push_back(
          geometry::wrap_angle(cfg.flow.p0_u + cfg.flow.alpha * t, geometry::kTwoPi));
      truth_v.push_back(
          geometry::wrap_angle(cfg.flow.p0_v + cfg.flow.beta * t, geometry::kTwoPi));
    }
    double best[2][2];
    for (int c = 0; c < 2; ++c) {
      best[c][0] = coordinates::circular_correlation(b.circular_angles[c], truth_u);
      best[c][1] = coordinates::circular_correlation(b.circular_angles[c], truth_v);
    }
    // Each coordinate matches one angle; jointly they cover both.
    const bool assign_a = best[0][0] >= 0.99 && best[1][1] >= 0.99;
    const bool assign_b = best[0][1] >= 0.99 && best[1][0] >= 0.99;
    const bool pass = assign_a || assign_b;
    std::ostringstream extra;
    extra << "correlations [" << best[0][0] << ", " << best[0][1] << "] and ["
          << best[1][0] << ", " << best[1][1] << "]";
    report(11, "circular-coordinates", pass, extra.str());
  });

  // 12. Projective coordinates depend only on the cohomology class.
  guarded(12, "projective-isometry", [&] {
    const auto& b = runner.bundle("klein-dist");
    const persistence::PersistenceResult* z2 = nullptr;
    for (const auto& res : b.persistence_results)
      if (res.field_char == 2) z2 = &res;
    if (z2 == nullptr) throw std::runtime_error("no Z/2 result");
    // Most persistent H1 class.
    std::size_t top = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < z2->diagrams[1].pairs.size(); ++i) {
      const auto& p = z2->diagrams[1].pairs[i];
      const double pers =
          (p.death == persistence::kInfDeath ? 1e18 : p.death) - p.birth;
      if (pers > best) {
        best = pers;
        top = i;
      }
    }
    const persistence::CocycleRep& mu = z2->h1_cocycles[top];
    const double floor_alpha =
        b.config.coordinates.alpha_slack * b.landmarks.cover_radius;
    const double two_alpha = std::max(
        2.0 * floor_alpha, mu.birth + 0.5 * (mu.death - mu.birth));
    const auto cover = coordinates::CoordinateCover::build(
        b.cloud, b.landmarks, two_alpha / 2.0);

    // Subsample queries for the pairwise comparison.
    slidingwindow::PointCloud queries;
    queries.dim = b.cloud.dim;
    for (std::size_t i = 0; i < b.cloud.size(); i += 9) {
      const auto p = b.cloud.point(i);
      queries.data.insert(queries.data.end(), p.begin(), p.end());
    }
    const auto base = coordinates::projective_coords(queries, cover, mu);

    std::mt19937 rng(92);
    std::uniform_int_distribution<int> bit(0, 1);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<int> eta(cover.size());
      for (int& x : eta) x = bit(rng);
      std::map<std::pair<int, int>, int> terms;
      for (const auto& t : mu.terms) terms[{t.i, t.j}] = t.coeff & 1;
      for (const auto& [i, j] : coordinates::cover_edges(cover))
        if ((eta[i] + eta[j]) % 2 == 1) terms[{i, j}] ^= 1;
      persistence::CocycleRep nu = mu;
      nu.terms.clear();
      for (const auto& [edge, c] : terms)
        if (c) nu.terms.push_back({edge.first, edge.second, 1});
      const auto perturbed = coordinates::projective_coords(queries, cover, nu);
      for (std::size_t i = 0; i < base.size(); i += 3)
        for (std::size_t j = i + 1; j < base.size(); j += 5)
          worst = std::max(
              worst, std::abs(coordinates::projective_distance(base[i], base[j]) -
                              coordinates::projective_distance(perturbed[i],
                                                               perturbed[j])));
    }
    const bool pass = worst < 1e-6;
    std::ostringstream extra;
    extra << "max pairwise d_g deviation " << worst;
    report(12, "projective-isometry", pass, extra.str());
  });

  // 13. Rank and separation diagnostics.
  guarded(13, "diagnostics", [&] {
    using geometry::Manifold;
    using geometry::ManifoldPoint;
    bool pass = true;
    std::string detail;

    // Sphere, equatorial observation point, rotational flow (the degenerate
    // elevation-slope limit): base points on the equator are rank-deficient.
    const geometry::FlowSpec rotation{Manifold::Sphere, 1.0, 0.0, std::nullopt,
                                      0.05};
    std::vector<ManifoldPoint> equator_points;
    for (const double phi : {0.4, 1.7, 3.9})
      equator_points.push_back({Manifold::Sphere, phi, geometry::kPi / 2});
    const auto bad_obs = observations::ObservationFn::distance_to(
        Manifold::Sphere, {Manifold::Sphere, 2.4, geometry::kPi / 2});
    const auto bad_report = observations::takens_rank_diagnostic(
        bad_obs, rotation, equator_points, 12, 0.25);
    bool all_deficient = true;
    for (const auto& e : bad_report.entries) all_deficient &= e.deficient;
    pass = pass && all_deficient;
    detail += all_deficient ? "equator x_hat flagged" : "equator x_hat NOT flagged";

    // The preset's off-equator observation point passes at the same points.
    const auto good_obs = observations::ObservationFn::distance_to(
        Manifold::Sphere, {Manifold::Sphere, 0.0, 1.0});
    const auto good_report = observations::takens_rank_diagnostic(
        good_obs, rotation, equator_points, 12, 0.25);
    pass = pass && !good_report.any_deficient;
    detail += good_report.any_deficient ? "; off-equator flagged (bad)"
                                        : "; off-equator clean";

    // Klein separation: x_hat = (pi, 0) confuses u and u + pi, the generic
    // point does not.
    const geometry::FlowSpec klein_flow{Manifold::Klein, 1.0, 0.05, std::nullopt,
                                        0.2};
    std::vector<std::pair<ManifoldPoint, ManifoldPoint>> pairs;
    std::mt19937 rng(93);
    std::uniform_real_distribution<double> uu(0.0, geometry::kTwoPi),
        vv(0.2, geometry::kPi - 0.2);
    for (int i = 0; i < 25; ++i) {
      const double u = uu(rng), v = vv(rng);
      pairs.push_back({{Manifold::Klein, u, v},
                       {Manifold::Klein, u + geometry::kPi, v}});
    }
    const auto fail_obs = observations::ObservationFn::distance_to(
        Manifold::Klein, {Manifold::Klein, geometry::kPi, 0.0}, {1.0, 0.5});
    const auto fail_rep = observations::curve_separation_diagnostic(
        fail_obs, klein_flow, pairs, 1000);
    pass = pass && fail_rep.any_indistinguishable;
    detail += fail_rep.any_indistinguishable ? "; klein-fail pairs merged"
                                             : "; klein-fail pairs NOT merged";

    const auto ok_obs = observations::ObservationFn::distance_to(
        Manifold::Klein, {Manifold::Klein, 4.5, 2.5}, {1.0, 0.5});
    const auto ok_rep = observations::curve_separation_diagnostic(
        ok_obs, klein_flow, pairs, 2000);
    pass = pass && !ok_rep.any_indistinguishable;
    detail += ok_rep.any_indistinguishable ? "; klein-dist pairs merged (bad)"
                                           : "; klein-dist pairs separated";
    report(13, "diagnostics", pass, detail);
  });

  // 14. Determinism: rerunning a preset yields byte-identical artifacts.
  guarded(14, "determinism", [&] {
    runner.bundle("torus-fourier");  // first run, written to acceptance_out
    pipeline::ExperimentConfig cfg = pipeline::preset("torus-fourier");
    cfg.output.directory = (out_root() / "torus-fourier-rerun").string();
    const pipeline::ExperimentBundle again =
        pipeline::run_experiment(cfg, pipeline::Stage::Full);
    pipeline::write_bundle(again);
    bool pass = true;
    std::string mismatch;
    // config.json echoes the differing output directory and is exempt; the
    // manifest is not, since the config hash excludes output settings.
    for (const char* name :
         {"series.csv", "cloud.csv", "persistence_z2.json", "manifest.json"}) {
      const std::string a = slurp(out_root() / "torus-fourier" / name);
      const std::string b = slurp(out_root() / "torus-fourier-rerun" / name);
      if (a != b) {
        pass = false;
        mismatch += std::string(" ") + name;
      }
    }
    report(14, "determinism", pass,
           pass ? "CSV/JSON artifacts byte-identical" : "mismatch:" + mismatch);
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                              : std::to_string(failures) + " CRITERIA FAILED")
            << "\n";
  return failures == 0 ? 0 : 1;
}
