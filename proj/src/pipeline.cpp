#include "twisty/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "twisty/io.hpp"

namespace twisty::pipeline {

using json = nlohmann::ordered_json;
using geometry::Manifold;
using geometry::kPi;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3Half = std::sqrt(3.0) / 2.0;

std::vector<observations::FourierTerm> cos_x_plus_cos_y() {
  return {{1, 0, {0.5, 0.0}},
          {-1, 0, {0.5, 0.0}},
          {0, 1, {0.5, 0.0}},
          {0, -1, {0.5, 0.0}}};
}

// cos 2x + cos x sin y + cos y
std::vector<observations::FourierTerm> klein_good_observation() {
  return {{2, 0, {0.5, 0.0}},    {-2, 0, {0.5, 0.0}},
          {1, 1, {0.0, -0.25}},  {1, -1, {0.0, 0.25}},
          {-1, 1, {0.0, -0.25}}, {-1, -1, {0.0, 0.25}},
          {0, 1, {0.5, 0.0}},    {0, -1, {0.5, 0.0}}};
}

template <typename F>
auto stage_guard(const char* label, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(label) + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"torus-dist",  "klein-dist",   "klein-fail",    "sphere-dist",
          "rp2-dist",    "genus2-dist",  "torus-fourier", "klein-fourier"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.preset_name = name;
  if (name == "torus-dist") {
    // dt deliberately incommensurate with the chart periods: a rational tie
    // between stride*dt and 2 pi quantizes the sampled v-values and the
    // cloud degenerates to parallel circles. The window spans several slow
    // periods, which rounds the embedded torus enough for the harmonic
    // coordinates to track the chart angles.
    cfg.flow = {Manifold::Torus, kSqrt2, 1.0, std::nullopt, 0.21, 10000, 0.0,
                0.0};
    cfg.observation = {ObservationConfig::Kind::Distance, 6.0, kPi, {1.0, 1.0}, {}};
    cfg.window = {45, 3, 5};
    cfg.persistence = {true, 2, {2}, 0.0, 400, 0, 3.0};
    cfg.coordinates = {true, false, {41, 43, 47}, 2, 1.1};
  } else if (name == "klein-dist") {
    cfg.flow = {Manifold::Klein, 1.0, 0.05, std::nullopt, 0.2, 12000, 0.0, 0.1};
    cfg.observation = {ObservationConfig::Kind::Distance, 4.5, 2.5, {1.0, 0.5}, {}};
    cfg.window = {29, 1, 6};
    cfg.persistence = {true, 2, {2, 3}, 0.0, 400, 0, 3.0};
    cfg.coordinates = {false, true, {41, 43, 47}, 2, 1.1};
  } else if (name == "klein-fail") {
    cfg.flow = {Manifold::Klein, 1.0, 0.05, std::nullopt, 0.2, 12000, 0.0, 0.1};
    cfg.observation = {ObservationConfig::Kind::Distance, kPi, 0.0, {1.0, 0.5}, {}};
    cfg.window = {29, 1, 6};
    cfg.persistence = {true, 2, {2, 3}, 0.0, 400, 0, 3.0};
  } else if (name == "sphere-dist" || name == "rp2-dist") {
    // The RP2 run needs a much shallower sweep: the two lifts of an RP2
    // point carry opposite elevation drifts, and their windows only merge
    // below the Rips feature scale when the drift over one window is small.
    // Its longer window also rounds the image so the core RP1 loop persists
    // until the cone scale, squeezing out the Z/3 torsion echoes.
    const bool rp2 = name == "rp2-dist";
    const std::size_t n = rp2 ? 100000 : 12000;
    const double dt = 0.0104;  // incommensurate with the azimuth period
    const double beta = (kPi - 0.1) / (static_cast<double>(n) * dt);
    cfg.flow = {rp2 ? Manifold::RP2 : Manifold::Sphere, 1.0, beta, std::nullopt,
                dt, n, 0.0, 0.05};
    cfg.observation = {ObservationConfig::Kind::Distance, 0.0, 1.0, {1.0, 1.0}, {}};
    cfg.window = {rp2 ? std::size_t{45} : std::size_t{29},
                  rp2 ? std::size_t{20} : std::size_t{18},
                  rp2 ? std::size_t{25} : std::size_t{20}};
    cfg.persistence = {true, 2,
                       rp2 ? std::vector<persistence::Coeff>{2, 3}
                           : std::vector<persistence::Coeff>{2},
                       0.0, rp2 ? std::size_t{420} : std::size_t{380}, 0,
                       rp2 ? 3.6 : 3.0};
  } else if (name == "genus2-dist") {
    cfg.flow = {Manifold::Genus2, 1.0, kSqrt3Half, std::nullopt, 0.01, 40000,
                0.1, 0.05};
    cfg.observation = {ObservationConfig::Kind::Distance, 0.25, 0.1, {1.0, 1.0}, {}};
    cfg.window = {29, 14, 8};
    cfg.persistence = {true, 2, {2}, 0.0, 450, 0, 2.5};
  } else if (name == "torus-fourier") {
    cfg.flow = {Manifold::Torus, kSqrt2, 1.0, std::nullopt, 0.1, 10000, 0.0, 0.0};
    cfg.observation = {ObservationConfig::Kind::Fourier, 0.0, 0.0, {1.0, 1.0},
                       cos_x_plus_cos_y()};
    cfg.window = {10, 10, 5};
    cfg.persistence = {true, 2, {2}, 0.0, 400, 0, 3.0};
  } else if (name == "klein-fourier") {
    // The single X_eps orbit sweeps the mid-domain exactly once; the strand
    // spacing there is 2 pi beta / alpha, so the climb must be shallow.
    cfg.flow = {Manifold::Klein, 1.0, 0.0125,
                geometry::KleinBumpParams{0.3, geometry::BumpProfile::Smoothstep},
                0.2, 28000, 0.0, 0.08};
    cfg.observation = {ObservationConfig::Kind::Fourier, 0.0, 0.0, {1.0, 1.0},
                       klein_good_observation()};
    cfg.window = {29, 1, 10};
    // Threshold pinned below the cone-collapse regime, where coefficient-
    // dependent torsion echoes would otherwise appear late in H2.
    cfg.persistence = {true, 2, {2, 3}, 8.3, 400, 0, 3.0};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Config serialization

std::string config_to_json(const ExperimentConfig& cfg) {
  json root;
  if (cfg.preset_name) root["preset"] = *cfg.preset_name;
  if (cfg.series_file) root["series_file"] = *cfg.series_file;
  root["manifold"] = geometry::manifold_name(cfg.flow.manifold);
  json flow;
  flow["slope"] = {cfg.flow.alpha, cfg.flow.beta};
  flow["dt"] = cfg.flow.dt;
  flow["n_samples"] = cfg.flow.n_samples;
  flow["p0"] = {cfg.flow.p0_u, cfg.flow.p0_v};
  if (cfg.flow.klein_params) {
    flow["klein_epsilon"] = cfg.flow.klein_params->epsilon;
    flow["rho_profile"] = "smoothstep";
  }
  root["flow"] = flow;
  json obs;
  obs["variant"] =
      cfg.observation.kind == ObservationConfig::Kind::Distance ? "distance"
                                                                : "fourier";
  obs["x_hat"] = {cfg.observation.x_hat_u, cfg.observation.x_hat_v};
  obs["weights"] = {cfg.observation.weights.weight_u,
                    cfg.observation.weights.weight_v};
  if (!cfg.observation.fourier_terms.empty()) {
    json terms = json::array();
    for (const auto& t : cfg.observation.fourier_terms) {
      json term;
      term["n"] = t.n;
      term["m"] = t.m;
      term["re"] = t.coeff.real();
      term["im"] = t.coeff.imag();
      terms.push_back(term);
    }
    obs["fourier"] = terms;
  }
  root["observation"] = obs;
  json window;
  window["delays"] = cfg.window.delays;
  window["tau_steps"] = cfg.window.tau_steps;
  window["stride"] = cfg.window.stride;
  root["window"] = window;
  json pers;
  pers["enabled"] = cfg.persistence.enabled;
  pers["maxdim"] = cfg.persistence.maxdim;
  pers["fields"] = cfg.persistence.fields;
  pers["threshold"] = cfg.persistence.threshold;
  pers["landmarks"] = cfg.persistence.landmarks;
  pers["seed_index"] = cfg.persistence.seed_index;
  pers["gap_ratio"] = cfg.persistence.gap_ratio;
  root["persistence"] = pers;
  json coords;
  coords["circular"] = cfg.coordinates.circular;
  coords["projective"] = cfg.coordinates.projective;
  coords["lift_primes"] = cfg.coordinates.lift_primes;
  coords["target_dim"] = cfg.coordinates.target_dim;
  coords["alpha_slack"] = cfg.coordinates.alpha_slack;
  root["coordinates"] = coords;
  json outputs;
  outputs["directory"] = cfg.output.directory;
  outputs["plots"] = cfg.output.plots;
  root["outputs"] = outputs;
  return root.dump(2) + "\n";
}

ExperimentConfig apply_config_json(ExperimentConfig cfg, const std::string& text) {
  const json root = json::parse(text);
  if (root.contains("preset")) cfg = preset(root["preset"].get<std::string>());
  if (root.contains("series_file"))
    cfg.series_file = root["series_file"].get<std::string>();
  if (root.contains("manifold")) {
    const auto m = geometry::manifold_from_name(root["manifold"].get<std::string>());
    if (!m) throw std::invalid_argument("config: unknown manifold");
    cfg.flow.manifold = *m;
  }
  if (root.contains("flow")) {
    const json& flow = root["flow"];
    if (flow.contains("slope")) {
      cfg.flow.alpha = flow["slope"][0].get<double>();
      cfg.flow.beta = flow["slope"][1].get<double>();
    }
    if (flow.contains("dt")) cfg.flow.dt = flow["dt"].get<double>();
    if (flow.contains("n_samples"))
      cfg.flow.n_samples = flow["n_samples"].get<std::size_t>();
    if (flow.contains("p0")) {
      cfg.flow.p0_u = flow["p0"][0].get<double>();
      cfg.flow.p0_v = flow["p0"][1].get<double>();
    }
    if (flow.contains("klein_epsilon"))
      cfg.flow.klein_params = geometry::KleinBumpParams{
          flow["klein_epsilon"].get<double>(), geometry::BumpProfile::Smoothstep};
  }
  if (root.contains("observation")) {
    const json& obs = root["observation"];
    if (obs.contains("variant"))
      cfg.observation.kind = obs["variant"].get<std::string>() == "fourier"
                                 ? ObservationConfig::Kind::Fourier
                                 : ObservationConfig::Kind::Distance;
    if (obs.contains("x_hat")) {
      cfg.observation.x_hat_u = obs["x_hat"][0].get<double>();
      cfg.observation.x_hat_v = obs["x_hat"][1].get<double>();
    }
    if (obs.contains("weights")) {
      cfg.observation.weights.weight_u = obs["weights"][0].get<double>();
      cfg.observation.weights.weight_v = obs["weights"][1].get<double>();
    }
    if (obs.contains("fourier")) {
      cfg.observation.fourier_terms.clear();
      for (const json& term : obs["fourier"])
        cfg.observation.fourier_terms.push_back(
            {term["n"].get<int>(), term["m"].get<int>(),
             {term["re"].get<double>(), term["im"].get<double>()}});
    }
  }
  if (root.contains("window")) {
    const json& window = root["window"];
    if (window.contains("delays"))
      cfg.window.delays = window["delays"].get<std::size_t>();
    if (window.contains("tau_steps"))
      cfg.window.tau_steps = window["tau_steps"].get<std::size_t>();
    if (window.contains("stride"))
      cfg.window.stride = window["stride"].get<std::size_t>();
  }
  if (root.contains("persistence")) {
    const json& pers = root["persistence"];
    if (pers.contains("enabled"))
      cfg.persistence.enabled = pers["enabled"].get<bool>();
    if (pers.contains("maxdim")) cfg.persistence.maxdim = pers["maxdim"].get<int>();
    if (pers.contains("fields"))
      cfg.persistence.fields =
          pers["fields"].get<std::vector<persistence::Coeff>>();
    if (pers.contains("threshold"))
      cfg.persistence.threshold = pers["threshold"].get<double>();
    if (pers.contains("landmarks"))
      cfg.persistence.landmarks = pers["landmarks"].get<std::size_t>();
    if (pers.contains("seed_index"))
      cfg.persistence.seed_index = pers["seed_index"].get<std::size_t>();
    if (pers.contains("gap_ratio"))
      cfg.persistence.gap_ratio = pers["gap_ratio"].get<double>();
  }
  if (root.contains("coordinates")) {
    const json& coords = root["coordinates"];
    if (coords.contains("circular"))
      cfg.coordinates.circular = coords["circular"].get<bool>();
    if (coords.contains("projective"))
      cfg.coordinates.projective = coords["projective"].get<bool>();
    if (coords.contains("lift_primes"))
      cfg.coordinates.lift_primes =
          coords["lift_primes"].get<std::vector<persistence::Coeff>>();
    if (coords.contains("target_dim"))
      cfg.coordinates.target_dim = coords["target_dim"].get<std::size_t>();
    if (coords.contains("alpha_slack"))
      cfg.coordinates.alpha_slack = coords["alpha_slack"].get<double>();
  }
  if (root.contains("outputs")) {
    const json& outputs = root["outputs"];
    if (outputs.contains("directory"))
      cfg.output.directory = outputs["directory"].get<std::string>();
    if (outputs.contains("plots")) cfg.output.plots = outputs["plots"].get<bool>();
  }
  return cfg;
}

ExperimentConfig config_from_json(const std::string& text) {
  return apply_config_json(ExperimentConfig{}, text);
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig canonical = cfg;
  canonical.output = OutputConfig{};  // the hash identifies the experiment
  const std::string text = config_to_json(canonical);
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

observations::ObservationFn make_observation(const ExperimentConfig& cfg) {
  if (cfg.observation.kind == ObservationConfig::Kind::Distance) {
    return observations::ObservationFn::distance_to(
        cfg.flow.manifold,
        {cfg.flow.manifold, cfg.observation.x_hat_u, cfg.observation.x_hat_v},
        cfg.observation.weights);
  }
  return observations::ObservationFn::fourier(
      observations::FourierSupport::from_terms(cfg.observation.fourier_terms));
}

geometry::FlowSpec make_flow(const ExperimentConfig& cfg) {
  return {cfg.flow.manifold, cfg.flow.alpha, cfg.flow.beta,
          cfg.flow.klein_params, cfg.flow.dt};
}

// Indices into diagram.pairs of the significant classes, most persistent
// first; mirrors significant_classes.
std::vector<std::size_t> significant_indices(
    const persistence::PersistenceDiagram& diagram, double gap_ratio) {
  const auto chosen = persistence::significant_classes(diagram, gap_ratio);
  std::vector<std::size_t> indices;
  std::vector<bool> used(diagram.pairs.size(), false);
  for (const auto& pair : chosen) {
    for (std::size_t i = 0; i < diagram.pairs.size(); ++i) {
      if (used[i]) continue;
      if (diagram.pairs[i].birth == pair.birth &&
          diagram.pairs[i].death == pair.death) {
        indices.push_back(i);
        used[i] = true;
        break;
      }
    }
  }
  return indices;
}

// Ball radius for one cocycle class: at least slack * cover radius so every
// query is covered, raised to the midpoint of the class's (birth, death)
// window so the balls overlap broadly and the partition of unity stays
// smooth. Throws when no admissible radius exists.
double class_alpha(double cover_radius, double slack, double birth,
                   double death) {
  const double floor_alpha = slack * cover_radius;
  const double span = std::isfinite(death) ? death - birth : birth;
  const double two_alpha =
      std::max(2.0 * floor_alpha, birth + 0.5 * span);
  if (!(two_alpha < death)) {
    std::ostringstream msg;
    msg << "class [" << birth << "," << death
        << ") admits no ball radius above the cover floor " << floor_alpha;
    throw std::runtime_error(msg.str());
  }
  return two_alpha / 2.0;
}

persistence::CocycleRep sum_mod2(const persistence::CocycleRep& a,
                                 const persistence::CocycleRep& b) {
  std::map<std::pair<int, int>, int> acc;
  for (const auto& t : a.terms) acc[{t.i, t.j}] ^= t.coeff & 1;
  for (const auto& t : b.terms) acc[{t.i, t.j}] ^= t.coeff & 1;
  persistence::CocycleRep sum;
  sum.field_char = 2;
  sum.birth = std::max(a.birth, b.birth);
  sum.death = std::min(a.death, b.death);
  for (const auto& [edge, c] : acc)
    if (c) sum.terms.push_back({edge.first, edge.second, 1});
  return sum;
}

}  // namespace

ExperimentBundle run_experiment(const ExperimentConfig& cfg, Stage stage) {
  ExperimentBundle bundle;
  bundle.config = cfg;
  bundle.stage = stage;

  stage_guard("synthesize", [&] {
    if (cfg.series_file) {
      bundle.series = io::read_series_csv(*cfg.series_file);
      return 0;
    }
    const geometry::FlowSpec flow = make_flow(cfg);
    const geometry::ManifoldPoint p0{cfg.flow.manifold, cfg.flow.p0_u,
                                     cfg.flow.p0_v};
    const geometry::Trajectory traj =
        geometry::flow_trajectory(flow, p0, cfg.flow.n_samples);
    bundle.series = observations::observe_trajectory(make_observation(cfg), traj);
    return 0;
  });
  if (stage == Stage::Synthesize) return bundle;

  stage_guard("embed", [&] {
    const slidingwindow::SlidingWindowConfig wcfg{
        cfg.window.delays, cfg.window.tau_steps, cfg.window.stride};
    bundle.cloud = slidingwindow::sliding_window(bundle.series, wcfg);
    if (bundle.cloud.dim >= 3)
      bundle.pca3_variance = slidingwindow::pca_project(bundle.cloud, 3).second;
    return 0;
  });
  if (stage == Stage::Embed) return bundle;

  if (cfg.persistence.enabled) {
    stage_guard("persist", [&] {
      const std::size_t k =
          std::min(cfg.persistence.landmarks, bundle.cloud.size());
      bundle.landmarks = slidingwindow::maxmin_landmarks(
          bundle.cloud, k, cfg.persistence.seed_index);
      slidingwindow::PointCloud sub;
      sub.dim = bundle.cloud.dim;
      for (const std::size_t idx : bundle.landmarks.indices) {
        const auto p = bundle.cloud.point(idx);
        sub.data.insert(sub.data.end(), p.begin(), p.end());
      }
      const persistence::DistanceMatrix dm =
          persistence::DistanceMatrix::from_points(sub.data.data(), sub.size(),
                                                   sub.dim);
      bundle.threshold = cfg.persistence.threshold > 0.0
                             ? cfg.persistence.threshold
                             : dm.enclosing_radius();
      for (const persistence::Coeff field : cfg.persistence.fields) {
        bundle.persistence_results.push_back(persistence::rips_persistence(
            dm, cfg.persistence.maxdim, field, bundle.threshold));
        FieldSummary fs;
        fs.field = field;
        for (int dim = 0; dim < 3; ++dim)
          fs.significant[dim] =
              persistence::significant_classes(
                  bundle.persistence_results.back().diagrams[dim],
                  cfg.persistence.gap_ratio)
                  .size();
        bundle.summary.push_back(fs);
      }
      return 0;
    });
  }
  if (stage == Stage::Persist) return bundle;

  if (cfg.persistence.enabled &&
      (cfg.coordinates.circular || cfg.coordinates.projective)) {
    stage_guard("coords", [&] {
      const double cover_radius = bundle.landmarks.cover_radius;
      const double slack = cfg.coordinates.alpha_slack;

      if (cfg.coordinates.circular) {
        std::string last_error = "no lift prime available";
        for (const persistence::Coeff q : cfg.coordinates.lift_primes) {
          try {
            const coordinates::CoordinateCover probe =
                coordinates::CoordinateCover::build(bundle.cloud,
                                                    bundle.landmarks, 1.0);
            const persistence::PersistenceResult res =
                persistence::rips_persistence(probe.landmark_dist, 1, q,
                                              bundle.threshold);
            const auto idx =
                significant_indices(res.diagrams[1], cfg.persistence.gap_ratio);
            std::vector<std::vector<double>> angles;
            for (std::size_t c = 0; c < std::min<std::size_t>(idx.size(), 2); ++c) {
              const persistence::CocycleRep& rep = res.h1_cocycles[idx[c]];
              const double alpha =
                  class_alpha(cover_radius, slack, rep.birth, rep.death);
              const coordinates::CoordinateCover cover =
                  coordinates::CoordinateCover::build(bundle.cloud,
                                                      bundle.landmarks, alpha);
              const coordinates::IntegerCochain lift =
                  coordinates::lift_cocycle(rep, cover);
              const coordinates::HarmonicDecomposition hd =
                  coordinates::harmonic_decompose(lift, cover);
              angles.push_back(
                  coordinates::circular_coords(bundle.cloud, cover, hd));
            }
            bundle.circular_angles = std::move(angles);
            bundle.circular_prime = q;
            break;
          } catch (const coordinates::LiftFailure& e) {
            last_error = e.what();
            continue;
          }
        }
        if (bundle.circular_prime == 0)
          throw std::runtime_error("circular lift failed for all primes: " +
                                   last_error);
      }

      if (cfg.coordinates.projective) {
        const persistence::PersistenceResult* z2 = nullptr;
        for (std::size_t i = 0; i < bundle.persistence_results.size(); ++i)
          if (bundle.persistence_results[i].field_char == 2)
            z2 = &bundle.persistence_results[i];
        persistence::PersistenceResult local;
        if (z2 == nullptr) {
          const coordinates::CoordinateCover probe =
              coordinates::CoordinateCover::build(bundle.cloud,
                                                  bundle.landmarks, 1.0);
          local = persistence::rips_persistence(probe.landmark_dist, 1, 2,
                                                bundle.threshold);
          z2 = &local;
        }
        const auto idx =
            significant_indices(z2->diagrams[1], cfg.persistence.gap_ratio);
        if (idx.empty())
          throw std::runtime_error("projective: no significant Z/2 class");
        persistence::CocycleRep mu = z2->h1_cocycles[idx[0]];
        if (idx.size() >= 2) mu = sum_mod2(mu, z2->h1_cocycles[idx[1]]);
        const double alpha =
            class_alpha(cover_radius, slack, mu.birth, mu.death);
        const coordinates::CoordinateCover cover =
            coordinates::CoordinateCover::build(bundle.cloud, bundle.landmarks,
                                                alpha);
        const auto points =
            coordinates::projective_coords(bundle.cloud, cover, mu);
        auto [reduced, distortion] =
            coordinates::ppca_reduce(points, cfg.coordinates.target_dim);
        bundle.projective_points = std::move(reduced);
        bundle.ppca_distortion = std::move(distortion);
      }
      return 0;
    });
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Artifact export

namespace {

std::string field_file(persistence::Coeff field) {
  return "persistence_z" + std::to_string(field) + ".json";
}

}  // namespace

void write_bundle(const ExperimentBundle& bundle) {
  namespace fs = std::filesystem;
  const fs::path dir = bundle.config.output.directory;
  fs::create_directories(dir);

  std::vector<std::string> artifacts;
  json stages;

  {
    std::ofstream out(dir / "config.json", std::ios::binary);
    out << config_to_json(bundle.config);
    artifacts.push_back("config.json");
  }

  io::write_series_csv(dir / "series.csv", bundle.series);
  artifacts.push_back("series.csv");
  stages["synthesize"] = "ok";

  if (bundle.stage != Stage::Synthesize) {
    io::write_cloud_csv(dir / "cloud.csv", bundle.cloud);
    artifacts.push_back("cloud.csv");
    stages["embed"] = "ok";
  } else {
    stages["embed"] = "skipped";
  }

  const bool persisted = !bundle.persistence_results.empty();
  if (persisted) {
    for (const auto& result : bundle.persistence_results) {
      const std::string name = field_file(result.field_char);
      io::write_persistence_json(dir / name, result);
      artifacts.push_back(name);
    }
    stages["persist"] = "ok";
  } else {
    stages["persist"] = bundle.stage == Stage::Synthesize ||
                                bundle.stage == Stage::Embed
                            ? "skipped"
                            : "disabled";
  }

  if (!bundle.circular_angles.empty()) {
    io::write_circular_csv(dir / "coords_circular.csv", bundle.cloud.start_times,
                           bundle.circular_angles);
    artifacts.push_back("coords_circular.csv");
  }
  if (!bundle.projective_points.empty()) {
    io::write_projective_csv(dir / "coords_projective.csv",
                             bundle.cloud.start_times, bundle.projective_points);
    artifacts.push_back("coords_projective.csv");
  }
  stages["coords"] = (!bundle.circular_angles.empty() ||
                      !bundle.projective_points.empty())
                         ? "ok"
                         : "skipped";

  if (bundle.stage == Stage::Full && bundle.config.output.plots) {
    io::write_series_svg(dir / "series.svg", bundle.series);
    artifacts.push_back("series.svg");
    for (const auto& result : bundle.persistence_results) {
      const std::string name =
          "diagram_z" + std::to_string(result.field_char) + ".svg";
      io::write_diagram_svg(dir / name, result);
      artifacts.push_back(name);
    }
    if (bundle.circular_angles.size() >= 2) {
      io::write_scatter_svg(dir / "coords_circular.svg",
                            bundle.circular_angles[0], bundle.circular_angles[1],
                            bundle.cloud.start_times);
      artifacts.push_back("coords_circular.svg");
    } else if (bundle.circular_angles.size() == 1) {
      io::write_scatter_svg(dir / "coords_circular.svg",
                            bundle.cloud.start_times, bundle.circular_angles[0],
                            bundle.cloud.start_times);
      artifacts.push_back("coords_circular.svg");
    }
    if (!bundle.projective_points.empty() &&
        bundle.projective_points.front().h.size() == 3) {
      const auto planar = coordinates::rp2_stereograph(bundle.projective_points, 2);
      std::vector<double> xs, ys;
      xs.reserve(planar.size());
      ys.reserve(planar.size());
      for (const auto& [x, y] : planar) {
        xs.push_back(x);
        ys.push_back(y);
      }
      io::write_scatter_svg(dir / "coords_projective.svg", xs, ys,
                            bundle.cloud.start_times);
      artifacts.push_back("coords_projective.svg");
    }
  }

  json manifest;
  manifest["config_hash"] = config_hash(bundle.config);
  if (bundle.config.preset_name) manifest["preset"] = *bundle.config.preset_name;
  manifest["stages"] = stages;
  json summary;
  summary["series_samples"] = bundle.series.values.size();
  summary["cloud_points"] = bundle.cloud.size();
  if (persisted) {
    summary["landmarks"] = bundle.landmarks.indices.size();
    summary["cover_radius"] = bundle.landmarks.cover_radius;
    summary["threshold"] = bundle.threshold;
    json fields = json::array();
    for (const FieldSummary& fsry : bundle.summary) {
      json f;
      f["field"] = fsry.field;
      f["significant"] = {fsry.significant[0], fsry.significant[1],
                          fsry.significant[2]};
      fields.push_back(f);
    }
    summary["fields"] = fields;
  }
  if (!bundle.pca3_variance.empty()) summary["pca3_variance"] = bundle.pca3_variance;
  if (bundle.circular_prime != 0) summary["circular_prime"] = bundle.circular_prime;
  if (!bundle.ppca_distortion.empty()) {
    double total = 0.0;
    for (const double d : bundle.ppca_distortion) total += d;
    summary["ppca_total_distortion"] = total;
  }
  manifest["summary"] = summary;
  manifest["artifacts"] = artifacts;
  if (const char* seed = std::getenv("TWISTY_SEED"))
    manifest["twisty_seed"] = seed;

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
}

std::vector<FieldSummary> summarize_persistence_files(
    const std::filesystem::path& directory,
    const std::vector<persistence::Coeff>& fields, double gap_ratio) {
  std::vector<FieldSummary> out;
  for (const persistence::Coeff field : fields) {
    std::ifstream in(directory / field_file(field));
    if (!in) throw std::runtime_error("missing persistence artifact");
    const json root = json::parse(in);
    persistence::PersistenceResult result;
    for (int dim = 0; dim < 3; ++dim) result.diagrams[dim].dim = dim;
    for (const json& rec : root["diagrams"]) {
      const int dim = rec["dim"].get<int>();
      persistence::PersistencePair pair;
      pair.birth = rec["birth"].get<double>();
      pair.death = rec["death"].is_string() ? persistence::kInfDeath
                                            : rec["death"].get<double>();
      result.diagrams[dim].pairs.push_back(pair);
    }
    FieldSummary fsry;
    fsry.field = field;
    for (int dim = 0; dim < 3; ++dim)
      fsry.significant[dim] =
          persistence::significant_classes(result.diagrams[dim], gap_ratio).size();
    out.push_back(fsry);
  }
  return out;
}

}  // namespace twisty::pipeline
