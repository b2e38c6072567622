#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "twisty/io.hpp"
#include "twisty/pipeline.hpp"

using namespace twisty;
using namespace twisty::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Cheap end-to-end config: circle flow on the torus (pure v-rotation) with
// the cos u + cos v observation; the window cloud is a round loop.
ExperimentConfig tiny_loop_config(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.flow = {geometry::Manifold::Torus, 0.0, 1.0, std::nullopt, 0.1, 700, 0.0,
              0.0};
  cfg.observation = {ObservationConfig::Kind::Fourier, 0.0, 0.0, {1.0, 1.0},
                     {{1, 0, {0.5, 0.0}},
                      {-1, 0, {0.5, 0.0}},
                      {0, 1, {0.5, 0.0}},
                      {0, -1, {0.5, 0.0}}}};
  cfg.window = {8, 4, 3};
  cfg.persistence = {true, 1, {2}, 0.0, 110, 0, 3.0};
  cfg.coordinates = {true, false, {41, 43, 47}, 2, 1.1};
  cfg.output.directory = dir.string();
  return cfg;
}

}  // namespace

TEST_CASE("preset pins") {
  const ExperimentConfig torus = preset("torus-dist");
  CHECK(torus.observation.x_hat_u == doctest::Approx(6.0));
  CHECK(torus.observation.x_hat_v == doctest::Approx(geometry::kPi));
  CHECK(torus.flow.alpha == doctest::Approx(std::sqrt(2.0)));

  const ExperimentConfig genus2 = preset("genus2-dist");
  CHECK(genus2.flow.alpha == doctest::Approx(1.0));
  CHECK(genus2.flow.beta == doctest::Approx(std::sqrt(3.0) / 2.0));

  const ExperimentConfig kf = preset("klein-fourier");
  CHECK(kf.flow.klein_params.has_value());

  CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("config JSON round-trip") {
  for (const std::string& name : preset_names()) {
    const ExperimentConfig cfg = preset(name);
    const std::string text = config_to_json(cfg);
    const ExperimentConfig back = config_from_json(text);
    CHECK(config_to_json(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));
  }
}

TEST_CASE("config hash ignores the output directory") {
  ExperimentConfig a = preset("torus-dist");
  ExperimentConfig b = a;
  b.output.directory = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("flags-over-file semantics") {
  ExperimentConfig base = preset("klein-dist");
  const ExperimentConfig merged =
      apply_config_json(base, R"({"window": {"stride": 11}})");
  CHECK(merged.window.stride == 11);
  CHECK(merged.observation.x_hat_u == doctest::Approx(4.5));
}

TEST_CASE("tiny experiment end to end") {
  const fs::path dir = fs::temp_directory_path() / "twisty_test_tiny";
  fs::remove_all(dir);
  const ExperimentConfig cfg = tiny_loop_config(dir);
  const ExperimentBundle bundle = run_experiment(cfg, Stage::Full);

  // A circle-valued signal yields one dominant H1 class.
  REQUIRE(bundle.summary.size() == 1);
  CHECK(bundle.summary[0].significant[1] == 1);
  REQUIRE(bundle.circular_angles.size() >= 1);
  CHECK(bundle.circular_angles[0].size() == bundle.cloud.size());

  // The recovered angle tracks the rotation.
  std::vector<double> truth;
  for (const double t : bundle.cloud.start_times)
    truth.push_back(geometry::wrap_angle(t, geometry::kTwoPi));
  CHECK(coordinates::circular_correlation(bundle.circular_angles[0], truth) >=
        0.99);

  write_bundle(bundle);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "series.csv"));
  CHECK(fs::exists(dir / "cloud.csv"));
  CHECK(fs::exists(dir / "persistence_z2.json"));
  CHECK(fs::exists(dir / "coords_circular.csv"));

  SUBCASE("manifest summary is recomputable from the artifacts") {
    const auto recomputed = summarize_persistence_files(
        dir, cfg.persistence.fields, cfg.persistence.gap_ratio);
    REQUIRE(recomputed.size() == bundle.summary.size());
    for (std::size_t i = 0; i < recomputed.size(); ++i) {
      CHECK(recomputed[i].field == bundle.summary[i].field);
      CHECK(recomputed[i].significant == bundle.summary[i].significant);
    }
  }

  SUBCASE("reruns are byte-identical") {
    const std::string manifest_a = slurp(dir / "manifest.json");
    const std::string series_a = slurp(dir / "series.csv");
    const std::string persistence_a = slurp(dir / "persistence_z2.json");
    const ExperimentBundle again = run_experiment(cfg, Stage::Full);
    write_bundle(again);
    CHECK(slurp(dir / "manifest.json") == manifest_a);
    CHECK(slurp(dir / "series.csv") == series_a);
    CHECK(slurp(dir / "persistence_z2.json") == persistence_a);
  }
  fs::remove_all(dir);
}

TEST_CASE("persistence can be disabled") {
  const fs::path dir = fs::temp_directory_path() / "twisty_test_disabled";
  fs::remove_all(dir);
  ExperimentConfig cfg = tiny_loop_config(dir);
  cfg.persistence.enabled = false;
  cfg.coordinates.circular = false;
  const ExperimentBundle bundle = run_experiment(cfg, Stage::Full);
  CHECK(bundle.persistence_results.empty());
  CHECK(!bundle.series.values.empty());
  CHECK(bundle.cloud.size() > 0);
  write_bundle(bundle);
  CHECK(!fs::exists(dir / "persistence_z2.json"));
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"persist\": \"disabled\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("series CSV round-trip") {
  const fs::path path = fs::temp_directory_path() / "twisty_series_rt.csv";
  slidingwindow::TimeSeries ts;
  ts.t0 = 0.25;
  ts.dt = 0.125;
  ts.values = {1.0, -2.5, 3.25, 0.0078125};
  io::write_series_csv(path, ts);
  const slidingwindow::TimeSeries back = io::read_series_csv(path);
  CHECK(back.values == ts.values);
  CHECK(back.t0 == ts.t0);
  CHECK(back.dt == ts.dt);
  fs::remove(path);
}

TEST_CASE("external series input bypasses synthesis") {
  const fs::path dir = fs::temp_directory_path() / "twisty_test_series_in";
  fs::remove_all(dir);
  fs::create_directories(dir);
  slidingwindow::TimeSeries ts;
  ts.dt = 0.05;
  for (int i = 0; i < 600; ++i)
    ts.values.push_back(std::cos(0.5 * i * 0.05) + 0.2);
  io::write_series_csv(dir / "input.csv", ts);

  ExperimentConfig cfg = tiny_loop_config(dir / "out");
  cfg.series_file = (dir / "input.csv").string();
  cfg.window = {6, 20, 2};
  const ExperimentBundle bundle = run_experiment(cfg, Stage::Persist);
  CHECK(bundle.series.values.size() == 600);
  CHECK(bundle.summary[0].significant[1] == 1);  // one loop
  fs::remove_all(dir);
}
