#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twisty/coordinates.hpp"
#include "twisty/geometry.hpp"
#include "twisty/observations.hpp"
#include "twisty/persistence.hpp"
#include "twisty/slidingwindow.hpp"

// Experiment configs, named presets reproducing the figure-level
// experiments, and the synthesize -> observe -> window -> landmark ->
// persistence -> coordinates pipeline with artifact export.

namespace twisty::pipeline {

struct FlowConfig {
  geometry::Manifold manifold = geometry::Manifold::Torus;
  double alpha = 1.0;
  double beta = 1.0;
  std::optional<geometry::KleinBumpParams> klein_params;
  double dt = 0.1;
  std::size_t n_samples = 10000;
  double p0_u = 0.0;
  double p0_v = 0.0;
};

struct ObservationConfig {
  enum class Kind { Distance, Fourier };
  Kind kind = Kind::Distance;
  double x_hat_u = 0.0;
  double x_hat_v = 0.0;
  geometry::MetricParams weights;
  std::vector<observations::FourierTerm> fourier_terms;
};

struct WindowConfig {
  std::size_t delays = 29;
  std::size_t tau_steps = 1;
  std::size_t stride = 1;
};

struct PersistenceStageConfig {
  bool enabled = true;
  int maxdim = 2;
  std::vector<persistence::Coeff> fields = {2, 3};
  double threshold = 0.0;  // 0 = enclosing radius of the landmark set
  std::size_t landmarks = 400;
  std::size_t seed_index = 0;
  double gap_ratio = 3.0;
};

struct CoordinateStageConfig {
  bool circular = false;
  bool projective = false;
  std::vector<persistence::Coeff> lift_primes = {41, 43, 47};
  std::size_t target_dim = 2;   // projective target RP^k
  double alpha_slack = 1.1;     // alpha = slack * landmark cover radius
};

struct OutputConfig {
  std::string directory = "out";
  bool plots = true;
};

struct ExperimentConfig {
  std::optional<std::string> preset_name;
  std::optional<std::string> series_file;  // bypasses synthesis when set
  FlowConfig flow;
  ObservationConfig observation;
  WindowConfig window;
  PersistenceStageConfig persistence;
  CoordinateStageConfig coordinates;
  OutputConfig output;
};

// Pinned configs reproducing the figure-level experiments. Names:
// torus-dist, klein-dist, klein-fail, sphere-dist, rp2-dist, genus2-dist,
// torus-fourier, klein-fourier.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
// Overlays the JSON document onto an existing config; a "preset" key in the
// document resets the base first.
ExperimentConfig apply_config_json(ExperimentConfig base, const std::string& text);
std::string config_hash(const ExperimentConfig& cfg);  // FNV-1a over canonical JSON

enum class Stage { Synthesize, Embed, Persist, Coords, Full };

struct FieldSummary {
  persistence::Coeff field = 2;
  std::array<std::size_t, 3> significant = {0, 0, 0};
};

struct ExperimentBundle {
  ExperimentConfig config;
  Stage stage = Stage::Full;
  slidingwindow::TimeSeries series;
  slidingwindow::PointCloud cloud;
  slidingwindow::LandmarkSet landmarks;
  double threshold = 0.0;  // resolved Rips threshold
  std::vector<persistence::PersistenceResult> persistence_results;  // per field
  std::vector<FieldSummary> summary;
  std::vector<double> pca3_variance;  // explained variance fractions, k = 3

  // Coordinates (filled when the stage ran and was enabled)
  std::vector<std::vector<double>> circular_angles;  // per recovered class
  persistence::Coeff circular_prime = 0;
  std::vector<coordinates::ProjectivePoint> projective_points;  // post-PPCA
  std::vector<double> ppca_distortion;
};

// Runs the pipeline up to `stage`. Throws on config or stage errors; the
// exception message carries a stage label.
ExperimentBundle run_experiment(const ExperimentConfig& cfg,
                                Stage stage = Stage::Full);

// Writes the bundle's artifacts plus manifest.json into cfg.output.directory.
// Byte-identical across reruns of the same config.
void write_bundle(const ExperimentBundle& bundle);

// Recomputes the per-field significant counts from a serialized persistence
// JSON; used to keep the manifest honest.
std::vector<FieldSummary> summarize_persistence_files(
    const std::filesystem::path& directory,
    const std::vector<persistence::Coeff>& fields, double gap_ratio);

}  // namespace twisty::pipeline
