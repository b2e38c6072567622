#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "twisty/coordinates.hpp"
#include "twisty/persistence.hpp"
#include "twisty/slidingwindow.hpp"

// Artifact serialization. All writers are deterministic: fixed %.17g number
// formatting, no timestamps, stable key order.

namespace twisty::io {

std::string format_double(double x);  // 17 significant digits

void write_series_csv(const std::filesystem::path& path,
                      const slidingwindow::TimeSeries& ts);
slidingwindow::TimeSeries read_series_csv(const std::filesystem::path& path);

void write_cloud_csv(const std::filesystem::path& path,
                     const slidingwindow::PointCloud& cloud);

// Diagrams as a flat list of {"dim", "birth", "death"} records (death "inf"
// for essential classes); cocycles as edge/coeff lists with their scales.
std::string persistence_json(const persistence::PersistenceResult& result);
void write_persistence_json(const std::filesystem::path& path,
                            const persistence::PersistenceResult& result);

void write_circular_csv(const std::filesystem::path& path,
                        const std::vector<double>& times,
                        const std::vector<std::vector<double>>& angle_columns);

void write_projective_csv(const std::filesystem::path& path,
                          const std::vector<double>& times,
                          const std::vector<coordinates::ProjectivePoint>& points);

// Minimal SVG scatter/line plots; color from a normalized value per point.
void write_series_svg(const std::filesystem::path& path,
                      const slidingwindow::TimeSeries& ts, std::size_t max_samples = 4000);
void write_diagram_svg(const std::filesystem::path& path,
                       const persistence::PersistenceResult& result);
void write_scatter_svg(const std::filesystem::path& path,
                       const std::vector<double>& xs,
                       const std::vector<double>& ys,
                       const std::vector<double>& color_values);

}  // namespace twisty::io
