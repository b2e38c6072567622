#include "twisty/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twisty::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

// Hue-rotating color for scatter plots; value expected in [0, 1].
std::string color_of(double value) {
  const double h = 6.0 * std::min(std::max(value, 0.0), 1.0);
  const int i = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const auto byte = [](double x) { return static_cast<int>(x * 255.0 + 0.5); };
  int r = 0, g = 0, b = 0;
  switch (i) {
    case 0: r = 255; g = byte(f); break;
    case 1: r = byte(1 - f); g = 255; break;
    case 2: g = 255; b = byte(f); break;
    case 3: g = byte(1 - f); b = 255; break;
    case 4: r = byte(f); b = 255; break;
    default: r = 255; b = byte(1 - f); break;
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  double map(double x, double px0, double px1) const {
    if (hi == lo) return (px0 + px1) / 2;
    return px0 + (x - lo) / (hi - lo) * (px1 - px0);
  }
};

Range span_of(const std::vector<double>& v) {
  Range r;
  if (v.empty()) return r;
  r.lo = *std::min_element(v.begin(), v.end());
  r.hi = *std::max_element(v.begin(), v.end());
  if (r.lo == r.hi) {
    r.lo -= 1.0;
    r.hi += 1.0;
  }
  return r;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_series_csv(const std::filesystem::path& path,
                      const slidingwindow::TimeSeries& ts) {
  std::ofstream out = open_out(path);
  out << "t,value\n";
  for (std::size_t i = 0; i < ts.values.size(); ++i)
    out << format_double(ts.t0 + static_cast<double>(i) * ts.dt) << ","
        << format_double(ts.values[i]) << "\n";
}

slidingwindow::TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file: " + path.string());
  slidingwindow::TimeSeries ts;
  std::string line;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string t_str, v_str;
    if (!std::getline(row, t_str, ',')) continue;
    if (!std::getline(row, v_str, ',')) {
      // single-column file: values only
      try {
        ts.values.push_back(std::stod(t_str));
      } catch (const std::exception&) {
        continue;  // header line
      }
      continue;
    }
    try {
      times.push_back(std::stod(t_str));
      ts.values.push_back(std::stod(v_str));
    } catch (const std::exception&) {
      continue;  // header line
    }
  }
  if (ts.values.empty())
    throw std::runtime_error("series file has no samples: " + path.string());
  for (const double v : ts.values)
    if (!std::isfinite(v))
      throw std::runtime_error("series file has non-finite samples: " +
                               path.string());
  if (times.size() >= 2) {
    ts.t0 = times.front();
    ts.dt = times[1] - times[0];
    if (!(ts.dt > 0.0))
      throw std::runtime_error("series file is not forward-sampled");
  }
  return ts;
}

void write_cloud_csv(const std::filesystem::path& path,
                     const slidingwindow::PointCloud& cloud) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k)
      out << (k > 0 ? "," : "") << format_double(p[k]);
    out << "\n";
  }
}

std::string persistence_json(const persistence::PersistenceResult& result) {
  nlohmann::ordered_json root;
  root["field"] = result.field_char;
  root["threshold"] = result.threshold;
  nlohmann::ordered_json diagrams = nlohmann::json::array();
  for (const auto& diagram : result.diagrams) {
    for (const auto& pair : diagram.pairs) {
      nlohmann::ordered_json rec;
      rec["dim"] = diagram.dim;
      rec["birth"] = pair.birth;
      if (pair.death == persistence::kInfDeath)
        rec["death"] = "inf";
      else
        rec["death"] = pair.death;
      diagrams.push_back(rec);
    }
  }
  root["diagrams"] = diagrams;
  nlohmann::ordered_json cocycles = nlohmann::json::array();
  for (const auto& rep : result.h1_cocycles) {
    nlohmann::ordered_json entry;
    entry["birth"] = rep.birth;
    if (rep.death == persistence::kInfDeath)
      entry["death"] = "inf";
    else
      entry["death"] = rep.death;
    nlohmann::ordered_json terms = nlohmann::json::array();
    for (const auto& t : rep.terms) {
      nlohmann::ordered_json term;
      term["edge"] = {t.i, t.j};
      term["coeff"] = t.coeff;
      terms.push_back(term);
    }
    entry["terms"] = terms;
    cocycles.push_back(entry);
  }
  root["cocycles"] = cocycles;
  return root.dump(2) + "\n";
}

void write_persistence_json(const std::filesystem::path& path,
                            const persistence::PersistenceResult& result) {
  open_out(path) << persistence_json(result);
}

void write_circular_csv(const std::filesystem::path& path,
                        const std::vector<double>& times,
                        const std::vector<std::vector<double>>& angle_columns) {
  std::ofstream out = open_out(path);
  out << "t";
  for (std::size_t c = 0; c < angle_columns.size(); ++c) out << ",angle" << c;
  out << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << format_double(times[i]);
    for (const auto& col : angle_columns) out << "," << format_double(col[i]);
    out << "\n";
  }
}

void write_projective_csv(const std::filesystem::path& path,
                          const std::vector<double>& times,
                          const std::vector<coordinates::ProjectivePoint>& points) {
  std::ofstream out = open_out(path);
  out << "t";
  const std::size_t dim = points.empty() ? 0 : points.front().h.size();
  for (std::size_t c = 0; c < dim; ++c) out << ",x" << c;
  out << "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << format_double(i < times.size() ? times[i] : static_cast<double>(i));
    for (const double x : points[i].h) out << "," << format_double(x);
    out << "\n";
  }
}

void write_series_svg(const std::filesystem::path& path,
                      const slidingwindow::TimeSeries& ts,
                      std::size_t max_samples) {
  const std::size_t n = ts.values.size();
  const std::size_t step = std::max<std::size_t>(1, n / max_samples);
  const Range vr = span_of(ts.values);
  const double w = 900, h = 260, pad = 10;
  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<polyline fill=\"none\" "
         "stroke=\"#27597a\" stroke-width=\"0.8\" points=\"";
  for (std::size_t i = 0; i < n; i += step) {
    const double x = pad + (w - 2 * pad) * static_cast<double>(i) /
                               static_cast<double>(std::max<std::size_t>(n - 1, 1));
    const double y = h - pad - vr.map(ts.values[i], 0, h - 2 * pad);
    out << x << "," << y << " ";
  }
  out << "\"/>\n</svg>\n";
}

void write_diagram_svg(const std::filesystem::path& path,
                       const persistence::PersistenceResult& result) {
  double top = 0.0;
  for (const auto& diagram : result.diagrams)
    for (const auto& p : diagram.pairs) {
      top = std::max(top, p.birth);
      if (p.death != persistence::kInfDeath) top = std::max(top, p.death);
    }
  if (top == 0.0) top = 1.0;
  top *= 1.05;
  const double size = 360, pad = 24;
  const char* palette[3] = {"#888888", "#d62728", "#1f77b4"};
  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const auto px = [&](double v) { return pad + (size - 2 * pad) * v / top; };
  const auto py = [&](double v) { return size - pad - (size - 2 * pad) * v / top; };
  out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(top)
      << "\" y2=\"" << py(top) << "\" stroke=\"#cccccc\"/>\n";
  for (const auto& diagram : result.diagrams) {
    for (const auto& p : diagram.pairs) {
      const double death = p.death == persistence::kInfDeath ? top : p.death;
      out << "<circle cx=\"" << px(p.birth) << "\" cy=\"" << py(death)
          << "\" r=\"3\" fill=\"" << palette[diagram.dim]
          << "\" fill-opacity=\"0.7\"/>\n";
    }
  }
  out << "</svg>\n";
}

void write_scatter_svg(const std::filesystem::path& path,
                       const std::vector<double>& xs,
                       const std::vector<double>& ys,
                       const std::vector<double>& color_values) {
  const double size = 420, pad = 16;
  const Range xr = span_of(xs), yr = span_of(ys);
  Range cr{0.0, 1.0};
  if (!color_values.empty()) cr = span_of(color_values);
  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xr.map(xs[i], pad, size - pad);
    const double y = size - yr.map(ys[i], pad, size - pad);
    const double cv = i < color_values.size()
                          ? (color_values[i] - cr.lo) / (cr.hi - cr.lo)
                          : 0.5;
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2\" fill=\""
        << color_of(cv) << "\" fill-opacity=\"0.8\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace twisty::io
