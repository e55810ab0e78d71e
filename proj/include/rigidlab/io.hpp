#pragma once

#include <string>
#include <vector>

#include "rigidlab/killing.hpp"
#include "rigidlab/mesh.hpp"

namespace rigidlab {

// RFC 4180: CRLF row endings, quoting only when needed.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

// Writes via a temp file in the same directory, then renames.
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double x);

struct PlotSeries {
  std::vector<std::pair<double, double>> points;
  std::string label;
  std::string color = "#1f6fb2";
  bool line = true;
};

// Static SVG scatter / line plot; log-log when requested (positive data
// required in that case).
std::string svg_plot(const std::vector<PlotSeries>& series,
                     const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, bool loglog);

// Face-colored map of per-face scalars over the parameter domain.
std::string svg_face_map(const SurfaceMesh& mesh,
                         const std::vector<double>& values,
                         const std::string& title);

enum class MapFamilyKind { Identity, Random, DoubleTheta };

struct ExperimentConfig {
  ManifoldKind manifold = ManifoldKind::Sphere;
  int level = 3;
  double p = 2.0;
  unsigned seed = 1;
  MapFamilyKind family = MapFamilyKind::Random;
  int count = 3;
  std::vector<double> eps = {1e-2};
  bool random_base_isometry = false;
  RigidityConfig pipeline;
  int threads = 0;  // 0: library default

  // Mesh resolution: subdivision level on the sphere, N = 6 * 2^level on
  // the torus.
  int resolution() const;
};

// Parses and validates the JSON config; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct GeneratedMap {
  std::string id;
  DiscreteMap map;
};

// Deterministic map family from the config (seeded); shared by the CLI and
// the test harness so both see identical maps.
std::vector<GeneratedMap> generate_family(const SurfaceMesh& mesh,
                                          const ExperimentConfig& cfg);

std::string report_to_json(const RigidityReport& report,
                           const SurfaceMesh& mesh, double p);

std::string field_to_json(const TangentField& x);

std::string read_file(const std::string& path);

}  // namespace rigidlab
