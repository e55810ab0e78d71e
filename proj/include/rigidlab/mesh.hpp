#pragma once

#include <array>
#include <string>
#include <vector>

#include "rigidlab/manifold.hpp"

namespace rigidlab {

// Per-face geometry in the tangent plane at the face barycenter: log-map
// coordinates of the corners in the frame at the base point.
struct FaceGeom {
  SurfacePoint base;
  Eigen::MatrixXd frame;      // d x 2
  Eigen::Vector2d u0, u1, u2; // log coordinates of the corners
  Eigen::Matrix2d S;          // [u1 - u0 | u2 - u0]
  Eigen::Matrix2d Sinv;
  double area = 0.0;
};

class SurfaceMesh {
 public:
  const Manifold* man = nullptr;
  int resolution = 0;
  std::vector<SurfacePoint> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<FaceGeom> geom;
  std::vector<double> face_area;
  std::vector<double> vertex_mass;
  std::vector<std::vector<int>> vertex_faces;
  std::vector<std::vector<int>> vertex_neighbors;
  long edge_count = 0;
  double mesh_size = 0.0;  // max geodesic edge length
  std::string hash;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
  long euler_characteristic() const {
    return vertex_count() - edge_count + face_count();
  }
  double total_area() const;
};

// Sphere: icosphere at the given subdivision level. Torus: N x N grid
// (resolution = N, N >= 3).
SurfaceMesh build_mesh(const Manifold& man, int resolution);

void write_off(const SurfaceMesh& mesh, const std::string& path);
void write_obj(const SurfaceMesh& mesh, const std::string& path);

}  // namespace rigidlab
