#include "rigidlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>

#include "rigidlab/parallel.hpp"

namespace rigidlab {

double SurfaceMesh::total_area() const { return pairwise_sum(face_area); }

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

SurfacePoint face_barycenter(const Manifold& man, const SurfacePoint& a,
                             const SurfacePoint& b, const SurfacePoint& c) {
  if (man.kind() == ManifoldKind::Sphere) {
    return man.project((a.ambient + b.ambient + c.ambient) / 3.0);
  }
  Vec q(2);
  for (int i = 0; i < 2; ++i) {
    q(i) = a.params(i) + (wrap_angle(b.params(i) - a.params(i)) +
                          wrap_angle(c.params(i) - a.params(i))) /
                             3.0;
  }
  return man.from_params(q);
}

FaceGeom make_face_geom(const Manifold& man, const SurfacePoint& a,
                        const SurfacePoint& b, const SurfacePoint& c) {
  FaceGeom g;
  g.base = face_barycenter(man, a, b, c);
  g.frame = man.frame(g.base).E();
  const Eigen::MatrixXd Et = g.frame.transpose();
  g.u0 = Et * man.log(g.base, a);
  g.u1 = Et * man.log(g.base, b);
  g.u2 = Et * man.log(g.base, c);
  g.S.col(0) = g.u1 - g.u0;
  g.S.col(1) = g.u2 - g.u0;
  const double det = g.S.determinant();
  if (det <= 0.0) {
    throw SolverFailure("mesh: degenerate or misoriented face");
  }
  g.Sinv = g.S.inverse();
  g.area = 0.5 * det;
  return g;
}

void build_icosphere(const Manifold& man, int level, SurfaceMesh& mesh) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  const double raw[12][3] = {
      {-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  const int ico_faces[20][3] = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (const auto& r : raw) {
    Vec v(3);
    v << r[0], r[1], r[2];
    mesh.vertices.push_back(man.from_params(v));
  }
  for (const auto& f : ico_faces) {
    mesh.faces.push_back({f[0], f[1], f[2]});
  }

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(man.project(
          (mesh.vertices[i].ambient + mesh.vertices[j].ambient) / 2.0));
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }

  // Enforce outward orientation face by face.
  for (auto& f : mesh.faces) {
    const Eigen::Vector3d a = mesh.vertices[f[0]].ambient;
    const Eigen::Vector3d b = mesh.vertices[f[1]].ambient;
    const Eigen::Vector3d c = mesh.vertices[f[2]].ambient;
    if ((b - a).cross(c - a).dot(a + b + c) < 0.0) std::swap(f[1], f[2]);
  }
}

void build_torus_grid(const Manifold& man, int n, SurfaceMesh& mesh) {
  if (n < 3) throw ResolutionTooSmall("torus grid needs N >= 3");
  const double step = 2.0 * M_PI / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec q(2);
      q << i * step, j * step;
      mesh.vertices.push_back(man.from_params(q));
    }
  }
  auto idx = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // CCW in (theta, phi).
      mesh.faces.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      mesh.faces.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
}

}  // namespace

SurfaceMesh build_mesh(const Manifold& man, int resolution) {
  if (resolution < 0) throw ResolutionTooSmall("resolution must be >= 0");
  SurfaceMesh mesh;
  mesh.man = &man;
  mesh.resolution = resolution;
  if (man.kind() == ManifoldKind::Sphere) {
    if (resolution > 7) throw ResolutionTooSmall("sphere level must be <= 7");
    build_icosphere(man, resolution, mesh);
  } else {
    build_torus_grid(man, resolution, mesh);
  }

  const int nv = mesh.vertex_count();
  const int nf = mesh.face_count();

  mesh.geom.resize(nf);
  mesh.face_area.resize(nf);
  parallel_for(nf, [&](int f) {
    const auto& tri = mesh.faces[f];
    mesh.geom[f] = make_face_geom(man, mesh.vertices[tri[0]],
                                  mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    mesh.face_area[f] = mesh.geom[f].area;
  });

  mesh.vertex_mass.assign(nv, 0.0);
  mesh.vertex_faces.assign(nv, {});
  mesh.vertex_neighbors.assign(nv, {});
  std::map<std::pair<int, int>, int> edge_faces;
  for (int f = 0; f < nf; ++f) {
    const auto& tri = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      mesh.vertex_mass[tri[k]] += mesh.face_area[f] / 3.0;
      mesh.vertex_faces[tri[k]].push_back(f);
      edge_faces[std::minmax(tri[k], tri[(k + 1) % 3])]++;
    }
  }
  mesh.edge_count = static_cast<long>(edge_faces.size());
  for (const auto& [edge, count] : edge_faces) {
    if (count != 2) {
      throw SolverFailure("mesh: not a closed surface (open edge)");
    }
    mesh.vertex_neighbors[edge.first].push_back(edge.second);
    mesh.vertex_neighbors[edge.second].push_back(edge.first);
  }

  double hmax = 0.0;
  for (const auto& [edge, count] : edge_faces) {
    hmax = std::max(hmax, man.distance(mesh.vertices[edge.first],
                                       mesh.vertices[edge.second]));
  }
  mesh.mesh_size = hmax;

  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(h, man.name(), std::char_traits<char>::length(man.name()));
  h = fnv1a(h, &resolution, sizeof(resolution));
  h = fnv1a(h, &nv, sizeof(nv));
  h = fnv1a(h, &nf, sizeof(nf));
  for (const auto& v : mesh.vertices) {
    for (int i = 0; i < v.params.size(); ++i) {
      const double x = v.params(i);
      h = fnv1a(h, &x, sizeof(x));
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  mesh.hash = buf;
  return mesh;
}

void write_off(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  out << "OFF\n" << mesh.vertex_count() << " " << mesh.face_count() << " "
      << mesh.edge_count << "\n";
  char line[256];
  for (const auto& v : mesh.vertices) {
    for (int i = 0; i < v.ambient.size(); ++i) {
      std::snprintf(line, sizeof(line), i ? " %.17g" : "%.17g", v.ambient(i));
      out << line;
    }
    out << "\n";
  }
  for (const auto& f : mesh.faces) {
    out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
  }
}

void write_obj(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  char line[256];
  for (const auto& v : mesh.vertices) {
    out << "v";
    // OBJ is 3-coordinate; the torus writes its parameter chart as (x, y, 0).
    if (v.ambient.size() == 3) {
      for (int i = 0; i < 3; ++i) {
        std::snprintf(line, sizeof(line), " %.17g", v.ambient(i));
        out << line;
      }
    } else {
      std::snprintf(line, sizeof(line), " %.17g %.17g 0", v.params(0),
                    v.params(1));
      out << line;
    }
    out << "\n";
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  }
}

}  // namespace rigidlab
