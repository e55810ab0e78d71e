#include "rigidlab/discrete_map.hpp"

#include <cmath>
#include <functional>

#include <json.hpp>

#include "rigidlab/optim.hpp"
#include "rigidlab/parallel.hpp"

namespace rigidlab {

DiscreteMap identity_map(const SurfaceMesh& mesh) {
  DiscreteMap f;
  f.mesh = &mesh;
  f.images = mesh.vertices;
  return f;
}

DiscreteMap constant_map(const SurfaceMesh& mesh, const SurfacePoint& target) {
  DiscreteMap f;
  f.mesh = &mesh;
  f.images.assign(mesh.vertices.size(), target);
  return f;
}

DiscreteMap compose(const IsometryElement& phi, const DiscreteMap& f) {
  const Manifold& man = *f.mesh->man;
  DiscreteMap g;
  g.mesh = f.mesh;
  g.images.resize(f.images.size());
  for (std::size_t i = 0; i < f.images.size(); ++i) {
    g.images[i] = man.apply(phi, f.images[i]);
  }
  return g;
}

DiscreteMap isometry_map(const SurfaceMesh& mesh, const IsometryElement& phi) {
  return compose(phi, identity_map(mesh));
}

void check_exponent(double p) {
  if (!(p > 1.1 && p < 10.0)) {
    throw InvalidArgument("exponent p must lie in (1.1, 10)");
  }
}

namespace {

SurfacePoint image_barycenter(const Manifold& man, const SurfacePoint& a,
                              const SurfacePoint& b, const SurfacePoint& c) {
  if (man.kind() == ManifoldKind::Sphere) {
    const Vec s = a.ambient + b.ambient + c.ambient;
    if (s.norm() < 1e-12) {
      throw FaceImageTooSpread("face image has no well-defined barycenter");
    }
    return man.project(s);
  }
  Vec q(2);
  for (int i = 0; i < 2; ++i) {
    q(i) = a.params(i) + (wrap_angle(b.params(i) - a.params(i)) +
                          wrap_angle(c.params(i) - a.params(i))) /
                             3.0;
  }
  return man.from_params(q);
}

}  // namespace

FaceDifferential differential(const DiscreteMap& f, int face) {
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;
  const auto& tri = mesh.faces[face];
  const SurfacePoint& q0 = f.images[tri[0]];
  const SurfacePoint& q1 = f.images[tri[1]];
  const SurfacePoint& q2 = f.images[tri[2]];

  const double diam = std::max({man.distance(q0, q1), man.distance(q1, q2),
                                man.distance(q2, q0)});
  if (diam >= man.inj_radius()) {
    throw FaceImageTooSpread("image diameter at or beyond injectivity radius");
  }

  FaceDifferential out;
  out.image_base = image_barycenter(man, q0, q1, q2);
  out.image_frame = man.frame(out.image_base).E();
  const Eigen::MatrixXd Ft = out.image_frame.transpose();
  const Eigen::Vector2d w0 = Ft * man.log(out.image_base, q0);
  const Eigen::Vector2d w1 = Ft * man.log(out.image_base, q1);
  const Eigen::Vector2d w2 = Ft * man.log(out.image_base, q2);

  const FaceGeom& g = mesh.geom[face];
  Eigen::Matrix2d W;
  W.col(0) = w1 - w0;
  W.col(1) = w2 - w0;
  out.df = TangentMap(W * g.Sinv, face, face);

  Eigen::MatrixXd A(man.ambient_dim(), 2);
  A.col(0) = q1.ambient - q0.ambient;
  A.col(1) = q2.ambient - q0.ambient;
  out.dF_ambient = A * g.Sinv;
  return out;
}

std::vector<FaceDifferential> differentials(const DiscreteMap& f,
                                            bool parallel) {
  const int nf = f.mesh->face_count();
  std::vector<FaceDifferential> out(nf);
  std::exception_ptr err;
  auto body = [&](int i) {
    try {
      out[i] = differential(f, i);
    } catch (...) {
#ifdef RIGIDLAB_HAS_OPENMP
#pragma omp critical
#endif
      if (!err) err = std::current_exception();
    }
  };
  if (parallel) {
    parallel_for(nf, body);
  } else {
    serial_for(nf, body);
  }
  if (err) std::rethrow_exception(err);
  return out;
}

EnergyResult energy(const std::vector<FaceDifferential>& diffs,
                    const SurfaceMesh& mesh, double p, bool parallel) {
  check_exponent(p);
  EnergyResult r;
  r.Ep = map_sum(
      mesh.face_count(),
      [&](int i) {
        return mesh.face_area[i] * std::pow(dist_to_SO(diffs[i].df).dist, p);
      },
      parallel);
  r.e = std::pow(r.Ep, 1.0 / p);
  return r;
}

EnergyResult energy(const DiscreteMap& f, double p, bool parallel) {
  return energy(differentials(f, parallel), *f.mesh, p, parallel);
}

double sobolev_distance(const std::vector<FaceDifferential>& df,
                        const DiscreteMap& f,
                        const std::vector<FaceDifferential>& dg,
                        const DiscreteMap& g, double p) {
  check_exponent(p);
  if (f.mesh != g.mesh) throw MeshMismatch("maps live on different meshes");
  const SurfaceMesh& mesh = *f.mesh;
  const double vterm = map_sum(mesh.vertex_count(), [&](int v) {
    return mesh.vertex_mass[v] *
           std::pow((f.images[v].ambient - g.images[v].ambient).norm(), p);
  });
  const double gterm = map_sum(mesh.face_count(), [&](int i) {
    return mesh.face_area[i] *
           std::pow((df[i].dF_ambient - dg[i].dF_ambient).norm(), p);
  });
  return std::pow(vterm + gterm, 1.0 / p);
}

double sobolev_distance(const DiscreteMap& f, const DiscreteMap& g, double p) {
  return sobolev_distance(differentials(f), f, differentials(g), g, p);
}

IsomDistance dist_to_isom(const DiscreteMap& f, double p) {
  check_exponent(p);
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;

  std::vector<std::pair<SurfacePoint, SurfacePoint>> pairs;
  pairs.reserve(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    pairs.emplace_back(mesh.vertices[v], f.images[v]);
  }
  const IsometryElement seed = man.isometry_fit(pairs, mesh.vertex_mass);

  const auto df = differentials(f);
  auto objective = [&](const Eigen::VectorXd& k) {
    KillingElement ke{k};
    const IsometryElement phi = man.compose(seed, man.flow(ke, 1.0));
    const DiscreteMap g = isometry_map(mesh, phi);
    const double d = sobolev_distance(df, f, differentials(g), g, p);
    return std::pow(d, p);
  };
  const Eigen::VectorXd k = minimize_small(
      objective, Eigen::VectorXd::Zero(man.killing_dim()), 40);

  IsomDistance out;
  out.phi = man.compose(seed, man.flow(KillingElement{k}, 1.0));
  const DiscreteMap g = isometry_map(mesh, out.phi);
  out.dist = sobolev_distance(df, f, differentials(g), g, p);
  return out;
}

std::vector<Eigen::Matrix2d> metric_deficit(const DiscreteMap& f) {
  const auto diffs = differentials(f);
  std::vector<Eigen::Matrix2d> out(diffs.size());
  parallel_for(static_cast<int>(diffs.size()), [&](int i) {
    out[i] = diffs[i].df.m.transpose() * diffs[i].df.m -
             Eigen::Matrix2d::Identity();
  });
  return out;
}

double max_face_gradient(const DiscreteMap& f) {
  const auto diffs = differentials(f);
  double m = 0.0;
  for (const auto& d : diffs) m = std::max(m, hs_norm(d.df));
  return m;
}

ClampResult clamp_gradient(const DiscreteMap& f, double lambda) {
  if (!(lambda > std::sqrt(2.0))) {
    throw InvalidArgument("clamp_gradient: Lambda must exceed sqrt(n)");
  }
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;
  ClampResult r;
  r.map = f;
  const int cap = 100;
  for (int iter = 0; iter < cap; ++iter) {
    const auto diffs = differentials(r.map);
    std::vector<char> flagged(mesh.vertices.size(), 0);
    double worst = 0.0;
    for (int i = 0; i < mesh.face_count(); ++i) {
      const double n = hs_norm(diffs[i].df);
      worst = std::max(worst, n);
      if (n > lambda) {
        for (int k = 0; k < 3; ++k) flagged[mesh.faces[i][k]] = 1;
      }
    }
    r.max_face_norm = worst;
    r.iterations = iter;
    if (worst <= lambda) return r;

    // Contract flagged vertices halfway toward the Karcher mean (one
    // Gauss-Seidel style sweep) of their neighbours' images.
    std::vector<SurfacePoint> next = r.map.images;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (!flagged[v]) continue;
      const SurfacePoint& qv = r.map.images[v];
      Vec avg = Vec::Zero(man.ambient_dim());
      int count = 0;
      for (int u : mesh.vertex_neighbors[v]) {
        try {
          avg += man.log(qv, r.map.images[u]);
          ++count;
        } catch (const OutsideInjectivityRadius&) {
          // skip unreachable neighbours; they get pulled in later sweeps
        }
      }
      if (count == 0) continue;
      next[v] = man.exp(qv, 0.5 * (avg / count));
    }
    r.map.images = std::move(next);
  }
  r.cap_hit = true;
  r.iterations = cap;
  r.max_face_norm = max_face_gradient(r.map);
  return r;
}

std::string map_to_json(const DiscreteMap& f) {
  nlohmann::json j;
  j["format"] = "rigidlab-map-v1";
  j["manifold"] = f.mesh->man->name();
  j["mesh_hash"] = f.mesh->hash;
  nlohmann::json params = nlohmann::json::array();
  for (const auto& q : f.images) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < q.params.size(); ++i) row.push_back(q.params(i));
    params.push_back(row);
  }
  j["images"] = std::move(params);
  return j.dump(2);
}

DiscreteMap map_from_json(const SurfaceMesh& mesh, const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("format").get<std::string>() != "rigidlab-map-v1") {
    throw InvalidArgument("unsupported map format tag");
  }
  if (j.at("mesh_hash").get<std::string>() != mesh.hash) {
    throw MeshMismatch("map was serialized against a different mesh");
  }
  DiscreteMap f;
  f.mesh = &mesh;
  for (const auto& row : j.at("images")) {
    Vec q(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) q(i) = row[i].get<double>();
    f.images.push_back(mesh.man->from_params(q));
  }
  if (f.images.size() != mesh.vertices.size()) {
    throw MeshMismatch("vertex count mismatch in serialized map");
  }
  return f;
}

}  // namespace rigidlab
