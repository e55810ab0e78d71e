#include "rigidlab/piola.hpp"

#include <cmath>

#include "rigidlab/parallel.hpp"

namespace rigidlab {

namespace {

// Ambient representation of the intrinsic differential: columns are the
// images of the source face frame, exactly tangent to the image surface.
Eigen::MatrixXd tangent_dF(const FaceDifferential& d) {
  return d.image_frame * d.df.m;
}

}  // namespace

std::vector<Eigen::MatrixXd> cof_field(
    const std::vector<FaceDifferential>& diffs, const SurfaceMesh& mesh) {
  (void)mesh;
  std::vector<Eigen::MatrixXd> out(diffs.size());
  parallel_for(static_cast<int>(diffs.size()), [&](int i) {
    out[i] = diffs[i].image_frame * cofactor_matrix(diffs[i].df.m);
  });
  return out;
}

std::vector<Eigen::MatrixXd> cof_field(const DiscreteMap& f) {
  return cof_field(differentials(f), *f.mesh);
}

double piola_residual(const std::vector<FaceDifferential>& diffs,
                      const DiscreteMap& f, const AmbientField& xi) {
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;
  if (xi.mesh != f.mesh) throw MeshMismatch("piola_residual: field mesh");
  const auto cof = cof_field(diffs, mesh);
  return map_sum(mesh.face_count(), [&](int i) {
    const auto& tri = mesh.faces[i];
    Eigen::MatrixXd dxi(man.ambient_dim(), 2);
    dxi.col(0) = xi.vectors[tri[1]] - xi.vectors[tri[0]];
    dxi.col(1) = xi.vectors[tri[2]] - xi.vectors[tri[0]];
    dxi *= mesh.geom[i].Sinv;
    const Vec xibar =
        (xi.vectors[tri[0]] + xi.vectors[tri[1]] + xi.vectors[tri[2]]) / 3.0;
    const Vec aterm =
        man.trace_form(diffs[i].image_base, cof[i], tangent_dF(diffs[i]));
    return mesh.face_area[i] *
           ((cof[i].array() * dxi.array()).sum() - aterm.dot(xibar));
  });
}

double piola_residual(const DiscreteMap& f, const AmbientField& xi) {
  return piola_residual(differentials(f), f, xi);
}

AlmostHarmonicParts almost_harmonic_parts(const DiscreteMap& f, double lambda,
                                          double p) {
  check_exponent(p);
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;
  const auto diffs = differentials(f);
  for (const auto& d : diffs) {
    if (hs_norm(d.df) > lambda) {
      throw LipschitzBoundViolated("almost_harmonic_parts: |df| > Lambda");
    }
  }
  const int nf = mesh.face_count();
  AlmostHarmonicParts out;
  out.h.resize(nf);
  out.h_prime.resize(nf);
  out.ratio.assign(nf, 0.0);
  parallel_for(nf, [&](int i) {
    const Eigen::MatrixXd dF = tangent_dF(diffs[i]);
    out.h[i] = dF - diffs[i].image_frame * cofactor_matrix(diffs[i].df.m);
    out.h_prime[i] = -man.trace_form(diffs[i].image_base, out.h[i], dF);
    const double dist = dist_to_SO(diffs[i].df).dist;
    if (dist > 1e-12) {
      out.ratio[i] = (out.h[i].norm() + out.h_prime[i].norm()) / dist;
    }
  });
  for (double r : out.ratio) out.ratio_max = std::max(out.ratio_max, r);
  const double hn = std::pow(
      map_sum(nf,
              [&](int i) {
                return mesh.face_area[i] * std::pow(out.h[i].norm(), p);
              }),
      1.0 / p);
  const double hpn = std::pow(
      map_sum(nf,
              [&](int i) {
                return mesh.face_area[i] * std::pow(out.h_prime[i].norm(), p);
              }),
      1.0 / p);
  out.h_norm_Lp = hn + hpn;
  return out;
}

Eigen::SparseMatrix<double> cotan_laplacian(const SurfaceMesh& mesh) {
  const int nv = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.face_count() * 12);
  for (int fidx = 0; fidx < mesh.face_count(); ++fidx) {
    const FaceGeom& g = mesh.geom[fidx];
    const Eigen::Vector2d u[3] = {g.u0, g.u1, g.u2};
    const auto& tri = mesh.faces[fidx];
    for (int k = 0; k < 3; ++k) {
      const int i = tri[(k + 1) % 3], j = tri[(k + 2) % 3];
      const Eigen::Vector2d a = u[(k + 1) % 3] - u[k];
      const Eigen::Vector2d b = u[(k + 2) % 3] - u[k];
      const double cross = a(0) * b(1) - a(1) * b(0);
      const double w = 0.5 * a.dot(b) / cross;
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
    }
  }
  Eigen::SparseMatrix<double> L(nv, nv);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

TensionResult tension_field(const DiscreteMap& f) {
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;
  const int nv = mesh.vertex_count();
  const int d = man.ambient_dim();
  const auto diffs = differentials(f);
  const Eigen::SparseMatrix<double> L = cotan_laplacian(mesh);

  Eigen::MatrixXd F(nv, d);
  for (int v = 0; v < nv; ++v) F.row(v) = f.images[v].ambient.transpose();
  const Eigen::MatrixXd LF = L * F;

  std::vector<Vec> aform(mesh.face_count());
  parallel_for(mesh.face_count(), [&](int i) {
    const Eigen::MatrixXd dF = tangent_dF(diffs[i]);
    aform[i] = man.trace_form(diffs[i].image_base, dF, dF);
  });

  TensionResult out;
  out.tension.mesh = &mesh;
  out.tension.vectors.resize(nv);
  double max_norm = 0.0, max_normal = 0.0;
  for (int v = 0; v < nv; ++v) {
    Vec avg = Vec::Zero(d);
    for (int fi : mesh.vertex_faces[v]) {
      avg += (mesh.face_area[fi] / 3.0) * aform[fi];
    }
    avg /= mesh.vertex_mass[v];
    const Vec t = LF.row(v).transpose() / mesh.vertex_mass[v] - avg;
    out.tension.vectors[v] = t;
    const Vec normal = t - man.tangent_project(f.images[v], t);
    max_norm = std::max(max_norm, t.norm());
    max_normal = std::max(max_normal, normal.norm());
  }
  out.max_normal_fraction = max_norm > 1e-300 ? max_normal / max_norm : 0.0;
  return out;
}

double degree(const DiscreteMap& f) {
  const SurfaceMesh& mesh = *f.mesh;
  const auto diffs = differentials(f);
  return map_sum(mesh.face_count(),
                 [&](int i) {
                   return mesh.face_area[i] * diffs[i].df.m.determinant();
                 }) /
         mesh.man->volume();
}

}  // namespace rigidlab
