#include "rigidlab/killing.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <cmath>
#include <random>

#include "rigidlab/optim.hpp"
#include "rigidlab/parallel.hpp"

namespace rigidlab {

TangentField zero_field(const SurfaceMesh& mesh) {
  TangentField x;
  x.mesh = &mesh;
  x.vectors.assign(mesh.vertices.size(),
                   Vec::Zero(mesh.man->ambient_dim()));
  return x;
}

TangentField killing_to_field(const SurfaceMesh& mesh,
                              const KillingElement& k) {
  const Manifold& man = *mesh.man;
  TangentField x = zero_field(mesh);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    for (int i = 0; i < man.killing_dim(); ++i) {
      x.vectors[v] += k.coeffs(i) * man.killing_field(i, mesh.vertices[v]);
    }
  }
  return x;
}

TangentField scale_field(const TangentField& x, double s) {
  TangentField y = x;
  for (auto& v : y.vectors) v *= s;
  return y;
}

TangentField add_fields(const TangentField& x, const TangentField& y) {
  if (x.mesh != y.mesh) throw MeshMismatch("add_fields: different meshes");
  TangentField z = x;
  for (std::size_t v = 0; v < z.vectors.size(); ++v) z.vectors[v] += y.vectors[v];
  return z;
}

double l2_inner(const TangentField& x, const TangentField& y) {
  if (x.mesh != y.mesh) throw MeshMismatch("l2_inner: different meshes");
  const SurfaceMesh& mesh = *x.mesh;
  return map_sum(mesh.vertex_count(), [&](int v) {
    return mesh.vertex_mass[v] * x.vectors[v].dot(y.vectors[v]);
  });
}

double l2_norm(const TangentField& x) { return std::sqrt(l2_inner(x, x)); }

double c0_norm(const TangentField& x) {
  double m = 0.0;
  for (const auto& v : x.vectors) m = std::max(m, v.norm());
  return m;
}

namespace {

// Star geometry for the least-squares gradient at vertex p: log coordinates
// u_q, transported-neighbor frame maps T_q, and the normal-equation weights
// w_q with  G = sum_q y_q w_q^T.
struct StarFit {
  std::vector<Eigen::Vector2d> u, w;
  std::vector<Eigen::Matrix2d> t;  // E_p^T P_{q->p} E_q
};

StarFit star_fit(const SurfaceMesh& mesh, int p) {
  const Manifold& man = *mesh.man;
  const Eigen::MatrixXd ep = man.frame(mesh.vertices[p]).E();
  StarFit s;
  Eigen::Matrix2d uut = Eigen::Matrix2d::Zero();
  for (int q : mesh.vertex_neighbors[p]) {
    const Eigen::Vector2d u =
        ep.transpose() * man.log(mesh.vertices[p], mesh.vertices[q]);
    const Eigen::MatrixXd eq = man.frame(mesh.vertices[q]).E();
    Eigen::Matrix2d t;
    for (int c = 0; c < 2; ++c) {
      t.col(c) = ep.transpose() *
                 man.transport(mesh.vertices[q], mesh.vertices[p], eq.col(c));
    }
    s.u.push_back(u);
    s.t.push_back(t);
    uut += u * u.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(uut);
  if (es.eigenvalues()(0) <= 1e-12 * std::max(1.0, es.eigenvalues()(1))) {
    throw DegenerateStar("covariant_gradient: rank-deficient vertex star");
  }
  const Eigen::Matrix2d inv = uut.inverse();
  for (const auto& u : s.u) s.w.push_back(inv * u);
  return s;
}

}  // namespace

std::vector<Eigen::Matrix2d> covariant_gradient(const TangentField& x) {
  const SurfaceMesh& mesh = *x.mesh;
  const Manifold& man = *mesh.man;
  std::vector<Eigen::Matrix2d> out(mesh.vertices.size());
  std::exception_ptr err;
  parallel_for(mesh.vertex_count(), [&](int p) {
    try {
      const Eigen::MatrixXd ep = man.frame(mesh.vertices[p]).E();
      const Eigen::Vector2d xp = ep.transpose() * x.vectors[p];
      const StarFit s = star_fit(mesh, p);
      Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
      const auto& nbrs = mesh.vertex_neighbors[p];
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const Eigen::Vector2d y =
            ep.transpose() * man.transport(mesh.vertices[nbrs[k]],
                                           mesh.vertices[p],
                                           x.vectors[nbrs[k]]) -
            xp;
        g += y * s.w[k].transpose();
      }
      out[p] = g;
    } catch (...) {
#ifdef RIGIDLAB_HAS_OPENMP
#pragma omp critical
#endif
      if (!err) err = std::current_exception();
    }
  });
  if (err) std::rethrow_exception(err);
  return out;
}

namespace {

// Dof layout: 2 coefficients per vertex in the vertex frame.
Eigen::VectorXd field_to_dofs(const TangentField& x) {
  const SurfaceMesh& mesh = *x.mesh;
  const Manifold& man = *mesh.man;
  Eigen::VectorXd c(2 * mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Eigen::MatrixXd e = man.frame(mesh.vertices[v]).E();
    c.segment<2>(2 * v) = e.transpose() * x.vectors[v];
  }
  return c;
}

TangentField dofs_to_field(const SurfaceMesh& mesh, const Eigen::VectorXd& c) {
  const Manifold& man = *mesh.man;
  TangentField x = zero_field(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Eigen::MatrixXd e = man.frame(mesh.vertices[v]).E();
    x.vectors[v] = e * c.segment<2>(2 * v);
  }
  return x;
}

}  // namespace

KornResult korn_nullspace(const SurfaceMesh& mesh) {
  const Manifold& man = *mesh.man;
  const int nv = mesh.vertex_count();
  const int ndof = 2 * nv;
  if (nv < 12) throw SolverFailure("korn_nullspace: mesh too coarse");

  // Rows of B: per face, the three independent components of
  // sqrt(area) * L X = sqrt(area) * (G + G^T), scaled so that
  // |row block|^2 = area * |L X|_F^2. G is the P1 covariant gradient:
  // transport the corner values to the face base point and differentiate
  // the affine interpolant in log coordinates, G = [v1-v0 | v2-v0] Sinv.
  // The per-face gradient has no spurious kernel: G = 0 on every face
  // forces the transported field to be constant, unlike a vertex-star
  // least-squares fit which annihilates checkerboard modes on structured
  // grids.
  std::vector<Eigen::Triplet<double>> trip;
  const int nf = mesh.face_count();
  for (int fi = 0; fi < nf; ++fi) {
    const FaceGeom& g = mesh.geom[fi];
    const double sa = std::sqrt(mesh.face_area[fi]);
    // Coefficient rows of Sinv applied to the corner differences:
    // G = sum_i vtil_i d_i^T with d_1 = Sinv row 0, d_2 = Sinv row 1,
    // d_0 = -(d_1 + d_2), vtil_i = T_i c_i, T_i = E_face^T P_{v_i->b} E_i.
    Eigen::Vector2d d[3];
    d[1] = g.Sinv.row(0).transpose();
    d[2] = g.Sinv.row(1).transpose();
    d[0] = -(d[1] + d[2]);
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.faces[fi][c];
      const Eigen::MatrixXd ev = man.frame(mesh.vertices[v]).E();
      Eigen::Matrix2d t;
      for (int col = 0; col < 2; ++col) {
        t.col(col) = g.frame.transpose() *
                     man.transport(mesh.vertices[v], g.base, ev.col(col));
      }
      for (int col = 0; col < 2; ++col) {
        const Eigen::Matrix2d gm = t.col(col) * d[c].transpose();
        trip.emplace_back(3 * fi + 0, 2 * v + col, sa * 2.0 * gm(0, 0));
        trip.emplace_back(3 * fi + 1, 2 * v + col, sa * 2.0 * gm(1, 1));
        trip.emplace_back(3 * fi + 2, 2 * v + col,
                          sa * std::sqrt(2.0) * (gm(0, 1) + gm(1, 0)));
      }
    }
  }
  Eigen::SparseMatrix<double> b(3 * nf, ndof);
  b.setFromTriplets(trip.begin(), trip.end());
  const Eigen::MatrixXd a = Eigen::MatrixXd(b.transpose() * b);
  Eigen::VectorXd massdiag(ndof);
  for (int v = 0; v < nv; ++v) {
    massdiag(2 * v) = massdiag(2 * v + 1) = mesh.vertex_mass[v];
  }
  const Eigen::MatrixXd m = massdiag.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m);
  if (es.info() != Eigen::Success) {
    throw SolverFailure("korn_nullspace: eigensolve failed");
  }

  KornResult out;
  out.eigenvalues = es.eigenvalues().head(std::min(6, ndof));

  const int kdim = man.killing_dim();
  const Eigen::MatrixXd qdisc = es.eigenvectors().leftCols(kdim);

  // Closed-form basis as M-orthonormal dof vectors.
  Eigen::MatrixXd kclosed(ndof, kdim);
  for (int i = 0; i < kdim; ++i) {
    KillingElement ke;
    ke.coeffs = Eigen::VectorXd::Zero(kdim);
    ke.coeffs(i) = 1.0;
    kclosed.col(i) = field_to_dofs(killing_to_field(mesh, ke));
  }
  const Eigen::MatrixXd gram = kclosed.transpose() * m * kclosed;
  const Eigen::MatrixXd qclosed =
      kclosed * Eigen::LLT<Eigen::MatrixXd>(gram).matrixL().toDenseMatrix()
                    .inverse()
                    .transpose();

  const Eigen::MatrixXd overlap = qclosed.transpose() * m * qdisc;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap);
  const double smin =
      std::clamp(svd.singularValues()(kdim - 1), -1.0, 1.0);
  out.subspace_angle_deg = std::acos(smin) * 180.0 / M_PI;

  // Least-squares alignment: project each closed-form generator onto the
  // discrete nullspace.
  for (int i = 0; i < kdim; ++i) {
    const Eigen::VectorXd coeffs = qdisc.transpose() * m * kclosed.col(i);
    out.basis.push_back(dofs_to_field(mesh, qdisc * coeffs));
  }
  return out;
}

TangentField log_field(const DiscreteMap& f) {
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;
  TangentField x = zero_field(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    x.vectors[v] = man.log(mesh.vertices[v], f.images[v]);
  }
  return x;
}

DiscreteMap exp_field(const TangentField& x) {
  const SurfaceMesh& mesh = *x.mesh;
  const Manifold& man = *mesh.man;
  DiscreteMap f;
  f.mesh = &mesh;
  f.images.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    f.images[v] = man.exp(mesh.vertices[v], x.vectors[v]);
  }
  return f;
}

TangentField psi_K(const TangentField& x, const KillingElement& k) {
  const SurfaceMesh& mesh = *x.mesh;
  const Manifold& man = *mesh.man;
  const IsometryElement phi = man.flow(k, 1.0);
  TangentField y = zero_field(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const SurfacePoint& p = mesh.vertices[v];
    y.vectors[v] = man.log(p, man.apply(phi, man.exp(p, x.vectors[v])));
  }
  return y;
}

MinimizeKillingResult minimize_killing(const TangentField& x, double delta1) {
  const SurfaceMesh& mesh = *x.mesh;
  const Manifold& man = *mesh.man;
  if (c0_norm(x) > delta1) {
    throw InvalidArgument("minimize_killing: |X|_C0 exceeds delta1");
  }
  const int kdim = man.killing_dim();
  MinimizeKillingResult out;
  out.k.coeffs = Eigen::VectorXd::Zero(kdim);
  out.xbar = x;

  const double xnorm = l2_norm(x);
  if (xnorm < 1e-300) return out;
  const double delta = 5.0 * xnorm;

  Eigen::MatrixXd gram(kdim, kdim);
  std::vector<TangentField> basis;
  for (int i = 0; i < kdim; ++i) {
    KillingElement ke;
    ke.coeffs = Eigen::VectorXd::Zero(kdim);
    ke.coeffs(i) = 1.0;
    basis.push_back(killing_to_field(mesh, ke));
  }
  for (int i = 0; i < kdim; ++i) {
    for (int j = 0; j < kdim; ++j) gram(i, j) = l2_inner(basis[i], basis[j]);
  }

  // Squared norm keeps the objective smooth at an exact zero, where the
  // norm itself is a cone and damped Newton stalls.
  auto objective = [&](const Eigen::VectorXd& c) {
    try {
      const TangentField y = psi_K(x, KillingElement{c});
      return l2_inner(y, y);
    } catch (const OutsideInjectivityRadius&) {
      return 1e100;
    }
  };
  auto project = [&](const Eigen::VectorXd& c) -> Eigen::VectorXd {
    const double n2 = c.dot(gram * c);
    if (n2 <= delta * delta) return c;
    return c * (delta / std::sqrt(n2));
  };

  const Eigen::VectorXd c =
      minimize_small(objective, Eigen::VectorXd::Zero(kdim), 50, project);
  if (objective(c) > objective(Eigen::VectorXd::Zero(kdim))) {
    out.fallback = true;
    return out;
  }
  out.k.coeffs = c;
  out.xbar = psi_K(x, out.k);

  const double xb = l2_norm(out.xbar);
  if (xb > 1e-14) {
    for (int i = 0; i < kdim; ++i) {
      const double ki = std::sqrt(gram(i, i));
      out.ortho_ratio = std::max(
          out.ortho_ratio,
          std::abs(l2_inner(out.xbar, basis[i])) / (xb * xb * ki));
    }
  }
  return out;
}

DeficitCheckReport deficit_linearization_check(
    const SurfaceMesh& mesh, const std::vector<double>& scales, unsigned seed) {
  const Manifold& man = *mesh.man;
  for (double s : scales) {
    if (!(s > 0.0 && s < man.inj_radius() / 4.0)) {
      throw InvalidArgument("deficit check: scales must lie in (0, inj/4)");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, mesh.vertex_count() - 1);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int p0 = pick(rng);
  const SurfacePoint& base = mesh.vertices[p0];
  const Eigen::MatrixXd e0 = man.frame(base).E();
  Eigen::Vector2d v;
  Eigen::Matrix2d a;
  v << unif(rng), unif(rng);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) a(i, j) = unif(rng);
  }

  // Field with value v and covariant gradient A at p0 (in the frame e0),
  // under a bump cutoff whose gradient vanishes at p0.
  const double r0 = man.inj_radius() / 2.0;
  TangentField x = zero_field(mesh);
  for (int q = 0; q < mesh.vertex_count(); ++q) {
    const double d = man.distance(base, mesh.vertices[q]);
    if (d >= r0) continue;
    const double chi = std::pow(1.0 - (d / r0) * (d / r0), 2);
    const Eigen::Vector2d u =
        e0.transpose() * man.log(base, mesh.vertices[q]);
    const Vec at_base = e0 * (v + a * u);
    x.vectors[q] = chi * man.transport(base, mesh.vertices[q], at_base);
  }

  const int f0 = mesh.vertex_faces[p0][0];
  auto deficit_at = [&](double eps) {
    const DiscreteMap f = exp_field(scale_field(x, eps));
    const FaceDifferential d = differential(f, f0);
    return Eigen::Matrix2d(d.df.m.transpose() * d.df.m -
                           Eigen::Matrix2d::Identity());
  };

  const double eps0 = 1e-5;
  const Eigen::Matrix2d d0 = deficit_at(0.0);
  const Eigen::Matrix2d dprime =
      (deficit_at(eps0) - deficit_at(-eps0)) / (2.0 * eps0);

  DeficitCheckReport out;
  out.scales = scales;
  for (double s : scales) {
    out.remainders.push_back((deficit_at(s) - d0 - s * dprime).norm());
  }
  for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
    out.ratios.push_back(out.remainders[i + 1] / out.remainders[i]);
  }

  // Loose sanity quantity: the FD linear coefficient against the continuum
  // linearization g((A + A^T) ., .) expressed in the face frame.
  const FaceGeom& g = mesh.geom[f0];
  Eigen::Matrix2d t;
  for (int c = 0; c < 2; ++c) {
    t.col(c) = g.frame.transpose() *
               man.transport(base, g.base, Vec(e0.col(c)));
  }
  out.linear_vs_sym = (dprime - t * (a + a.transpose()) * t.transpose()).norm();
  return out;
}

RigidityReport nearest_isometry(const DiscreteMap& f,
                                const RigidityConfig& config) {
  const SurfaceMesh& mesh = *f.mesh;
  const Manifold& man = *mesh.man;
  RigidityReport report;
  report.phi = man.identity_isometry();
  report.kbar.coeffs = Eigen::VectorXd::Zero(man.killing_dim());

  const auto df = differentials(f);
  const EnergyResult en = energy(df, mesh, config.p);
  report.Ep = en.Ep;
  report.e = en.e;

  auto finish_with = [&](const IsometryElement& phi) {
    report.phi = phi;
    const DiscreteMap g = isometry_map(mesh, phi);
    report.dist = sobolev_distance(df, f, differentials(g), g, config.p);
    report.ratio = report.e > 1e-300 ? report.dist / report.e : 0.0;
  };

  // Stage 1: clamp.
  ClampResult clamped = clamp_gradient(f, config.lambda);
  report.clamp_cap_hit = clamped.cap_hit;

  // Stage 2: heat-flow smoothing.
  DiscreteMap smoothed;
  try {
    const double dt = config.dt > 0.0
                          ? config.dt
                          : 1e-3 * mesh.mesh_size * mesh.mesh_size;
    SmoothResult sr =
        smooth(clamped.map, config.T1, dt, config.p, config.lambda * 1.5);
    report.flow = sr.report;
    smoothed = std::move(sr.map);
  } catch (const Error& e) {
    report.failure_stage = std::string("smooth: ") + e.what();
    finish_with(man.identity_isometry());
    return report;
  }

  // Stage 3: global isometry seed.
  IsometryElement phi0 = man.identity_isometry();
  try {
    std::vector<std::pair<SurfacePoint, SurfacePoint>> pairs;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      pairs.emplace_back(mesh.vertices[v], smoothed.images[v]);
    }
    phi0 = man.isometry_fit(pairs, mesh.vertex_mass);
  } catch (const DegenerateFit& e) {
    report.failure_stage = std::string("isometry_fit: ") + e.what();
    finish_with(man.identity_isometry());
    return report;
  }

  // Stage 4: reduce to a near-identity map.
  const DiscreteMap h = compose(man.inverse(phi0), smoothed);
  TangentField x;
  try {
    x = log_field(h);
  } catch (const OutsideInjectivityRadius& e) {
    report.failure_stage = std::string("log_field: ") + e.what();
    finish_with(phi0);
    return report;
  }

  // Stage 5: Killing minimization.
  try {
    MinimizeKillingResult mk = minimize_killing(x, config.delta1);
    report.kbar = mk.k;
    report.xbar_norm = l2_norm(mk.xbar);
    if (mk.fallback) report.failure_stage = "minimize_killing: fallback";
  } catch (const InvalidArgument& e) {
    report.failure_stage = std::string("minimize_killing: ") + e.what();
    finish_with(phi0);
    return report;
  }

  // Stage 6: assemble the recovered isometry.
  finish_with(man.compose(phi0, man.inverse(man.flow(report.kbar, 1.0))));
  report.ok = report.failure_stage.empty();
  return report;
}

ScalingTable scaling_study(const TangentField& x, const IsometryElement& phi,
                           const std::vector<double>& eps, double p) {
  const SurfaceMesh& mesh = *x.mesh;
  const Manifold& man = *mesh.man;
  for (double e : eps) {
    if (!(e > 0.0 && e < man.inj_radius() / 4.0)) {
      throw InvalidArgument("scaling_study: eps must lie in (0, inj/4)");
    }
  }
  ScalingTable out;
  for (double e : eps) {
    // f_eps = exp(eps X') o phi with X' the pushforward of X by the
    // isometry; pointwise this is phi(exp_v(eps X(v))) by equivariance.
    DiscreteMap f;
    f.mesh = &mesh;
    f.images.resize(mesh.vertices.size());
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      f.images[v] =
          man.apply(phi, man.exp(mesh.vertices[v], e * x.vectors[v]));
    }
    const EnergyResult en = energy(f, p);
    const IsomDistance di = dist_to_isom(f, p);
    ScalingRow row;
    row.eps = e;
    row.energy_e = en.e;
    row.dist_w1p = di.dist;
    row.ratio = en.e > 1e-300 ? di.dist / en.e : 0.0;
    out.rows.push_back(row);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : out.rows) {
    if (r.energy_e <= 0.0 || r.dist_w1p <= 0.0) continue;
    const double lx = std::log(r.energy_e), ly = std::log(r.dist_w1p);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n >= 2 && sxx * n - sx * sx > 1e-300) {
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

TangentField random_smooth_field(const SurfaceMesh& mesh, unsigned seed) {
  const Manifold& man = *mesh.man;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TangentField x = zero_field(mesh);
  if (man.kind() == ManifoldKind::Sphere) {
    Eigen::Vector3d a;
    Eigen::Matrix3d b;
    for (int i = 0; i < 3; ++i) a(i) = gauss(rng);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) b(i, j) = gauss(rng);
    }
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      const Eigen::Vector3d p = mesh.vertices[v].ambient;
      x.vectors[v] = man.tangent_project(mesh.vertices[v], a + b * p);
    }
  } else {
    double ca[2][5], cb[2][5];
    for (auto& row : ca) {
      for (double& c : row) c = gauss(rng);
    }
    for (auto& row : cb) {
      for (double& c : row) c = gauss(rng);
    }
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      const double th = mesh.vertices[v].params(0);
      const double ph = mesh.vertices[v].params(1);
      const double basis[5] = {1.0, std::cos(th), std::sin(th), std::cos(ph),
                               std::sin(ph)};
      double alpha = 0.0, beta = 0.0;
      for (int k = 0; k < 5; ++k) {
        alpha += ca[0][k] * basis[k] + ca[1][k] * basis[k] * basis[k];
        beta += cb[0][k] * basis[k] + cb[1][k] * basis[k] * basis[k];
      }
      x.vectors[v] = alpha * man.killing_field(0, mesh.vertices[v]) +
                     beta * man.killing_field(1, mesh.vertices[v]);
    }
  }
  const double n = c0_norm(x);
  if (n > 1e-300) x = scale_field(x, 1.0 / n);
  return x;
}

TangentField remove_killing_component(const TangentField& x) {
  const SurfaceMesh& mesh = *x.mesh;
  const Manifold& man = *mesh.man;
  const int kdim = man.killing_dim();
  std::vector<TangentField> basis;
  for (int i = 0; i < kdim; ++i) {
    KillingElement ke;
    ke.coeffs = Eigen::VectorXd::Zero(kdim);
    ke.coeffs(i) = 1.0;
    basis.push_back(killing_to_field(mesh, ke));
  }
  Eigen::MatrixXd gram(kdim, kdim);
  Eigen::VectorXd rhs(kdim);
  for (int i = 0; i < kdim; ++i) {
    rhs(i) = l2_inner(x, basis[i]);
    for (int j = 0; j < kdim; ++j) gram(i, j) = l2_inner(basis[i], basis[j]);
  }
  const Eigen::VectorXd c = gram.ldlt().solve(rhs);
  TangentField out = x;
  for (int i = 0; i < kdim; ++i) {
    out = add_fields(out, scale_field(basis[i], -c(i)));
  }
  return out;
}

}  // namespace rigidlab
