// Acceptance suite: ten numbered criteria, one PASS/FAIL line each.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rigidlab/io.hpp"
#include "rigidlab/killing.hpp"
#include "rigidlab/piola.hpp"

using namespace rigidlab;

namespace {

int g_failures = 0;

void report(int n, bool pass, const std::string& what,
            const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", n,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

SurfaceMesh sphere_mesh(int level) {
  return build_mesh(Manifold::get(ManifoldKind::Sphere), level);
}

SurfaceMesh torus_mesh(int n) {
  return build_mesh(Manifold::get(ManifoldKind::FlatTorus), n);
}

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = unif(rng);
  return m;
}

// --- criterion 1: dist-to-SO oracle and algebraic identities ---
void criterion1() {
  std::mt19937_64 rng(101);
  double max_oracle = 0.0;
  double max_identity = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = k % 2 == 0 ? 3 : 2;
    const Eigen::MatrixXd f = random_matrix(n, rng);
    const double d = dist_to_SO(TangentMap(f)).dist;
    const double db = dist_to_SO_bruteforce(f, 200000, 500 + k);
    max_oracle = std::max(max_oracle, std::abs(d - db));

    // F^T Cof F = Det F * Id.
    const auto [det, cof] = det_and_cof(TangentMap(f));
    max_identity = std::max(
        max_identity,
        (f.transpose() * cof.m -
         det * Eigen::MatrixXd::Identity(n, n))
            .norm());
    // Cof R = R on SO and frame invariance of the distance.
    const Eigen::MatrixXd r = random_rotation(n, 700 + k);
    max_identity =
        std::max(max_identity, (det_and_cof(TangentMap(r)).second.m - r).norm());
    const Eigen::MatrixXd q = random_rotation(n, 800 + k);
    max_identity = std::max(
        max_identity,
        std::abs(dist_to_SO(TangentMap(q * f * r.transpose())).dist - d));
  }
  report(1, max_oracle <= 1e-2 && max_identity <= 1e-12,
         "dist-to-SO oracle equivalence and algebraic identities",
         "max oracle gap " + fmt(max_oracle) + " <= 1e-2, max identity defect " +
             fmt(max_identity) + " <= 1e-12");
}

// --- criterion 2: mesh quadrature convergence ---
void criterion2() {
  const double exact = 4.0 * M_PI;
  double err[3];
  for (int level = 2; level <= 4; ++level) {
    err[level - 2] = std::abs(sphere_mesh(level).total_area() - exact);
  }
  const double r1 = err[0] / err[1];
  const double r2 = err[1] / err[2];
  double torus_err = 0.0;
  for (int n : {8, 12, 24}) {
    torus_err = std::max(
        torus_err, std::abs(torus_mesh(n).total_area() - 4.0 * M_PI * M_PI));
  }
  const bool pass = r1 >= 3.0 && r1 <= 5.0 && r2 >= 3.0 && r2 <= 5.0 &&
                    torus_err < 1e-10;
  report(2, pass, "mesh/quadrature convergence",
         "sphere error ratios " + fmt(r1) + ", " + fmt(r2) +
             " in [3,5]; torus area error " + fmt(torus_err) + " < 1e-10");
}

// --- criterion 3: weak Piola residual refinement decay ---
void criterion3() {
  double worst = 1e300;
  for (int k = 0; k < 5; ++k) {
    double res[3];
    for (int level = 2; level <= 4; ++level) {
      const SurfaceMesh mesh = sphere_mesh(level);
      const DiscreteMap f =
          exp_field(scale_field(random_smooth_field(mesh, 300 + k), 0.3));
      AmbientField xi;
      xi.mesh = &mesh;
      xi.vectors = random_smooth_field(mesh, 350 + k).vectors;
      res[level - 2] = std::abs(piola_residual(f, xi));
    }
    worst = std::min({worst, res[0] / res[1], res[1] / res[2]});
  }
  report(3, worst >= 1.7, "weak Piola residual refinement decay",
         "min decrease factor " + fmt(worst) + " >= 1.7 over 5 map/field pairs");
}

// --- criterion 4: degree quantization ---
void criterion4() {
  const SurfaceMesh sm = sphere_mesh(3);
  const double d_id = degree(identity_map(sm));
  std::mt19937_64 rng(401);
  const double d_const =
      std::abs(degree(constant_map(sm, sm.man->random_point(rng))));
  const SurfaceMesh tm = torus_mesh(24);
  DiscreteMap dbl;
  dbl.mesh = &tm;
  for (const auto& v : tm.vertices) {
    Vec q(2);
    q << 2.0 * v.params(0), v.params(1);
    dbl.images.push_back(tm.man->from_params(q));
  }
  const double d_dbl = degree(dbl);
  const bool pass = std::abs(d_id - 1.0) <= 0.02 && d_const <= 1e-10 &&
                    std::abs(d_dbl - 2.0) <= 0.04;
  report(4, pass, "degree quantization",
         "identity " + fmt(d_id) + " = 1 +- 2%, constant " + fmt(d_const) +
             " <= 1e-10, double-theta " + fmt(d_dbl) + " = 2 +- 2%");
}

// --- criterion 5: Killing nullspace spectrum ---
void criterion5() {
  const KornResult ks = korn_nullspace(sphere_mesh(3));
  int below_s = 0;
  for (int i = 0; i < ks.eigenvalues.size(); ++i) {
    if (ks.eigenvalues(i) < 0.01 * ks.eigenvalues(3)) ++below_s;
  }
  const KornResult kt = korn_nullspace(torus_mesh(24));
  int below_t = 0;
  for (int i = 0; i < kt.eigenvalues.size(); ++i) {
    if (kt.eigenvalues(i) < 0.01 * kt.eigenvalues(2)) ++below_t;
  }
  const bool pass = below_s == 3 && below_t == 2 &&
                    ks.subspace_angle_deg < 5.0 && kt.subspace_angle_deg < 5.0;
  report(5, pass, "Killing nullspace spectrum",
         "sphere: " + std::to_string(below_s) +
             " eigenvalues < 0.01*lambda4, angle " +
             fmt(ks.subspace_angle_deg) + " deg; torus: " +
             std::to_string(below_t) + " < 0.01*lambda3, angle " +
             fmt(kt.subspace_angle_deg) + " deg; both < 5 deg");
}

// --- criterion 6: heat flow invariants ---
void criterion6() {
  const SurfaceMesh mesh = sphere_mesh(3);
  const double h = mesh.mesh_size;

  // On-manifold and monotone energy along a full smoothing run.
  const DiscreteMap f =
      exp_field(scale_field(random_smooth_field(mesh, 601), 0.3));
  const SmoothResult sr = smooth(f);
  double max_constraint = 0.0;
  double worst_increase = 0.0;
  for (std::size_t i = 0; i < sr.report.history.size(); ++i) {
    max_constraint =
        std::max(max_constraint, sr.report.history[i].constraint_residual);
    if (i > 0) {
      worst_increase = std::max(
          worst_increase, sr.report.history[i].dirichlet_energy -
                              sr.report.history[i - 1].dirichlet_energy);
    }
  }

  // Richardson one-step consistency.
  HeatFlow flow(mesh);
  const double dt0 = 4e-2 * h * h;
  const double d1 = flow.one_step_defect(f, dt0);
  const double d2 = flow.one_step_defect(f, dt0 / 2.0);
  const double d3 = flow.one_step_defect(f, dt0 / 4.0);
  const double rich1 = d1 / d2;
  const double rich2 = d2 / d3;

  // Isometry initial data barely moves over [0, T1].
  IsometryElement phi;
  phi.kind = ManifoldKind::Sphere;
  phi.rotation = random_rotation(3, 602);
  const SmoothResult si = smooth(isometry_map(mesh, phi));
  const double moved = si.report.w1p_dist_to_initial;

  const bool pass = max_constraint < 1e-12 && worst_increase <= 1e-10 &&
                    std::abs(rich1 - 4.0) <= 1.0 &&
                    std::abs(rich2 - 4.0) <= 1.0 && moved < h;
  report(6, pass, "heat flow invariants",
         "constraint " + fmt(max_constraint) + " < 1e-12, energy increase " +
             fmt(worst_increase) + " <= 1e-10, Richardson factors " +
             fmt(rich1) + ", " + fmt(rich2) + " = 4 +- 25%, isometry moved " +
             fmt(moved) + " < h = " + fmt(h));
}

// --- criterion 7: metric-deficit linearization ---
void criterion7() {
  bool pass = true;
  std::string detail;
  for (const SurfaceMesh& mesh : {sphere_mesh(3), torus_mesh(24)}) {
    const DeficitCheckReport rep =
        deficit_linearization_check(mesh, {4e-2, 2e-2, 1e-2}, 701);
    for (double r : rep.ratios) {
      if (std::abs(r - 0.25) > 0.05) pass = false;
      if (!detail.empty()) detail += ", ";
      detail += fmt(r);
    }
  }
  report(7, pass, "metric-deficit linearization",
         "remainder ratios " + detail + " = 0.25 +- 20% on both instances");
}

// --- criterion 8: Killing minimization ---
void criterion8() {
  bool small_ok = true;
  std::string small_detail;
  for (const SurfaceMesh& mesh : {sphere_mesh(2), torus_mesh(12)}) {
    KillingElement k;
    k.coeffs = Eigen::VectorXd::Zero(mesh.man->killing_dim());
    k.coeffs(0) = 0.08;
    if (mesh.man->killing_dim() > 2) k.coeffs(2) = -0.05;
    const TangentField kx = killing_to_field(mesh, k);
    const MinimizeKillingResult r = minimize_killing(kx);
    const double rel = l2_norm(r.xbar) / l2_norm(kx);
    if (!(rel <= 0.05)) small_ok = false;
    if (!small_detail.empty()) small_detail += ", ";
    small_detail += fmt(rel);
  }

  // Near-orthogonality constant across 20 seeded fields.
  const SurfaceMesh mesh = sphere_mesh(2);
  double cmax = 0.0;
  bool finite = true;
  for (int s = 0; s < 20; ++s) {
    const TangentField x =
        scale_field(random_smooth_field(mesh, 800 + s), 0.15);
    const MinimizeKillingResult r = minimize_killing(x);
    if (!std::isfinite(r.ortho_ratio)) finite = false;
    cmax = std::max(cmax, r.ortho_ratio);
  }
  const bool pass = small_ok && finite && cmax < 50.0;
  report(8, pass, "Killing minimization",
         "small-Killing residual ratios " + small_detail +
             " <= 0.05; near-orthogonality constant " + fmt(cmax) +
             " < 50 over 20 fields");
}

// --- criterion 9: headline rigidity scaling ---
void criterion9() {
  const std::vector<double> ladder = {1e-3, 2.15e-3, 4.64e-3, 1e-2,
                                      2.15e-2, 4.64e-2, 1e-1};
  bool pass = true;
  std::string detail;
  for (const SurfaceMesh& mesh : {sphere_mesh(3), torus_mesh(24)}) {
    double cmax = 0.0;
    for (int s = 0; s < 3; ++s) {
      const TangentField x =
          remove_killing_component(random_smooth_field(mesh, 900 + s));
      std::mt19937_64 rng(950 + s);
      KillingElement k;
      k.coeffs = Eigen::VectorXd::Zero(mesh.man->killing_dim());
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (int i = 0; i < k.coeffs.size(); ++i) k.coeffs(i) = unif(rng);
      const IsometryElement phi = mesh.man->flow(k, 1.0);
      const ScalingTable tab = scaling_study(x, phi, ladder, 2.0);
      if (!(tab.slope >= 0.9 && tab.slope <= 1.1)) pass = false;
      for (const auto& row : tab.rows) {
        if (!std::isfinite(row.ratio)) pass = false;
        cmax = std::max(cmax, row.ratio);
      }
      if (!detail.empty()) detail += ", ";
      detail += fmt(tab.slope);
    }
    detail += " (C = " + fmt(cmax) + ")";
  }
  report(9, pass, "headline rigidity scaling",
         "log-log slopes " + detail + " in [0.9, 1.1], per-level ratio "
         "constants recorded");
}

// --- criterion 10: exact-isometry recovery ---
void criterion10() {
  const SurfaceMesh mesh = sphere_mesh(3);
  IsometryElement phi;
  phi.kind = ManifoldKind::Sphere;
  phi.rotation = random_rotation(3, 1001);

  const RigidityReport exact = nearest_isometry(isometry_map(mesh, phi));
  const double d_exact =
      exact.ok ? mesh.man->group_distance(exact.phi, phi) : 1e300;

  const TangentField x =
      remove_killing_component(random_smooth_field(mesh, 1002));
  // f = exp(eps X') o phi with X' the pushforward of X, evaluated
  // pointwise as phi(exp_v(eps X(v))) by equivariance.
  const DiscreteMap f = compose(phi, exp_field(scale_field(x, 1e-2)));
  const RigidityReport near = nearest_isometry(f);
  const double d_near =
      near.ok ? mesh.man->group_distance(near.phi, phi) : 1e300;

  const bool pass = exact.ok && d_exact <= 1e-6 && near.ok &&
                    d_near <= 10.0 * near.dist;
  report(10, pass, "exact-isometry recovery",
         "exact map group distance " + fmt(d_exact) +
             " <= 1e-6; perturbed map group distance " + fmt(d_near) +
             " <= 10 * d_{1,2} = " + fmt(10.0 * near.dist));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
