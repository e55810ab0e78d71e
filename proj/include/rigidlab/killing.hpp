#pragma once

#include <string>
#include <vector>

#include "rigidlab/discrete_map.hpp"
#include "rigidlab/heatflow.hpp"

namespace rigidlab {

// Per-vertex tangent vector field on the meshed manifold (ambient coords).
struct TangentField {
  const SurfaceMesh* mesh = nullptr;
  std::vector<Vec> vectors;
};

TangentField zero_field(const SurfaceMesh& mesh);
TangentField killing_to_field(const SurfaceMesh& mesh, const KillingElement& k);
TangentField scale_field(const TangentField& x, double s);
TangentField add_fields(const TangentField& x, const TangentField& y);

double l2_inner(const TangentField& x, const TangentField& y);
double l2_norm(const TangentField& x);
double c0_norm(const TangentField& x);

// Covariant gradient per vertex, as a 2x2 matrix in the vertex frame, from a
// least-squares fit over the vertex star with exact parallel transport.
std::vector<Eigen::Matrix2d> covariant_gradient(const TangentField& x);

struct KornResult {
  std::vector<TangentField> basis;  // closed-form basis projected onto the
                                    // discrete nullspace (least squares)
  Vec eigenvalues;                  // smallest 6 of the generalized problem
  double subspace_angle_deg = 0.0;  // discrete nullspace vs closed-form basis
};

// Nullspace of the Korn-type quadratic form  integral |grad X + (grad X)^T|^2.
KornResult korn_nullspace(const SurfaceMesh& mesh);

// f = exp X conversions.
TangentField log_field(const DiscreteMap& f);
DiscreteMap exp_field(const TangentField& x);

// Psi_K: the field Y with exp Y = phi_K o exp X, phi_K = flow(K, 1).
TangentField psi_K(const TangentField& x, const KillingElement& k);

struct MinimizeKillingResult {
  KillingElement k;        // minimizer of I_X over the Killing coefficients
  TangentField xbar;       // Psi_K o X
  bool fallback = false;   // descent failed; K = 0 returned
  double ortho_ratio = 0.0;  // max_i |(Xbar, K_i)| / (|Xbar|^2 |K_i|)
};

// Minimizes I_X(K) = |Psi_K o X|_{L^2} from K = 0, constrained to
// |K|_{L^2} <= 5 |X|_{L^2}.
MinimizeKillingResult minimize_killing(const TangentField& x,
                                       double delta1 = M_PI / 8.0);

struct DeficitCheckReport {
  std::vector<double> scales;
  std::vector<double> remainders;  // R(eps) per scale
  std::vector<double> ratios;      // R(scale[i+1]) / R(scale[i])
  double linear_vs_sym = 0.0;      // |D'(0) - (A + A^T)| in the face frame
};

// Metric-deficit linearization check: builds a field with prescribed value
// and covariant gradient at a random vertex, and compares the deficit of
// exp(eps X) against its own finite-difference linearization.
DeficitCheckReport deficit_linearization_check(
    const SurfaceMesh& mesh, const std::vector<double>& scales, unsigned seed);

struct RigidityConfig {
  double p = 2.0;
  double lambda = 14.142135623730951;  // 10 * sqrt(2)
  double T1 = 0.05;
  double dt = 0.0;  // 0: use 1e-3 * h^2
  double delta1 = M_PI / 8.0;
};

struct RigidityReport {
  double Ep = 0.0;
  double e = 0.0;
  double dist = 0.0;   // d_{1,p}(f, phi)
  double ratio = 0.0;  // dist / e
  IsometryElement phi;
  bool clamp_cap_hit = false;
  SmoothReport flow;
  double xbar_norm = 0.0;
  KillingElement kbar;
  std::string failure_stage;  // empty on success
  bool ok = false;
};

RigidityReport nearest_isometry(const DiscreteMap& f,
                                const RigidityConfig& config = {});

struct ScalingRow {
  double eps = 0.0;
  double energy_e = 0.0;
  double dist_w1p = 0.0;
  double ratio = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // log-log slope of dist vs e
};

// f_eps = exp(eps X) o phi; rows (eps, e(f_eps), dist_{1,p}(f_eps, Isom+),
// ratio) plus the least-squares log-log slope.
ScalingTable scaling_study(const TangentField& x, const IsometryElement& phi,
                           const std::vector<double>& eps, double p);

TangentField random_smooth_field(const SurfaceMesh& mesh, unsigned seed);

// X minus its L^2 projection onto the closed-form Killing basis.
TangentField remove_killing_component(const TangentField& x);

}  // namespace rigidlab
