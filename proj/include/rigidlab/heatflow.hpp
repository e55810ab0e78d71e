#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <utility>
#include <vector>

#include "rigidlab/discrete_map.hpp"

namespace rigidlab {

struct MonitorRow {
  int step = 0;
  double t = 0.0;
  double dirichlet_energy = 0.0;
  double w1p_dist_to_initial = 0.0;
  double max_face_grad = 0.0;
  double constraint_residual = 0.0;
};

struct FlowState {
  double t = 0.0;
  DiscreteMap map;
  double dirichlet_energy = 0.0;
  std::vector<MonitorRow> history;
};

// Dirichlet energy of the embedded map via the cotangent Laplacian.
double dirichlet_energy(const Eigen::SparseMatrix<double>& L,
                        const DiscreteMap& f);

// Projected semi-implicit stepper for the extrinsic harmonic-map heat flow:
// componentwise (M + dt L) u+ = M u, then closest-point reprojection. The
// reprojection supplies the normal forcing (A o U)(dU, dU) to first order.
class HeatFlow {
 public:
  explicit HeatFlow(const SurfaceMesh& mesh);

  FlowState start(const DiscreteMap& f) const;

  // One accepted step of size <= dt: retries with halved dt (up to 10 times)
  // when the Dirichlet energy increases beyond 1e-10 slack; throws
  // StepRejected when the retries are exhausted. Returns the dt actually
  // taken.
  double step(FlowState& state, double dt) const;

  // One raw step of exactly dt, no energy control.
  DiscreteMap raw_step(const DiscreteMap& f, double dt) const;

  // L2 defect between one step of size dt and the first-order explicit
  // update along the projected Laplacian direction; O(dt^2) for smooth data.
  double one_step_defect(const DiscreteMap& f, double dt) const;

  const Eigen::SparseMatrix<double>& laplacian() const { return L_; }

 private:
  const SurfaceMesh* mesh_;
  Eigen::SparseMatrix<double> L_;
  Vec mass_;
  mutable std::vector<std::pair<double,
      std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>>>
      cache_;

  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& solver(
      double dt) const;
};

struct SmoothReport {
  double w1p_dist_to_initial = 0.0;   // ||smoothed - f||_{W^{1,p}}
  double h_norms = 0.0;               // ||h||_{L^p} + ||h'||_{L^p} of f
  double ratio = 0.0;                 // dist / h_norms when defined
  bool ratio_defined = false;
  double max_face_grad = 0.0;         // C1-bound proxy of the smoothed map
  int steps = 0;
  std::vector<MonitorRow> history;
};

struct SmoothResult {
  DiscreteMap map;
  SmoothReport report;
};

// Runs the flow to time T1 (defaults T1 = 0.05, dt = 1e-3 * h^2).
SmoothResult smooth(const DiscreteMap& f, double T1, double dt, double p = 2.0,
                    double lambda = 14.142135623730951);  // 10 * sqrt(2)
SmoothResult smooth(const DiscreteMap& f);

}  // namespace rigidlab
