#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "rigidlab/discrete_map.hpp"

namespace rigidlab {

// Per-vertex ambient vectors (test fields, residuals, tension).
struct AmbientField {
  const SurfaceMesh* mesh = nullptr;
  std::vector<Vec> vectors;
};

// Cof dF per face in ambient coordinates (d x 2, columns tangent to the
// image surface), computed in frames and pushed forward by the image frame.
std::vector<Eigen::MatrixXd> cof_field(
    const std::vector<FaceDifferential>& diffs, const SurfaceMesh& mesh);
std::vector<Eigen::MatrixXd> cof_field(const DiscreteMap& f);

// Weak extrinsic Piola residual:
//   integral of <Cof dF, d xi> - <(A o F)(Cof dF, dF), xi>.
double piola_residual(const DiscreteMap& f, const AmbientField& xi);
double piola_residual(const std::vector<FaceDifferential>& diffs,
                      const DiscreteMap& f, const AmbientField& xi);

struct AlmostHarmonicParts {
  std::vector<Eigen::MatrixXd> h;   // dF - Cof dF, ambient d x 2 per face
  std::vector<Vec> h_prime;         // -(A o F)(h, dF), ambient per face
  std::vector<double> ratio;        // (|h| + |h'|) / dist(df, SO), per face
  double ratio_max = 0.0;
  double h_norm_Lp = 0.0;           // ||h||_{L^p} + ||h'||_{L^p}
};

// Requires max face |df| <= lambda (throws LipschitzBoundViolated).
AlmostHarmonicParts almost_harmonic_parts(const DiscreteMap& f, double lambda,
                                          double p = 2.0);

// Cotangent-weight Laplace-Beltrami matrix (positive semi-definite; the
// Dirichlet energy of vertex data u is u^T L u / 2).
Eigen::SparseMatrix<double> cotan_laplacian(const SurfaceMesh& mesh);

struct TensionResult {
  AmbientField tension;        // -Delta_h F - (A o F)(dF, dF), per vertex
  double max_normal_fraction;  // max |normal part| / |tension| over vertices
};

TensionResult tension_field(const DiscreteMap& f);

// Mapping degree: sum area * Det(df) / vol(M).
double degree(const DiscreteMap& f);

}  // namespace rigidlab
