#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rigidlab/linalg.hpp"
#include "rigidlab/mesh.hpp"

namespace rigidlab {

// Per-vertex self-map of the meshed manifold.
struct DiscreteMap {
  const SurfaceMesh* mesh = nullptr;
  std::vector<SurfacePoint> images;
};

DiscreteMap identity_map(const SurfaceMesh& mesh);
DiscreteMap constant_map(const SurfaceMesh& mesh, const SurfacePoint& target);
// phi o f
DiscreteMap compose(const IsometryElement& phi, const DiscreteMap& f);
DiscreteMap isometry_map(const SurfaceMesh& mesh, const IsometryElement& phi);

struct FaceDifferential {
  TangentMap df;                // 2x2, face frame -> image frame
  Eigen::MatrixXd dF_ambient;   // d x 2 differential of the affine interpolant
  SurfacePoint image_base;
  Eigen::MatrixXd image_frame;  // d x 2
};

FaceDifferential differential(const DiscreteMap& f, int face);
std::vector<FaceDifferential> differentials(const DiscreteMap& f,
                                            bool parallel = true);

void check_exponent(double p);

struct EnergyResult {
  double Ep = 0.0;  // integral of dist^p(df, SO)
  double e = 0.0;   // Ep^(1/p)
};

EnergyResult energy(const DiscreteMap& f, double p, bool parallel = true);
EnergyResult energy(const std::vector<FaceDifferential>& diffs,
                    const SurfaceMesh& mesh, double p, bool parallel = true);

double sobolev_distance(const DiscreteMap& f, const DiscreteMap& g, double p);
double sobolev_distance(const std::vector<FaceDifferential>& df,
                        const DiscreteMap& f,
                        const std::vector<FaceDifferential>& dg,
                        const DiscreteMap& g, double p);

struct IsomDistance {
  double dist = 0.0;
  IsometryElement phi;
};

// min over the identity component of d_{1,p}(f, phi), via a Wahba/Kabsch or
// circular-mean seed plus local descent over the Killing coefficients.
IsomDistance dist_to_isom(const DiscreteMap& f, double p);

std::vector<Eigen::Matrix2d> metric_deficit(const DiscreteMap& f);

struct ClampResult {
  DiscreteMap map;
  bool cap_hit = false;
  int iterations = 0;
  double max_face_norm = 0.0;
};

ClampResult clamp_gradient(const DiscreteMap& f, double lambda);

double max_face_gradient(const DiscreteMap& f);

// "rigidlab-map-v1" JSON serialization.
std::string map_to_json(const DiscreteMap& f);
DiscreteMap map_from_json(const SurfaceMesh& mesh, const std::string& text);

}  // namespace rigidlab
