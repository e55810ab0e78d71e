#pragma once

#include <Eigen/Dense>
#include <utility>

namespace rigidlab {

// Linear map between two oriented inner-product spaces of equal dimension,
// expressed in positively oriented orthonormal frames of source and target.
// Frame tags are opaque identifiers; -1 means "unspecified".
struct TangentMap {
  Eigen::MatrixXd m;
  int frame_src = -1;
  int frame_dst = -1;

  TangentMap() = default;
  explicit TangentMap(Eigen::MatrixXd mat, int src = -1, int dst = -1)
      : m(std::move(mat)), frame_src(src), frame_dst(dst) {}

  int dim() const { return static_cast<int>(m.rows()); }
};

TangentMap transpose(const TangentMap& f);

double hs_inner(const TangentMap& a, const TangentMap& b);
double hs_norm(const TangentMap& a);

// Matrix cofactor (the derivative of det): <cof(M), B> = d/dt det(M + tB).
Eigen::MatrixXd cofactor_matrix(const Eigen::MatrixXd& m);

// Determinant together with the cofactor map; frames carry over unchanged.
std::pair<double, TangentMap> det_and_cof(const TangentMap& f);

struct DistToSO {
  double dist = 0.0;
  TangentMap nearest;  // the SVD sign-flip construction; non-unique when
                       // det < 0 and the two smallest singular values tie.
};

// Distance to the orientation-preserving isometries SO(V,W) in the
// Hilbert-Schmidt norm, with the nearest rotation.
DistToSO dist_to_SO(const TangentMap& f);

// Test oracle: brute-force minimisation of |F - R| over sampled rotations.
double dist_to_SO_bruteforce(const Eigen::MatrixXd& f, int samples,
                             unsigned seed);

// Uniform random rotation (dim 2 or 3).
Eigen::MatrixXd random_rotation(int dim, std::uint64_t seed);

}  // namespace rigidlab
