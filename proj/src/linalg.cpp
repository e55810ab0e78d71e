#include "rigidlab/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "rigidlab/errors.hpp"

namespace rigidlab {

TangentMap transpose(const TangentMap& f) {
  return TangentMap(f.m.transpose(), f.frame_dst, f.frame_src);
}

double hs_inner(const TangentMap& a, const TangentMap& b) {
  return (a.m.array() * b.m.array()).sum();
}

double hs_norm(const TangentMap& a) { return a.m.norm(); }

Eigen::MatrixXd cofactor_matrix(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  if (n == 2) {
    Eigen::MatrixXd c(2, 2);
    c << m(1, 1), -m(1, 0), -m(0, 1), m(0, 0);
    return c;
  }
  if (n == 3) {
    Eigen::MatrixXd c(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
        const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
        c(i, j) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
      }
    }
    return c;
  }
  // General n via minors; only n <= 4 is ever reached in practice.
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int s = 0, ss = 0; s < n; ++s) {
          if (s == j) continue;
          minor(rr, ss++) = m(r, s);
        }
        ++rr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      c(i, j) = sign * minor.determinant();
    }
  }
  return c;
}

std::pair<double, TangentMap> det_and_cof(const TangentMap& f) {
  return {f.m.determinant(),
          TangentMap(cofactor_matrix(f.m), f.frame_src, f.frame_dst)};
}

DistToSO dist_to_SO(const TangentMap& f) {
  const int n = f.dim();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      f.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double s =
      (svd.matrixU() * svd.matrixV().transpose()).determinant() >= 0.0 ? 1.0
                                                                       : -1.0;
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  d(n - 1) = s;
  Eigen::MatrixXd nearest =
      svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();

  double dist2 = 0.0;
  for (int i = 0; i < n - 1; ++i) dist2 += (sigma(i) - 1.0) * (sigma(i) - 1.0);
  const double last = s >= 0.0 ? sigma(n - 1) - 1.0 : sigma(n - 1) + 1.0;
  dist2 += last * last;

  DistToSO out;
  out.dist = std::sqrt(dist2);
  out.nearest = TangentMap(std::move(nearest), f.frame_src, f.frame_dst);
  return out;
}

Eigen::MatrixXd random_rotation(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (dim == 2) {
    std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
    const double a = unif(rng);
    Eigen::MatrixXd r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
  }
  if (dim == 3) {
    // Uniform via normalized quaternion.
    Eigen::Vector4d q;
    for (int i = 0; i < 4; ++i) q(i) = gauss(rng);
    q.normalize();
    Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
    return quat.toRotationMatrix();
  }
  throw InvalidArgument("random_rotation: dim must be 2 or 3");
}

double dist_to_SO_bruteforce(const Eigen::MatrixXd& f, int samples,
                             unsigned seed) {
  const int n = static_cast<int>(f.rows());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Eigen::MatrixXd r = random_rotation(n, pick(rng));
    best = std::min(best, (f - r).norm());
  }
  return best;
}

}  // namespace rigidlab
