#pragma once

#include <Eigen/Dense>
#include <random>
#include <utility>
#include <vector>

#include "rigidlab/errors.hpp"

namespace rigidlab {

using Vec = Eigen::VectorXd;

enum class ManifoldKind { Sphere, FlatTorus };

// Point on the embedded surface. For the sphere the parameters are the unit
// vector itself; for the flat torus they are the angles (theta, phi) in
// [0, 2*pi).
struct SurfacePoint {
  Vec params;
  Vec ambient;
};

struct TangentFrame {
  SurfacePoint base;
  Vec e1, e2;  // orthonormal, positively oriented

  // d x 2 matrix whose columns are the frame vectors.
  Eigen::MatrixXd E() const {
    Eigen::MatrixXd m(e1.size(), 2);
    m.col(0) = e1;
    m.col(1) = e2;
    return m;
  }
};

// Element of Isom_+(M): a rotation matrix for the sphere, an angle
// translation for the torus.
struct IsometryElement {
  ManifoldKind kind = ManifoldKind::Sphere;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector2d shift = Eigen::Vector2d::Zero();
};

// Coefficients over the manifold's Killing basis.
struct KillingElement {
  Eigen::VectorXd coeffs;
};

class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  virtual int ambient_dim() const = 0;
  int intrinsic_dim() const { return 2; }
  double inj_radius() const { return M_PI; }
  virtual double volume() const = 0;
  virtual const char* name() const = 0;

  virtual SurfacePoint from_params(const Vec& params) const = 0;
  virtual SurfacePoint project(const Vec& ambient) const = 0;
  virtual TangentFrame frame(const SurfacePoint& p) const = 0;
  virtual Vec tangent_project(const SurfacePoint& p, const Vec& w) const = 0;

  // Second fundamental form A(p)(v, w); v, w tangent at p, output normal.
  virtual Vec second_fundamental(const SurfacePoint& p, const Vec& v,
                                 const Vec& w) const = 0;

  virtual SurfacePoint exp(const SurfacePoint& p, const Vec& v) const = 0;
  virtual Vec log(const SurfacePoint& p, const SurfacePoint& q) const = 0;
  virtual double distance(const SurfacePoint& p,
                          const SurfacePoint& q) const = 0;
  virtual Vec transport(const SurfacePoint& p, const SurfacePoint& q,
                        const Vec& v) const = 0;

  virtual int killing_dim() const = 0;
  virtual Vec killing_field(int i, const SurfacePoint& p) const = 0;
  virtual IsometryElement flow(const KillingElement& k, double t) const = 0;

  virtual IsometryElement identity_isometry() const = 0;
  virtual SurfacePoint apply(const IsometryElement& phi,
                             const SurfacePoint& p) const = 0;
  virtual IsometryElement inverse(const IsometryElement& phi) const = 0;
  // Composition a.b: apply b first, then a.
  virtual IsometryElement compose(const IsometryElement& a,
                                  const IsometryElement& b) const = 0;
  virtual double group_distance(const IsometryElement& a,
                                const IsometryElement& b) const = 0;

  // Weighted best-fit element of the identity component (Wahba/Kabsch on the
  // sphere, circular means on the torus).
  virtual IsometryElement isometry_fit(
      const std::vector<std::pair<SurfacePoint, SurfacePoint>>& pairs,
      const std::vector<double>& weights) const = 0;

  virtual SurfacePoint random_point(std::mt19937_64& rng) const = 0;

  // Trace extension of A over tangent-map pairs: columns of X and Y are
  // tangent vectors at p, the images of an orthonormal source frame.
  Vec trace_form(const SurfacePoint& p, const Eigen::MatrixXd& X,
                 const Eigen::MatrixXd& Y) const;

  static const Manifold& get(ManifoldKind kind);
};

// Wraps an angle difference to (-pi, pi].
double wrap_angle(double a);

}  // namespace rigidlab
