#include "rigidlab/manifold.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>

namespace rigidlab {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

Vec Manifold::trace_form(const SurfacePoint& p, const Eigen::MatrixXd& X,
                         const Eigen::MatrixXd& Y) const {
  if (X.rows() != ambient_dim() || Y.rows() != ambient_dim() ||
      X.cols() != 2 || Y.cols() != 2) {
    throw FrameMismatch("trace_form: arguments must be d x 2 tangent maps");
  }
  Vec out = Vec::Zero(ambient_dim());
  for (int a = 0; a < 2; ++a) {
    out += second_fundamental(p, X.col(a), Y.col(a));
  }
  return out;
}

namespace {

class Sphere final : public Manifold {
 public:
  ManifoldKind kind() const override { return ManifoldKind::Sphere; }
  int ambient_dim() const override { return 3; }
  double volume() const override { return 4.0 * M_PI; }
  const char* name() const override { return "sphere"; }

  SurfacePoint from_params(const Vec& params) const override {
    SurfacePoint p;
    p.params = params.normalized();
    p.ambient = p.params;
    return p;
  }

  SurfacePoint project(const Vec& x) const override {
    const double n = x.norm();
    if (n < 1e-14) {
      throw DegenerateProjection("sphere: cannot project the origin");
    }
    return from_params(x / n);
  }

  TangentFrame frame(const SurfacePoint& p) const override {
    TangentFrame f;
    f.base = p;
    const Vec& n = p.ambient;
    if (std::abs(n(2)) <= 0.9) {
      // Normalized chart directions e_theta, e_phi of the polar chart.
      const double st = std::sqrt(std::max(0.0, 1.0 - n(2) * n(2)));
      Eigen::Vector3d ephi(-n(1) / st, n(0) / st, 0.0);
      Eigen::Vector3d etheta = ephi.cross(Eigen::Vector3d(n));
      // etheta = e_phi x n points along increasing colatitude.
      f.e1 = etheta.normalized();
      f.e2 = ephi;
    } else {
      // Chart override near the poles.
      Eigen::Vector3d a(1.0, 0.0, 0.0);
      Eigen::Vector3d e1 = a - n.dot(a) * Eigen::Vector3d(n);
      e1.normalize();
      f.e1 = e1;
      f.e2 = Eigen::Vector3d(n).cross(e1);
    }
    return f;
  }

  Vec tangent_project(const SurfacePoint& p, const Vec& w) const override {
    return w - p.ambient.dot(w) * p.ambient;
  }

  Vec second_fundamental(const SurfacePoint& p, const Vec& v,
                         const Vec& w) const override {
    check_tangent(p, v);
    check_tangent(p, w);
    return v.dot(w) * p.ambient;
  }

  SurfacePoint exp(const SurfacePoint& p, const Vec& v) const override {
    const double t = v.norm();
    if (t < 1e-300) return p;
    return project(std::cos(t) * p.ambient + std::sin(t) * (v / t));
  }

  double distance(const SurfacePoint& p, const SurfacePoint& q) const override {
    const Eigen::Vector3d a = p.ambient, b = q.ambient;
    return std::atan2(a.cross(b).norm(), a.dot(b));
  }

  Vec log(const SurfacePoint& p, const SurfacePoint& q) const override {
    const double d = distance(p, q);
    if (d >= inj_radius() - 1e-12) {
      throw OutsideInjectivityRadius("sphere log: points (nearly) antipodal");
    }
    Vec u = q.ambient - p.ambient.dot(q.ambient) * p.ambient;
    const double un = u.norm();
    if (un < 1e-15) return Vec::Zero(3);
    return (d / un) * u;
  }

  Vec transport(const SurfacePoint& p, const SurfacePoint& q,
                const Vec& v) const override {
    const double d = distance(p, q);
    if (d >= inj_radius() - 1e-12) {
      throw OutsideInjectivityRadius("sphere transport: antipodal points");
    }
    if (d < 1e-15) return v;
    const Vec lp = log(p, q);
    const Vec w = lp / d;                  // unit geodesic direction at p
    const Vec wq = -log(q, p) / d;         // same direction seen at q
    const Eigen::Vector3d axis =
        Eigen::Vector3d(p.ambient).cross(Eigen::Vector3d(w));
    return v.dot(w) * wq + v.dot(axis) * axis;
  }

  int killing_dim() const override { return 3; }

  Vec killing_field(int i, const SurfacePoint& p) const override {
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    omega(i) = 1.0;
    return omega.cross(Eigen::Vector3d(p.ambient));
  }

  IsometryElement flow(const KillingElement& k, double t) const override {
    IsometryElement phi;
    phi.kind = ManifoldKind::Sphere;
    Eigen::Vector3d omega(k.coeffs(0), k.coeffs(1), k.coeffs(2));
    const double a = t * omega.norm();
    if (std::abs(a) < 1e-300) return phi;
    phi.rotation =
        Eigen::AngleAxisd(a, omega.normalized()).toRotationMatrix();
    return phi;
  }

  IsometryElement identity_isometry() const override {
    IsometryElement phi;
    phi.kind = ManifoldKind::Sphere;
    return phi;
  }

  SurfacePoint apply(const IsometryElement& phi,
                     const SurfacePoint& p) const override {
    return from_params(phi.rotation * Eigen::Vector3d(p.ambient));
  }

  IsometryElement inverse(const IsometryElement& phi) const override {
    IsometryElement out = phi;
    out.rotation = phi.rotation.transpose();
    return out;
  }

  IsometryElement compose(const IsometryElement& a,
                          const IsometryElement& b) const override {
    IsometryElement out = a;
    out.rotation = a.rotation * b.rotation;
    return out;
  }

  double group_distance(const IsometryElement& a,
                        const IsometryElement& b) const override {
    const Eigen::Matrix3d r = a.rotation.transpose() * b.rotation;
    const Eigen::Vector3d axis(0.5 * (r(2, 1) - r(1, 2)),
                               0.5 * (r(0, 2) - r(2, 0)),
                               0.5 * (r(1, 0) - r(0, 1)));
    return std::atan2(axis.norm(), 0.5 * (r.trace() - 1.0));
  }

  IsometryElement isometry_fit(
      const std::vector<std::pair<SurfacePoint, SurfacePoint>>& pairs,
      const std::vector<double>& weights) const override {
    if (pairs.size() < 3) {
      throw DegenerateFit("sphere fit: need at least 3 weighted pairs");
    }
    Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      b += weights[i] * Eigen::Vector3d(pairs[i].second.ambient) *
           Eigen::Vector3d(pairs[i].first.ambient).transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(
        b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    if (sv(1) <= 1e-12 * std::max(1.0, sv(0))) {
      throw DegenerateFit("sphere fit: rank-deficient correlation matrix");
    }
    Eigen::Vector3d d(1.0, 1.0,
                      (svd.matrixU() * svd.matrixV().transpose())
                                  .determinant() >= 0.0
                          ? 1.0
                          : -1.0);
    IsometryElement phi;
    phi.kind = ManifoldKind::Sphere;
    phi.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
    return phi;
  }

  SurfacePoint random_point(std::mt19937_64& rng) const override {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector3d v;
    do {
      for (int i = 0; i < 3; ++i) v(i) = gauss(rng);
    } while (v.norm() < 1e-6);
    return from_params(v);
  }

 private:
  static void check_tangent(const SurfacePoint& p, const Vec& v) {
    if (v.size() != 3 || std::abs(p.ambient.dot(v)) > 1e-8 * (1.0 + v.norm())) {
      throw FrameMismatch("sphere: vector not tangent at base point");
    }
  }
};

class FlatTorus final : public Manifold {
 public:
  ManifoldKind kind() const override { return ManifoldKind::FlatTorus; }
  int ambient_dim() const override { return 4; }
  double volume() const override { return 4.0 * M_PI * M_PI; }
  const char* name() const override { return "flat_torus"; }

  SurfacePoint from_params(const Vec& params) const override {
    SurfacePoint p;
    Vec q(2);
    q(0) = canonical(params(0));
    q(1) = canonical(params(1));
    p.params = q;
    p.ambient = embed(q(0), q(1));
    return p;
  }

  SurfacePoint project(const Vec& x) const override {
    const double n1 = std::hypot(x(0), x(1));
    const double n2 = std::hypot(x(2), x(3));
    if (n1 < 1e-14 || n2 < 1e-14) {
      throw DegenerateProjection("torus: point on the focal set");
    }
    Vec q(2);
    q(0) = std::atan2(x(1), x(0));
    q(1) = std::atan2(x(3), x(2));
    return from_params(q);
  }

  TangentFrame frame(const SurfacePoint& p) const override {
    TangentFrame f;
    f.base = p;
    f.e1 = e_theta(p);
    f.e2 = e_phi(p);
    return f;
  }

  Vec tangent_project(const SurfacePoint& p, const Vec& w) const override {
    const Vec a = e_theta(p), b = e_phi(p);
    return a.dot(w) * a + b.dot(w) * b;
  }

  Vec second_fundamental(const SurfacePoint& p, const Vec& v,
                         const Vec& w) const override {
    const Vec a = e_theta(p), b = e_phi(p);
    check_tangent(p, v);
    check_tangent(p, w);
    Vec n1(4), n2(4);
    n1 << std::cos(p.params(0)), std::sin(p.params(0)), 0.0, 0.0;
    n2 << 0.0, 0.0, std::cos(p.params(1)), std::sin(p.params(1));
    return (a.dot(v) * a.dot(w)) * n1 + (b.dot(v) * b.dot(w)) * n2;
  }

  SurfacePoint exp(const SurfacePoint& p, const Vec& v) const override {
    const Vec a = e_theta(p), b = e_phi(p);
    Vec q(2);
    q(0) = p.params(0) + a.dot(v);
    q(1) = p.params(1) + b.dot(v);
    return from_params(q);
  }

  double distance(const SurfacePoint& p, const SurfacePoint& q) const override {
    const double d1 = wrap_angle(q.params(0) - p.params(0));
    const double d2 = wrap_angle(q.params(1) - p.params(1));
    return std::hypot(d1, d2);
  }

  Vec log(const SurfacePoint& p, const SurfacePoint& q) const override {
    const double d1 = wrap_angle(q.params(0) - p.params(0));
    const double d2 = wrap_angle(q.params(1) - p.params(1));
    if (std::hypot(d1, d2) >= inj_radius() - 1e-12) {
      throw OutsideInjectivityRadius("torus log: beyond injectivity radius");
    }
    return d1 * e_theta(p) + d2 * e_phi(p);
  }

  Vec transport(const SurfacePoint& p, const SurfacePoint& q,
                const Vec& v) const override {
    if (distance(p, q) >= inj_radius() - 1e-12) {
      throw OutsideInjectivityRadius("torus transport: beyond inj radius");
    }
    return e_theta(p).dot(v) * e_theta(q) + e_phi(p).dot(v) * e_phi(q);
  }

  int killing_dim() const override { return 2; }

  Vec killing_field(int i, const SurfacePoint& p) const override {
    return i == 0 ? e_theta(p) : e_phi(p);
  }

  IsometryElement flow(const KillingElement& k, double t) const override {
    IsometryElement phi;
    phi.kind = ManifoldKind::FlatTorus;
    phi.shift = t * Eigen::Vector2d(k.coeffs(0), k.coeffs(1));
    return phi;
  }

  IsometryElement identity_isometry() const override {
    IsometryElement phi;
    phi.kind = ManifoldKind::FlatTorus;
    return phi;
  }

  SurfacePoint apply(const IsometryElement& phi,
                     const SurfacePoint& p) const override {
    Vec q(2);
    q(0) = p.params(0) + phi.shift(0);
    q(1) = p.params(1) + phi.shift(1);
    return from_params(q);
  }

  IsometryElement inverse(const IsometryElement& phi) const override {
    IsometryElement out = phi;
    out.shift = -phi.shift;
    return out;
  }

  IsometryElement compose(const IsometryElement& a,
                          const IsometryElement& b) const override {
    IsometryElement out = a;
    out.shift = a.shift + b.shift;
    return out;
  }

  double group_distance(const IsometryElement& a,
                        const IsometryElement& b) const override {
    return std::hypot(wrap_angle(a.shift(0) - b.shift(0)),
                      wrap_angle(a.shift(1) - b.shift(1)));
  }

  IsometryElement isometry_fit(
      const std::vector<std::pair<SurfacePoint, SurfacePoint>>& pairs,
      const std::vector<double>& weights) const override {
    if (pairs.empty()) {
      throw DegenerateFit("torus fit: need at least 1 weighted pair");
    }
    IsometryElement phi;
    phi.kind = ManifoldKind::FlatTorus;
    for (int c = 0; c < 2; ++c) {
      double sc = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double d = pairs[i].second.params(c) - pairs[i].first.params(c);
        sc += weights[i] * std::cos(d);
        ss += weights[i] * std::sin(d);
      }
      if (std::hypot(sc, ss) < 1e-12) {
        throw DegenerateFit("torus fit: circular mean undefined");
      }
      phi.shift(c) = std::atan2(ss, sc);
    }
    return phi;
  }

  SurfacePoint random_point(std::mt19937_64& rng) const override {
    std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
    Vec q(2);
    q(0) = unif(rng);
    q(1) = unif(rng);
    return from_params(q);
  }

 private:
  static double canonical(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a;
  }

  static Vec embed(double theta, double phi) {
    Vec x(4);
    x << std::cos(theta), std::sin(theta), std::cos(phi), std::sin(phi);
    return x;
  }

  static Vec e_theta(const SurfacePoint& p) {
    Vec v(4);
    v << -std::sin(p.params(0)), std::cos(p.params(0)), 0.0, 0.0;
    return v;
  }

  static Vec e_phi(const SurfacePoint& p) {
    Vec v(4);
    v << 0.0, 0.0, -std::sin(p.params(1)), std::cos(p.params(1));
    return v;
  }

  void check_tangent(const SurfacePoint& p, const Vec& v) const {
    const Vec r = v - tangent_project(p, v);
    if (v.size() != 4 || r.norm() > 1e-8 * (1.0 + v.norm())) {
      throw FrameMismatch("torus: vector not tangent at base point");
    }
  }
};

}  // namespace

const Manifold& Manifold::get(ManifoldKind kind) {
  static const Sphere sphere;
  static const FlatTorus torus;
  if (kind == ManifoldKind::Sphere) return sphere;
  return torus;
}

}  // namespace rigidlab
