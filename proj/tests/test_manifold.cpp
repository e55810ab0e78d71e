#include <doctest.h>

#include <random>

#include "rigidlab/manifold.hpp"

using namespace rigidlab;

namespace {

const Manifold& sphere() { return Manifold::get(ManifoldKind::Sphere); }
const Manifold& torus() { return Manifold::get(ManifoldKind::FlatTorus); }

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec v4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v;
}

}  // namespace

TEST_CASE("projection: examples and idempotence") {
  CHECK((sphere().project(v3(2, 0, 0)).ambient - v3(1, 0, 0)).norm() < 1e-14);
  CHECK((torus().project(v4(2, 0, 0, 1)).ambient - v4(1, 0, 0, 1)).norm() <
        1e-14);
  CHECK_THROWS_AS(sphere().project(v3(0, 0, 0)), DegenerateProjection);
  CHECK_THROWS_AS(torus().project(v4(0, 0, 1, 0)), DegenerateProjection);

  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    for (const Manifold* man : {&sphere(), &torus()}) {
      const SurfacePoint p = man->random_point(rng);
      CHECK((man->project(p.ambient).ambient - p.ambient).norm() < 1e-14);
    }
  }
}

TEST_CASE("second fundamental form: closed forms, symmetry, FD cross-check") {
  std::mt19937_64 rng(5);
  // Sphere: A(v, v) = p for unit tangent v.
  for (int k = 0; k < 20; ++k) {
    const SurfacePoint p = sphere().random_point(rng);
    const TangentFrame fr = sphere().frame(p);
    CHECK((sphere().second_fundamental(p, fr.e1, fr.e1) - p.ambient).norm() <
          1e-12);
    CHECK((sphere().second_fundamental(p, fr.e1, fr.e2) -
           sphere().second_fundamental(p, fr.e2, fr.e1))
              .norm() < 1e-10);
  }
  // Torus: A(e_theta, e_theta) = (cos th, sin th, 0, 0).
  const SurfacePoint q = torus().from_params(v4(0.7, 2.1, 0, 0).head(2));
  const TangentFrame fq = torus().frame(q);
  CHECK((torus().second_fundamental(q, fq.e1, fq.e1) -
         v4(std::cos(0.7), std::sin(0.7), 0, 0))
            .norm() < 1e-12);
  CHECK_THROWS_AS(sphere().second_fundamental(
                      sphere().from_params(v3(0, 0, 1)), v3(0, 0, 1),
                      v3(1, 0, 0)),
                  FrameMismatch);

  // dpi at points of the surface equals tangent projection (FD check).
  for (const Manifold* man : {&sphere(), &torus()}) {
    const SurfacePoint p = man->random_point(rng);
    const int d = man->ambient_dim();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vec w(d);
    for (int i = 0; i < d; ++i) w(i) = unif(rng);
    const double h = 1e-5;
    const Vec fd = (man->project(p.ambient + h * w).ambient -
                    man->project(p.ambient - h * w).ambient) /
                   (2.0 * h);
    CHECK((fd - man->tangent_project(p, w)).norm() < 1e-6);
  }
}

TEST_CASE("trace form: examples") {
  std::mt19937_64 rng(6);
  const SurfacePoint p = sphere().random_point(rng);
  const Eigen::MatrixXd e = sphere().frame(p).E();
  CHECK((sphere().trace_form(p, e, e) - 2.0 * p.ambient).norm() < 1e-12);
  CHECK(sphere()
            .trace_form(p, Eigen::MatrixXd::Zero(3, 2), e)
            .norm() < 1e-14);

  const SurfacePoint q = torus().random_point(rng);
  const Eigen::MatrixXd eq = torus().frame(q).E();
  CHECK((torus().trace_form(q, eq, eq) -
         v4(std::cos(q.params(0)), std::sin(q.params(0)),
            std::cos(q.params(1)), std::sin(q.params(1))))
            .norm() < 1e-12);
}

TEST_CASE("exp/log: examples, round trips, distances") {
  const SurfacePoint north = sphere().from_params(v3(0, 0, 1));
  const TangentFrame fr = sphere().frame(north);
  const SurfacePoint eq = sphere().exp(north, (M_PI / 2.0) * fr.e1);
  CHECK(std::abs(eq.ambient(2)) < 1e-12);
  CHECK((sphere().exp(north, Vec::Zero(3)).ambient - north.ambient).norm() <
        1e-14);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    for (const Manifold* man : {&sphere(), &torus()}) {
      const SurfacePoint p = man->random_point(rng);
      const TangentFrame f = man->frame(p);
      Vec v = unif(rng) * f.e1 + unif(rng) * f.e2;
      v *= (M_PI / 2.0) / std::max(1.0, v.norm()) * std::abs(unif(rng));
      const SurfacePoint ex = man->exp(p, v);
      CHECK(man->distance(p, ex) == doctest::Approx(v.norm()).epsilon(1e-12));
      CHECK((man->log(p, ex) - v).norm() < 1e-12);
    }
  }
  // Antipodal log fails.
  CHECK_THROWS_AS(sphere().log(north, sphere().from_params(v3(0, 0, -1))),
                  OutsideInjectivityRadius);
}

TEST_CASE("parallel transport: isometry and geodesic invariance") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    for (const Manifold* man : {&sphere(), &torus()}) {
      const SurfacePoint p = man->random_point(rng);
      const SurfacePoint q = man->random_point(rng);
      if (man->distance(p, q) >= man->inj_radius() - 0.1) continue;
      const TangentFrame f = man->frame(p);
      const Vec v = unif(rng) * f.e1 + unif(rng) * f.e2;
      const Vec w = man->transport(p, q, v);
      CHECK(w.norm() == doctest::Approx(v.norm()).epsilon(1e-12));
      CHECK((man->transport(p, p, v) - v).norm() < 1e-14);
      // Geodesic velocity transports to geodesic velocity.
      const Vec lp = man->log(p, q);
      if (lp.norm() > 1e-8) {
        CHECK((man->transport(p, q, lp) + man->log(q, p)).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("killing basis and flows") {
  CHECK(sphere().killing_dim() == 3);
  CHECK(torus().killing_dim() == 2);
  std::mt19937_64 rng(17);
  for (const Manifold* man : {&sphere(), &torus()}) {
    KillingElement k;
    k.coeffs = Eigen::VectorXd::Zero(man->killing_dim());
    k.coeffs(0) = 0.37;
    const IsometryElement phi = man->flow(k, 1.0);
    // Flow consistency with the field: d/dt phi_t(p) at t=0 equals K(p).
    const SurfacePoint p = man->random_point(rng);
    const double h = 1e-6;
    const Vec fd = (man->apply(man->flow(k, h), p).ambient -
                    man->apply(man->flow(k, -h), p).ambient) /
                   (2.0 * h);
    CHECK((fd - 0.37 * man->killing_field(0, p)).norm() < 1e-8);
    // Isometries preserve distances.
    for (int j = 0; j < 100; ++j) {
      const SurfacePoint a = man->random_point(rng);
      const SurfacePoint b = man->random_point(rng);
      CHECK(man->distance(man->apply(phi, a), man->apply(phi, b)) ==
            doctest::Approx(man->distance(a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("isometry fit: exact recovery, identity, noise scaling") {
  std::mt19937_64 rng(19);
  for (const Manifold* man : {&sphere(), &torus()}) {
    KillingElement k;
    k.coeffs = Eigen::VectorXd::Zero(man->killing_dim());
    for (int i = 0; i < man->killing_dim(); ++i) k.coeffs(i) = 0.3 + 0.2 * i;
    const IsometryElement phi = man->flow(k, 1.0);
    std::vector<std::pair<SurfacePoint, SurfacePoint>> pairs, idpairs;
    std::vector<double> weights;
    for (int j = 0; j < 40; ++j) {
      const SurfacePoint p = man->random_point(rng);
      pairs.emplace_back(p, man->apply(phi, p));
      idpairs.emplace_back(p, p);
      weights.push_back(1.0 + 0.1 * (j % 3));
    }
    const IsometryElement fit = man->isometry_fit(pairs, weights);
    CHECK(man->group_distance(fit, phi) < 1e-10);
    CHECK(man->group_distance(man->isometry_fit(idpairs, weights),
                              man->identity_isometry()) < 1e-10);

    // Noise scaling: recovery error about linear in the noise level.
    auto fit_error = [&](double eta, unsigned seed) {
      std::mt19937_64 nrng(seed);
      std::normal_distribution<double> gauss(0.0, eta);
      std::vector<std::pair<SurfacePoint, SurfacePoint>> noisy;
      double acc = 0.0;
      const int trials = 40;
      for (int t = 0; t < trials; ++t) {
        noisy.clear();
        for (const auto& [a, b] : pairs) {
          Vec perturbed = b.ambient;
          for (int i = 0; i < perturbed.size(); ++i) perturbed(i) += gauss(nrng);
          noisy.emplace_back(a, man->project(perturbed));
        }
        acc += man->group_distance(man->isometry_fit(noisy, weights), phi);
      }
      return acc / trials;
    };
    const double e3 = fit_error(1e-3, 77);
    const double e2 = fit_error(1e-2, 78);
    CHECK(e2 / e3 > 7.0);
    CHECK(e2 / e3 < 13.0);
  }
  CHECK_THROWS_AS(sphere().isometry_fit({}, {}), DegenerateFit);
}

TEST_CASE("chord-arc bounds on the sphere") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 200; ++k) {
    const SurfacePoint p = sphere().random_point(rng);
    const SurfacePoint q = sphere().random_point(rng);
    const double chord = (p.ambient - q.ambient).norm();
    const double arc = sphere().distance(p, q);
    CHECK(chord <= arc + 1e-12);
    CHECK(arc <= (M_PI / 2.0 + 1e-9) * chord);
  }
}

TEST_CASE("group operations are consistent") {
  std::mt19937_64 rng(29);
  for (const Manifold* man : {&sphere(), &torus()}) {
    KillingElement k1, k2;
    k1.coeffs = Eigen::VectorXd::Zero(man->killing_dim());
    k2.coeffs = Eigen::VectorXd::Zero(man->killing_dim());
    k1.coeffs(0) = 0.5;
    k2.coeffs(man->killing_dim() - 1) = -0.8;
    const IsometryElement a = man->flow(k1, 1.0);
    const IsometryElement b = man->flow(k2, 1.0);
    const SurfacePoint p = man->random_point(rng);
    CHECK((man->apply(man->compose(a, b), p).ambient -
           man->apply(a, man->apply(b, p)).ambient)
              .norm() < 1e-12);
    CHECK(man->group_distance(man->compose(a, man->inverse(a)),
                              man->identity_isometry()) < 1e-12);
    CHECK(man->group_distance(a, a) < 1e-14);
  }
}
