#include "rigidlab/heatflow.hpp"

#include <cmath>
#include <memory>

#include "rigidlab/parallel.hpp"
#include "rigidlab/piola.hpp"

namespace rigidlab {

namespace {

double constraint_residual(const DiscreteMap& f) {
  const Manifold& man = *f.mesh->man;
  double r = 0.0;
  for (const auto& q : f.images) {
    if (man.kind() == ManifoldKind::Sphere) {
      r = std::max(r, std::abs(q.ambient.norm() - 1.0));
    } else {
      r = std::max(r, std::abs(std::hypot(q.ambient(0), q.ambient(1)) - 1.0));
      r = std::max(r, std::abs(std::hypot(q.ambient(2), q.ambient(3)) - 1.0));
    }
  }
  return r;
}

Eigen::MatrixXd to_matrix(const DiscreteMap& f) {
  const int nv = static_cast<int>(f.images.size());
  const int d = static_cast<int>(f.images[0].ambient.size());
  Eigen::MatrixXd u(nv, d);
  for (int v = 0; v < nv; ++v) u.row(v) = f.images[v].ambient.transpose();
  return u;
}

}  // namespace

double dirichlet_energy(const Eigen::SparseMatrix<double>& L,
                        const DiscreteMap& f) {
  const Eigen::MatrixXd u = to_matrix(f);
  double e = 0.0;
  for (int c = 0; c < u.cols(); ++c) {
    e += u.col(c).dot(L * u.col(c));
  }
  return 0.5 * e;
}

HeatFlow::HeatFlow(const SurfaceMesh& mesh)
    : mesh_(&mesh), L_(cotan_laplacian(mesh)) {
  mass_ = Eigen::Map<const Vec>(mesh.vertex_mass.data(),
                                static_cast<long>(mesh.vertex_mass.size()));
}

const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& HeatFlow::solver(
    double dt) const {
  for (const auto& [cached_dt, fact] : cache_) {
    if (cached_dt == dt) return *fact;
  }
  Eigen::SparseMatrix<double> a = dt * L_;
  for (int v = 0; v < mesh_->vertex_count(); ++v) {
    a.coeffRef(v, v) += mass_(v);
  }
  auto fact =
      std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  fact->compute(a);
  if (fact->info() != Eigen::Success) {
    throw SolverFailure("heat flow: factorization failed");
  }
  cache_.emplace_back(dt, fact);
  return *cache_.back().second;
}

DiscreteMap HeatFlow::raw_step(const DiscreteMap& f, double dt) const {
  const auto& fact = solver(dt);
  const Eigen::MatrixXd u = to_matrix(f);
  Eigen::MatrixXd next(u.rows(), u.cols());
  for (int c = 0; c < u.cols(); ++c) {
    next.col(c) = fact.solve(mass_.asDiagonal() * u.col(c));
  }
  DiscreteMap out;
  out.mesh = f.mesh;
  out.images.resize(f.images.size());
  const Manifold& man = *f.mesh->man;
  for (int v = 0; v < u.rows(); ++v) {
    out.images[v] = man.project(next.row(v).transpose());
  }
  return out;
}

FlowState HeatFlow::start(const DiscreteMap& f) const {
  FlowState s;
  s.t = 0.0;
  s.map = f;
  s.dirichlet_energy = dirichlet_energy(L_, f);
  return s;
}

double HeatFlow::step(FlowState& state, double dt) const {
  for (int k = 0; k <= 10; ++k) {
    const DiscreteMap cand = raw_step(state.map, dt);
    const double e = dirichlet_energy(L_, cand);
    if (e <= state.dirichlet_energy + 1e-10) {
      state.map = cand;
      state.dirichlet_energy = e;
      state.t += dt;
      return dt;
    }
    dt *= 0.5;
  }
  throw StepRejected("heat flow: energy increased after 10 dt halvings");
}

double HeatFlow::one_step_defect(const DiscreteMap& f, double dt) const {
  const DiscreteMap stepped = raw_step(f, dt);
  const Manifold& man = *f.mesh->man;
  const Eigen::MatrixXd u = to_matrix(f);
  const Eigen::MatrixXd lu = L_ * u;
  double acc = 0.0;
  for (int v = 0; v < u.rows(); ++v) {
    const Vec drift =
        man.tangent_project(f.images[v], -lu.row(v).transpose() / mass_(v));
    const Vec target = f.images[v].ambient + dt * drift;
    acc += mass_(v) * (stepped.images[v].ambient - target).squaredNorm();
  }
  return std::sqrt(acc);
}

SmoothResult smooth(const DiscreteMap& f, double T1, double dt, double p,
                    double lambda) {
  if (!(T1 > 0.0) || !(dt > 0.0)) {
    throw InvalidArgument("smooth: T1 and dt must be positive");
  }
  const SurfaceMesh& mesh = *f.mesh;
  HeatFlow hf(mesh);
  FlowState state = hf.start(f);

  const auto parts = almost_harmonic_parts(f, lambda, p);
  const auto df0 = differentials(f);

  auto monitor = [&](int stepno) {
    MonitorRow row;
    row.step = stepno;
    row.t = state.t;
    row.dirichlet_energy = state.dirichlet_energy;
    row.w1p_dist_to_initial =
        sobolev_distance(differentials(state.map), state.map, df0, f, p);
    row.max_face_grad = max_face_gradient(state.map);
    row.constraint_residual = constraint_residual(state.map);
    state.history.push_back(row);
  };
  monitor(0);

  int steps = 0;
  while (state.t < T1 - 1e-15) {
    const double want = std::min(dt, T1 - state.t);
    hf.step(state, want);
    ++steps;
    if (steps % 25 == 0 || state.t >= T1 - 1e-15) monitor(steps);
  }

  SmoothResult out;
  out.map = state.map;
  out.report.steps = steps;
  out.report.history = std::move(state.history);
  out.report.w1p_dist_to_initial = out.report.history.back().w1p_dist_to_initial;
  out.report.max_face_grad = out.report.history.back().max_face_grad;
  out.report.h_norms = parts.h_norm_Lp;
  if (parts.h_norm_Lp >= 1e-10) {
    out.report.ratio = out.report.w1p_dist_to_initial / parts.h_norm_Lp;
    out.report.ratio_defined = true;
  }
  return out;
}

SmoothResult smooth(const DiscreteMap& f) {
  const double h = f.mesh->mesh_size;
  return smooth(f, 0.05, 1e-3 * h * h);
}

}  // namespace rigidlab
