#include "rigidlab/optim.hpp"

#include <algorithm>
#include <vector>

namespace rigidlab {

Eigen::VectorXd minimize_small(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    Eigen::VectorXd x, int max_iters,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project) {
  const int dim = static_cast<int>(x.size());
  const double h = 1e-4;
  if (project) x = project(x);
  double fx = fn(x);
  double lambda = 1e-6;
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::VectorXd grad(dim);
    Eigen::MatrixXd hess(dim, dim);
    std::vector<double> fplus(dim), fminus(dim);
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      fplus[i] = fn(xp);
      fminus[i] = fn(xm);
      grad(i) = (fplus[i] - fminus[i]) / (2.0 * h);
      hess(i, i) = (fplus[i] - 2.0 * fx + fminus[i]) / (h * h);
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        Eigen::VectorXd xpp = x;
        xpp(i) += h;
        xpp(j) += h;
        const double fpp = fn(xpp);
        hess(i, j) = hess(j, i) = (fpp - fplus[i] - fplus[j] + fx) / (h * h);
      }
    }
    if (grad.norm() < 1e-12) break;
    bool accepted = false;
    for (int k = 0; k < 12 && !accepted; ++k) {
      Eigen::MatrixXd damped = hess;
      damped.diagonal().array() += lambda;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd cand = x + step;
      if (project) cand = project(cand);
      const double ft = fn(cand);
      if (ft < fx) {
        const double moved = (cand - x).norm();
        x = std::move(cand);
        fx = ft;
        lambda = std::max(lambda * 0.3, 1e-10);
        accepted = true;
        if (moved < 1e-10) return x;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) break;
  }
  return x;
}

}  // namespace rigidlab
