#pragma once

#include <Eigen/Dense>
#include <functional>

namespace rigidlab {

// Damped (Levenberg-style) Newton with finite differences, for smooth
// objectives over a handful of Lie-algebra coefficients. Optionally projects
// each accepted iterate back into the feasible set.
Eigen::VectorXd minimize_small(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    Eigen::VectorXd x0, int max_iters = 50,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project =
        nullptr);

}  // namespace rigidlab
