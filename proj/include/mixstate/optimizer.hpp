#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>

namespace mixstate {

// Evaluates f and its gradient at x. Returns false when x is infeasible or
// f is not finite; the line search then shrinks the step.
using Objective = std::function<bool(const Eigen::VectorXd& x, double& f, Eigen::VectorXd& grad)>;

struct OptimizerOptions {
    int max_iterations = 500;
    double grad_tol = 1e-6;
    int max_shrinks = 50;
    double armijo = 1e-4;
    // Norm used for the stopping rule; defaults to the Euclidean norm of grad.
    std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& grad)> grad_norm;
};

struct OptimizerResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd grad;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

// BFGS ascent with Armijo backtracking. Accepted iterates never decrease f.
// Throws std::invalid_argument if x0 itself is infeasible.
OptimizerResult maximize_bfgs(const Objective& f, Eigen::VectorXd x0, const OptimizerOptions& options = {});

}  // namespace mixstate
