#include "mixstate/optimizer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace mixstate {

OptimizerResult maximize_bfgs(const Objective& objective, Eigen::VectorXd x, const OptimizerOptions& opt) {
    const auto n = x.size();
    auto norm = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& g) {
        return opt.grad_norm ? opt.grad_norm(at, g) : g.norm();
    };

    OptimizerResult r;
    double f = 0.0;
    Eigen::VectorXd g(n);
    if (!objective(x, f, g) || !std::isfinite(f) || !g.allFinite())
        throw std::invalid_argument("optimizer starting point is infeasible");

    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;  // h is the identity, scaled on the first step
    Eigen::VectorXd x_new(n), g_new(n);
    double f_new = 0.0;

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (norm(x, g) < opt.grad_tol) {
            r.converged = true;
            break;
        }
        Eigen::VectorXd p = h * g;
        double slope = g.dot(p);
        if (!(slope > 0.0)) {
            h.setIdentity();
            fresh = true;
            p = g;
            slope = g.dot(p);
        }
        double t = fresh ? std::min(1.0, 1.0 / p.norm()) : 1.0;
        bool accepted = false;
        for (int shrink = 0; shrink <= opt.max_shrinks; ++shrink, t *= 0.5) {
            x_new = x + t * p;
            if (objective(x_new, f_new, g_new) && std::isfinite(f_new) && g_new.allFinite() &&
                f_new >= f + opt.armijo * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!fresh) {
                h.setIdentity();
                fresh = true;
                continue;
            }
            r.message = "line search failed after " + std::to_string(opt.max_shrinks) + " step shrinks";
            break;
        }
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g - g_new;  // gradient change of -f
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh) h *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = h * y;
            h += (rho * rho * y.dot(hy) + rho) * s * s.transpose() - rho * (hy * s.transpose() + s * hy.transpose());
            fresh = false;
        }
        x = x_new;
        f = f_new;
        g = g_new;
    }
    r.x = x;
    r.value = f;
    r.grad = g;
    r.grad_norm = norm(x, g);
    r.iterations = it;
    if (!r.converged && r.grad_norm < opt.grad_tol) r.converged = true;
    if (r.converged) r.message = "gradient norm below tolerance";
    else if (r.message.empty()) r.message = "iteration limit reached";
    return r;
}

}  // namespace mixstate
