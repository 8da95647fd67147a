#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

// Damped (Levenberg-Marquardt) least squares for the small curve fits in this
// project.  Residuals are weighted by the caller; the Jacobian is formed by
// central differences.  Deterministic: no randomized restarts.

namespace hfs {

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-13;     // relative parameter change
  double gradient_tolerance = 1e-13;
  double initial_damping = 1e-3;
};

struct LeastSquares {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // sigma^2 (J^T J)^-1
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;  // sqrt(sum of squared weighted residuals)
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

namespace detail {

inline Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& r0) {
  const auto n = x.size();
  Eigen::MatrixXd jac(r0.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = std::max(1e-7 * std::abs(x[j]), 1e-10);
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace detail

inline LeastSquares levenberg_marquardt(const ResidualFn& residuals,
                                        Eigen::VectorXd initial,
                                        const FitOptions& opts = {}) {
  LeastSquares out;
  Eigen::VectorXd x = std::move(initial);
  Eigen::VectorXd r = residuals(x);
  double cost = r.squaredNorm();
  double lambda = opts.initial_damping;

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXd jac = detail::numeric_jacobian(residuals, x, r);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;

    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
      out.converged = true;
      break;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);
      const Eigen::VectorXd x_try = x + step;
      const Eigen::VectorXd r_try = residuals(x_try);
      const double cost_try = r_try.squaredNorm();
      if (std::isfinite(cost_try) && cost_try <= cost) {
        const double rel_step =
            step.norm() / std::max(x.norm(), 1e-30);
        x = x_try;
        r = r_try;
        cost = cost_try;
        lambda = std::max(lambda * 0.3, 1e-14);
        stepped = true;
        if (rel_step < opts.step_tolerance) {
          out.converged = true;
        }
        break;
      }
      lambda *= 7.0;
    }
    if (!stepped || out.converged) {
      out.converged = out.converged || !stepped;  // stalled: local minimum
      break;
    }
  }

  out.params = x;
  out.iterations = iter;
  out.residual_norm = std::sqrt(cost);

  // Covariance of the estimates from the final Jacobian.
  const Eigen::MatrixXd jac = detail::numeric_jacobian(residuals, x, r);
  const auto dof = static_cast<double>(r.size() - x.size());
  const double sigma2 = dof > 0 ? cost / dof : 0.0;
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  jtj.diagonal() += Eigen::VectorXd::Constant(x.size(), 1e-300);
  out.covariance = sigma2 * jtj.inverse();
  return out;
}

}  // namespace hfs
