#pragma once

// BFGS minimizer over unconstrained coordinates with central-difference
// gradients. The likelihoods here have no closed-form gradient.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

#include "mgarch/errors.hpp"
#include "mgarch/matcore.hpp"

namespace mgarch {

struct OptimOptions {
  int max_iterations = 2000;
  double grad_tol = 1e-5;      // max-norm of the gradient
  double rel_f_tol = 1e-9;     // relative objective change per step
  double fd_step = 3e-6;       // relative central-difference step
};

struct OptimResult {
  Vector x;
  double f = 0.0;
  Vector grad;
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;
};

using Objective = std::function<double(const Vector&)>;

inline Vector fd_gradient(const Objective& f, const Vector& x, double rel_step,
                          int* eval_counter = nullptr) {
  const int n = static_cast<int>(x.size());
  Vector g(n);
  Vector xp = x;
  for (int i = 0; i < n; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
    if (eval_counter) *eval_counter += 2;
  }
  return g;
}

inline OptimResult minimize(const Objective& f, const Vector& x0,
                            const OptimOptions& opt = {}) {
  const int n = static_cast<int>(x0.size());
  OptimResult res;
  res.x = x0;
  res.f = f(x0);
  res.n_evals = 1;
  if (!std::isfinite(res.f)) {
    throw NumericError("minimize: objective not finite at the start point");
  }
  res.grad = fd_gradient(f, res.x, opt.fd_step, &res.n_evals);

  Matrix h_inv = Matrix::Identity(n, n);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.iterations = iter + 1;
    if (res.grad.cwiseAbs().maxCoeff() < opt.grad_tol) {
      res.converged = true;
      return res;
    }

    Vector direction = -(h_inv * res.grad);
    double slope = direction.dot(res.grad);
    if (!(slope < 0.0)) {
      // reset the curvature estimate and take steepest descent
      h_inv = Matrix::Identity(n, n);
      direction = -res.grad;
      slope = direction.dot(res.grad);
    }

    // backtracking Armijo line search
    constexpr double c1 = 1e-4;
    double alpha = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Vector x_new;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = res.x + alpha * direction;
      f_new = f(x_new);
      ++res.n_evals;
      if (std::isfinite(f_new) && f_new <= res.f + c1 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no descent along either direction: treat as converged at a flat spot
      res.converged = res.grad.cwiseAbs().maxCoeff() < 1e2 * opt.grad_tol;
      return res;
    }

    const Vector grad_new = fd_gradient(f, x_new, opt.fd_step, &res.n_evals);
    const Vector s = x_new - res.x;
    const Vector y = grad_new - res.grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix outer_sy = s * y.transpose();
      h_inv = (Matrix::Identity(n, n) - rho * outer_sy) * h_inv *
                  (Matrix::Identity(n, n) - rho * outer_sy.transpose()) +
              rho * s * s.transpose();
    }

    const double rel_change =
        std::abs(res.f - f_new) / std::max(1.0, std::abs(res.f));
    res.x = x_new;
    res.f = f_new;
    res.grad = grad_new;
    if (rel_change < opt.rel_f_tol) {
      res.converged = true;
      return res;
    }
  }
  return res;  // converged stays false
}

}  // namespace mgarch
