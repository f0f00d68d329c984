#pragma once

// Reference correlation models: the windowed local-correlation recursion
// (dcc_t), the outer-product pseudo-covariance recursion (dcc_e), and the
// rolling-window covariance estimator. Two-step quasi-likelihood fitting for
// both baselines lives further down and reuses the joint estimator's k=1
// collapse for the per-series GARCH step.

#include <Eigen/Dense>
#include <vector>

#include "mgarch/errors.hpp"
#include "mgarch/matcore.hpp"
#include "mgarch/optim.hpp"
#include "mgarch/volcore.hpp"

namespace mgarch {

struct DccTParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  CorrelationMatrix r;  // fixed positive definite parameter matrix
  int m = 0;            // local-correlation window

  void validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0 || !(lambda1 + lambda2 < 1.0)) {
      throw InvalidParams("DccTParams: need l1, l2 >= 0 and l1 + l2 < 1");
    }
    if (m < 1) throw InvalidParams("DccTParams: m < 1");
  }
};

struct DccEParams {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  SymmetricMatrix qbar;  // sample covariance of the standardized innovations

  void validate() const {
    if (alpha1 < 0.0 || alpha2 < 0.0 || !(alpha1 + alpha2 > 0.0) ||
        !(alpha1 + alpha2 < 1.0)) {
      throw InvalidParams("DccEParams: need 0 < a1 + a2 < 1, both >= 0");
    }
  }
};

// R_t = (1 - l1 - l2) R + l1 Psi_{t-1} + l2 R_{t-1}; same algebra as the
// joint model's correlation step with (R, lambda) in place of (Rbar, theta).
inline CorrelationMatrix dcc_t_step(const CorrelationMatrix& r_prev,
                                    const CorrelationMatrix& psi_prev,
                                    const DccTParams& p) {
  const int k = p.r.dim();
  const double w = 1.0 - p.lambda1 - p.lambda2;
  SymmetricMatrix r(k);
  for (int i = 0; i < k; ++i) {
    r.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) {
      double v = w * p.r(i, j) + p.lambda1 * psi_prev(i, j) +
                 p.lambda2 * r_prev(i, j);
      if (v > 1.0) v = 1.0;
      if (v < -1.0) v = -1.0;
      r.set(i, j, v);
    }
  }
  return CorrelationMatrix(r, false);
}

struct DccEStep {
  SymmetricMatrix q;
  CorrelationMatrix r;
};

// Q_t = (1 - a1 - a2) Qbar + a1 u_{t-1} u_{t-1}' + a2 Q_{t-1}, then
// normalized to a correlation matrix.
inline DccEStep dcc_e_step(const SymmetricMatrix& q_prev, const Vector& u_prev,
                           const DccEParams& p) {
  const int k = q_prev.dim();
  const double w = 1.0 - p.alpha1 - p.alpha2;
  SymmetricMatrix q(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      q.set(i, j, w * p.qbar(i, j) + p.alpha1 * u_prev(i) * u_prev(j) +
                      p.alpha2 * q_prev(i, j));
    }
  }
  return {q, normalize_to_correlation(q)};
}

// Correlation path driven by a given standardized-innovation sequence.
// R_t equals the parameter matrix while the psi window fills (t <= m).
inline std::vector<CorrelationMatrix> dcc_t_path(const Matrix& u,
                                                 const DccTParams& p) {
  p.validate();
  const int T = static_cast<int>(u.rows());
  std::vector<CorrelationMatrix> path;
  path.reserve(T);
  CorrelationMatrix r_prev = p.r;
  for (int t = 0; t < T; ++t) {
    CorrelationMatrix r = p.r;
    if (t >= p.m) {
      const CorrelationMatrix psi = psi_matrix(u.middleRows(t - p.m, p.m));
      r = dcc_t_step(r_prev, psi, p);
    }
    path.push_back(r);
    r_prev = r;
  }
  return path;
}

// Q/R path with Q_1 = Qbar.
inline std::vector<CorrelationMatrix> dcc_e_path(const Matrix& u,
                                                 const DccEParams& p) {
  p.validate();
  const int T = static_cast<int>(u.rows());
  std::vector<CorrelationMatrix> path;
  path.reserve(T);
  SymmetricMatrix q = p.qbar;
  path.push_back(normalize_to_correlation(q));
  for (int t = 1; t < T; ++t) {
    const DccEStep step = dcc_e_step(q, u.row(t - 1).transpose(), p);
    q = step.q;
    path.push_back(step.r);
  }
  return path;
}

// Sample covariance over a moving window (demeaned within the window,
// divisor window - 1); output index i covers rows i .. i + window - 1.
inline std::vector<SymmetricMatrix> rolling_covariance(const Matrix& returns,
                                                       int window) {
  const int T = static_cast<int>(returns.rows());
  if (window < 2) throw InvalidParams("rolling_covariance: window < 2");
  if (window > T) {
    throw WindowTooLong("rolling_covariance: window exceeds sample size");
  }
  std::vector<SymmetricMatrix> out;
  out.reserve(T - window + 1);
  for (int start = 0; start + window <= T; ++start) {
    out.push_back(sample_covariance(returns.middleRows(start, window)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-step estimation for the baselines. Step 1 fits a univariate
// GARCH(1,1)-t per series through the joint filter's k=1 collapse; step 2
// maximizes a Gaussian quasi-likelihood for the correlation parameters on
// the standardized innovations.

struct UnivariateGarchFit {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double dof = 0.0;
  Vector sigma2;  // conditional-variance path, one entry per observation
  double nll = 0.0;
  bool converged = false;
};

inline UnivariateGarchFit fit_univariate_garch_t(
    const Vector& series, const OptimOptions& opt = {}) {
  const int T = static_cast<int>(series.size());
  if (T < 30) throw TooShort("fit_univariate_garch_t: series too short");
  const Matrix e = series;
  constexpr double cap = 1.0 - 1e-6;
  const CorrelationMatrix unit = CorrelationMatrix::identity(1);

  auto decode = [&](const Vector& x) {
    ModelParams p;
    p.k = 1;
    p.m = default_psi_window(1);
    p.rbar = unit;
    const double l1 = cap / (1.0 + std::exp(-x(1)));
    const double l2 = (cap - l1) / (1.0 + std::exp(-x(2)));
    p.lambda0 = Vector::Constant(1, std::exp(x(0)));
    p.lambda1 = Vector::Constant(1, l1);
    p.lambda2 = Vector::Constant(1, l2);
    p.theta1 = Vector::Zero(1);
    p.theta2 = Vector::Zero(1);
    p.dof = 2.0 + std::exp(x(3));
    return p;
  };

  const double var =
      (series.array() - series.mean()).square().sum() / (T - 1);
  Vector x0(4);
  x0 << std::log(0.05 * var), std::log(0.85 / (cap - 0.85)),
      std::log((0.05 / (cap - 0.85)) / (1.0 - 0.05 / (cap - 0.85))),
      std::log(8.0 - 2.0);

  const OptimResult res = minimize(
      [&](const Vector& x) {
        if (!x.allFinite()) return kPenaltyNll;
        return nll_or_penalty(decode(x), e);
      },
      x0, opt);
  if (res.f >= 0.5 * kPenaltyNll) {
    throw FilterBlowupAtOptimum("fit_univariate_garch_t: penalized optimum");
  }

  const ModelParams p = decode(res.x);
  UnivariateGarchFit fit;
  fit.lambda0 = p.lambda0(0);
  fit.lambda1 = p.lambda1(0);
  fit.lambda2 = p.lambda2(0);
  fit.dof = p.dof;
  fit.nll = res.f;
  fit.converged = res.converged;
  const FilterRun run = run_filter(p, e);
  fit.sigma2 = Vector(T);
  for (int t = 0; t < T; ++t) {
    fit.sigma2(t) = run.path.d[t](0) * run.path.d[t](0);
  }
  return fit;
}

namespace detail {

// Gaussian quasi-log-likelihood kernel sum_t (log det R_t + u_t' R_t^{-1} u_t)
// over a correlation path; the u'u constant is dropped.
inline double gaussian_ql_kernel(const std::vector<CorrelationMatrix>& path,
                                 const Matrix& u, int t_start) {
  double total = 0.0;
  for (int t = t_start; t < static_cast<int>(u.rows()); ++t) {
    Eigen::LLT<Matrix> llt(path[t].dense());
    if (llt.info() != Eigen::Success) return kPenaltyNll;
    double logdet = 0.0;
    for (int i = 0; i < path[t].dim(); ++i) {
      logdet += std::log(llt.matrixL()(i, i));
    }
    const Vector ut = u.row(t).transpose();
    total += 2.0 * logdet + ut.dot(llt.solve(ut));
    if (!std::isfinite(total)) return kPenaltyNll;
  }
  return total;
}

}  // namespace detail

struct DccTFit {
  std::vector<UnivariateGarchFit> garch;
  DccTParams params;
  Matrix u;  // standardized innovations
  bool converged = false;
};

inline DccTFit fit_dcc_t(const Matrix& e, int m = 0,
                         const OptimOptions& opt = {}) {
  const int k = static_cast<int>(e.cols());
  const int T = static_cast<int>(e.rows());
  DccTFit fit;
  fit.u = Matrix(T, k);
  for (int j = 0; j < k; ++j) {
    fit.garch.push_back(fit_univariate_garch_t(e.col(j), opt));
    fit.u.col(j) =
        e.col(j).array() / fit.garch.back().sigma2.array().sqrt();
  }
  const int window = m > 0 ? m : default_psi_window(k);
  const CorrelationMatrix rconst = sample_correlation(fit.u);
  constexpr double cap = 1.0 - 1e-6;

  auto decode = [&](const Vector& x) {
    const double l1 = cap / (1.0 + std::exp(-x(0)));
    const double l2 = (cap - l1) / (1.0 + std::exp(-x(1)));
    return DccTParams{l1, l2, rconst, window};
  };
  Vector x0(2);
  x0 << std::log(0.02 / (cap - 0.02)), 2.5;  // mild news, high persistence
  const OptimResult res = minimize(
      [&](const Vector& x) {
        if (!x.allFinite()) return kPenaltyNll;
        return detail::gaussian_ql_kernel(dcc_t_path(fit.u, decode(x)),
                                          fit.u, window);
      },
      x0, opt);
  fit.params = decode(res.x);
  fit.converged = res.converged;
  return fit;
}

struct DccEFit {
  std::vector<UnivariateGarchFit> garch;
  DccEParams params;
  Matrix u;
  bool converged = false;
};

inline DccEFit fit_dcc_e(const Matrix& e, const OptimOptions& opt = {}) {
  const int k = static_cast<int>(e.cols());
  const int T = static_cast<int>(e.rows());
  DccEFit fit;
  fit.u = Matrix(T, k);
  for (int j = 0; j < k; ++j) {
    fit.garch.push_back(fit_univariate_garch_t(e.col(j), opt));
    fit.u.col(j) =
        e.col(j).array() / fit.garch.back().sigma2.array().sqrt();
  }
  const SymmetricMatrix qbar = sample_covariance(fit.u);
  constexpr double cap = 1.0 - 1e-6;

  auto decode = [&](const Vector& x) {
    const double a1 = cap / (1.0 + std::exp(-x(0)));
    const double a2 = (cap - a1) / (1.0 + std::exp(-x(1)));
    return DccEParams{a1, a2, qbar};
  };
  Vector x0(2);
  x0 << std::log(0.02 / (cap - 0.02)), 2.5;
  const OptimResult res = minimize(
      [&](const Vector& x) {
        if (!x.allFinite()) return kPenaltyNll;
        const DccEParams p = decode(x);
        if (!(p.alpha1 + p.alpha2 > 0.0)) return kPenaltyNll;
        return detail::gaussian_ql_kernel(dcc_e_path(fit.u, p), fit.u, 1);
      },
      x0, opt);
  fit.params = decode(res.x);
  fit.converged = res.converged;
  return fit;
}

}  // namespace mgarch
