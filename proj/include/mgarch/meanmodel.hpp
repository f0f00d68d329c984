#pragma once

// Conditional-mean removal (VAR(p) by least squares) and the multivariate
// Ljung-Box portmanteau statistic.

#include <Eigen/Dense>
#include <vector>

#include "mgarch/data.hpp"
#include "mgarch/errors.hpp"
#include "mgarch/stats.hpp"

namespace mgarch {

struct VarModel {
  int p = 0;
  Vector phi0;               // intercept, k
  std::vector<Matrix> phi;   // p coefficient matrices, k x k
  Matrix residuals;          // (T - p) x k
};

// Equation-by-equation OLS on lagged regressors with intercept. p = 0
// reduces to subtraction of the sample mean.
inline VarModel fit_var(const Matrix& values, int p) {
  const int t_total = static_cast<int>(values.rows());
  const int k = static_cast<int>(values.cols());
  if (p < 0) throw InvalidParams("fit_var: negative order");
  if (t_total <= k * p + 1) {
    throw SingularDesign("fit_var: need T > k*p + 1");
  }

  VarModel model;
  model.p = p;
  if (p == 0) {
    model.phi0 = values.colwise().mean();
    model.residuals = values.rowwise() - values.colwise().mean();
    return model;
  }

  const int n = t_total - p;
  const int ncols = 1 + k * p;
  Matrix x(n, ncols);
  Matrix y(n, k);
  for (int t = 0; t < n; ++t) {
    x(t, 0) = 1.0;
    for (int lag = 1; lag <= p; ++lag) {
      x.block(t, 1 + (lag - 1) * k, 1, k) = values.row(t + p - lag);
    }
    y.row(t) = values.row(t + p);
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (qr.rank() < ncols) {
    throw SingularDesign("fit_var: rank-deficient regressor matrix");
  }
  const Matrix beta = qr.solve(y);  // ncols x k

  model.phi0 = beta.row(0).transpose();
  for (int lag = 1; lag <= p; ++lag) {
    model.phi.push_back(beta.middleRows(1 + (lag - 1) * k, k).transpose());
  }
  model.residuals = y - x * beta;
  return model;
}

inline VarModel fit_var(const ReturnPanel& panel, int p) {
  return fit_var(panel.values, p);
}

struct PortmanteauResult {
  int lag = 0;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Hosking trace form:
//   Q(m) = T^2 sum_{l=1..m} (T-l)^{-1} tr(G_l' G_0^{-1} G_l G_0^{-1}),
// with G_l the lag-l sample autocovariance of the (internally demeaned)
// series. Degrees of freedom are k^2*m minus an optional adjustment for
// fitted mean parameters.
inline PortmanteauResult multivariate_ljung_box(const Matrix& series, int m,
                                                int df_adjust = 0) {
  const int t_total = static_cast<int>(series.rows());
  const int k = static_cast<int>(series.cols());
  if (m < 1) throw InvalidParams("multivariate_ljung_box: need m >= 1");
  if (t_total <= m) {
    throw TooShort("multivariate_ljung_box: need T > m");
  }

  const Matrix x = series.rowwise() - series.colwise().mean();
  const Matrix gamma0 = x.transpose() * x / static_cast<double>(t_total);
  Eigen::FullPivLU<Matrix> lu(gamma0);
  if (!lu.isInvertible()) {
    throw SingularGamma0("multivariate_ljung_box: singular lag-0 covariance");
  }
  const Matrix g0inv = lu.inverse();

  double q = 0.0;
  for (int lag = 1; lag <= m; ++lag) {
    const Matrix gl = x.bottomRows(t_total - lag).transpose() *
                      x.topRows(t_total - lag) /
                      static_cast<double>(t_total);
    const Matrix inner = gl.transpose() * g0inv * gl * g0inv;
    q += inner.trace() / static_cast<double>(t_total - lag);
  }
  q *= static_cast<double>(t_total) * static_cast<double>(t_total);

  PortmanteauResult res;
  res.lag = m;
  res.statistic = q;
  res.df = k * k * m - df_adjust;
  if (res.df < 1) throw InvalidParams("multivariate_ljung_box: df < 1");
  res.p_value = chi_square_pvalue(q, res.df);
  return res;
}

// AIC over p = 0..p_max: log det of the residual covariance plus the
// parameter penalty 2*p*k^2/T.
inline int select_var_order(const Matrix& values, int p_max) {
  const int t_total = static_cast<int>(values.rows());
  const int k = static_cast<int>(values.cols());
  int best_p = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= p_max; ++p) {
    if (t_total <= k * p + 1) break;
    const VarModel m = fit_var(values, p);
    const int n = static_cast<int>(m.residuals.rows());
    const Matrix cov = m.residuals.transpose() * m.residuals /
                       static_cast<double>(n);
    const double ld = std::log(cov.determinant());
    if (!std::isfinite(ld)) continue;
    const double aic =
        ld + 2.0 * static_cast<double>(p) * k * k / static_cast<double>(t_total);
    if (aic < best_aic) {
      best_aic = aic;
      best_p = p;
    }
  }
  return best_p;
}

}  // namespace mgarch
