#pragma once

// Small statistical helpers shared across modules: chi-square tail
// probabilities, moment statistics, and the univariate Ljung-Box test.

#include <boost/math/distributions/chi_squared.hpp>
#include <Eigen/Dense>
#include <cmath>

#include "mgarch/errors.hpp"

namespace mgarch {

inline double chi_square_pvalue(double statistic, double df) {
  if (df <= 0.0) return statistic <= 0.0 ? 1.0 : 0.0;
  if (statistic <= 0.0) return 1.0;
  const boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

inline double chi_square_quantile(double p, double df) {
  const boost::math::chi_squared dist(df);
  return boost::math::quantile(dist, p);
}

// Plain moment estimators with divisor n: m3/m2^{3/2} and m4/m2^2 - 3.
struct MomentStats {
  double mean = 0.0;
  double sample_sd = 0.0;  // divisor n-1
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline MomentStats moment_stats(const Eigen::VectorXd& x) {
  const auto n = x.size();
  if (n < 2) throw TooShort("moment_stats: need at least two observations");
  MomentStats s;
  s.mean = x.mean();
  s.min = x.minCoeff();
  s.max = x.maxCoeff();
  const Eigen::VectorXd d = x.array() - s.mean;
  const double m2 = d.squaredNorm() / static_cast<double>(n);
  if (!(m2 > 0.0)) {
    throw DegenerateColumn("moment_stats: zero variance");
  }
  const double m3 = d.array().pow(3).sum() / static_cast<double>(n);
  const double m4 = d.array().pow(4).sum() / static_cast<double>(n);
  s.sample_sd = std::sqrt(d.squaredNorm() / static_cast<double>(n - 1));
  s.skewness = m3 / std::pow(m2, 1.5);
  s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return s;
}

struct LjungBoxResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Q(h) = T(T+2) sum_{l=1..h} rho_l^2/(T-l) with chi-square(h) p-value.
inline LjungBoxResult ljung_box(const Eigen::VectorXd& x, int h) {
  const auto n = x.size();
  if (n <= h) throw TooShort("ljung_box: series shorter than lag count");
  const Eigen::VectorXd d = x.array() - x.mean();
  const double denom = d.squaredNorm();
  if (!(denom > 0.0)) throw DegenerateColumn("ljung_box: zero variance");
  double q = 0.0;
  for (int lag = 1; lag <= h; ++lag) {
    double acov = 0.0;
    for (Eigen::Index t = lag; t < n; ++t) acov += d(t) * d(t - lag);
    const double rho = acov / denom;
    q += rho * rho / static_cast<double>(n - lag);
  }
  q *= static_cast<double>(n) * (static_cast<double>(n) + 2.0);
  return {q, chi_square_pvalue(q, h)};
}

}  // namespace mgarch
