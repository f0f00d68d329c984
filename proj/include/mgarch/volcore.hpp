#pragma once

// The joint volatility filter: diagonal GARCH(1,1) variance recursion with
// optional leverage, hybrid correlation recursion driven by the local
// correlation matrix of the last m standardized innovations, multivariate
// Student-t density, and the resulting negative log-likelihood.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mgarch/errors.hpp"
#include "mgarch/matcore.hpp"

namespace mgarch {

// NLL value reported inside optimization loops when the filter blows up.
inline constexpr double kPenaltyNll = 1e15;

// Variance overflow guard.
inline constexpr double kVarianceCeiling = 1e12;

enum class LeverageMode {
  off,     // no leverage term for this asset
  free_,   // leverage coefficient estimated freely
  igarch,  // leverage coefficient tied to 1 - l1 - l2
};

// Equality-constraint groups: one label vector per coefficient family, each
// of length k (empty = every asset free). Equal labels share one free
// optimizer coordinate.
struct TieGroups {
  std::vector<int> lambda0, lambda1, lambda2, lambda3, theta1, theta2;
};

struct ModelParams {
  int k = 0;
  Vector lambda0, lambda1, lambda2;        // diagonal GARCH coefficients
  Vector lambda3;                          // leverage; size 0 when disabled
  std::vector<LeverageMode> leverage_mode; // per asset; empty when disabled
  Vector theta1, theta2;                   // size 1 (scalar) or k (diagonal)
  double dof = 8.0;
  int m = 0;                               // local-correlation window
  CorrelationMatrix rbar;                  // fixed, not estimated
  TieGroups ties;

  bool leverage() const { return lambda3.size() > 0; }
  bool scalar_theta() const { return theta1.size() == 1; }

  void validate() const {
    if (k < 1) throw InvalidParams("ModelParams: k < 1");
    if (m < 1) throw InvalidParams("ModelParams: m < 1");
    if (!(dof > 2.0)) throw InvalidParams("ModelParams: dof must exceed 2");
    if (rbar.dim() != k) throw InvalidParams("ModelParams: rbar dim mismatch");
    auto check_size = [&](const Vector& v, const char* name) {
      if (v.size() != k) {
        throw InvalidParams(std::string("ModelParams: ") + name +
                            " must have length k");
      }
    };
    check_size(lambda0, "lambda0");
    check_size(lambda1, "lambda1");
    check_size(lambda2, "lambda2");
    for (int i = 0; i < k; ++i) {
      if (lambda0(i) < 0.0 || lambda1(i) < 0.0 || lambda2(i) < 0.0) {
        throw InvalidParams("ModelParams: negative lambda entry");
      }
    }
    if (leverage()) {
      check_size(lambda3, "lambda3");
      if (static_cast<int>(leverage_mode.size()) != k) {
        throw InvalidParams("ModelParams: leverage_mode must have length k");
      }
      for (int i = 0; i < k; ++i) {
        if (lambda3(i) < 0.0) {
          throw InvalidParams("ModelParams: negative lambda3 entry");
        }
        const double total = lambda1(i) + lambda2(i) + lambda3(i);
        if (!(total > 0.0) || total > 1.0 + 1e-12) {
          throw InvalidParams(
              "ModelParams: leverage persistence must satisfy 0 < l1+l2+l3 "
              "<= 1");
        }
        if (leverage_mode[i] == LeverageMode::igarch &&
            std::abs(lambda3(i) - (1.0 - lambda1(i) - lambda2(i))) > 1e-12) {
          throw InvalidParams("ModelParams: igarch tie violated");
        }
        if (leverage_mode[i] == LeverageMode::off &&
            lambda3(i) != 0.0) {
          throw InvalidParams(
              "ModelParams: lambda3 must be zero for assets without leverage");
        }
      }
    } else {
      for (int i = 0; i < k; ++i) {
        if (!(lambda1(i) + lambda2(i) < 1.0)) {
          throw InvalidParams("ModelParams: need l1 + l2 < 1 per asset");
        }
      }
    }
    if (scalar_theta()) {
      if (theta2.size() != 1) {
        throw InvalidParams("ModelParams: theta sizes disagree");
      }
      if (theta1(0) < 0.0 || theta2(0) < 0.0 ||
          !(theta1(0) + theta2(0) < 1.0)) {
        throw InvalidParams(
            "ModelParams: need theta1, theta2 >= 0 and theta1 + theta2 < 1");
      }
    } else {
      if (theta1.size() != k || theta2.size() != k) {
        throw InvalidParams("ModelParams: diagonal theta must have length k");
      }
      for (int i = 0; i < k; ++i) {
        if (theta1(i) < 0.0 || theta2(i) < 0.0 ||
            !(theta1(i) * theta1(i) + theta2(i) * theta2(i) < 1.0)) {
          throw InvalidParams(
              "ModelParams: need theta1^2 + theta2^2 < 1 per asset");
        }
      }
    }
  }
};

inline int default_psi_window(int k) { return k + 2; }

// Local correlation matrix of a window of standardized innovations:
// uncentered cross products, exactly
//   psi_ij = sum_v u_iv u_jv / sqrt(sum_v u_iv^2 sum_v u_jv^2).
// Positive definite almost surely when the window is taller than k.
inline CorrelationMatrix psi_matrix(const Matrix& u_history) {
  const int k = static_cast<int>(u_history.cols());
  if (u_history.rows() < 1) {
    throw InvalidParams("psi_matrix: empty window");
  }
  const Matrix cross = u_history.transpose() * u_history;
  SymmetricMatrix psi(k);
  for (int i = 0; i < k; ++i) {
    if (!(cross(i, i) > 0.0)) {
      throw ZeroNormColumn("psi_matrix: column " + std::to_string(i) +
                           " has zero sum of squares");
    }
  }
  for (int i = 0; i < k; ++i) {
    psi.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) {
      double v = cross(i, j) / std::sqrt(cross(i, i) * cross(j, j));
      if (v > 1.0) v = 1.0;
      if (v < -1.0) v = -1.0;
      psi.set(i, j, v);
    }
  }
  return CorrelationMatrix(psi, false);
}

// One step of the variance recursion. A negative shock contributes
// (l2 + l3) e^2 instead of l2 e^2 when leverage is enabled.
inline Vector variance_step(const Vector& d2_prev, const Vector& e_prev,
                            const ModelParams& p) {
  Vector d2(p.k);
  const bool lev = p.leverage();
  for (int i = 0; i < p.k; ++i) {
    const double shock_sq = e_prev(i) * e_prev(i);
    double v = p.lambda0(i) + p.lambda1(i) * d2_prev(i) +
               p.lambda2(i) * shock_sq;
    if (lev && e_prev(i) < 0.0) v += p.lambda3(i) * shock_sq;
    d2(i) = v;
  }
  return d2;
}

// R_t = (1 - t1 - t2) Rbar + t1 psi_{t-1} + t2 R_{t-1}. The weights sum to
// one, so the unit diagonal is inherited; off-diagonals are clamped against
// last-ulp overshoot.
inline CorrelationMatrix correlation_step(const CorrelationMatrix& r_prev,
                                          const CorrelationMatrix& psi_prev,
                                          const ModelParams& p) {
  if (!p.scalar_theta()) {
    throw InvalidParams("correlation_step: scalar theta expected");
  }
  const double t1 = p.theta1(0);
  const double t2 = p.theta2(0);
  const double w = 1.0 - t1 - t2;
  const int k = p.k;
  SymmetricMatrix r(k);
  for (int i = 0; i < k; ++i) {
    r.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) {
      double v =
          w * p.rbar(i, j) + t1 * psi_prev(i, j) + t2 * r_prev(i, j);
      if (v > 1.0) v = 1.0;
      if (v < -1.0) v = -1.0;
      r.set(i, j, v);
    }
  }
  return CorrelationMatrix(r, false);
}

// Diagonal-theta extension:
//   R_t = (I - T1^2 - T2^2) Rbar + T1 psi_{t-1} T1 + T2 R_{t-1} T2
// with T1, T2 diagonal. The first product is asymmetric for unequal theta
// entries, so the symmetric part is taken; the diagonal is exactly one.
inline CorrelationMatrix correlation_step_diag_theta(
    const CorrelationMatrix& r_prev, const CorrelationMatrix& psi_prev,
    const Vector& theta1, const Vector& theta2,
    const CorrelationMatrix& rbar) {
  const int k = rbar.dim();
  if (theta1.size() != k || theta2.size() != k) {
    throw InvalidParams("correlation_step_diag_theta: theta length mismatch");
  }
  Vector w(k);
  for (int i = 0; i < k; ++i) {
    w(i) = 1.0 - theta1(i) * theta1(i) - theta2(i) * theta2(i);
  }
  SymmetricMatrix r(k);
  for (int i = 0; i < k; ++i) {
    r.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) {
      double v = 0.5 * (w(i) + w(j)) * rbar(i, j) +
                 theta1(i) * theta1(j) * psi_prev(i, j) +
                 theta2(i) * theta2(j) * r_prev(i, j);
      if (v > 1.0) v = 1.0;
      if (v < -1.0) v = -1.0;
      r.set(i, j, v);
    }
  }
  return CorrelationMatrix(r, false);
}

// Sigma = D R D with D = diag(d).
inline SymmetricMatrix assemble_sigma(const Vector& d,
                                      const CorrelationMatrix& r) {
  const int k = r.dim();
  if (d.size() != k) throw InvalidParams("assemble_sigma: size mismatch");
  SymmetricMatrix sigma(k);
  for (int i = 0; i < k; ++i) {
    if (!(d(i) > 0.0)) {
      throw InvalidParams("assemble_sigma: non-positive standard deviation");
    }
    for (int j = 0; j <= i; ++j) {
      sigma.set(i, j, d(i) * r(i, j) * d(j));
    }
  }
  return sigma;
}

namespace detail {

// log of the unit-component-variance multivariate Student-t density as a
// function of the quadratic form eps'eps.
inline double mvt_log_density_quad(double quad, double v, int k) {
  return std::lgamma(0.5 * (v + k)) - std::lgamma(0.5 * v) -
         0.5 * k * std::log(M_PI * (v - 2.0)) -
         0.5 * (v + k) * std::log1p(quad / (v - 2.0));
}

}  // namespace detail

// Density of the standardized innovation vector: each component has unit
// variance; the Gaussian limit is recovered as v grows.
inline double mvt_log_density(const Vector& eps, double v) {
  if (!(v > 2.0)) throw InvalidParams("mvt_log_density: need v > 2");
  return detail::mvt_log_density_quad(eps.squaredNorm(), v,
                                      static_cast<int>(eps.size()));
}

// Filter state between steps: the variance vector to use for the next
// observation, the previous correlation matrix, and the most recent
// standardized innovations (chronological, at most m rows).
struct FilterState {
  Vector d2;
  CorrelationMatrix r_prev;
  Matrix u_history;  // n x k with n <= m; n == m enables the recursion at once
};

// Data-driven default: per-asset sample variance and Rbar, empty window.
inline FilterState default_filter_state(const ModelParams& p,
                                        const Matrix& e) {
  FilterState s;
  const auto n = e.rows();
  if (n < 2) throw TooShort("default_filter_state: need T >= 2");
  const Matrix centered = e.rowwise() - e.colwise().mean();
  s.d2 = centered.colwise().squaredNorm().transpose() /
         static_cast<double>(n - 1);
  for (int i = 0; i < p.k; ++i) {
    if (!(s.d2(i) > 0.0)) {
      throw DegenerateColumn("default_filter_state: zero-variance column");
    }
  }
  s.r_prev = p.rbar;
  s.u_history = Matrix(0, p.k);
  return s;
}

struct VolatilityPath {
  std::vector<Vector> d;                 // conditional standard deviations
  std::vector<CorrelationMatrix> r;
  std::vector<SymmetricMatrix> sigma;
  int size() const { return static_cast<int>(d.size()); }
};

struct FilterRun {
  VolatilityPath path;
  FilterState final_state;
  double nll = 0.0;
  int t0 = 1;  // 1-based index of the first likelihood term
};

namespace detail {

struct FilterOutcome {
  FilterRun run;
  bool ok = true;
  std::string reason;
};

inline FilterOutcome filter_impl(const ModelParams& p, const Matrix& e,
                                 const FilterState* init, bool want_path) {
  const int T = static_cast<int>(e.rows());
  const int k = static_cast<int>(e.cols());
  FilterOutcome out;

  FilterState state = init ? *init : default_filter_state(p, e);
  Vector d2 = state.d2;
  Matrix r_prev = state.r_prev.dense();
  const Matrix rbar = p.rbar.dense();

  Matrix ubuf = Matrix::Zero(p.m, k);
  int ucount = 0;
  int upos = 0;
  if (state.u_history.rows() > 0) {
    const int n = std::min<int>(static_cast<int>(state.u_history.rows()), p.m);
    // keep the most recent n rows
    ubuf.topRows(n) =
        state.u_history.bottomRows(n);
    ucount = n;
    upos = n % p.m;
  }

  const int t0 = (ucount >= p.m) ? 1 : p.m + 1;
  out.run.t0 = t0;
  if (t0 > T) {
    throw TooShort("filter: need more observations than the psi window");
  }

  auto fail = [&](const std::string& why) {
    out.ok = false;
    out.reason = why;
    return out;
  };

  double loglik = 0.0;
  Vector d(k), u(k);
  for (int t = 0; t < T; ++t) {
    if (t > 0) d2 = variance_step(d2, e.row(t - 1).transpose(), p);
    for (int i = 0; i < k; ++i) {
      if (!(d2(i) > 0.0) || !(d2(i) <= kVarianceCeiling)) {
        return fail("variance out of range at t=" + std::to_string(t + 1));
      }
    }

    Matrix r;
    if (ucount >= p.m) {
      CorrelationMatrix psi;
      try {
        psi = psi_matrix(ubuf);
      } catch (const ZeroNormColumn&) {
        return fail("degenerate psi window at t=" + std::to_string(t + 1));
      }
      const CorrelationMatrix rp(SymmetricMatrix::from_dense(r_prev), false);
      const CorrelationMatrix rt =
          p.scalar_theta()
              ? correlation_step(rp, psi, p)
              : correlation_step_diag_theta(rp, psi, p.theta1, p.theta2,
                                            p.rbar);
      r = rt.dense();
    } else {
      r = rbar;
    }

    d = d2.cwiseSqrt();
    u = e.row(t).transpose().cwiseQuotient(d);

    if (t + 1 >= t0) {
      Eigen::LLT<Matrix> llt(r);
      if (llt.info() != Eigen::Success) {
        return fail("correlation matrix not positive definite at t=" +
                    std::to_string(t + 1));
      }
      double logdet_r = 0.0;
      for (int i = 0; i < k; ++i) {
        logdet_r += std::log(llt.matrixL()(i, i));
      }
      logdet_r *= 2.0;
      const double quad = u.dot(llt.solve(u));
      const double logdet_sigma = logdet_r + d2.array().log().sum();
      const double term =
          mvt_log_density_quad(quad, p.dof, k) - 0.5 * logdet_sigma;
      if (!std::isfinite(term)) {
        return fail("non-finite likelihood term at t=" + std::to_string(t + 1));
      }
      loglik += term;
    }

    if (want_path) {
      const CorrelationMatrix rt(SymmetricMatrix::from_dense(r), false);
      out.run.path.d.push_back(d);
      out.run.path.sigma.push_back(assemble_sigma(d, rt));
      out.run.path.r.push_back(rt);
    }

    ubuf.row(upos) = u.transpose();
    upos = (upos + 1) % p.m;
    if (ucount < p.m) ++ucount;
    r_prev = r;
  }

  out.run.nll = -loglik;
  out.run.final_state.d2 =
      variance_step(d2, e.row(T - 1).transpose(), p);
  out.run.final_state.r_prev =
      CorrelationMatrix(SymmetricMatrix::from_dense(r_prev), false);
  // chronological order of the ring
  Matrix hist(ucount, k);
  for (int i = 0; i < ucount; ++i) {
    const int idx = (ucount >= p.m) ? (upos + i) % p.m : i;
    hist.row(i) = ubuf.row(idx);
  }
  out.run.final_state.u_history = hist;
  return out;
}

}  // namespace detail

// Full filter pass returning the volatility path; throws FilterBlowup when
// a variance overflows or a correlation matrix loses positive definiteness.
inline FilterRun run_filter(const ModelParams& p, const Matrix& e,
                            const FilterState* init = nullptr) {
  p.validate();
  auto out = detail::filter_impl(p, e, init, true);
  if (!out.ok) throw FilterBlowup("run_filter: " + out.reason);
  return out.run;
}

// -sum_t [ log f(Sigma_t^{-1/2} e_t) - 0.5 log det Sigma_t ] over the
// post-burn-in span; deterministic in (params, e, init).
inline double negative_log_likelihood(const ModelParams& p, const Matrix& e,
                                      const FilterState* init = nullptr) {
  p.validate();
  auto out = detail::filter_impl(p, e, init, false);
  if (!out.ok) throw FilterBlowup("negative_log_likelihood: " + out.reason);
  return out.run.nll;
}

// Optimization-facing variant: blowups become a large finite penalty.
inline double nll_or_penalty(const ModelParams& p, const Matrix& e,
                             const FilterState* init = nullptr) {
  auto out = detail::filter_impl(p, e, init, false);
  return out.ok ? out.run.nll : kPenaltyNll;
}

// eps_t = sym_inv_sqrt(Sigma_t) e_t, row per observation.
inline Matrix standardized_residuals(const VolatilityPath& path,
                                     const Matrix& e) {
  const int T = static_cast<int>(e.rows());
  if (path.size() != T) {
    throw InvalidParams("standardized_residuals: path/data length mismatch");
  }
  Matrix out(T, e.cols());
  for (int t = 0; t < T; ++t) {
    const SymmetricMatrix inv_root = sym_inv_sqrt(path.sigma[t]);
    out.row(t) = (inv_root.dense() * e.row(t).transpose()).transpose();
  }
  return out;
}

}  // namespace mgarch
