#pragma once

// Joint constrained maximum likelihood for the multivariate volatility
// model: a smooth bijection between free optimizer coordinates and valid
// parameters (non-negativity via exp, simplex constraints via logistic
// stick-breaking, equality ties sharing one coordinate), quasi-Newton
// fitting, inverse-Hessian standard errors, and likelihood-ratio tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mgarch/errors.hpp"
#include "mgarch/matcore.hpp"
#include "mgarch/optim.hpp"
#include "mgarch/stats.hpp"
#include "mgarch/volcore.hpp"

namespace mgarch {

// Estimation-facing model configuration; binds to data at fit time.
struct ModelSpec {
  std::vector<LeverageMode> leverage;  // empty = leverage disabled
  TieGroups ties;                      // empty label vector = all entries free
  bool diagonal_theta = false;
  bool no_dynamics = false;        // freeze lambda1 = lambda2 = 0
  bool static_correlation = false; // freeze theta1 = theta2 = 0
  int m = 0;            // psi window; 0 = k + 2
  double fixed_dof = 0.0;  // > 2 pins the degrees of freedom; 0 = estimated
  OptimOptions optim;
};

namespace detail {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Shares that sit on 0 or 1 up to rounding are nudged inside; a boundary
// coordinate pushed past ~37 makes the logistic round to exactly 1.
inline double logit(double y) {
  if (!(y > -1e-12 && y < 1.0 + 1e-9)) {
    throw InvalidParams("logit: argument outside (0, 1)");
  }
  y = std::min(std::max(y, 1e-300), 1.0 - 1e-16);
  return std::log(y / (1.0 - y));
}

// soft open boundary for the simplex-type constraints
inline constexpr double kSimplexCap = 1.0 - 1e-6;

// Distinct groups of a label vector in order of first appearance; an empty
// label vector means one singleton group per asset.
inline std::vector<std::vector<int>> groups_of(const std::vector<int>& labels,
                                               int k) {
  std::vector<std::vector<int>> groups;
  if (labels.empty()) {
    for (int i = 0; i < k; ++i) groups.push_back({i});
    return groups;
  }
  if (static_cast<int>(labels.size()) != k) {
    throw InvalidParams("tie labels must have one entry per asset");
  }
  std::map<int, int> index_of;
  for (int i = 0; i < k; ++i) {
    auto it = index_of.find(labels[i]);
    if (it == index_of.end()) {
      index_of.emplace(labels[i], static_cast<int>(groups.size()));
      groups.push_back({i});
    } else {
      groups[it->second].push_back(i);
    }
  }
  return groups;
}

inline std::string group_name(const std::string& family,
                              const std::vector<int>& members) {
  std::string out = family + "[";
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(members[i] + 1);
  }
  return out + "]";
}

}  // namespace detail

// Bijection metadata between the free optimizer coordinates and ModelParams.
// Tied groups share one coordinate; igarch-substituted leverage entries
// contribute none. Decoded parameters satisfy every ModelParams invariant by
// construction.
class ParamMapping {
 public:
  ParamMapping(const ModelSpec& spec, int k, int m,
               const CorrelationMatrix& rbar)
      : spec_(spec), k_(k), m_(m), rbar_(rbar) {
    if (!spec_.leverage.empty() &&
        static_cast<int>(spec_.leverage.size()) != k_) {
      throw InvalidParams("ModelSpec: leverage modes must match k");
    }
    if (spec_.no_dynamics && leverage_enabled()) {
      throw InvalidParams(
          "ModelSpec: leverage requires the variance dynamics");
    }
    lambda0_groups_ = detail::groups_of(spec_.ties.lambda0, k_);
    if (!spec_.no_dynamics) {
      lambda1_groups_ = detail::groups_of(spec_.ties.lambda1, k_);
      lambda2_groups_ = detail::groups_of(spec_.ties.lambda2, k_);
    }
    if (leverage_enabled()) {
      // only freely estimated leverage entries get coordinates
      for (const auto& g : detail::groups_of(spec_.ties.lambda3, k_)) {
        std::vector<int> free_members;
        for (int i : g) {
          if (spec_.leverage[i] == LeverageMode::free_) {
            free_members.push_back(i);
          }
        }
        if (!free_members.empty()) lambda3_groups_.push_back(free_members);
      }
    }
    if (spec_.diagonal_theta && !spec_.static_correlation) {
      theta1_groups_ = detail::groups_of(spec_.ties.theta1, k_);
      theta2_groups_ = detail::groups_of(spec_.ties.theta2, k_);
    }

    for (const auto& g : lambda0_groups_) {
      names_.push_back(detail::group_name("lambda0", g));
    }
    for (const auto& g : lambda1_groups_) {
      names_.push_back(detail::group_name("lambda1", g));
    }
    for (const auto& g : lambda2_groups_) {
      names_.push_back(detail::group_name("lambda2", g));
    }
    for (const auto& g : lambda3_groups_) {
      names_.push_back(detail::group_name("lambda3", g));
    }
    if (!spec_.static_correlation) {
      if (spec_.diagonal_theta) {
        for (const auto& g : theta1_groups_) {
          names_.push_back(detail::group_name("theta1", g));
        }
        for (const auto& g : theta2_groups_) {
          names_.push_back(detail::group_name("theta2", g));
        }
      } else {
        names_.push_back("theta1");
        names_.push_back("theta2");
      }
    }
    if (dof_free()) names_.push_back("dof");
  }

  bool leverage_enabled() const { return !spec_.leverage.empty(); }
  bool dof_free() const { return spec_.fixed_dof == 0.0; }
  int free_dim() const { return static_cast<int>(names_.size()); }
  int free_dim_dynamics() const { return free_dim() - (dof_free() ? 1 : 0); }
  const std::vector<std::string>& names() const { return names_; }
  int k() const { return k_; }
  int m() const { return m_; }

  ModelParams decode(const Vector& free) const {
    if (free.size() != free_dim()) {
      throw InvalidParams("decode: wrong number of free coordinates");
    }
    if (!free.allFinite()) {
      throw InvalidParams("decode: non-finite coordinate");
    }
    using detail::kSimplexCap;
    using detail::logistic;

    ModelParams p;
    p.k = k_;
    p.m = m_;
    p.rbar = rbar_;
    p.ties = spec_.ties;
    p.lambda0 = Vector::Zero(k_);
    p.lambda1 = Vector::Zero(k_);
    p.lambda2 = Vector::Zero(k_);

    int pos = 0;
    for (const auto& g : lambda0_groups_) {
      const double v = std::exp(free(pos++));
      for (int i : g) p.lambda0(i) = v;
    }
    for (const auto& g : lambda1_groups_) {
      const double share = logistic(free(pos++));
      for (int i : g) p.lambda1(i) = kSimplexCap * share;
    }
    for (const auto& g : lambda2_groups_) {
      const double share = logistic(free(pos++));
      for (int i : g) p.lambda2(i) = (kSimplexCap - p.lambda1(i)) * share;
    }
    if (leverage_enabled()) {
      p.lambda3 = Vector::Zero(k_);
      p.leverage_mode = spec_.leverage;
      for (const auto& g : lambda3_groups_) {
        const double share = logistic(free(pos++));
        for (int i : g) {
          p.lambda3(i) =
              (kSimplexCap - p.lambda1(i) - p.lambda2(i)) * share;
        }
      }
      for (int i = 0; i < k_; ++i) {
        if (spec_.leverage[i] == LeverageMode::igarch) {
          p.lambda3(i) = 1.0 - p.lambda1(i) - p.lambda2(i);
        }
      }
    }
    if (spec_.static_correlation) {
      p.theta1 = Vector::Zero(1);
      p.theta2 = Vector::Zero(1);
    } else if (spec_.diagonal_theta) {
      p.theta1 = Vector::Zero(k_);
      p.theta2 = Vector::Zero(k_);
      Vector t1sq = Vector::Zero(k_);
      for (const auto& g : theta1_groups_) {
        const double share = logistic(free(pos++));
        for (int i : g) {
          t1sq(i) = kSimplexCap * share;
          p.theta1(i) = std::sqrt(t1sq(i));
        }
      }
      for (const auto& g : theta2_groups_) {
        const double share = logistic(free(pos++));
        for (int i : g) {
          p.theta2(i) = std::sqrt((kSimplexCap - t1sq(i)) * share);
        }
      }
    } else {
      const double t1 = kSimplexCap * logistic(free(pos++));
      const double t2 = (kSimplexCap - t1) * logistic(free(pos++));
      p.theta1 = Vector::Constant(1, t1);
      p.theta2 = Vector::Constant(1, t2);
    }
    p.dof = dof_free() ? 2.0 + std::exp(free(pos++)) : spec_.fixed_dof;
    return p;
  }

  Vector encode(const ModelParams& p) const {
    using detail::kSimplexCap;
    using detail::logit;
    Vector free(free_dim());
    int pos = 0;
    for (const auto& g : lambda0_groups_) {
      if (!(p.lambda0(g[0]) > 0.0)) {
        throw InvalidParams("encode: lambda0 must be strictly positive");
      }
      free(pos++) = std::log(p.lambda0(g[0]));
    }
    for (const auto& g : lambda1_groups_) {
      free(pos++) = logit(p.lambda1(g[0]) / kSimplexCap);
    }
    for (const auto& g : lambda2_groups_) {
      const int i = g[0];
      free(pos++) = logit(p.lambda2(i) / (kSimplexCap - p.lambda1(i)));
    }
    for (const auto& g : lambda3_groups_) {
      const int i = g[0];
      free(pos++) = logit(p.lambda3(i) /
                          (kSimplexCap - p.lambda1(i) - p.lambda2(i)));
    }
    if (!spec_.static_correlation) {
      if (spec_.diagonal_theta) {
        for (const auto& g : theta1_groups_) {
          const int i = g[0];
          free(pos++) = logit(p.theta1(i) * p.theta1(i) / kSimplexCap);
        }
        for (const auto& g : theta2_groups_) {
          const int i = g[0];
          const double t1sq = p.theta1(i) * p.theta1(i);
          free(pos++) =
              logit(p.theta2(i) * p.theta2(i) / (kSimplexCap - t1sq));
        }
      } else {
        free(pos++) = logit(p.theta1(0) / kSimplexCap);
        free(pos++) = logit(p.theta2(0) / (kSimplexCap - p.theta1(0)));
      }
    }
    if (dof_free()) {
      if (!(p.dof > 2.0)) throw InvalidParams("encode: dof must exceed 2");
      free(pos++) = std::log(p.dof - 2.0);
    }
    return free;
  }

  // One representative model-space value per free coordinate (the group's
  // first member); the reporting scale for standard errors.
  Vector model_values(const ModelParams& p) const {
    Vector out(free_dim());
    int pos = 0;
    for (const auto& g : lambda0_groups_) out(pos++) = p.lambda0(g[0]);
    for (const auto& g : lambda1_groups_) out(pos++) = p.lambda1(g[0]);
    for (const auto& g : lambda2_groups_) out(pos++) = p.lambda2(g[0]);
    for (const auto& g : lambda3_groups_) out(pos++) = p.lambda3(g[0]);
    if (!spec_.static_correlation) {
      if (spec_.diagonal_theta) {
        for (const auto& g : theta1_groups_) out(pos++) = p.theta1(g[0]);
        for (const auto& g : theta2_groups_) out(pos++) = p.theta2(g[0]);
      } else {
        out(pos++) = p.theta1(0);
        out(pos++) = p.theta2(0);
      }
    }
    if (dof_free()) out(pos++) = p.dof;
    return out;
  }

  // Group index (into names/estimates) of each per-asset entry, or -1 when
  // the entry carries no coordinate (igarch substitution, disabled leverage).
  std::vector<int> coordinate_of_family(const std::string& family) const {
    std::vector<int> out(k_, -1);
    int base = 0;
    auto scan = [&](const std::vector<std::vector<int>>& groups) {
      for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int i : groups[g]) out[i] = base + static_cast<int>(g);
      }
      base += static_cast<int>(groups.size());
    };
    if (family == "lambda0") {
      scan(lambda0_groups_);
      return out;
    }
    base += static_cast<int>(lambda0_groups_.size());
    if (family == "lambda1") {
      scan(lambda1_groups_);
      return out;
    }
    base += static_cast<int>(lambda1_groups_.size());
    if (family == "lambda2") {
      scan(lambda2_groups_);
      return out;
    }
    base += static_cast<int>(lambda2_groups_.size());
    if (family == "lambda3") {
      scan(lambda3_groups_);
      return out;
    }
    throw InvalidParams("coordinate_of_family: unknown family " + family);
  }

 private:
  ModelSpec spec_;
  int k_;
  int m_;
  CorrelationMatrix rbar_;
  std::vector<std::vector<int>> lambda0_groups_, lambda1_groups_,
      lambda2_groups_, lambda3_groups_, theta1_groups_, theta2_groups_;
  std::vector<std::string> names_;
};

struct FitResult {
  ModelParams params;
  ModelSpec spec;
  std::vector<std::string> param_names;  // one per free coordinate
  Vector estimates;                      // model-space values per coordinate
  Vector std_errors;                     // same order; empty when withheld
  bool se_available = false;
  double lmax = 0.0;
  int n_iterations = 0;
  bool converged = false;
  Matrix residuals_std;
  int n_free = 0;
  int n_free_dynamics = 0;
  int T = 0;
  int m = 0;
  int t0 = 0;
  std::vector<std::string> warnings;
};

// Default start per asset: lambda0 = 0.05 * sample variance, lambda1 = 0.85,
// lambda2 = 0.05, lambda3 = 0.02 when freely estimated; theta = (0.02, 0.90);
// dof 8. Deep interior and GARCH-typical.
inline ModelParams default_start(const ParamMapping& mapping,
                                 const ModelSpec& spec, const Matrix& e,
                                 const CorrelationMatrix& rbar) {
  const int k = static_cast<int>(e.cols());
  ModelParams p;
  p.k = k;
  p.m = mapping.m();
  p.rbar = rbar;
  p.ties = spec.ties;
  const Matrix centered = e.rowwise() - e.colwise().mean();
  const Vector var = centered.colwise().squaredNorm().transpose() /
                     static_cast<double>(e.rows() - 1);
  if (spec.no_dynamics) {
    // constant variance: lambda0 is the whole story
    p.lambda0 = var;
    p.lambda1 = Vector::Zero(k);
    p.lambda2 = Vector::Zero(k);
  } else {
    p.lambda0 = 0.05 * var;
    p.lambda1 = Vector::Constant(k, 0.85);
    p.lambda2 = Vector::Constant(k, 0.05);
  }
  if (!spec.leverage.empty()) {
    p.leverage_mode = spec.leverage;
    p.lambda3 = Vector::Zero(k);
    for (int i = 0; i < k; ++i) {
      if (spec.leverage[i] == LeverageMode::free_) {
        p.lambda3(i) = 0.02;
      } else if (spec.leverage[i] == LeverageMode::igarch) {
        p.lambda3(i) = 1.0 - p.lambda1(i) - p.lambda2(i);
      }
    }
  }
  if (spec.static_correlation) {
    p.theta1 = Vector::Zero(1);
    p.theta2 = Vector::Zero(1);
  } else if (spec.diagonal_theta) {
    p.theta1 = Vector::Constant(k, std::sqrt(0.02));
    p.theta2 = Vector::Constant(k, std::sqrt(0.90));
  } else {
    p.theta1 = Vector::Constant(1, 0.02);
    p.theta2 = Vector::Constant(1, 0.90);
  }
  p.dof = spec.fixed_dof > 0.0 ? spec.fixed_dof : 8.0;
  // canonicalize ties: every group member takes the first member's value
  return mapping.decode(mapping.encode(p));
}

namespace detail {

inline Objective make_objective(const ParamMapping& mapping, const Matrix& e) {
  return [&mapping, &e](const Vector& x) -> double {
    try {
      return nll_or_penalty(mapping.decode(x), e);
    } catch (const InvalidParams&) {
      return kPenaltyNll;
    }
  };
}

}  // namespace detail

// Asymptotic standard errors: central-difference Hessian of the NLL in the
// free coordinates, mapped to model scale by the delta method through the
// decode Jacobian. Throws HessianNotPD near boundaries, where the curvature
// estimate is unreliable.
inline Vector std_errors_at(const ParamMapping& mapping, const Vector& x,
                            const Matrix& e) {
  const int n = mapping.free_dim();
  const Objective f = detail::make_objective(mapping, e);

  Vector h(n);
  for (int i = 0; i < n; ++i) h(i) = 1e-4 * std::max(1.0, std::abs(x(i)));

  const double f0 = f(x);
  Matrix hess(n, n);
  Vector xp = x;
  for (int i = 0; i < n; ++i) {
    xp(i) = x(i) + h(i);
    const double fp = f(xp);
    xp(i) = x(i) - h(i);
    const double fm = f(xp);
    xp(i) = x(i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      Vector xx = x;
      xx(i) = x(i) + h(i);
      xx(j) = x(j) + h(j);
      const double fpp = f(xx);
      xx(j) = x(j) - h(j);
      const double fpm = f(xx);
      xx(i) = x(i) - h(i);
      const double fmm = f(xx);
      xx(j) = x(j) + h(j);
      const double fmp = f(xx);
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(hess);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw HessianNotPD("std_errors: Hessian is not positive definite");
  }
  const Matrix h_inv = es.eigenvectors() *
                       es.eigenvalues().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();

  // Jacobian of the model-space values with respect to the free coordinates
  Matrix jac(n, n);
  for (int j = 0; j < n; ++j) {
    Vector xu = x, xd = x;
    xu(j) = x(j) + h(j);
    xd(j) = x(j) - h(j);
    const Vector up = mapping.model_values(mapping.decode(xu));
    const Vector dn = mapping.model_values(mapping.decode(xd));
    jac.col(j) = (up - dn) / (2.0 * h(j));
  }

  const Matrix cov = jac * h_inv * jac.transpose();
  Vector se(n);
  for (int i = 0; i < n; ++i) {
    if (!(cov(i, i) >= 0.0)) {
      throw HessianNotPD("std_errors: negative variance after delta method");
    }
    se(i) = std::sqrt(cov(i, i));
  }
  return se;
}

inline Vector std_errors(const ParamMapping& mapping, const ModelParams& at,
                         const Matrix& e) {
  return std_errors_at(mapping, mapping.encode(at), e);
}

// Joint constrained fit. The start point is deterministic unless an
// explicit warm start is given (used for nested refits and multi-start).
inline FitResult fit(const ModelSpec& spec, const Matrix& e,
                     const ModelParams* warm_start = nullptr) {
  const int k = static_cast<int>(e.cols());
  const int T = static_cast<int>(e.rows());
  if (k < 1 || T < 3) throw TooShort("fit: degenerate input panel");
  const CorrelationMatrix rbar = sample_correlation(e);
  const int m = spec.m > 0 ? spec.m : default_psi_window(k);
  if (spec.fixed_dof != 0.0 && !(spec.fixed_dof > 2.0)) {
    throw InvalidParams("fit: fixed dof must exceed 2");
  }
  const ParamMapping mapping(spec, k, m, rbar);

  FitResult result;
  result.spec = spec;
  result.param_names = mapping.names();
  result.n_free = mapping.free_dim();
  result.n_free_dynamics = mapping.free_dim_dynamics();
  result.T = T;
  result.m = m;
  if (T < 10 * mapping.free_dim()) {
    result.warnings.push_back(
        "sample size below ten observations per free parameter");
  }

  const ModelParams start =
      warm_start ? *warm_start : default_start(mapping, spec, e, rbar);
  const Vector x0 = mapping.encode(start);
  const Objective objective = detail::make_objective(mapping, e);
  const OptimResult opt = minimize(objective, x0, spec.optim);

  if (opt.f >= 0.5 * kPenaltyNll) {
    throw FilterBlowupAtOptimum("fit: optimizer stopped on a penalized "
                                "filter blowup");
  }

  result.params = mapping.decode(opt.x);
  result.params.validate();
  result.converged = opt.converged;
  result.n_iterations = opt.iterations;
  if (!opt.converged) {
    result.warnings.push_back("optimizer hit the iteration limit before "
                              "meeting the convergence tolerances");
  }
  result.lmax = -negative_log_likelihood(result.params, e);
  result.t0 = m + 1;
  result.estimates = mapping.model_values(result.params);

  const FilterRun run = run_filter(result.params, e);
  result.residuals_std = standardized_residuals(run.path, e);

  try {
    result.std_errors = std_errors_at(mapping, opt.x, e);
    result.se_available = true;
  } catch (const HessianNotPD& err) {
    result.se_available = false;
    result.warnings.push_back(std::string("standard errors withheld: ") +
                              err.what());
  }
  return result;
}

struct LrTestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// statistic = 2 (Lmax_full - Lmax_restricted), clamped at zero, with
// degrees of freedom equal to the free-dimension difference.
inline LrTestResult lr_test(const FitResult& full,
                            const FitResult& restricted) {
  if (full.T != restricted.T || full.m != restricted.m ||
      full.t0 != restricted.t0) {
    throw NotNested("lr_test: fits use different data spans or burn-in");
  }
  const int df = full.n_free - restricted.n_free;
  if (df < 0) {
    throw NotNested("lr_test: restricted model has more free parameters");
  }
  LrTestResult out;
  out.df = df;
  out.statistic = std::max(0.0, 2.0 * (full.lmax - restricted.lmax));
  out.p_value = chi_square_pvalue(out.statistic, df);
  return out;
}

}  // namespace mgarch
