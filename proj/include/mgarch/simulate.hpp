#pragma once

// Synthetic panel generation from the supported volatility models. The
// simulator shares the filter's step functions so that re-running the filter
// on emitted innovations reproduces the generated paths.

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "mgarch/baselines.hpp"
#include "mgarch/data.hpp"
#include "mgarch/errors.hpp"
#include "mgarch/matcore.hpp"
#include "mgarch/volcore.hpp"

namespace mgarch {

enum class ModelKind {
  proposed,  // correlation recursion around the fixed rbar
  dcc_t,     // identical algebra; theta1/theta2 read as lambda1/lambda2
  dcc_e,     // Q recursion with rbar read as Qbar, thetas as alpha1/alpha2
};

struct SimulationConfig {
  ModelKind kind = ModelKind::proposed;
  ModelParams params;
  int T = 0;
  int burn_in = 500;
  std::uint64_t seed = 0;
  // optional VAR mean applied on top of the innovations
  Vector phi0;               // size 0 = no intercept
  std::vector<Matrix> phi;   // lag coefficient matrices

  void validate() const {
    params.validate();
    if (T < 1) throw InvalidParams("SimulationConfig: T < 1");
    if (burn_in < params.m) {
      throw InvalidParams("SimulationConfig: burn_in must be >= m");
    }
  }
};

// Unit-component-variance multivariate Student-t draw:
// z ~ N(0, I_k), w ~ chi2(v)/v, return z * sqrt((v-2)/v) / sqrt(w).
inline Vector sample_mvt(double v, int k, std::mt19937_64& rng) {
  if (!(v > 2.0)) throw InvalidParams("sample_mvt: need v > 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::gamma_distribution<double> chi2(0.5 * v, 2.0);
  Vector z(k);
  for (int i = 0; i < k; ++i) z(i) = gauss(rng);
  const double w = chi2(rng) / v;
  return z * std::sqrt((v - 2.0) / v) / std::sqrt(w);
}

struct SimulationResult {
  ReturnPanel panel;         // returns including any VAR mean
  Matrix innovations;        // e_t, T x k
  VolatilityPath path;       // emitted window
  FilterState boundary_state;  // filter state at the start of the window
                               // (proposed model only)
};

namespace detail {

inline Vector unconditional_d2(const ModelParams& p) {
  Vector d2(p.k);
  for (int i = 0; i < p.k; ++i) {
    // symmetric innovations put half the leverage mass on negative shocks
    double denom = 1.0 - p.lambda1(i) - p.lambda2(i);
    if (p.leverage()) denom -= 0.5 * p.lambda3(i);
    d2(i) = denom > 1e-6 ? p.lambda0(i) / denom
                         : std::max(p.lambda0(i), 1e-4);
    if (!(d2(i) > 0.0)) d2(i) = 1e-4;
  }
  return d2;
}

}  // namespace detail

inline SimulationResult simulate(const SimulationConfig& config) {
  config.validate();
  const ModelParams& p = config.params;
  const int k = p.k;
  const int total = config.burn_in + config.T;
  std::mt19937_64 rng(config.seed);

  Vector d2 = detail::unconditional_d2(p);
  const CorrelationMatrix base_corr =
      config.kind == ModelKind::dcc_e
          ? normalize_to_correlation(p.rbar.sym())
          : p.rbar;
  CorrelationMatrix r_prev = base_corr;
  SymmetricMatrix q_prev = p.rbar.sym();  // dcc_e pseudo-covariance state
  DccEParams dcc_e{p.theta1(0), p.theta2(0), p.rbar.sym()};

  Matrix ubuf = Matrix::Zero(p.m, k);
  int ucount = 0, upos = 0;

  SimulationResult out;
  out.innovations = Matrix(config.T, k);
  Matrix returns(config.T, k);

  const int max_lag = static_cast<int>(config.phi.size());
  std::vector<Vector> r_hist;  // most recent first not needed; keep ring
  for (int i = 0; i < max_lag; ++i) r_hist.push_back(Vector::Zero(k));

  Vector e_prev = Vector::Zero(k);
  for (int t = 0; t < total; ++t) {
    if (t > 0) d2 = variance_step(d2, e_prev, p);
    for (int i = 0; i < k; ++i) {
      if (!(d2(i) > 0.0) || !(d2(i) <= kVarianceCeiling)) {
        throw ExplosiveParameters("simulate: variance out of range at step " +
                                  std::to_string(t + 1));
      }
    }

    CorrelationMatrix r = base_corr;
    if (config.kind == ModelKind::dcc_e) {
      if (t > 0) {
        const DccEStep step = dcc_e_step(
            q_prev, ubuf.row((upos + p.m - 1) % p.m).transpose(), dcc_e);
        q_prev = step.q;
        r = step.r;
      }
    } else if (ucount >= p.m) {
      const CorrelationMatrix psi = psi_matrix(ubuf);
      if (config.kind == ModelKind::proposed) {
        r = p.scalar_theta()
                ? correlation_step(r_prev, psi, p)
                : correlation_step_diag_theta(r_prev, psi, p.theta1, p.theta2,
                                              p.rbar);
      } else {
        DccTParams tse{p.theta1(0), p.theta2(0), p.rbar, p.m};
        r = dcc_t_step(r_prev, psi, tse);
      }
    }

    if (t == config.burn_in && config.kind == ModelKind::proposed) {
      out.boundary_state.d2 = d2;
      out.boundary_state.r_prev = r_prev;
      Matrix hist(ucount, k);
      for (int i = 0; i < ucount; ++i) {
        const int idx = (ucount >= p.m) ? (upos + i) % p.m : i;
        hist.row(i) = ubuf.row(idx);
      }
      out.boundary_state.u_history = hist;
    }

    const Vector d = d2.cwiseSqrt();
    const SymmetricMatrix sigma = assemble_sigma(d, r);
    const SymmetricMatrix root = sym_sqrt(sigma);
    const Vector eps = sample_mvt(p.dof, k, rng);
    const Vector e = root.dense() * eps;

    if (t >= config.burn_in) {
      const int idx = t - config.burn_in;
      out.innovations.row(idx) = e.transpose();
      out.path.d.push_back(d);
      out.path.r.push_back(r);
      out.path.sigma.push_back(sigma);

      Vector ret = e;
      if (config.phi0.size() > 0) ret += config.phi0;
      for (int lag = 0; lag < max_lag; ++lag) {
        ret += config.phi[lag] * r_hist[lag];
      }
      returns.row(idx) = ret.transpose();
      for (int lag = max_lag - 1; lag > 0; --lag) {
        r_hist[lag] = r_hist[lag - 1];
      }
      if (max_lag > 0) r_hist[0] = ret;
    } else if (max_lag > 0) {
      // keep the mean recursion warm during burn-in as well
      Vector ret = e;
      if (config.phi0.size() > 0) ret += config.phi0;
      for (int lag = 0; lag < max_lag; ++lag) {
        ret += config.phi[lag] * r_hist[lag];
      }
      for (int lag = max_lag - 1; lag > 0; --lag) {
        r_hist[lag] = r_hist[lag - 1];
      }
      r_hist[0] = ret;
    }

    const Vector u = e.cwiseQuotient(d);
    ubuf.row(upos) = u.transpose();
    upos = (upos + 1) % p.m;
    if (ucount < p.m) ++ucount;
    r_prev = r;
    e_prev = e;
  }

  std::vector<std::string> assets, times;
  for (int j = 0; j < k; ++j) assets.push_back("A" + std::to_string(j + 1));
  for (int t = 0; t < config.T; ++t) times.push_back(std::to_string(t + 1));
  out.panel = make_panel(std::move(assets), std::move(times),
                         std::move(returns));
  return out;
}

}  // namespace mgarch
