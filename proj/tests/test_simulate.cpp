#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mgarch/simulate.hpp"
#include "test_helpers.hpp"

using mgarch::Matrix;
using mgarch::ModelKind;
using mgarch::ModelParams;
using mgarch::SimulationConfig;
using mgarch::Vector;
using testutil::equicorrelation;
using testutil::make_scalar_params;
using testutil::max_abs_diff;

TEST_CASE("sample_mvt has unit component variance", "[simulate]") {
  std::mt19937_64 rng(1);
  const int n = 1000000;
  for (double v : {5.0, 8.0, 20.0}) {
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vector x = mgarch::sample_mvt(v, 1, rng);
      sum_sq += x(0) * x(0);
    }
    REQUIRE(sum_sq / n == Catch::Approx(1.0).margin(0.01));
  }
}

TEST_CASE("sample_mvt Gaussian limit and tail kurtosis", "[simulate]") {
  std::mt19937_64 rng(2);
  const int n = 1000000;

  // v -> infinity: covariance -> identity
  Matrix draws(n, 2);
  for (int i = 0; i < n; ++i) {
    draws.row(i) = mgarch::sample_mvt(1e6, 2, rng).transpose();
  }
  const Matrix cov = mgarch::sample_covariance(draws).dense();
  REQUIRE(cov(0, 0) == Catch::Approx(1.0).margin(0.02));
  REQUIRE(cov(1, 1) == Catch::Approx(1.0).margin(0.02));
  REQUIRE(std::abs(cov(0, 1)) < 0.02);

  // v = 5: excess kurtosis 6/(v-4) = 6
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = mgarch::sample_mvt(5.0, 1, rng)(0);
  const auto stats = mgarch::moment_stats(x);
  REQUIRE(stats.excess_kurtosis == Catch::Approx(6.0).epsilon(0.15));
}

TEST_CASE("static collapse produces iid draws with covariance D Rbar D",
          "[simulate]") {
  SimulationConfig config;
  config.params = make_scalar_params(2, 1.44, 0.0, 0.0, 0.0, 0.0, 8.0, 4,
                                     equicorrelation(2, 0.6));
  config.T = 40000;
  config.burn_in = 10;
  config.seed = 99;
  const auto sim = mgarch::simulate(config);
  const Matrix cov = mgarch::sample_covariance(sim.panel.values).dense();
  REQUIRE(cov(0, 0) == Catch::Approx(1.44).epsilon(0.05));
  REQUIRE(cov(1, 1) == Catch::Approx(1.44).epsilon(0.05));
  REQUIRE(cov(0, 1) == Catch::Approx(0.6 * 1.44).epsilon(0.08));
}

TEST_CASE("filter reproduces the simulated volatility path", "[simulate]") {
  for (int k : {1, 2, 4}) {
    SimulationConfig config;
    config.params = make_scalar_params(k, 0.05, 0.90, 0.05, 0.02, 0.95, 8.0,
                                       k + 2, equicorrelation(k, 0.4));
    config.T = 1000;
    config.burn_in = 500;
    config.seed = 1000 + k;
    const auto sim = mgarch::simulate(config);

    const mgarch::FilterRun run = mgarch::run_filter(
        config.params, sim.innovations, &sim.boundary_state);
    REQUIRE(run.t0 == 1);
    double worst = 0.0;
    for (int t = 0; t < config.T; ++t) {
      worst = std::max(worst, max_abs_diff(run.path.sigma[t].dense(),
                                           sim.path.sigma[t].dense()));
    }
    REQUIRE(worst < 1e-10);
  }
}

TEST_CASE("simulation is deterministic per seed", "[simulate]") {
  SimulationConfig config;
  config.params = make_scalar_params(2, 0.05, 0.9, 0.05, 0.03, 0.9, 7.0, 4,
                                     equicorrelation(2, 0.3));
  config.T = 200;
  config.burn_in = 50;
  config.seed = 7;
  const auto a = mgarch::simulate(config);
  const auto b = mgarch::simulate(config);
  REQUIRE(max_abs_diff(a.panel.values, b.panel.values) == 0.0);

  config.seed = 8;
  const auto c = mgarch::simulate(config);
  REQUIRE(max_abs_diff(a.panel.values, c.panel.values) > 1e-3);
}

TEST_CASE("leverage raises volatility after negative shocks", "[simulate]") {
  SimulationConfig config;
  config.params = make_scalar_params(1, 0.05, 0.85, 0.05, 0.02, 0.9, 8.0, 3,
                                     mgarch::CorrelationMatrix::identity(1));
  testutil::enable_leverage(config.params, 0.08);
  config.T = 20000;
  config.burn_in = 500;
  config.seed = 3;
  const auto sim = mgarch::simulate(config);

  // correlation between 1(e_{t-1} < 0) and sigma_t
  double mean_ind = 0.0, mean_var = 0.0;
  for (int t = 1; t < config.T; ++t) {
    mean_ind += sim.innovations(t - 1, 0) < 0.0 ? 1.0 : 0.0;
    mean_var += sim.path.d[t](0) * sim.path.d[t](0);
  }
  mean_ind /= (config.T - 1);
  mean_var /= (config.T - 1);
  double cov = 0.0;
  for (int t = 1; t < config.T; ++t) {
    const double ind = sim.innovations(t - 1, 0) < 0.0 ? 1.0 : 0.0;
    const double var = sim.path.d[t](0) * sim.path.d[t](0);
    cov += (ind - mean_ind) * (var - mean_var);
  }
  REQUIRE(cov / (config.T - 1) > 0.0);
}

TEST_CASE("explosive configurations are rejected during generation",
          "[simulate]") {
  SimulationConfig config;
  config.params = make_scalar_params(1, 1e11, 0.9, 0.05, 0.02, 0.9, 8.0, 3,
                                     mgarch::CorrelationMatrix::identity(1));
  config.T = 100;
  config.burn_in = 10;
  REQUIRE_THROWS_AS(mgarch::simulate(config), mgarch::ExplosiveParameters);
}

TEST_CASE("VAR mean is applied on top of the innovations", "[simulate]") {
  SimulationConfig config;
  config.params = make_scalar_params(1, 0.05, 0.5, 0.1, 0.02, 0.9, 8.0, 3,
                                     mgarch::CorrelationMatrix::identity(1));
  config.T = 5000;
  config.burn_in = 100;
  config.seed = 17;
  config.phi0 = Vector::Constant(1, 2.0);
  config.phi.push_back(Matrix::Constant(1, 1, 0.5));
  const auto sim = mgarch::simulate(config);
  // mean of r_t approaches phi0 / (1 - 0.5)
  REQUIRE(sim.panel.values.col(0).mean() == Catch::Approx(4.0).margin(0.3));
  // r_t - phi0 - 0.5 r_{t-1} recovers the innovations
  for (int t = 1; t < 50; ++t) {
    const double resid = sim.panel.values(t, 0) - 2.0 -
                         0.5 * sim.panel.values(t - 1, 0);
    REQUIRE(resid == Catch::Approx(sim.innovations(t, 0)).margin(1e-12));
  }
}

TEST_CASE("likelihood is lowest near the generating parameters", "[simulate]") {
  // NLL(true) < NLL(perturbed l2 + 0.1) in at least 95 of 100 replications
  const ModelParams truth = make_scalar_params(
      2, 0.05, 0.80, 0.05, 0.02, 0.95, 8.0, 4, equicorrelation(2, 0.5));
  ModelParams bumped = truth;
  bumped.lambda2 = Vector::Constant(2, 0.15);

  int wins = 0;
  for (int rep = 0; rep < 100; ++rep) {
    SimulationConfig config;
    config.params = truth;
    config.T = 2000;
    config.burn_in = 500;
    config.seed = 5000 + rep;
    const auto sim = mgarch::simulate(config);
    const double nll_true =
        mgarch::negative_log_likelihood(truth, sim.innovations);
    const double nll_bumped =
        mgarch::negative_log_likelihood(bumped, sim.innovations);
    if (nll_true < nll_bumped) ++wins;
  }
  REQUIRE(wins >= 95);
}

TEST_CASE("standardized residuals of a correct model are white",
          "[simulate]") {
  SimulationConfig config;
  config.params = make_scalar_params(2, 0.05, 0.9, 0.05, 0.02, 0.95, 8.0, 4,
                                     equicorrelation(2, 0.5));
  config.T = 20000;
  config.burn_in = 500;
  config.seed = 21;
  const auto sim = mgarch::simulate(config);
  const Matrix eps =
      mgarch::standardized_residuals(sim.path, sim.innovations);
  const Matrix cov = mgarch::sample_covariance(eps).dense();
  REQUIRE(cov(0, 0) == Catch::Approx(1.0).margin(0.05));
  REQUIRE(cov(1, 1) == Catch::Approx(1.0).margin(0.05));
  REQUIRE(std::abs(cov(0, 1)) < 0.05);
}

TEST_CASE("simulated panels round-trip through CSV", "[simulate]") {
  SimulationConfig config;
  config.params = make_scalar_params(3, 0.05, 0.85, 0.08, 0.03, 0.9, 9.0, 5,
                                     equicorrelation(3, 0.2));
  config.T = 50;
  config.burn_in = 20;
  config.seed = 33;
  const auto sim = mgarch::simulate(config);
  std::ostringstream os;
  mgarch::write_panel_csv(os, sim.panel);
  std::istringstream is(os.str());
  const mgarch::ReturnPanel back = mgarch::load_panel_csv(is, "mem");
  REQUIRE(max_abs_diff(back.values, sim.panel.values) == 0.0);
}
