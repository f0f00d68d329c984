#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mgarch/config.hpp"

using mgarch::ConfigDoc;

namespace {

ConfigDoc parse(const std::string& text) {
  std::istringstream is(text);
  return ConfigDoc::parse(is, "test.conf");
}

}  // namespace

TEST_CASE("config parses sections, comments and values", "[config]") {
  const ConfigDoc doc = parse(
      "# top comment\n"
      "[mean]\n"
      "p = 3   # keep some dynamics\n"
      "\n"
      "[correlation]\n"
      "m = 6\n"
      "diagonal_theta = true\n");
  REQUIRE(doc.get("mean", "p") == "3");
  REQUIRE(doc.get_int("correlation", "m", 0) == 6);
  REQUIRE(doc.get_bool("correlation", "diagonal_theta", false));
  REQUIRE(doc.get("nope", "missing", "fallback") == "fallback");
  REQUIRE(mgarch::mean_spec_from_config(doc).p == 3);
}

TEST_CASE("config rejects malformed lines", "[config]") {
  REQUIRE_THROWS_AS(parse("[mean\np = 1\n"), mgarch::ParseError);
  REQUIRE_THROWS_AS(parse("[mean]\njust words\n"), mgarch::ParseError);
  REQUIRE_THROWS_AS(parse("[mean]\n= 3\n"), mgarch::ParseError);
  const ConfigDoc doc = parse("[mean]\np = abc\n");
  REQUIRE_THROWS_AS(doc.get_int("mean", "p", 0), mgarch::ParseError);
}

TEST_CASE("model spec binding", "[config]") {
  const ConfigDoc doc = parse(
      "[variance]\n"
      "leverage = off off igarch igarch\n"
      "ties_lambda0 = 1 1 2 3\n"
      "ties_lambda1 = 1 1 1 1\n"
      "ties_lambda2 = 1 1 2 2\n"
      "[correlation]\n"
      "m = 6\n"
      "[innovation]\n"
      "dof = 7.5\n"
      "[optimizer]\n"
      "max_iterations = 500\n");
  const mgarch::ModelSpec spec = mgarch::model_spec_from_config(doc, 4);
  REQUIRE(spec.leverage.size() == 4);
  REQUIRE(spec.leverage[2] == mgarch::LeverageMode::igarch);
  REQUIRE(spec.ties.lambda0 == std::vector<int>{1, 1, 2, 3});
  REQUIRE(spec.m == 6);
  REQUIRE(spec.fixed_dof == 7.5);
  REQUIRE(spec.optim.max_iterations == 500);

  // one leverage token broadcasts
  const ConfigDoc all = parse("[variance]\nleverage = free\n");
  REQUIRE(mgarch::model_spec_from_config(all, 3).leverage ==
          std::vector<mgarch::LeverageMode>(3, mgarch::LeverageMode::free_));

  REQUIRE_THROWS_AS(
      mgarch::model_spec_from_config(
          parse("[variance]\nleverage = up down\n"), 2),
      mgarch::ParseError);
  REQUIRE_THROWS_AS(
      mgarch::model_spec_from_config(
          parse("[variance]\nties_lambda0 = 1 2\n"), 3),
      mgarch::ParseError);
  REQUIRE_THROWS_AS(
      mgarch::model_spec_from_config(parse("[innovation]\ndof = 1.5\n"), 2),
      mgarch::ParseError);
}

TEST_CASE("simulation binding validates parameters up front", "[config]") {
  const ConfigDoc good = parse(
      "[simulation]\n"
      "kind = proposed\nk = 3\nT = 100\nburn_in = 50\n"
      "lambda0 = 0.05\nlambda1 = 0.9\nlambda2 = 0.05\n"
      "theta1 = 0.02\ntheta2 = 0.9\ndof = 8\nrbar = 0.4\n");
  const mgarch::SimulationConfig config =
      mgarch::simulation_from_config(good, 7);
  REQUIRE(config.params.k == 3);
  REQUIRE(config.params.m == 5);  // defaulted to k + 2
  REQUIRE(config.params.rbar(0, 2) == 0.4);
  REQUIRE(config.seed == 7);

  // lambda1 + lambda2 >= 1 must be rejected before any computation
  const ConfigDoc bad = parse(
      "[simulation]\n"
      "kind = proposed\nk = 2\nT = 100\nburn_in = 50\n"
      "lambda0 = 0.05\nlambda1 = 0.95\nlambda2 = 0.06\n"
      "theta1 = 0.02\ntheta2 = 0.9\ndof = 8\nrbar = 0.4\n");
  REQUIRE_THROWS_AS(mgarch::simulation_from_config(bad, 1),
                    mgarch::InvalidParams);

  const ConfigDoc unknown = parse("[simulation]\nkind = vec\nk = 2\nT = 10\n");
  REQUIRE_THROWS_AS(mgarch::simulation_from_config(unknown, 1),
                    mgarch::ParseError);
}
