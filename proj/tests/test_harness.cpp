#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "phs/errors.hpp"
#include "phs/harness.hpp"

using namespace phs;

namespace {

nlohmann::json small_planted_config() {
  return {
      {"schema", 1},
      {"scenario", "planted-phs"},
      {"trials", 4},
      {"seed", 20240817},
      {"selection",
       {{"alpha", 0.1}, {"zeta", 1.0}, {"beta", 0.1}, {"epsilon", 1.0}, {"delta", 0.0}}},
      {"estimator", {{"mode", "exact"}}},
      {"family", {{"m", 12}, {"domain", 20}, {"n", 1500}}},
  };
}

}  // namespace

TEST_CASE("config parsing validates schema and scenario") {
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"scenario", "planted-phs"}}), ParseError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json({{"schema", 1}, {"scenario", "who-knows"}}), ParseError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(
                      {{"schema", 1}, {"scenario", "planted-phs"}, {"trials", 0}}),
                  ParseError);
  auto cfg = ExperimentConfig::from_json(small_planted_config());
  CHECK(cfg.trials == 4);
  CHECK(cfg.selection.alpha == 0.1);
  CHECK(cfg.estimator.mode == EstimatorMode::Exact);
}

TEST_CASE("experiments are deterministic for a fixed seed") {
  auto cfg = ExperimentConfig::from_json(small_planted_config());
  auto r1 = run_experiment(cfg);
  auto r2 = run_experiment(cfg);
  CHECK(records_to_csv(r1.records) == records_to_csv(r2.records));
  CHECK(r1.summary["successes"] == r2.summary["successes"]);
}

TEST_CASE("experiments are deterministic across thread counts") {
  auto cfg = ExperimentConfig::from_json(small_planted_config());
  setenv("PHS_THREADS", "1", 1);
  auto r1 = run_experiment(cfg);
  setenv("PHS_THREADS", "4", 1);
  auto r2 = run_experiment(cfg);
  unsetenv("PHS_THREADS");
  CHECK(records_to_csv(r1.records) == records_to_csv(r2.records));
}

TEST_CASE("summary matches recomputation from the records; budget within config") {
  auto cfg = ExperimentConfig::from_json(small_planted_config());
  auto res = run_experiment(cfg);
  std::size_t succ = 0;
  for (const auto& r : res.records) {
    succ += r.success ? 1 : 0;
    CHECK(r.budget_spent.epsilon <= cfg.selection.budget.epsilon + 1e-12);
    CHECK(r.dtv >= 0.0);
    CHECK(r.dtv <= 1.0);
  }
  CHECK(res.summary["successes"] == succ);
  CHECK(res.summary["success_frequency"].get<double>() ==
        doctest::Approx(static_cast<double>(succ) / cfg.trials));
}

TEST_CASE("semi-agnostic trials record the exact budget decomposition") {
  nlohmann::json j = {
      {"schema", 1},
      {"scenario", "misspecified-semi-agnostic"},
      {"trials", 2},
      {"seed", 7},
      {"selection",
       {{"alpha", 0.25}, {"zeta", 1.0}, {"beta", 0.1}, {"epsilon", 1.0}}},
      {"family", {{"m", 8}, {"domain", 15}, {"opt", 0.05}, {"n", 800}}},
  };
  auto res = run_experiment(ExperimentConfig::from_json(j));
  // T = ceil(log2(4)) + 1 = 3 stages: eps/4 + eps/8 + eps/16 + eps/2.
  double expected = 0.25 + 0.125 + 0.0625 + 0.5;
  for (const auto& r : res.records)
    CHECK(r.budget_spent.epsilon == doctest::Approx(expected));
}

TEST_CASE("packing audit scenario") {
  nlohmann::json j = {
      {"schema", 1},
      {"scenario", "packing-audit"},
      {"trials", 3},
      {"seed", 99},
      {"selection", {{"alpha", 0.15}}},
      {"family", {{"candidates", 20}, {"domain", 4}}},
  };
  auto res = run_experiment(ExperimentConfig::from_json(j));
  for (const auto& r : res.records) CHECK(r.success);
}

TEST_CASE("cover audit scenario on the Bernoulli grid") {
  nlohmann::json j = {
      {"schema", 1},
      {"scenario", "cover-audit"},
      {"trials", 20},
      {"seed", 5},
      {"selection", {{"alpha", 0.2}}},
      {"family", {{"cover", "bernoulli-grid"}}},
  };
  auto res = run_experiment(ExperimentConfig::from_json(j));
  for (const auto& r : res.records) {
    CHECK(r.success);
    CHECK(r.dtv <= 0.2);
  }
}

TEST_CASE("CSV has the documented fixed columns") {
  auto cfg = ExperimentConfig::from_json(small_planted_config());
  cfg.trials = 1;
  auto res = run_experiment(cfg);
  std::string csv = records_to_csv(res.records);
  CHECK(csv.rfind("trial,seed,chosen_id,dtv,success,eps,delta,aux\n", 0) == 0);
}
