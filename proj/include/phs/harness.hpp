#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "phs/selection.hpp"

namespace phs {

enum class Scenario {
  PlantedPhs,
  MisspecifiedSemiAgnostic,
  GapmaxLattice,
  NaiveVsPhs,
  CoverAudit,
  PackingAudit,
};

struct ExperimentConfig {
  Scenario scenario = Scenario::PlantedPhs;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  SelectionParams selection;
  EstimatorConfig estimator;
  nlohmann::json family;  // scenario-specific knobs
  std::string output_path;

  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string chosen_id;
  double dtv = 0.0;
  bool success = false;
  double wall_ms = 0.0;
  PrivacyBudget budget_spent;
  double aux = 0.0;  // scenario-specific companion metric (see CSV docs)
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  nlohmann::json summary;
};

// Runs all trials with counter-mode sub-seeds; deterministic for a fixed
// config regardless of the PHS_THREADS worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string records_to_csv(const std::vector<TrialRecord>& records);

int cli_main(int argc, char** argv);

}  // namespace phs
