#pragma once

#include <map>
#include <string>
#include <vector>

#include "phs/covers.hpp"
#include "phs/mechanisms.hpp"
#include "phs/scheffe.hpp"

namespace phs {

struct SelectionParams {
  double alpha = 0.1;
  double zeta = 1.0;
  double beta = 0.1;
  PrivacyBudget budget;
};

struct SelectionReport {
  std::string chosen;
  std::size_t chosen_index = 0;
  double score_of_chosen = 0.0;
  std::size_t n_used = 0;
  PrivacyBudget budget_spent;
  std::map<std::string, double> diagnostics;
  std::vector<double> scores;  // populated when diagnostics are on
};

// Exponential mechanism over the tournament scores, full epsilon.
SelectionReport phs(const std::vector<Hypothesis>& hyps, const Dataset& d,
                    const SelectionParams& params, const EstimatorConfig& cfg, Rng& rng);

// Same, over a prebuilt engine (reuses cached pair masses).
SelectionReport phs(const ScoreEngine& engine, const Dataset& d,
                    const SelectionParams& params, Rng& rng);

std::size_t required_n_phs(std::size_t m, const SelectionParams& params);

SelectionReport naive_laplace_select(const std::vector<Hypothesis>& hyps, const Dataset& d,
                                     const SelectionParams& params, const EstimatorConfig& cfg,
                                     Rng& rng);

std::size_t dl_tournament_private(const ScoreEngine& engine, const Dataset& d,
                                  double epsilon, Rng& rng);
const Hypothesis& dl_tournament_private(const std::vector<Hypothesis>& hyps, const Dataset& d,
                                        double epsilon, Rng& rng, const EstimatorConfig& cfg);

SelectionReport semi_agnostic_select(const std::vector<Hypothesis>& hyps, const Dataset& d,
                                     double alpha, double beta, double epsilon,
                                     const EstimatorConfig& cfg, Rng& rng, double zeta = 1.0);

SelectionReport select_gapmax(const CoverSpec& cover, const Dataset& d, double alpha,
                              double beta, const PrivacyBudget& budget, std::size_t k,
                              const EstimatorConfig& cfg, Rng& rng,
                              GapMaxVariant variant = GapMaxVariant::ApproximateDp);

}  // namespace phs
