#include "phs/selection.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "phs/errors.hpp"
#include "phs/math_util.hpp"

namespace phs {
namespace {

SelectionReport make_report(const ScoreEngine& engine, std::size_t idx, double score,
                            std::size_t n, PrivacyBudget spent) {
  SelectionReport r;
  r.chosen = engine.hypothesis(idx).id();
  r.chosen_index = idx;
  r.score_of_chosen = score;
  r.n_used = n;
  r.budget_spent = spent;
  return r;
}

// Devroye-Lugosi tournament over a subset of engine indices; returns the
// position within `subset` of the winner.
std::size_t dl_tournament_subset(const ScoreEngine& engine,
                                 const std::vector<std::size_t>& subset, const Dataset& d,
                                 double epsilon, Rng& rng) {
  std::size_t m = subset.size();
  if (m == 0) throw EmptyInputError("tournament over an empty hypothesis set");
  if (m == 1) return 0;
  double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  double scale = pairs / (epsilon * static_cast<double>(d.size()));
  std::vector<std::size_t> wins(m, 0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      ScheffeStats s = engine.stats(subset[a], subset[b], d);
      double c = s.tau_hat + rng.laplace(scale);
      // First wins only on strict inequality; ties go to the second.
      if (std::fabs(s.p1 - c) < std::fabs(s.p2 - c)) {
        ++wins[a];
      } else {
        ++wins[b];
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t a = 1; a < m; ++a)
    if (wins[a] > wins[best]) best = a;
  return best;
}

}  // namespace

SelectionReport phs(const ScoreEngine& engine, const Dataset& d,
                    const SelectionParams& params, Rng& rng) {
  ContestParams cp{params.alpha, params.zeta, d.size()};
  std::vector<double> scores = engine.all_scores(d, cp);
  std::size_t idx = exponential_mechanism(scores, 1.0, params.budget.epsilon, rng);
  SelectionReport r =
      make_report(engine, idx, scores[idx], d.size(), {params.budget.epsilon, 0.0});
  r.scores = std::move(scores);
  return r;
}

SelectionReport phs(const std::vector<Hypothesis>& hyps, const Dataset& d,
                    const SelectionParams& params, const EstimatorConfig& cfg, Rng& rng) {
  ScoreEngine engine(hyps, cfg);
  return phs(engine, d, params, rng);
}

std::size_t required_n_phs(std::size_t m, const SelectionParams& params) {
  if (m == 0) throw EmptyInputError("required_n_phs with m = 0");
  double md = static_cast<double>(m);
  double a = params.alpha, z = params.zeta, b = params.beta, e = params.budget.epsilon;
  double bound = 8.0 * std::log(4.0 * md / b) / (z * z * a * a) +
                 8.0 * std::log(2.0 * md / b) / (z * a * e);
  return static_cast<std::size_t>(std::ceil(bound));
}

SelectionReport naive_laplace_select(const std::vector<Hypothesis>& hyps, const Dataset& d,
                                     const SelectionParams& params, const EstimatorConfig& cfg,
                                     Rng& rng) {
  if (hyps.size() < 2)
    throw EmptyInputError("naive_laplace_select needs at least two hypotheses");
  ScoreEngine engine(hyps, cfg);
  std::size_t m = hyps.size();
  double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  double scale = pairs / (params.budget.epsilon * static_cast<double>(d.size()));
  ContestParams cp{params.alpha, params.zeta, d.size()};
  std::vector<std::size_t> losses(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      ScheffeStats s = engine.stats(i, j, d);
      s.tau_hat += rng.laplace(scale);
      switch (pairwise_contest(s, cp)) {
        case ContestOutcome::WinnerFirst:
          ++losses[j];
          break;
        case ContestOutcome::WinnerSecond:
          ++losses[i];
          break;
        case ContestOutcome::Draw:
          break;
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (losses[i] < losses[best]) best = i;
  SelectionReport r = make_report(engine, best, 0.0, d.size(), {params.budget.epsilon, 0.0});
  r.diagnostics["losses_of_chosen"] = static_cast<double>(losses[best]);
  r.diagnostics["fallback"] = losses[best] > 0 ? 1.0 : 0.0;
  return r;
}

std::size_t dl_tournament_private(const ScoreEngine& engine, const Dataset& d,
                                  double epsilon, Rng& rng) {
  std::vector<std::size_t> all(engine.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return dl_tournament_subset(engine, all, d, epsilon, rng);
}

const Hypothesis& dl_tournament_private(const std::vector<Hypothesis>& hyps, const Dataset& d,
                                        double epsilon, Rng& rng, const EstimatorConfig& cfg) {
  ScoreEngine engine(hyps, cfg);
  return hyps[dl_tournament_private(engine, d, epsilon, rng)];
}

SelectionReport semi_agnostic_select(const std::vector<Hypothesis>& hyps, const Dataset& d,
                                     double alpha, double beta, double epsilon,
                                     const EstimatorConfig& cfg, Rng& rng, double zeta) {
  if (hyps.empty()) throw EmptyInputError("semi_agnostic_select over an empty list");
  if (alpha <= 0.0 || alpha >= 1.0) throw ParameterRangeError("alpha must be in (0,1)");
  ScoreEngine engine(hyps, cfg);
  std::size_t T = static_cast<std::size_t>(std::ceil(std::log2(1.0 / alpha))) + 1;
  std::vector<std::size_t> candidates;
  double spent = 0.0;
  SelectionReport r;
  for (std::size_t t = 1; t <= T; ++t) {
    double alpha_t = std::ldexp(alpha / 126.0, static_cast<int>(t) - 1);
    double eps_t = std::ldexp(epsilon, -(static_cast<int>(t) + 1));
    SelectionParams p{alpha_t, zeta, beta, {eps_t, 0.0}};
    SelectionReport stage = phs(engine, d, p, rng);
    candidates.push_back(stage.chosen_index);
    spent += eps_t;
    r.diagnostics["stage" + std::to_string(t) + "_alpha"] = alpha_t;
    r.diagnostics["stage" + std::to_string(t) + "_epsilon"] = eps_t;
    r.diagnostics["stage" + std::to_string(t) + "_candidate"] =
        static_cast<double>(stage.chosen_index);
  }
  std::size_t winner_pos = dl_tournament_subset(engine, candidates, d, epsilon / 2.0, rng);
  std::size_t winner = candidates[winner_pos];
  spent += epsilon / 2.0;
  r.chosen = engine.hypothesis(winner).id();
  r.chosen_index = winner;
  r.n_used = d.size();
  r.budget_spent = {spent, 0.0};
  r.diagnostics["stages"] = static_cast<double>(T);
  // The proof drives the final tournament at accuracy alpha/2; recorded here
  // while the call itself takes alpha.
  r.diagnostics["final_tournament_internal_alpha"] = alpha / 2.0;
  return r;
}

SelectionReport select_gapmax(const CoverSpec& cover, const Dataset& d, double alpha,
                              double beta, const PrivacyBudget& budget, std::size_t k,
                              const EstimatorConfig& cfg, Rng& rng, GapMaxVariant variant) {
  std::vector<Hypothesis> candidates;
  if (cover.is_explicit()) {
    candidates = cover.elements();
  } else {
    const ImplicitCover& ic = cover.implicit();
    Hypothesis query = ic.anchor(d);
    candidates = ic.ball(query, 7.0 * alpha);
    Hypothesis near = ic.nearest(query);
    std::unordered_set<std::string> seen;
    for (const auto& h : candidates) seen.insert(h.id());
    if (!seen.count(near.id())) candidates.push_back(near);
  }
  if (candidates.empty()) throw EmptyInputError("select_gapmax found no candidates");
  ScoreEngine engine(candidates, cfg);
  std::vector<double> scores = engine.all_advanced_scores(d, alpha);
  GapMaxParams gp{k, beta, budget, variant};
  std::size_t idx =
      gap_max(candidates.size(), [&](std::size_t i) { return scores[i]; }, gp, rng);
  SelectionReport r = make_report(engine, idx, scores[idx], d.size(), budget);
  r.diagnostics["candidates"] = static_cast<double>(candidates.size());
  return r;
}

}  // namespace phs
