#pragma once

#include <array>
#include <vector>

#include "phs/estimator.hpp"
#include "phs/hypothesis.hpp"

namespace phs {

// Stats of one ordered pair: p1/p2 are the masses of the pair's Scheffe set
// under the first/second hypothesis, tau_hat its empirical mass.
struct ScheffeStats {
  double p1 = 0.0;
  double p2 = 0.0;
  double tau_hat = 0.0;
  std::size_t n = 0;
};

struct ContestParams {
  double alpha = 0.1;
  double zeta = 1.0;
  std::size_t n = 0;
};

enum class ContestOutcome { WinnerFirst, WinnerSecond, Draw };

ContestOutcome pairwise_contest(const ScheffeStats& stats, const ContestParams& params);

// Margin function: n when the pair is too close to call, otherwise the
// clamped excess of tau_hat over the second hypothesis' acceptance band.
double gamma(const ScheffeStats& stats, const ContestParams& params);

// Precomputes per-ordered-pair Scheffe masses (frozen per engine instance so
// repeated scoring against different datasets keeps sensitivity exactly 1)
// and evaluates empirical masses with a finite-domain histogram fast path.
class ScoreEngine {
 public:
  ScoreEngine(std::vector<Hypothesis> hyps, EstimatorConfig cfg);

  std::size_t size() const { return hyps_.size(); }
  const Hypothesis& hypothesis(std::size_t i) const { return hyps_[i]; }

  // Stats of the ordered pair (i, j) against d.
  ScheffeStats stats(std::size_t i, std::size_t j, const Dataset& d) const;

  // |{x in D : H_i(x) > H_j(x)}|.
  std::size_t scheffe_count(std::size_t i, std::size_t j, const Dataset& d) const;

  double pair_mass(std::size_t i, std::size_t j, std::size_t under) const;
  double pair_tv(std::size_t i, std::size_t j) const;

  double score(std::size_t j, const Dataset& d, const ContestParams& params) const;
  double advanced_score(std::size_t i, const Dataset& d, double alpha) const;

  std::vector<double> all_scores(const Dataset& d, const ContestParams& params) const;
  std::vector<double> all_advanced_scores(const Dataset& d, double alpha) const;

 private:
  struct Histogram;
  Histogram histogram(const Dataset& d) const;
  std::vector<std::vector<std::size_t>> count_matrix(const Dataset& d) const;

  std::vector<Hypothesis> hyps_;
  EstimatorConfig cfg_;
  // mass_[i][j][q]: mass of Scheffe set of (i, j) under q in {i:0, j:1}.
  std::vector<std::vector<std::array<double, 2>>> mass_;
  std::vector<std::vector<double>> tv_;
  // Finite-domain fast path: per-hypothesis log-pmf over a shared symbol
  // range, empty when the domain is not finite-discrete.
  std::vector<std::vector<double>> log_pmf_;
  std::size_t domain_size_ = 0;
};

// Free-function forms matching the module API; each call builds a transient
// engine, so prefer ScoreEngine when scoring many hypotheses or datasets.
double score(std::size_t j, const std::vector<Hypothesis>& hyps, const Dataset& d,
             const ContestParams& params, const EstimatorConfig& cfg);

double advanced_score(const Hypothesis& h, const std::vector<Hypothesis>& hyps,
                      const Dataset& d, double alpha, const EstimatorConfig& cfg);

}  // namespace phs
