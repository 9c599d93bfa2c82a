#include "phs/scheffe.hpp"

#include <algorithm>
#include <cmath>

#include "phs/errors.hpp"
#include "phs/math_util.hpp"

namespace phs {

ContestOutcome pairwise_contest(const ScheffeStats& stats, const ContestParams& params) {
  double a = params.alpha, z = params.zeta;
  if (stats.p1 - stats.p2 <= (2.0 + z) * a) return ContestOutcome::Draw;
  if (stats.tau_hat > stats.p1 - (1.0 + z / 2.0) * a) return ContestOutcome::WinnerFirst;
  if (stats.tau_hat < stats.p2 + (1.0 + z / 2.0) * a) return ContestOutcome::WinnerSecond;
  return ContestOutcome::Draw;
}

double gamma(const ScheffeStats& stats, const ContestParams& params) {
  double n = static_cast<double>(stats.n);
  if (stats.p1 - stats.p2 <= (2.0 + params.zeta) * params.alpha) return n;
  double margin = stats.tau_hat - (stats.p2 + (1.0 + params.zeta / 2.0) * params.alpha);
  return n * std::max(0.0, margin);
}

struct ScoreEngine::Histogram {
  std::vector<std::size_t> counts;
  std::size_t n = 0;
};

ScoreEngine::ScoreEngine(std::vector<Hypothesis> hyps, EstimatorConfig cfg)
    : hyps_(std::move(hyps)), cfg_(cfg) {
  if (hyps_.empty()) throw EmptyInputError("ScoreEngine needs at least one hypothesis");
  std::size_t m = hyps_.size();
  Domain dom = hyps_.front().domain();
  for (const auto& h : hyps_)
    if (!(h.domain() == dom))
      throw DomainMismatchError("hypotheses passed to ScoreEngine span several domains");

  if (dom.kind == DomainKind::FiniteDiscrete) {
    domain_size_ = dom.size;
    log_pmf_.assign(m, std::vector<double>(domain_size_));
    Point x(1);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t s = 0; s < domain_size_; ++s) {
        x[0] = static_cast<double>(s);
        log_pmf_[i][s] = hyps_[i].log_density(x);
      }
  }

  mass_.assign(m, std::vector<std::array<double, 2>>(m, {0.0, 0.0}));
  tv_.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      if (!log_pmf_.empty()) {
        // One pass over the symbol table gives both masses and (for i < j)
        // the pair's TV exactly, regardless of cfg mode.
        double p1 = 0.0, p2 = 0.0;
        for (std::size_t s = 0; s < domain_size_; ++s) {
          if (log_pmf_[i][s] > log_pmf_[j][s]) {
            p1 += std::exp(log_pmf_[i][s]);
            p2 += std::exp(log_pmf_[j][s]);
          }
        }
        mass_[i][j] = {std::min(1.0, p1), std::min(1.0, p2)};
        tv_[i][j] = std::clamp(p1 - p2, 0.0, 1.0);
        continue;
      }
      EstimatorConfig pair_cfg = cfg_;
      pair_cfg.seed = derive_seed(cfg_.seed, i, j);
      mass_[i][j][0] = scheffe_mass(hyps_[i], hyps_[j], hyps_[i], pair_cfg);
      pair_cfg.seed = derive_seed(cfg_.seed, j, i) ^ 0x5ca1ab1eULL;
      mass_[i][j][1] = scheffe_mass(hyps_[i], hyps_[j], hyps_[j], pair_cfg);
      tv_[i][j] = std::clamp(mass_[i][j][0] - mass_[i][j][1], 0.0, 1.0);
    }
  }
  // Symmetrize TV (the two orientations agree up to MC noise).
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) tv_[i][j] = tv_[j][i] = std::max(tv_[i][j], tv_[j][i]);
}

ScoreEngine::Histogram ScoreEngine::histogram(const Dataset& d) const {
  Histogram h;
  h.n = d.size();
  h.counts.assign(domain_size_, 0);
  for (const auto& x : d.points) {
    if (x.size() != 1) throw DomainMismatchError("finite-discrete dataset point arity != 1");
    double r = std::round(x[0]);
    if (std::fabs(x[0] - r) > 1e-9 || r < 0 || r >= static_cast<double>(domain_size_))
      throw DomainMismatchError("dataset symbol outside the hypotheses' domain");
    ++h.counts[static_cast<std::size_t>(r)];
  }
  return h;
}

std::size_t ScoreEngine::scheffe_count(std::size_t i, std::size_t j, const Dataset& d) const {
  if (i == j) return 0;
  if (!log_pmf_.empty()) {
    Histogram h = histogram(d);
    std::size_t c = 0;
    for (std::size_t s = 0; s < domain_size_; ++s)
      if (log_pmf_[i][s] > log_pmf_[j][s]) c += h.counts[s];
    return c;
  }
  std::size_t c = 0;
  for (const auto& x : d.points)
    c += hyps_[i].log_density(x) > hyps_[j].log_density(x) ? 1 : 0;
  return c;
}

std::vector<std::vector<std::size_t>> ScoreEngine::count_matrix(const Dataset& d) const {
  std::size_t m = hyps_.size();
  std::vector<std::vector<std::size_t>> counts(m, std::vector<std::size_t>(m, 0));
  if (!log_pmf_.empty()) {
    Histogram h = histogram(d);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        std::size_t c = 0;
        for (std::size_t s = 0; s < domain_size_; ++s)
          if (log_pmf_[i][s] > log_pmf_[j][s]) c += h.counts[s];
        counts[i][j] = c;
      }
    return counts;
  }
  // Generic path: evaluate every log density once, then compare.
  std::vector<std::vector<double>> ld(m, std::vector<double>(d.size()));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < d.size(); ++t) ld[i][t] = hyps_[i].log_density(d.points[t]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      std::size_t c = 0;
      for (std::size_t t = 0; t < d.size(); ++t) c += ld[i][t] > ld[j][t] ? 1 : 0;
      counts[i][j] = c;
    }
  return counts;
}

ScheffeStats ScoreEngine::stats(std::size_t i, std::size_t j, const Dataset& d) const {
  ScheffeStats s;
  s.n = d.size();
  if (i != j) {
    s.p1 = mass_[i][j][0];
    s.p2 = mass_[i][j][1];
    s.tau_hat = static_cast<double>(scheffe_count(i, j, d)) / static_cast<double>(d.size());
  }
  return s;
}

double ScoreEngine::pair_mass(std::size_t i, std::size_t j, std::size_t under) const {
  return i == j ? 0.0 : mass_[i][j][under];
}

double ScoreEngine::pair_tv(std::size_t i, std::size_t j) const { return tv_[i][j]; }

double ScoreEngine::score(std::size_t j, const Dataset& d, const ContestParams& params) const {
  ContestParams p = params;
  p.n = d.size();
  double best = static_cast<double>(d.size());
  for (std::size_t k = 0; k < hyps_.size(); ++k)
    best = std::min(best, gamma(stats(j, k, d), p));
  return best;
}

double ScoreEngine::advanced_score(std::size_t i, const Dataset& d, double alpha) const {
  auto counts = count_matrix(d);
  double n = static_cast<double>(d.size());
  double best = n;  // self term
  for (std::size_t j = 0; j < hyps_.size(); ++j) {
    if (j == i) continue;
    double change = static_cast<double>(counts[i][j]) - n * (mass_[i][j][1] + 3.0 * alpha);
    double indicator = tv_[i][j] <= 6.0 * alpha ? n : 0.0;
    best = std::min(best, std::max(change, indicator));
  }
  return best;
}

std::vector<double> ScoreEngine::all_scores(const Dataset& d, const ContestParams& params) const {
  auto counts = count_matrix(d);
  double n = static_cast<double>(d.size());
  ContestParams p = params;
  p.n = d.size();
  std::size_t m = hyps_.size();
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    double best = n;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      ScheffeStats s{mass_[j][k][0], mass_[j][k][1],
                     static_cast<double>(counts[j][k]) / n, d.size()};
      best = std::min(best, gamma(s, p));
    }
    out[j] = best;
  }
  return out;
}

std::vector<double> ScoreEngine::all_advanced_scores(const Dataset& d, double alpha) const {
  auto counts = count_matrix(d);
  double n = static_cast<double>(d.size());
  std::size_t m = hyps_.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double best = n;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      double change = static_cast<double>(counts[i][j]) - n * (mass_[i][j][1] + 3.0 * alpha);
      double indicator = tv_[i][j] <= 6.0 * alpha ? n : 0.0;
      best = std::min(best, std::max(change, indicator));
    }
    out[i] = best;
  }
  return out;
}

double score(std::size_t j, const std::vector<Hypothesis>& hyps, const Dataset& d,
             const ContestParams& params, const EstimatorConfig& cfg) {
  ScoreEngine engine(hyps, cfg);
  return engine.score(j, d, params);
}

double advanced_score(const Hypothesis& h, const std::vector<Hypothesis>& hyps,
                      const Dataset& d, double alpha, const EstimatorConfig& cfg) {
  std::vector<Hypothesis> all;
  all.reserve(hyps.size() + 1);
  all.push_back(h);
  all.insert(all.end(), hyps.begin(), hyps.end());
  ScoreEngine engine(std::move(all), cfg);
  return engine.advanced_score(0, d, alpha);
}

}  // namespace phs
