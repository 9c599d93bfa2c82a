#include "phs/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phs/errors.hpp"
#include "phs/math_util.hpp"

namespace phs {
namespace {

// Samples an index proportional to exp(logits[i]); -inf entries get weight 0.
std::size_t sample_from_logits(const std::vector<double>& logits, Rng& rng) {
  double mx = kNegInf;
  for (double v : logits) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw ParameterRangeError("non-finite score passed to the exponential mechanism");
    mx = std::max(mx, v);
  }
  if (mx == kNegInf)
    throw ParameterRangeError("all exponential mechanism weights are zero");
  double total = 0.0;
  for (double v : logits) total += std::exp(v - mx);
  double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < logits.size(); ++i) {
    acc += std::exp(logits[i] - mx);
    if (u < acc) return i;
  }
  return logits.size() - 1;
}

}  // namespace

std::size_t exponential_mechanism(const std::vector<double>& scores, double sensitivity,
                                  double epsilon, Rng& rng) {
  if (scores.empty()) throw EmptyInputError("exponential mechanism over an empty range");
  if (sensitivity <= 0.0 || epsilon <= 0.0)
    throw ParameterRangeError("sensitivity and epsilon must be positive");
  std::vector<double> logits(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    logits[i] = epsilon * scores[i] / (2.0 * sensitivity);
  return sample_from_logits(logits, rng);
}

double sample_noise(const NoiseSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case NoiseKind::Laplace:
      return rng.laplace(spec.scale);
    case NoiseKind::TruncatedLaplace:
      return rng.truncated_laplace(spec.scale, spec.truncation);
    case NoiseKind::Gaussian:
      return rng.gaussian(spec.std);
  }
  throw ParameterRangeError("unknown noise kind");
}

NoiseSpec gap_max_noise_spec(const PrivacyBudget& budget, GapMaxVariant variant) {
  NoiseSpec spec;
  if (variant == GapMaxVariant::ConcentratedDp) {
    spec.kind = NoiseKind::Gaussian;
    spec.std = std::sqrt(3.0) / budget.epsilon;
    return spec;
  }
  spec.scale = 4.0 / budget.epsilon;
  if (budget.delta > 0.0) {
    spec.kind = NoiseKind::TruncatedLaplace;
    spec.truncation = 4.0 * (1.0 + std::log(1.0 / budget.delta)) / budget.epsilon;
  } else {
    spec.kind = NoiseKind::Laplace;
  }
  return spec;
}

std::size_t gap_max(std::size_t count, const std::function<double(std::size_t)>& score,
                    const GapMaxParams& params, Rng& rng) {
  if (count == 0) throw EmptyInputError("gap_max over an empty candidate set");
  if (params.k == 0 || params.beta <= 0.0 || params.beta >= 1.0)
    throw ParameterRangeError("gap_max requires k >= 1 and beta in (0,1)");
  std::size_t m = static_cast<std::size_t>(
      std::ceil(static_cast<double>(params.k * params.k) / params.beta));

  std::vector<double> scores(count);
  for (std::size_t c = 0; c < count; ++c) scores[c] = score(c);

  // Step 1: uniformly random bucket assignment.
  std::vector<std::size_t> bucket_of(count);
  std::vector<std::vector<std::size_t>> members(m);
  for (std::size_t c = 0; c < count; ++c) {
    bucket_of[c] = rng.uniform_index(m);
    members[bucket_of[c]].push_back(c);
  }

  // Step 2: exponential mechanism over bucket suprema at epsilon/4.
  std::vector<double> sup(m, kNegInf);
  for (std::size_t c = 0; c < count; ++c)
    sup[bucket_of[c]] = std::max(sup[bucket_of[c]], scores[c]);
  std::vector<double> logits(m);
  for (std::size_t b = 0; b < m; ++b)
    logits[b] = sup[b] == kNegInf ? kNegInf : (params.budget.epsilon / 4.0) * sup[b] / 2.0;
  std::size_t chosen_bucket = sample_from_logits(logits, rng);
  const auto& bucket = members[chosen_bucket];

  // Step 3: gap scores against the bucket's second-best score (0 for a
  // singleton bucket). Ties in top-1/top-2 break to the lowest index.
  double top1 = kNegInf, top2 = kNegInf;
  for (std::size_t c : bucket) {
    if (scores[c] > top1) {
      top2 = top1;
      top1 = scores[c];
    } else if (scores[c] > top2) {
      top2 = scores[c];
    }
  }
  double second = bucket.size() >= 2 ? top2 : 0.0;

  // Steps 4-6: one noise draw per bucket member, noisy argmax.
  NoiseSpec noise = gap_max_noise_spec(params.budget, params.variant);
  std::size_t best = bucket.front();
  double best_val = kNegInf;
  for (std::size_t c : bucket) {
    double gap = 0.5 * std::max(0.0, scores[c] - second);
    double val = gap + sample_noise(noise, rng);
    if (val > best_val) {
      best_val = val;
      best = c;
    }
  }
  return best;
}

}  // namespace phs
