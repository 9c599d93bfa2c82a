#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "phs/rng.hpp"

namespace phs {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;  // 0 means pure DP
};

enum class NoiseKind { Laplace, TruncatedLaplace, Gaussian };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Laplace;
  double scale = 1.0;       // laplace / truncated-laplace
  double truncation = 1.0;  // truncated-laplace only
  double std = 1.0;         // gaussian only
};

enum class GapMaxVariant { ApproximateDp, ConcentratedDp };

struct GapMaxParams {
  std::size_t k = 1;
  double beta = 0.1;
  PrivacyBudget budget;
  GapMaxVariant variant = GapMaxVariant::ApproximateDp;
};

// Samples index i with probability proportional to
// exp(epsilon * scores[i] / (2 * sensitivity)).
std::size_t exponential_mechanism(const std::vector<double>& scores, double sensitivity,
                                  double epsilon, Rng& rng);

double sample_noise(const NoiseSpec& spec, Rng& rng);

// Noise spec used inside gap_max for the given budget/variant.
NoiseSpec gap_max_noise_spec(const PrivacyBudget& budget, GapMaxVariant variant);

// GAP-MAX stability-based selector over `count` candidates whose scores are
// given by a sensitivity-1 oracle. Random bucketing into ceil(k^2/beta)
// buckets, exponential mechanism over bucket suprema at epsilon/4, then a
// noisy gap-score argmax inside the chosen bucket. Ties break to the lowest
// candidate index.
std::size_t gap_max(std::size_t count, const std::function<double(std::size_t)>& score,
                    const GapMaxParams& params, Rng& rng);

}  // namespace phs
