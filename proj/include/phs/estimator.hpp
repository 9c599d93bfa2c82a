#pragma once

#include <cstdint>

#include "phs/hypothesis.hpp"

namespace phs {

enum class EstimatorMode { Exact, MonteCarlo };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::MonteCarlo;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
};

// True iff x lies in the Scheffe set of the ordered pair (h, hprime):
// log h(x) > log hprime(x), strict.
bool in_scheffe_set(const Hypothesis& h, const Hypothesis& hprime, const Point& x);

// Mass of the Scheffe set of (h, hprime) under the measuring distribution q.
// Exact mode supports: finitely enumerable supports up to 1e6 states,
// spherical Gaussians, and univariate Gaussians; otherwise it throws
// UnsupportedExactError. Monte Carlo mode averages the indicator over
// cfg.mc_samples draws of q seeded from cfg.seed.
double scheffe_mass(const Hypothesis& h, const Hypothesis& hprime, const Hypothesis& q,
                    const EstimatorConfig& cfg);

// Fraction of dataset points inside the Scheffe set of (h, hprime).
double empirical_mass(const Hypothesis& h, const Hypothesis& hprime, const Dataset& d);

// Total variation distance. Exact paths: enumerable supports (half L1),
// spherical Gaussians (closed form), univariate Gaussians (crossing-point
// form); MC mode uses the Scheffe identity dtv = p1 - p2.
double tv_distance(const Hypothesis& h, const Hypothesis& hprime, const EstimatorConfig& cfg);

// True if the exact paths of scheffe_mass / tv_distance apply to this pair.
bool exact_supported(const Hypothesis& h, const Hypothesis& hprime);

// Exact TV when supported, otherwise MC with cfg's sample count and seed.
double tv_auto(const Hypothesis& h, const Hypothesis& hprime, const EstimatorConfig& cfg);

}  // namespace phs
