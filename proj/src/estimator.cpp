#include "phs/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "phs/errors.hpp"
#include "phs/math_util.hpp"

namespace phs {
namespace {

constexpr std::size_t kEnumCap = 1000000;

// (mean, var) view for any one-dimensional real Gaussian-like hypothesis.
std::optional<std::pair<double, double>> as_univariate(const Hypothesis& h) {
  if (const auto* g = std::get_if<GaussianUnivariate>(&h.family())) return {{g->mean, g->var}};
  if (const auto* s = std::get_if<GaussianSpherical>(&h.family()))
    if (s->mean.size() == 1) return {{s->mean[0], 1.0}};
  if (const auto* f = std::get_if<GaussianFull>(&h.family()))
    if (f->mean.size() == 1) return {{f->mean[0], f->cov[0][0]}};
  return std::nullopt;
}

const std::vector<double>* as_spherical(const Hypothesis& h) {
  const auto* s = std::get_if<GaussianSpherical>(&h.family());
  return s ? &s->mean : nullptr;
}

// Shared enumerable support of two or three hypotheses: per-coordinate max of
// the individual support sizes. nullopt when any is continuous or the total
// state count exceeds kEnumCap.
std::optional<std::vector<std::size_t>> shared_support(
    std::initializer_list<const Hypothesis*> hs) {
  std::optional<std::vector<std::size_t>> acc;
  for (const Hypothesis* h : hs) {
    auto s = h->support_sizes();
    if (!s) return std::nullopt;
    if (!acc) {
      acc = s;
    } else {
      if (acc->size() != s->size())
        throw DomainMismatchError("hypotheses have different coordinate counts");
      for (std::size_t i = 0; i < s->size(); ++i) (*acc)[i] = std::max((*acc)[i], (*s)[i]);
    }
  }
  double total = 1.0;
  for (std::size_t k : *acc) total *= static_cast<double>(k);
  if (total > static_cast<double>(kEnumCap)) return std::nullopt;
  return acc;
}

// Visits every point of a mixed-radix support.
template <typename F>
void for_each_state(const std::vector<std::size_t>& sizes, F&& f) {
  Point x(sizes.size(), 0.0);
  std::vector<std::size_t> idx(sizes.size(), 0);
  for (;;) {
    f(x);
    std::size_t c = 0;
    while (c < sizes.size()) {
      if (++idx[c] < sizes[c]) {
        x[c] = static_cast<double>(idx[c]);
        break;
      }
      idx[c] = 0;
      x[c] = 0.0;
      ++c;
    }
    if (c == sizes.size()) break;
  }
}

// Mass of {x : a x^2 + b x + c > 0} under N(mean, var).
double quadratic_region_mass(double a, double b, double c, double mean, double var) {
  double sd = std::sqrt(var);
  auto cdf = [&](double x) { return normal_cdf((x - mean) / sd); };
  if (a == 0.0) {
    if (b == 0.0) return c > 0.0 ? 1.0 : 0.0;
    double r = -c / b;
    return b > 0.0 ? 1.0 - cdf(r) : cdf(r);
  }
  double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return a > 0.0 ? 1.0 : 0.0;
  double sq = std::sqrt(disc);
  double r1 = (-b - sq) / (2.0 * a);
  double r2 = (-b + sq) / (2.0 * a);
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0.0) return cdf(r1) + (1.0 - cdf(r2));
  return cdf(r2) - cdf(r1);
}

// Coefficients of log h - log h' for univariate Gaussians.
struct Quadratic {
  double a, b, c;
};
Quadratic log_ratio_coeffs(std::pair<double, double> g1, std::pair<double, double> g2) {
  auto [m1, v1] = g1;
  auto [m2, v2] = g2;
  return {
      -0.5 / v1 + 0.5 / v2,
      m1 / v1 - m2 / v2,
      -0.5 * m1 * m1 / v1 + 0.5 * m2 * m2 / v2 + 0.5 * std::log(v2 / v1),
  };
}

double spherical_scheffe_mass(const std::vector<double>& mu1, const std::vector<double>& mu2,
                              const std::vector<double>& muq) {
  double w2 = 0.0, dot = 0.0, c = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    double w = mu1[i] - mu2[i];
    w2 += w * w;
    dot += w * muq[i];
    c += 0.5 * (mu1[i] * mu1[i] - mu2[i] * mu2[i]);
  }
  if (w2 == 0.0) return 0.0;
  return normal_cdf((dot - c) / std::sqrt(w2));
}

void check_shared_domain(const Hypothesis& a, const Hypothesis& b) {
  if (!(a.domain() == b.domain()))
    throw DomainMismatchError("hypotheses '" + a.id() + "' and '" + b.id() +
                              "' are on different domains");
}

enum class ExactClass { None, Enumerable, Univariate, Spherical };

ExactClass exact_class(const Hypothesis& h, const Hypothesis& hprime) {
  check_shared_domain(h, hprime);
  if (shared_support({&h, &hprime})) return ExactClass::Enumerable;
  if (as_univariate(h) && as_univariate(hprime)) return ExactClass::Univariate;
  if (as_spherical(h) && as_spherical(hprime)) return ExactClass::Spherical;
  return ExactClass::None;
}

}  // namespace

bool in_scheffe_set(const Hypothesis& h, const Hypothesis& hprime, const Point& x) {
  return h.log_density(x) > hprime.log_density(x);
}

double empirical_mass(const Hypothesis& h, const Hypothesis& hprime, const Dataset& d) {
  if (d.points.empty()) throw EmptyInputError("empirical_mass over an empty dataset");
  std::size_t c = 0;
  for (const auto& x : d.points) c += in_scheffe_set(h, hprime, x) ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(d.size());
}

bool exact_supported(const Hypothesis& h, const Hypothesis& hprime) {
  return exact_class(h, hprime) != ExactClass::None;
}

double scheffe_mass(const Hypothesis& h, const Hypothesis& hprime, const Hypothesis& q,
                    const EstimatorConfig& cfg) {
  check_shared_domain(h, hprime);
  check_shared_domain(h, q);
  if (cfg.mode == EstimatorMode::Exact) {
    if (auto sizes = shared_support({&h, &hprime, &q})) {
      double mass = 0.0;
      for_each_state(*sizes, [&](const Point& x) {
        if (in_scheffe_set(h, hprime, x)) mass += q.density(x);
      });
      return std::min(1.0, mass);
    }
    auto u1 = as_univariate(h), u2 = as_univariate(hprime), uq = as_univariate(q);
    if (u1 && u2 && uq) {
      auto [a, b, c] = log_ratio_coeffs(*u1, *u2);
      return quadratic_region_mass(a, b, c, uq->first, uq->second);
    }
    const auto *s1 = as_spherical(h), *s2 = as_spherical(hprime), *sq = as_spherical(q);
    if (s1 && s2 && sq) return spherical_scheffe_mass(*s1, *s2, *sq);
    throw UnsupportedExactError("no exact Scheffe mass for this family combination");
  }
  if (cfg.mc_samples == 0) throw ParameterRangeError("mc_samples must be positive");
  Rng rng(cfg.seed);
  std::size_t c = 0;
  for (std::size_t i = 0; i < cfg.mc_samples; ++i)
    c += in_scheffe_set(h, hprime, q.sample(rng)) ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(cfg.mc_samples);
}

double tv_distance(const Hypothesis& h, const Hypothesis& hprime, const EstimatorConfig& cfg) {
  check_shared_domain(h, hprime);
  if (cfg.mode == EstimatorMode::Exact) {
    if (auto sizes = shared_support({&h, &hprime})) {
      double l1 = 0.0;
      for_each_state(*sizes, [&](const Point& x) {
        l1 += std::fabs(h.density(x) - hprime.density(x));
      });
      return 0.5 * l1;
    }
    auto u1 = as_univariate(h), u2 = as_univariate(hprime);
    if (u1 && u2) {
      auto [a, b, c] = log_ratio_coeffs(*u1, *u2);
      return quadratic_region_mass(a, b, c, u1->first, u1->second) -
             quadratic_region_mass(a, b, c, u2->first, u2->second);
    }
    const auto *s1 = as_spherical(h), *s2 = as_spherical(hprime);
    if (s1 && s2) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < s1->size(); ++i) {
        double v = (*s1)[i] - (*s2)[i];
        d2 += v * v;
      }
      return 2.0 * (normal_cdf(0.5 * std::sqrt(d2)) - 0.5);
    }
    throw UnsupportedExactError("no exact TV for this family combination");
  }
  EstimatorConfig c1 = cfg, c2 = cfg;
  c1.seed = derive_seed(cfg.seed, 0x7476703153ULL);
  c2.seed = derive_seed(cfg.seed, 0x7476703253ULL);
  double p1 = scheffe_mass(h, hprime, h, c1);
  double p2 = scheffe_mass(h, hprime, hprime, c2);
  return std::clamp(p1 - p2, 0.0, 1.0);
}

double tv_auto(const Hypothesis& h, const Hypothesis& hprime, const EstimatorConfig& cfg) {
  EstimatorConfig c = cfg;
  c.mode = exact_supported(h, hprime) ? EstimatorMode::Exact : EstimatorMode::MonteCarlo;
  return tv_distance(h, hprime, c);
}

}  // namespace phs
