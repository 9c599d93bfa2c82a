#include "phs/covers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phs/errors.hpp"
#include "phs/math_util.hpp"

namespace phs {
namespace {

std::string vec_id(const std::string& prefix, const std::vector<long long>& coords) {
  std::string s = prefix + "[";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coords[i]);
  }
  return s + "]";
}

// Enumerates tuples (j_1..j_free) with j_i in [0, per_max] and sum <= per_max,
// the shared pattern behind the simplex grids used below.
template <typename F>
void for_each_simplex_tuple(std::size_t free, long long per_max, F&& f) {
  std::vector<long long> j(free, 0);
  for (;;) {
    long long sum = 0;
    for (long long v : j) sum += v;
    if (sum <= per_max) f(j, sum);
    std::size_t c = 0;
    while (c < free) {
      if (++j[c] <= per_max) break;
      j[c] = 0;
      ++c;
    }
    if (c == free) break;
  }
}

double binom(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

std::pair<double, double> query_as_univariate(const Hypothesis& q) {
  if (const auto* g = std::get_if<GaussianUnivariate>(&q.family())) return {g->mean, g->var};
  if (const auto* s = std::get_if<GaussianSpherical>(&q.family()))
    if (s->mean.size() == 1) return {s->mean[0], 1.0};
  if (const auto* f = std::get_if<GaussianFull>(&q.family()))
    if (f->mean.size() == 1) return {f->mean[0], f->cov[0][0]};
  throw DomainMismatchError("query must be a univariate Gaussian");
}

const std::vector<double>& query_mean(const Hypothesis& q, std::size_t d) {
  const auto* s = std::get_if<GaussianSpherical>(&q.family());
  if (!s || s->mean.size() != d)
    throw DomainMismatchError("query must be a spherical Gaussian of the cover's dimension");
  return s->mean;
}

double univariate_tv(double m1, double v1, double m2, double v2) {
  EstimatorConfig cfg;
  cfg.mode = EstimatorMode::Exact;
  return tv_distance(Hypothesis::gaussian_univariate("a", m1, v1),
                     Hypothesis::gaussian_univariate("b", m2, v2), cfg);
}

void check_cap(double size, std::size_t cap, const std::string& which) {
  if (size > static_cast<double>(cap))
    throw CoverSizeError(which + " cover would have " + std::to_string(size) +
                             " elements, above the cap of " + std::to_string(cap),
                         size);
}

}  // namespace

CoverSpec product_cover(std::size_t k, std::size_t d, double alpha, std::size_t size_cap) {
  if (k < 2 || d < 1 || alpha <= 0.0 || alpha >= 1.0)
    throw ParameterRangeError("product_cover needs k >= 2, d >= 1, alpha in (0,1)");
  double g = alpha / (2.0 * static_cast<double>(k) * static_cast<double>(d));
  long long steps = static_cast<long long>(std::floor(1.0 / g + 1e-9));
  // First k-1 symbol masses on the grid {0, g, ..., steps*g}, last normalizes.
  double marginal = binom(static_cast<std::size_t>(steps) + k - 1, k - 1);
  check_cap(std::pow(marginal, static_cast<double>(d)), size_cap, "product");

  std::vector<std::vector<double>> marginals;
  for_each_simplex_tuple(k - 1, steps, [&](const std::vector<long long>& j, long long sum) {
    std::vector<double> pmf(k);
    for (std::size_t i = 0; i + 1 < k; ++i) pmf[i] = static_cast<double>(j[i]) * g;
    pmf[k - 1] = std::max(0.0, 1.0 - static_cast<double>(sum) * g);
    double total = 0.0;
    for (double p : pmf) total += p;
    for (double& p : pmf) p /= total;
    marginals.push_back(std::move(pmf));
  });

  std::vector<Hypothesis> elements;
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    if (d == 1) {
      elements.push_back(Hypothesis::categorical("prod-" + std::to_string(elements.size()),
                                                 marginals[idx[0]]));
    } else {
      std::vector<std::vector<double>> pmfs(d);
      for (std::size_t c = 0; c < d; ++c) pmfs[c] = marginals[idx[c]];
      elements.push_back(Hypothesis::product_categorical(
          "prod-" + std::to_string(elements.size()), std::move(pmfs)));
    }
    std::size_t c = 0;
    while (c < d) {
      if (++idx[c] < marginals.size()) break;
      idx[c] = 0;
      ++c;
    }
    if (c == d) break;
  }
  return CoverSpec{alpha, std::move(elements)};
}

CoverSpec gaussian_mean_cover(std::size_t d, double R, double alpha, std::size_t size_cap) {
  if (d < 1 || R < 0.0 || alpha <= 0.0 || alpha >= 1.0)
    throw ParameterRangeError("gaussian_mean_cover needs d >= 1, R >= 0, alpha in (0,1)");
  double s = 2.0 * alpha * kSqrtTwoPi / static_cast<double>(d);
  long long J = R > 0.0 ? static_cast<long long>(std::ceil(R / s)) : 0;
  double per = static_cast<double>(2 * J + 1);
  check_cap(std::pow(per, static_cast<double>(d)), size_cap, "gaussian-mean");

  std::vector<Hypothesis> elements;
  std::vector<long long> j(d, -J);
  for (;;) {
    std::vector<double> mean(d);
    for (std::size_t c = 0; c < d; ++c) mean[c] = static_cast<double>(j[c]) * s;
    elements.push_back(
        Hypothesis::gaussian_spherical("gm-" + std::to_string(elements.size()), mean));
    std::size_t c = 0;
    while (c < d) {
      if (++j[c] <= J) break;
      j[c] = -J;
      ++c;
    }
    if (c == d) break;
  }
  return CoverSpec{alpha, std::move(elements)};
}

CoverSpec gaussian_cov_cover(std::size_t d, double R, double kappa, double alpha,
                             std::size_t size_cap) {
  if (d < 1 || R < 0.0 || kappa < 1.0 || alpha <= 0.0 || alpha >= 1.0)
    throw ParameterRangeError("gaussian_cov_cover needs d >= 1, R >= 0, kappa >= 1");
  // Mean grid as in gaussian_mean_cover; Cholesky entries gridded at
  // granularity alpha/(3 d sqrt(kappa)) so the entrywise error keeps the
  // O(d*gamma) TV bound with constant 3.
  double root_kappa = std::sqrt(kappa);
  double gc = alpha / (3.0 * static_cast<double>(d) * root_kappa);
  double s = 2.0 * alpha * kSqrtTwoPi / static_cast<double>(d);
  long long J = R > 0.0 ? static_cast<long long>(std::ceil(R / s)) : 0;

  long long diag_steps = static_cast<long long>(std::ceil((root_kappa - 1.0) / gc + 1e-9));
  long long off_steps = static_cast<long long>(std::ceil(root_kappa / gc - 1e-9));
  std::size_t n_off = d * (d - 1) / 2;
  double chol_count = std::pow(static_cast<double>(diag_steps + 1), static_cast<double>(d)) *
                      std::pow(static_cast<double>(2 * off_steps + 1),
                               static_cast<double>(n_off));
  double mean_count = std::pow(static_cast<double>(2 * J + 1), static_cast<double>(d));
  check_cap(mean_count * chol_count, size_cap, "gaussian-cov");

  // Enumerate lower-triangular factors, keep Sigma with I <= Sigma <= kappa*I.
  std::vector<std::vector<std::vector<double>>> sigmas;
  std::size_t n_entries = d * (d + 1) / 2;
  std::vector<long long> e(n_entries, 0);
  std::vector<bool> is_diag(n_entries);
  {
    std::size_t t = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t c = 0; c <= i; ++c) is_diag[t++] = (c == i);
  }
  std::vector<long long> lo(n_entries), hi(n_entries);
  for (std::size_t t = 0; t < n_entries; ++t) {
    lo[t] = is_diag[t] ? 0 : -off_steps;
    hi[t] = is_diag[t] ? diag_steps : off_steps;
  }
  e = lo;
  for (;;) {
    std::vector<std::vector<double>> L(d, std::vector<double>(d, 0.0));
    {
      std::size_t t = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t c = 0; c <= i; ++c) {
          double base = is_diag[t] ? 1.0 : 0.0;
          L[i][c] = base + static_cast<double>(e[t]) * gc;
          ++t;
        }
    }
    std::vector<std::vector<double>> sigma(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t c = 0; c < d; ++c) {
        double v = 0.0;
        for (std::size_t t = 0; t < d; ++t) v += L[i][t] * L[c][t];
        sigma[i][c] = v;
      }
    // Sigma - I and kappa*I - Sigma must both be PSD (tiny jitter for the
    // boundary cases, e.g. kappa = 1 forcing Sigma = I exactly).
    std::vector<double> a(d * d), b(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t c = 0; c < d; ++c) {
        a[i * d + c] = sigma[i][c] - (i == c ? 1.0 : 0.0);
        b[i * d + c] = (i == c ? kappa : 0.0) - sigma[i][c];
      }
    if (cholesky_in_place(a, d, 1e-9) && cholesky_in_place(b, d, 1e-9))
      sigmas.push_back(std::move(sigma));

    std::size_t t = 0;
    while (t < n_entries) {
      if (++e[t] <= hi[t]) break;
      e[t] = lo[t];
      ++t;
    }
    if (t == n_entries) break;
  }

  std::vector<Hypothesis> elements;
  std::vector<long long> j(d, -J);
  for (;;) {
    std::vector<double> mean(d);
    for (std::size_t c = 0; c < d; ++c) mean[c] = static_cast<double>(j[c]) * s;
    for (const auto& sigma : sigmas)
      elements.push_back(Hypothesis::gaussian_full("gc-" + std::to_string(elements.size()),
                                                   mean, sigma));
    std::size_t c = 0;
    while (c < d) {
      if (++j[c] <= J) break;
      j[c] = -J;
      ++c;
    }
    if (c == d) break;
  }
  return CoverSpec{alpha, std::move(elements)};
}

CoverSpec gaussian_lattice_cover(std::size_t d, double alpha) {
  if (d < 1) throw ParameterRangeError("gaussian_lattice_cover needs d >= 1");
  if (alpha <= 0.0 || alpha > 1.0 / 30.0)
    throw ParameterRangeError("gaussian_lattice_cover needs alpha in (0, 1/30]");
  double w = 2.0 * alpha * kSqrtTwoPi / std::sqrt(static_cast<double>(d));

  auto element_at = [w, d](const std::vector<long long>& m) {
    std::vector<double> mean(d);
    for (std::size_t c = 0; c < d; ++c) mean[c] = static_cast<double>(m[c]) * w;
    return Hypothesis::gaussian_spherical(vec_id("lat", m), mean);
  };
  auto round_to_lattice = [w, d](const std::vector<double>& mu) {
    std::vector<long long> m(d);
    for (std::size_t c = 0; c < d; ++c)
      m[c] = static_cast<long long>(std::llround(mu[c] / w));
    return m;
  };

  ImplicitCover ic;
  ic.local_bound = d * 15 < 63 ? (std::size_t{1} << (15 * d)) : ~std::size_t{0};
  ic.nearest = [=](const Hypothesis& query) {
    return element_at(round_to_lattice(query_mean(query, d)));
  };
  ic.ball = [=](const Hypothesis& query, double radius) {
    if (radius <= 0.0 || radius >= 0.95)
      throw ParameterRangeError("lattice ball radius must be in (0, 0.95)");
    const std::vector<double>& mu = query_mean(query, d);
    // TV radius -> Euclidean mean-distance radius via the closed form.
    double dist_max = 2.0 * normal_quantile(0.5 + radius / 2.0);
    long long half = static_cast<long long>(std::ceil(dist_max / w));
    half = std::min(half, static_cast<long long>(
                              std::ceil(13.0 * std::sqrt(static_cast<double>(d)))));
    std::vector<long long> center = round_to_lattice(mu);
    std::vector<Hypothesis> out;
    std::vector<long long> m(d);
    for (std::size_t c = 0; c < d; ++c) m[c] = center[c] - half;
    for (;;) {
      double dist2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        double diff = static_cast<double>(m[c]) * w - mu[c];
        dist2 += diff * diff;
      }
      double tv = 2.0 * (normal_cdf(0.5 * std::sqrt(dist2)) - 0.5);
      if (tv <= radius) out.push_back(element_at(m));
      std::size_t c = 0;
      while (c < d) {
        if (++m[c] <= center[c] + half) break;
        m[c] = center[c] - half;
        ++c;
      }
      if (c == d) break;
    }
    return out;
  };
  ic.anchor = [d](const Dataset& data) {
    if (data.points.empty()) throw EmptyInputError("anchor over an empty dataset");
    std::vector<double> mean(d, 0.0);
    for (const auto& x : data.points) {
      if (x.size() != d) throw DomainMismatchError("dataset dimension mismatch");
      for (std::size_t c = 0; c < d; ++c) mean[c] += x[c];
    }
    for (double& v : mean) v /= static_cast<double>(data.size());
    return Hypothesis::gaussian_spherical("anchor", mean);
  };
  return CoverSpec{alpha, std::move(ic)};
}

CoverSpec univariate_gaussian_cover(double alpha) {
  if (alpha <= 0.0 || alpha > 0.1)
    throw ParameterRangeError("univariate_gaussian_cover needs alpha in (0, 0.1]");
  double beta = alpha;
  double g = std::log1p(alpha / 2.0);

  auto element_at = [beta, g](long long n, long long m) {
    double scale = std::exp(g * static_cast<double>(n));
    return Hypothesis::gaussian_univariate(
        vec_id("ug", {n, m}), beta * scale * static_cast<double>(m), scale * scale);
  };

  ImplicitCover ic;
  ic.local_bound = 512;
  ic.nearest = [=](const Hypothesis& query) {
    auto [mu, var] = query_as_univariate(query);
    long long n = static_cast<long long>(std::llround(0.5 * std::log(var) / g));
    double scale = std::exp(g * static_cast<double>(n));
    long long m = static_cast<long long>(std::llround(mu / (beta * scale)));
    return element_at(n, m);
  };
  ic.ball = [=](const Hypothesis& query, double radius) {
    if (radius <= 0.0 || radius >= 0.95)
      throw ParameterRangeError("univariate ball radius must be in (0, 0.95)");
    auto [mu, var] = query_as_univariate(query);
    double sigma = std::sqrt(var);
    // Scale window: TV >= 0.9545 - 1.596/r for sigma-ratio r (interval
    // [-2s,2s] argument), so candidates need r <= r_max.
    double r_max = 1.596 / (0.9545 - radius);
    long long n0 = static_cast<long long>(std::llround(0.5 * std::log(var) / g));
    long long n_half = static_cast<long long>(std::ceil(std::log(r_max) / g)) + 1;
    // Mean window: TV >= 2 Phi(|dmu| / (2 max sigma)) - 1.
    double z = normal_quantile(0.5 + radius / 2.0);
    std::vector<Hypothesis> out;
    for (long long n = n0 - n_half; n <= n0 + n_half; ++n) {
      double scale = std::exp(g * static_cast<double>(n));
      double dmu_max = 2.0 * std::max(sigma, scale) * z;
      double step = beta * scale;
      long long mc = static_cast<long long>(std::llround(mu / step));
      long long m_half = static_cast<long long>(std::ceil(dmu_max / step)) + 1;
      for (long long m = mc - m_half; m <= mc + m_half; ++m) {
        double emu = step * static_cast<double>(m);
        if (univariate_tv(mu, var, emu, scale * scale) <= radius)
          out.push_back(element_at(n, m));
      }
    }
    return out;
  };
  ic.anchor = [](const Dataset& data) {
    if (data.points.empty()) throw EmptyInputError("anchor over an empty dataset");
    double mean = 0.0, sq = 0.0;
    for (const auto& x : data.points) {
      if (x.size() != 1) throw DomainMismatchError("dataset must be one-dimensional");
      mean += x[0];
      sq += x[0] * x[0];
    }
    double n = static_cast<double>(data.size());
    mean /= n;
    double var = std::max(1e-12, sq / n - mean * mean);
    return Hypothesis::gaussian_univariate("anchor", mean, var);
  };
  return CoverSpec{alpha, std::move(ic)};
}

CoverSpec mixture_cover(const CoverSpec& base, std::size_t k, double alpha,
                        std::size_t size_cap) {
  if (!base.is_explicit())
    throw ParameterRangeError("mixture_cover needs an explicit base cover");
  if (k < 1 || alpha <= 0.0 || alpha >= 1.0)
    throw ParameterRangeError("mixture_cover needs k >= 1, alpha in (0,1)");
  const auto& elems = base.elements();
  if (elems.empty()) throw EmptyInputError("mixture_cover over an empty base cover");

  double step = 2.0 * alpha / static_cast<double>(k);
  long long steps = static_cast<long long>(std::floor(1.0 / step + 1e-9));
  // First k-1 weights on the grid, last normalizes (same simplex pattern as
  // the product cover's symbol masses).
  std::vector<std::vector<double>> weight_vectors;
  for_each_simplex_tuple(k - 1, steps, [&](const std::vector<long long>& j, long long sum) {
    std::vector<double> w(k);
    for (std::size_t i = 0; i + 1 < k; ++i) w[i] = static_cast<double>(j[i]) * step;
    w[k - 1] = std::max(0.0, 1.0 - static_cast<double>(sum) * step);
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    weight_vectors.push_back(std::move(w));
  });

  double size = std::pow(static_cast<double>(elems.size()), static_cast<double>(k)) *
                static_cast<double>(weight_vectors.size());
  check_cap(size, size_cap, "mixture");

  std::vector<Hypothesis> out;
  std::vector<std::size_t> idx(k, 0);
  for (;;) {
    for (const auto& w : weight_vectors) {
      std::vector<Hypothesis> comps;
      comps.reserve(k);
      for (std::size_t c = 0; c < k; ++c) comps.push_back(elems[idx[c]]);
      out.push_back(
          Hypothesis::mixture("mix-" + std::to_string(out.size()), w, std::move(comps)));
    }
    std::size_t c = 0;
    while (c < k) {
      if (++idx[c] < elems.size()) break;
      idx[c] = 0;
      ++c;
    }
    if (c == k) break;
  }
  return CoverSpec{2.0 * alpha + base.alpha, std::move(out)};
}

std::vector<Hypothesis> greedy_packing(const std::vector<Hypothesis>& candidates,
                                       double alpha, const EstimatorConfig& cfg) {
  std::vector<Hypothesis> kept;
  for (const auto& c : candidates) {
    bool far = true;
    for (const auto& p : kept) {
      if (tv_auto(c, p, cfg) <= alpha) {
        far = false;
        break;
      }
    }
    if (far) kept.push_back(c);
  }
  return kept;
}

std::size_t packing_lower_bound_n(std::size_t packing_size, double epsilon) {
  if (packing_size < 1 || epsilon <= 0.0)
    throw ParameterRangeError("packing_lower_bound_n needs packing_size >= 1, epsilon > 0");
  double v = std::log(0.9 * static_cast<double>(packing_size)) / epsilon;
  if (v <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(v));
}

nlohmann::json cover_to_json(const CoverSpec& spec) {
  nlohmann::json j;
  j["alpha"] = spec.alpha;
  if (spec.is_explicit()) {
    nlohmann::json elems = nlohmann::json::array();
    for (const auto& h : spec.elements()) elems.push_back(h.to_json());
    j["elements"] = std::move(elems);
  } else {
    j["implicit"] = true;
    j["local_bound"] = spec.implicit().local_bound;
  }
  return j;
}

}  // namespace phs
