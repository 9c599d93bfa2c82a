#include "phs/hypothesis.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <utility>

#include "phs/errors.hpp"
#include "phs/math_util.hpp"

namespace phs {
namespace {

constexpr double kSumTol = 1e-9;

void validate_pmf(const std::vector<double>& pmf, const std::string& id) {
  if (pmf.empty()) throw DomainMismatchError("empty pmf in hypothesis '" + id + "'");
  double s = 0.0;
  for (double p : pmf) {
    if (p < 0.0 || !std::isfinite(p))
      throw DomainMismatchError("negative or non-finite pmf entry in '" + id + "'");
    s += p;
  }
  if (std::fabs(s - 1.0) > kSumTol)
    throw DomainMismatchError("pmf of '" + id + "' does not sum to 1");
}

std::size_t as_symbol(const Point& x, std::size_t coord) {
  double v = x[coord];
  double r = std::round(v);
  if (std::fabs(v - r) > 1e-9 || r < 0)
    throw DomainMismatchError("non-integral or negative symbol coordinate");
  return static_cast<std::size_t>(r);
}

std::size_t sample_pmf(const std::vector<double>& pmf, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return i;
  }
  return pmf.size() - 1;
}

void check_arity(const Point& x, std::size_t dim) {
  if (x.size() != dim) throw DomainMismatchError("point arity mismatch");
}

}  // namespace

Hypothesis::Hypothesis(std::string id, Family family)
    : id_(std::move(id)), family_(std::move(family)) {
  std::visit(
      [this](auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          validate_pmf(f.pmf, id_);
        } else if constexpr (std::is_same_v<T, ProductCategorical>) {
          if (f.pmfs.empty()) throw DomainMismatchError("empty product in '" + id_ + "'");
          for (const auto& p : f.pmfs) validate_pmf(p, id_);
        } else if constexpr (std::is_same_v<T, GaussianSpherical>) {
          if (f.mean.empty()) throw DomainMismatchError("empty mean in '" + id_ + "'");
        } else if constexpr (std::is_same_v<T, GaussianFull>) {
          std::size_t d = f.mean.size();
          if (d == 0 || f.cov.size() != d)
            throw DomainMismatchError("bad covariance shape in '" + id_ + "'");
          std::vector<double> a(d * d);
          for (std::size_t i = 0; i < d; ++i) {
            if (f.cov[i].size() != d)
              throw DomainMismatchError("bad covariance shape in '" + id_ + "'");
            for (std::size_t j = 0; j < d; ++j) {
              if (std::fabs(f.cov[i][j] - f.cov[j][i]) > 1e-9)
                throw DomainMismatchError("covariance of '" + id_ + "' not symmetric");
              a[i * d + j] = f.cov[i][j];
            }
          }
          if (!cholesky_in_place(a, d))
            throw DomainMismatchError("covariance of '" + id_ + "' not positive definite");
          f.chol = std::move(a);
          f.log_det = 0.0;
          for (std::size_t i = 0; i < d; ++i) f.log_det += 2.0 * std::log(f.chol[i * d + i]);
        } else if constexpr (std::is_same_v<T, GaussianUnivariate>) {
          if (f.var <= 0.0) throw DomainMismatchError("nonpositive variance in '" + id_ + "'");
        } else if constexpr (std::is_same_v<T, Mixture>) {
          validate_pmf(f.weights, id_);
          if (f.components.size() != f.weights.size() || f.components.empty())
            throw DomainMismatchError("mixture '" + id_ + "' weight/component mismatch");
          Domain d0 = f.components.front().domain();
          for (const auto& c : f.components)
            if (!(c.domain() == d0))
              throw DomainMismatchError("mixture '" + id_ + "' components on different domains");
        }
      },
      family_);
}

Hypothesis Hypothesis::categorical(std::string id, std::vector<double> pmf) {
  return Hypothesis(std::move(id), Categorical{std::move(pmf)});
}
Hypothesis Hypothesis::product_categorical(std::string id,
                                           std::vector<std::vector<double>> pmfs) {
  return Hypothesis(std::move(id), ProductCategorical{std::move(pmfs)});
}
Hypothesis Hypothesis::gaussian_spherical(std::string id, std::vector<double> mean) {
  return Hypothesis(std::move(id), GaussianSpherical{std::move(mean)});
}
Hypothesis Hypothesis::gaussian_full(std::string id, std::vector<double> mean,
                                     std::vector<std::vector<double>> cov) {
  return Hypothesis(std::move(id), GaussianFull{std::move(mean), std::move(cov), {}, 0.0});
}
Hypothesis Hypothesis::gaussian_univariate(std::string id, double mean, double var) {
  return Hypothesis(std::move(id), GaussianUnivariate{mean, var});
}
Hypothesis Hypothesis::mixture(std::string id, std::vector<double> weights,
                               std::vector<Hypothesis> components) {
  return Hypothesis(std::move(id), Mixture{std::move(weights), std::move(components)});
}

Domain Hypothesis::domain() const {
  return std::visit(
      [](const auto& f) -> Domain {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          return Domain::finite_discrete(f.pmf.size());
        } else if constexpr (std::is_same_v<T, ProductCategorical>) {
          return Domain::integer_lattice(f.pmfs.size());
        } else if constexpr (std::is_same_v<T, GaussianSpherical>) {
          return Domain::real_vector(f.mean.size());
        } else if constexpr (std::is_same_v<T, GaussianFull>) {
          return Domain::real_vector(f.mean.size());
        } else if constexpr (std::is_same_v<T, GaussianUnivariate>) {
          return Domain::real_vector(1);
        } else {
          return f.components.front().domain();
        }
      },
      family_);
}

double Hypothesis::log_density(const Point& x) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          check_arity(x, 1);
          std::size_t s = as_symbol(x, 0);
          double p = s < f.pmf.size() ? f.pmf[s] : 0.0;
          return p > 0.0 ? std::log(p) : kNegInf;
        } else if constexpr (std::is_same_v<T, ProductCategorical>) {
          check_arity(x, f.pmfs.size());
          double lp = 0.0;
          for (std::size_t i = 0; i < f.pmfs.size(); ++i) {
            std::size_t s = as_symbol(x, i);
            double p = s < f.pmfs[i].size() ? f.pmfs[i][s] : 0.0;
            if (p <= 0.0) return kNegInf;
            lp += std::log(p);
          }
          return lp;
        } else if constexpr (std::is_same_v<T, GaussianSpherical>) {
          check_arity(x, f.mean.size());
          double q = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            double dxi = x[i] - f.mean[i];
            q += dxi * dxi;
          }
          return -0.5 * q - 0.5 * static_cast<double>(x.size()) * std::log(kTwoPi);
        } else if constexpr (std::is_same_v<T, GaussianFull>) {
          std::size_t d = f.mean.size();
          check_arity(x, d);
          // Solve L y = (x - mean); quadratic form is |y|^2.
          std::vector<double> y(d);
          for (std::size_t i = 0; i < d; ++i) {
            double s = x[i] - f.mean[i];
            for (std::size_t k = 0; k < i; ++k) s -= f.chol[i * d + k] * y[k];
            y[i] = s / f.chol[i * d + i];
          }
          double q = 0.0;
          for (double v : y) q += v * v;
          return -0.5 * q - 0.5 * (static_cast<double>(d) * std::log(kTwoPi) + f.log_det);
        } else if constexpr (std::is_same_v<T, GaussianUnivariate>) {
          check_arity(x, 1);
          double dxi = x[0] - f.mean;
          return -0.5 * dxi * dxi / f.var - 0.5 * std::log(kTwoPi * f.var);
        } else {
          std::vector<double> terms;
          terms.reserve(f.components.size());
          for (std::size_t i = 0; i < f.components.size(); ++i) {
            double lw = f.weights[i] > 0.0 ? std::log(f.weights[i]) : kNegInf;
            terms.push_back(lw + f.components[i].log_density(x));
          }
          return log_sum_exp(terms);
        }
      },
      family_);
}

double Hypothesis::density(const Point& x) const { return std::exp(log_density(x)); }

Point Hypothesis::sample(Rng& rng) const {
  return std::visit(
      [&](const auto& f) -> Point {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          return {static_cast<double>(sample_pmf(f.pmf, rng))};
        } else if constexpr (std::is_same_v<T, ProductCategorical>) {
          Point x(f.pmfs.size());
          for (std::size_t i = 0; i < f.pmfs.size(); ++i)
            x[i] = static_cast<double>(sample_pmf(f.pmfs[i], rng));
          return x;
        } else if constexpr (std::is_same_v<T, GaussianSpherical>) {
          Point x(f.mean.size());
          for (std::size_t i = 0; i < x.size(); ++i) x[i] = f.mean[i] + rng.normal();
          return x;
        } else if constexpr (std::is_same_v<T, GaussianFull>) {
          std::size_t d = f.mean.size();
          std::vector<double> z(d);
          for (auto& v : z) v = rng.normal();
          Point x(d);
          for (std::size_t i = 0; i < d; ++i) {
            double s = f.mean[i];
            for (std::size_t k = 0; k <= i; ++k) s += f.chol[i * d + k] * z[k];
            x[i] = s;
          }
          return x;
        } else if constexpr (std::is_same_v<T, GaussianUnivariate>) {
          return {f.mean + std::sqrt(f.var) * rng.normal()};
        } else {
          return f.components[sample_pmf(f.weights, rng)].sample(rng);
        }
      },
      family_);
}

Dataset Hypothesis::sample_n(std::size_t n, Rng& rng) const {
  Dataset d;
  d.domain = domain();
  d.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.points.push_back(sample(rng));
  return d;
}

std::optional<std::vector<std::size_t>> Hypothesis::support_sizes() const {
  return std::visit(
      [](const auto& f) -> std::optional<std::vector<std::size_t>> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          return std::vector<std::size_t>{f.pmf.size()};
        } else if constexpr (std::is_same_v<T, ProductCategorical>) {
          std::vector<std::size_t> s;
          for (const auto& p : f.pmfs) s.push_back(p.size());
          return s;
        } else if constexpr (std::is_same_v<T, Mixture>) {
          std::optional<std::vector<std::size_t>> acc;
          for (const auto& c : f.components) {
            auto s = c.support_sizes();
            if (!s) return std::nullopt;
            if (!acc) {
              acc = s;
            } else {
              if (acc->size() != s->size()) return std::nullopt;
              for (std::size_t i = 0; i < s->size(); ++i)
                (*acc)[i] = std::max((*acc)[i], (*s)[i]);
            }
          }
          return acc;
        } else {
          return std::nullopt;
        }
      },
      family_);
}

nlohmann::json Hypothesis::to_json() const {
  nlohmann::json j;
  j["id"] = id_;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          j["family"] = "categorical";
          j["params"] = {{"pmf", f.pmf}};
        } else if constexpr (std::is_same_v<T, ProductCategorical>) {
          j["family"] = "product-categorical";
          j["params"] = {{"pmfs", f.pmfs}};
        } else if constexpr (std::is_same_v<T, GaussianSpherical>) {
          j["family"] = "gaussian-spherical";
          j["params"] = {{"mean", f.mean}};
        } else if constexpr (std::is_same_v<T, GaussianFull>) {
          j["family"] = "gaussian-full";
          j["params"] = {{"mean", f.mean}, {"cov", f.cov}};
        } else if constexpr (std::is_same_v<T, GaussianUnivariate>) {
          j["family"] = "gaussian-univariate";
          j["params"] = {{"mean", f.mean}, {"var", f.var}};
        } else {
          j["family"] = "mixture";
          nlohmann::json comps = nlohmann::json::array();
          for (const auto& c : f.components) comps.push_back(c.to_json());
          j["params"] = {{"weights", f.weights}, {"components", comps}};
        }
      },
      family_);
  return j;
}

Hypothesis Hypothesis::from_json(const nlohmann::json& j) {
  try {
    std::string id = j.at("id").get<std::string>();
    std::string fam = j.at("family").get<std::string>();
    const auto& p = j.at("params");
    if (fam == "categorical")
      return categorical(id, p.at("pmf").get<std::vector<double>>());
    if (fam == "product-categorical")
      return product_categorical(id, p.at("pmfs").get<std::vector<std::vector<double>>>());
    if (fam == "gaussian-spherical")
      return gaussian_spherical(id, p.at("mean").get<std::vector<double>>());
    if (fam == "gaussian-full")
      return gaussian_full(id, p.at("mean").get<std::vector<double>>(),
                           p.at("cov").get<std::vector<std::vector<double>>>());
    if (fam == "gaussian-univariate")
      return gaussian_univariate(id, p.at("mean").get<double>(), p.at("var").get<double>());
    if (fam == "mixture") {
      std::vector<Hypothesis> comps;
      for (const auto& cj : p.at("components")) comps.push_back(from_json(cj));
      return mixture(id, p.at("weights").get<std::vector<double>>(), std::move(comps));
    }
    throw ParseError("unknown family '" + fam + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad hypothesis JSON: ") + e.what());
  }
}

nlohmann::json dataset_to_json(const Dataset& d) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : d.points) {
    if (x.size() == 1) {
      arr.push_back(x[0]);
    } else {
      arr.push_back(x);
    }
  }
  return arr;
}

Dataset dataset_from_json(const nlohmann::json& j, const Domain& domain) {
  if (!j.is_array()) throw ParseError("dataset JSON must be an array of points");
  Dataset d;
  d.domain = domain;
  for (const auto& e : j) {
    if (e.is_number()) {
      d.points.push_back({e.get<double>()});
    } else if (e.is_array()) {
      d.points.push_back(e.get<std::vector<double>>());
    } else {
      throw ParseError("dataset entry is neither a number nor an array");
    }
    if (d.points.back().size() != domain.dim)
      throw ParseError("dataset point arity does not match domain");
  }
  if (d.points.empty()) throw ParseError("dataset is empty");
  return d;
}

}  // namespace phs
