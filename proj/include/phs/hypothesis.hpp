#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "phs/domain.hpp"
#include "phs/rng.hpp"

namespace phs {

class Hypothesis;

struct Categorical {
  std::vector<double> pmf;
};

struct ProductCategorical {
  std::vector<std::vector<double>> pmfs;  // one pmf per coordinate
};

struct GaussianSpherical {
  std::vector<double> mean;  // unit covariance
};

struct GaussianFull {
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
  // Derived at construction: row-major lower Cholesky factor and log|cov|.
  std::vector<double> chol;
  double log_det = 0.0;
};

struct GaussianUnivariate {
  double mean = 0.0;
  double var = 1.0;
};

struct Mixture {
  std::vector<double> weights;
  std::vector<Hypothesis> components;
};

using Family = std::variant<Categorical, ProductCategorical, GaussianSpherical,
                            GaussianFull, GaussianUnivariate, Mixture>;

// A candidate distribution: a named member of one of the closed families,
// exposing density evaluation and seeded sampling.
class Hypothesis {
 public:
  Hypothesis(std::string id, Family family);

  static Hypothesis categorical(std::string id, std::vector<double> pmf);
  static Hypothesis product_categorical(std::string id,
                                        std::vector<std::vector<double>> pmfs);
  static Hypothesis gaussian_spherical(std::string id, std::vector<double> mean);
  static Hypothesis gaussian_full(std::string id, std::vector<double> mean,
                                  std::vector<std::vector<double>> cov);
  static Hypothesis gaussian_univariate(std::string id, double mean, double var);
  static Hypothesis mixture(std::string id, std::vector<double> weights,
                            std::vector<Hypothesis> components);

  const std::string& id() const { return id_; }
  const Family& family() const { return family_; }
  Domain domain() const;

  // pmf value (discrete) or pdf value (continuous). Throws
  // DomainMismatchError on arity/kind mismatch; an in-range-arity symbol
  // outside a pmf's support has density 0.
  double density(const Point& x) const;
  double log_density(const Point& x) const;  // -inf where density is 0

  Point sample(Rng& rng) const;
  Dataset sample_n(std::size_t n, Rng& rng) const;

  // Per-coordinate support sizes for finitely enumerable families
  // (categorical / product-categorical / mixtures thereof); nullopt for
  // continuous families.
  std::optional<std::vector<std::size_t>> support_sizes() const;

  nlohmann::json to_json() const;
  static Hypothesis from_json(const nlohmann::json& j);

 private:
  std::string id_;
  Family family_;
};

nlohmann::json dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const nlohmann::json& j, const Domain& domain);

}  // namespace phs
