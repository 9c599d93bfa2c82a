#pragma once

#include <functional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "phs/estimator.hpp"
#include "phs/hypothesis.hpp"

namespace phs {

// Infinite covers are exposed through queries instead of a list: nearest
// element of a query hypothesis, all elements within a TV radius of it, and
// a data-driven anchor used by select_gapmax to pick the query point.
struct ImplicitCover {
  std::function<Hypothesis(const Hypothesis& query)> nearest;
  std::function<std::vector<Hypothesis>(const Hypothesis& query, double radius)> ball;
  std::function<Hypothesis(const Dataset& d)> anchor;
  std::size_t local_bound = 0;
};

struct CoverSpec {
  double alpha = 0.0;
  std::variant<std::vector<Hypothesis>, ImplicitCover> cover;

  bool is_explicit() const { return cover.index() == 0; }
  const std::vector<Hypothesis>& elements() const {
    return std::get<std::vector<Hypothesis>>(cover);
  }
  const ImplicitCover& implicit() const { return std::get<ImplicitCover>(cover); }
};

inline constexpr std::size_t kDefaultCoverCap = 10000000;

CoverSpec product_cover(std::size_t k, std::size_t d, double alpha,
                        std::size_t size_cap = kDefaultCoverCap);
CoverSpec gaussian_mean_cover(std::size_t d, double R, double alpha,
                              std::size_t size_cap = kDefaultCoverCap);
CoverSpec gaussian_cov_cover(std::size_t d, double R, double kappa, double alpha,
                             std::size_t size_cap = kDefaultCoverCap);
CoverSpec gaussian_lattice_cover(std::size_t d, double alpha);
CoverSpec univariate_gaussian_cover(double alpha);
CoverSpec mixture_cover(const CoverSpec& base, std::size_t k, double alpha,
                        std::size_t size_cap = kDefaultCoverCap);

std::vector<Hypothesis> greedy_packing(const std::vector<Hypothesis>& candidates,
                                       double alpha, const EstimatorConfig& cfg);

// Smallest n for which a size-|P| alpha-packing does not contradict pure
// epsilon-DP selection: ceil(ln(0.9 * packing_size) / epsilon), clamped at 0.
std::size_t packing_lower_bound_n(std::size_t packing_size, double epsilon);

nlohmann::json cover_to_json(const CoverSpec& spec);

}  // namespace phs
