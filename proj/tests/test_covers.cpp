#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "phs/covers.hpp"
#include "phs/errors.hpp"
#include "phs/math_util.hpp"

using namespace phs;

namespace {
EstimatorConfig exact_cfg() { return {EstimatorMode::Exact, 0, 0}; }

double nearest_tv(const Hypothesis& member, const std::vector<Hypothesis>& elems) {
  double best = 1.0;
  for (const auto& e : elems) best = std::min(best, tv_distance(member, e, exact_cfg()));
  return best;
}
}  // namespace

TEST_CASE("Bernoulli grid cover") {
  CoverSpec c = product_cover(2, 1, 0.2);
  CHECK(c.elements().size() == 21);
  for (double p = 0.0; p <= 1.0; p += 0.001) {
    auto member = Hypothesis::categorical("m", {1.0 - p, p});
    CHECK(nearest_tv(member, c.elements()) <= 0.025 + 1e-9);
  }
}

TEST_CASE("product cover pmfs are valid and nested in accuracy") {
  CoverSpec c = product_cover(3, 1, 0.3);
  for (const auto& h : c.elements()) {
    const auto& pmf = std::get<Categorical>(h.family()).pmf;
    double total = 0;
    for (double v : pmf) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  // An alpha-cover also alpha'-covers for alpha' >= alpha.
  auto member = Hypothesis::categorical("m", {0.31, 0.29, 0.40});
  CHECK(nearest_tv(member, c.elements()) <= 0.3);
  CHECK(nearest_tv(member, c.elements()) <= 0.5);
}

TEST_CASE("product cover size cap") {
  CHECK_THROWS_AS(product_cover(10, 5, 0.01), CoverSizeError);
  try {
    product_cover(10, 5, 0.01);
  } catch (const CoverSizeError& e) {
    CHECK(e.size() > 1e7);
  }
}

TEST_CASE("gaussian mean cover") {
  CoverSpec zero = gaussian_mean_cover(1, 0.0, 0.25);
  CHECK(zero.elements().size() == 1);
  CHECK(std::get<GaussianSpherical>(zero.elements()[0].family()).mean[0] == 0.0);

  CoverSpec c1 = gaussian_mean_cover(1, 1.0, 0.25);
  for (double mu = -1.0; mu <= 1.0; mu += 0.01) {
    auto member = Hypothesis::gaussian_spherical("m", {mu});
    CHECK(nearest_tv(member, c1.elements()) <= 0.25 + 1e-9);
  }

  CoverSpec c2 = gaussian_mean_cover(2, 1.0, 0.5);
  Rng rng(31);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> mu{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    auto member = Hypothesis::gaussian_spherical("m", mu);
    CHECK(nearest_tv(member, c2.elements()) <= 0.5 + 1e-9);
  }
}

TEST_CASE("gaussian covariance cover") {
  // kappa = 1 collapses the variance grid.
  CoverSpec unit = gaussian_cov_cover(1, 1.0, 1.0, 0.25);
  CoverSpec means = gaussian_mean_cover(1, 1.0, 0.25);
  CHECK(unit.elements().size() == means.elements().size());
  for (const auto& h : unit.elements())
    CHECK(std::get<GaussianFull>(h.family()).cov[0][0] == doctest::Approx(1.0));

  // Every sigma^2 in [1,2] is covered within alpha (quadrature oracle).
  CoverSpec var = gaussian_cov_cover(1, 0.0, 2.0, 0.2);
  CHECK(!var.elements().empty());
  for (double v = 1.0; v <= 2.0; v += 0.01) {
    double best = 1.0;
    for (const auto& h : var.elements()) {
      const auto& g = std::get<GaussianFull>(h.family());
      best = std::min(best, oracles::quadrature_tv(0.0, v, g.mean[0], g.cov[0][0]));
    }
    CHECK(best <= 0.2 + 1e-6);
  }

  // Emitted 2x2 covariances have eigenvalues in [1, kappa].
  CoverSpec c2 = gaussian_cov_cover(2, 0.0, 2.0, 0.45);
  CHECK(!c2.elements().empty());
  for (const auto& h : c2.elements()) {
    const auto& cov = std::get<GaussianFull>(h.family()).cov;
    double tr = cov[0][0] + cov[1][1];
    double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    double lo = tr / 2.0 - disc, hi = tr / 2.0 + disc;
    CHECK(lo >= 1.0 - 1e-6);
    CHECK(hi <= 2.0 + 1e-6);
    CHECK(cov[0][1] == doctest::Approx(cov[1][0]));
  }
}

TEST_CASE("gaussian lattice cover basics") {
  CHECK_THROWS_AS(gaussian_lattice_cover(2, 0.5), ParameterRangeError);
  CoverSpec c = gaussian_lattice_cover(2, 0.03);
  CHECK(c.implicit().local_bound == (std::size_t{1} << 30));

  // A query sitting exactly on the lattice comes back at TV 0.
  double w = 2.0 * 0.03 * kSqrtTwoPi / std::sqrt(2.0);
  auto query = Hypothesis::gaussian_spherical("q", {3.0 * w, -2.0 * w});
  auto near = c.implicit().nearest(query);
  CHECK(tv_distance(query, near, exact_cfg()) == doctest::Approx(0.0).epsilon(1e-12));

  // Nearest element is within alpha for random means; ball is locally small.
  Rng rng(41);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> mu{200.0 * rng.uniform() - 100.0, 200.0 * rng.uniform() - 100.0};
    auto q = Hypothesis::gaussian_spherical("q", mu);
    CHECK(tv_distance(q, c.implicit().nearest(q), exact_cfg()) <= 0.03 + 1e-9);
    auto ball = c.implicit().ball(q, 7.0 * 0.03);
    CHECK(ball.size() <= c.implicit().local_bound);
    CHECK(!ball.empty());
    for (const auto& e : ball)
      CHECK(tv_distance(q, e, exact_cfg()) <= 7.0 * 0.03 + 1e-9);
  }
}

TEST_CASE("univariate gaussian cover basics") {
  CHECK_THROWS_AS(univariate_gaussian_cover(0.2), ParameterRangeError);
  CoverSpec c = univariate_gaussian_cover(0.05);
  CHECK(c.implicit().local_bound == 512);

  double g = std::log1p(0.025);
  auto exact_elem = Hypothesis::gaussian_univariate(
      "q", 0.05 * std::exp(3.0 * g) * 7.0, std::exp(6.0 * g));
  auto near = c.implicit().nearest(exact_elem);
  CHECK(tv_distance(exact_elem, near, exact_cfg()) == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(51);
  for (int t = 0; t < 50; ++t) {
    double mu = 2000.0 * rng.uniform() - 1000.0;
    double sigma = std::exp(rng.uniform() * (std::log(100.0) - std::log(0.01)) +
                            std::log(0.01));
    auto q = Hypothesis::gaussian_univariate("q", mu, sigma * sigma);
    auto n = c.implicit().nearest(q);
    const auto& gg = std::get<GaussianUnivariate>(n.family());
    CHECK(oracles::quadrature_tv(mu, sigma * sigma, gg.mean, gg.var) <= 0.05 + 1e-6);
  }

  // Ball contents honor the requested radius.
  auto q = Hypothesis::gaussian_univariate("q", 1.7, 0.9);
  auto ball = c.implicit().ball(q, 0.05);
  CHECK(!ball.empty());
  for (const auto& e : ball) CHECK(tv_distance(q, e, exact_cfg()) <= 0.05 + 1e-9);
}

TEST_CASE("mixture cover") {
  CoverSpec base = product_cover(2, 1, 0.25);
  CoverSpec k1 = mixture_cover(base, 1, 0.25);
  CHECK(k1.elements().size() == base.elements().size());
  for (const auto& h : k1.elements())
    CHECK(std::get<Mixture>(h.family()).weights == std::vector<double>{1.0});

  // Two-element base: weight grid {0,.25,.5,.75,1} and 2^2*5 mixtures.
  CoverSpec tiny{0.25, std::vector<Hypothesis>{Hypothesis::categorical("a", {0.9, 0.1}),
                                               Hypothesis::categorical("b", {0.1, 0.9})}};
  CoverSpec mixed = mixture_cover(tiny, 2, 0.25);
  CHECK(mixed.elements().size() == 4 * 5);

  // Random 2-mixtures of Bernoullis are covered within 2*alpha + base alpha.
  CoverSpec full = mixture_cover(base, 2, 0.25);
  Rng rng(61);
  for (int t = 0; t < 100; ++t) {
    double p1 = rng.uniform(), p2 = rng.uniform(), wgt = rng.uniform();
    auto member = Hypothesis::mixture(
        "m", {wgt, 1.0 - wgt},
        {Hypothesis::categorical("c1", {1.0 - p1, p1}),
         Hypothesis::categorical("c2", {1.0 - p2, p2})});
    CHECK(nearest_tv(member, full.elements()) <= 2.0 * 0.25 + 0.25 + 1e-9);
  }
}

TEST_CASE("greedy packing") {
  auto a = Hypothesis::categorical("a", {0.9, 0.1});
  auto b = Hypothesis::categorical("b", {0.1, 0.9});
  CHECK(greedy_packing({a, a, a}, 0.2, exact_cfg()).size() == 1);
  CHECK(greedy_packing({a, b}, 0.5, exact_cfg()).size() == 2);

  Rng rng(71);
  std::vector<Hypothesis> cands;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> p(3);
    double s = 0;
    for (auto& v : p) {
      v = rng.uniform() + 0.01;
      s += v;
    }
    for (auto& v : p) v /= s;
    cands.push_back(Hypothesis::categorical("c" + std::to_string(i), p));
  }
  double alpha = 0.15;
  auto pack = greedy_packing(cands, alpha, exact_cfg());
  for (std::size_t i = 0; i < pack.size(); ++i)
    for (std::size_t j = i + 1; j < pack.size(); ++j)
      CHECK(tv_distance(pack[i], pack[j], exact_cfg()) > alpha);
  for (const auto& c : cands) CHECK(nearest_tv(c, pack) <= alpha + 1e-12);
  auto pack2 = greedy_packing(cands, 2.0 * alpha, exact_cfg());
  CHECK(pack2.size() <= pack.size());
}

TEST_CASE("packing lower bound formula") {
  CHECK(packing_lower_bound_n(1, 1.0) == 0);
  CHECK(packing_lower_bound_n(1000, 1.0) == 7);
  CHECK(packing_lower_bound_n(1000, 2.0) == 4);  // halves up to ceiling
  CHECK_THROWS_AS(packing_lower_bound_n(0, 1.0), ParameterRangeError);
}

TEST_CASE("cover JSON serialization") {
  CoverSpec c = product_cover(2, 1, 0.5);
  auto j = cover_to_json(c);
  CHECK(j["alpha"] == 0.5);
  CHECK(j["elements"].size() == c.elements().size());
  auto back = Hypothesis::from_json(j["elements"][0]);
  CHECK(back.id() == c.elements()[0].id());

  auto ji = cover_to_json(gaussian_lattice_cover(1, 0.03));
  CHECK(ji["implicit"] == true);
}
