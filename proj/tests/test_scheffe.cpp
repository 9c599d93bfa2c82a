#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "phs/scheffe.hpp"

using namespace phs;

namespace {
EstimatorConfig exact_cfg() { return {EstimatorMode::Exact, 0, 0}; }

std::vector<double> random_pmf(std::size_t K, Rng& rng) {
  std::vector<double> p(K);
  double s = 0;
  for (auto& v : p) {
    v = rng.uniform() + 0.01;
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}
}  // namespace

TEST_CASE("pairwise contest branch order") {
  ContestParams p{0.1, 1.0, 10};
  CHECK(pairwise_contest({0.5, 0.3, 0.0, 10}, p) == ContestOutcome::Draw);
  CHECK(pairwise_contest({0.9, 0.1, 0.85, 10}, p) == ContestOutcome::WinnerFirst);
  CHECK(pairwise_contest({0.9, 0.1, 0.20, 10}, p) == ContestOutcome::WinnerSecond);
  CHECK(pairwise_contest({0.9, 0.1, 0.50, 10}, p) == ContestOutcome::Draw);
}

TEST_CASE("gamma formula") {
  ContestParams p{0.1, 1.0, 10};
  CHECK(gamma({0.5, 0.3, 0.9, 10}, p) == doctest::Approx(10.0));
  CHECK(gamma({0.9, 0.1, 0.8, 10}, p) == doctest::Approx(5.5));
  CHECK(gamma({0.9, 0.1, 0.2, 10}, p) == doctest::Approx(0.0));
}

TEST_CASE("contest and gamma agree with a direct transcription on random triples") {
  Rng rng(2024);
  ContestParams p{0.0, 0.0, 100};
  for (int t = 0; t < 10000; ++t) {
    double p2 = rng.uniform(), p1 = p2 + (1.0 - p2) * rng.uniform();
    double tau = rng.uniform();
    p.alpha = 0.01 + 0.3 * rng.uniform();
    p.zeta = 0.1 + 2.0 * rng.uniform();
    ScheffeStats s{p1, p2, tau, 100};
    CHECK(pairwise_contest(s, p) == oracles::contest_oracle(p1, p2, tau, p.alpha, p.zeta));
    CHECK(gamma(s, p) ==
          doctest::Approx(oracles::gamma_oracle(p1, p2, tau, p.alpha, p.zeta, 100.0)));
    CHECK(gamma(s, p) >= 0.0);
    CHECK(gamma(s, p) <= 100.0);
  }
}

TEST_CASE("score on the worked Bernoulli pair") {
  std::vector<Hypothesis> hyps{Hypothesis::categorical("b9", {0.1, 0.9}),
                               Hypothesis::categorical("b1", {0.9, 0.1})};
  Dataset d{Domain::finite_discrete(2),
            {{1}, {1}, {1}, {1}, {1}, {1}, {1}, {1}, {0}, {0}}};
  ContestParams p{0.1, 1.0, 10};
  CHECK(score(0, hyps, d, p, exact_cfg()) == doctest::Approx(5.5));
  CHECK(score(1, hyps, d, p, exact_cfg()) == doctest::Approx(0.0));
}

TEST_CASE("score of a singleton and of identical hypotheses is n") {
  Dataset d{Domain::finite_discrete(2), {{0}, {1}, {0}}};
  ContestParams p{0.1, 1.0, 3};
  std::vector<Hypothesis> one{Hypothesis::categorical("h", {0.4, 0.6})};
  CHECK(score(0, one, d, p, exact_cfg()) == doctest::Approx(3.0));
  std::vector<Hypothesis> twins{Hypothesis::categorical("a", {0.4, 0.6}),
                                Hypothesis::categorical("b", {0.4, 0.6})};
  CHECK(score(0, twins, d, p, exact_cfg()) == doctest::Approx(3.0));
  CHECK(score(1, twins, d, p, exact_cfg()) == doctest::Approx(3.0));
}

TEST_CASE("advanced score worked example") {
  auto b9 = Hypothesis::categorical("b9", {0.1, 0.9});
  auto b1 = Hypothesis::categorical("b1", {0.9, 0.1});
  Dataset d{Domain::finite_discrete(2),
            {{1}, {1}, {0}, {0}, {0}, {0}, {0}, {0}, {0}, {0}}};
  CHECK(advanced_score(b9, {b1}, d, 0.05, exact_cfg()) == doctest::Approx(0.0));

  std::vector<Hypothesis> singleton{Hypothesis::categorical("h", {0.4, 0.6})};
  CHECK(advanced_score(singleton[0], singleton, d, 0.05, exact_cfg()) ==
        doctest::Approx(10.0));

  // Every pair within 6 alpha: indicator dominates everywhere.
  auto close1 = Hypothesis::categorical("c1", {0.50, 0.50});
  auto close2 = Hypothesis::categorical("c2", {0.52, 0.48});
  CHECK(advanced_score(close1, {close2}, d, 0.05, exact_cfg()) == doctest::Approx(10.0));
}

TEST_CASE("scores stay in range on random instances") {
  Rng rng(88);
  for (int t = 0; t < 10; ++t) {
    std::size_t K = 3 + rng.uniform_index(5);
    std::size_t m = 2 + rng.uniform_index(4);
    std::vector<Hypothesis> hyps;
    for (std::size_t i = 0; i < m; ++i)
      hyps.push_back(Hypothesis::categorical("h" + std::to_string(i), random_pmf(K, rng)));
    Dataset d{Domain::finite_discrete(K), {}};
    std::size_t n = 5 + rng.uniform_index(20);
    for (std::size_t i = 0; i < n; ++i)
      d.points.push_back({static_cast<double>(rng.uniform_index(K))});
    ScoreEngine engine(hyps, exact_cfg());
    ContestParams p{0.1, 1.0, n};
    for (std::size_t j = 0; j < m; ++j) {
      double s = engine.score(j, d, p);
      CHECK(s >= 0.0);
      CHECK(s <= static_cast<double>(n));
      double a = engine.advanced_score(j, d, 0.05);
      CHECK(a >= 0.0);
      CHECK(a <= static_cast<double>(n));
    }
    CHECK(engine.all_scores(d, p)[0] == doctest::Approx(engine.score(0, d, p)));
    CHECK(engine.all_advanced_scores(d, 0.05)[1] ==
          doctest::Approx(engine.advanced_score(1, d, 0.05)));
  }
}

TEST_CASE("sensitivity 1 under single point replacement (smoke)") {
  Rng rng(404);
  for (int t = 0; t < 10; ++t) {
    std::size_t K = 4, m = 4, n = 12;
    std::vector<Hypothesis> hyps;
    for (std::size_t i = 0; i < m; ++i)
      hyps.push_back(Hypothesis::categorical("h" + std::to_string(i), random_pmf(K, rng)));
    ScoreEngine engine(hyps, exact_cfg());
    Dataset d{Domain::finite_discrete(K), {}};
    for (std::size_t i = 0; i < n; ++i)
      d.points.push_back({static_cast<double>(rng.uniform_index(K))});
    ContestParams p{0.1, 1.0, n};
    auto s0 = engine.all_scores(d, p);
    auto a0 = engine.all_advanced_scores(d, 0.07);
    for (std::size_t pos = 0; pos < n; ++pos) {
      for (std::size_t sym = 0; sym < K; ++sym) {
        Dataset d2 = d;
        d2.points[pos] = {static_cast<double>(sym)};
        auto s1 = engine.all_scores(d2, p);
        auto a1 = engine.all_advanced_scores(d2, 0.07);
        for (std::size_t j = 0; j < m; ++j) {
          CHECK(std::fabs(s1[j] - s0[j]) <= 1.0 + 1e-9);
          CHECK(std::fabs(a1[j] - a0[j]) <= 1.0 + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("gamma margin holds with high frequency when the truth is planted") {
  // dtv(P, H*) = 0 here; H' is far. Gamma(H*, H', D) should exceed
  // zeta*alpha*n/4 with overwhelming frequency at this n.
  auto star = Hypothesis::categorical("star", {0.5, 0.5});
  auto far = Hypothesis::categorical("far", {0.95, 0.05});
  std::vector<Hypothesis> hyps{star, far};
  ScoreEngine engine(hyps, exact_cfg());
  ContestParams p{0.1, 1.0, 0};
  std::size_t n = 2000;
  int violations = 0;
  for (int t = 0; t < 200; ++t) {
    Rng rng(9000 + t);
    Dataset d = star.sample_n(n, rng);
    p.n = n;
    if (gamma(engine.stats(0, 1, d), p) <= 1.0 * 0.1 * n / 4.0) ++violations;
  }
  CHECK(violations <= 2);
}
