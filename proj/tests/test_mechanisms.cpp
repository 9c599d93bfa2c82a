#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "phs/errors.hpp"
#include "phs/mechanisms.hpp"

using namespace phs;

namespace {

// Exact output distribution of the exponential mechanism.
std::vector<double> em_probs(const std::vector<double>& scores, double sens, double eps) {
  std::vector<double> w(scores.size());
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  double total = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(eps * (scores[i] - mx) / (2.0 * sens));
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

TEST_CASE("exponential mechanism is uniform on equal scores") {
  Rng rng(11);
  std::vector<double> scores(4, 3.0);
  std::vector<int> counts(4, 0);
  int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[exponential_mechanism(scores, 1.0, 1.0, rng)];
  // Chi-square with 3 dof, 99.9% quantile ~ 16.27.
  double chi2 = 0;
  for (int c : counts) {
    double e = draws / 4.0;
    chi2 += (c - e) * (c - e) / e;
  }
  CHECK(chi2 < 16.27);
}

TEST_CASE("two point softmax ratio is exp(eps*g/2)") {
  Rng rng(12);
  std::vector<double> scores{0.0, 2.0};
  int draws = 200000, ones = 0;
  for (int i = 0; i < draws; ++i) ones += exponential_mechanism(scores, 1.0, 1.0, rng);
  double p1 = static_cast<double>(ones) / draws;
  double expected = std::exp(1.0) / (1.0 + std::exp(1.0));
  CHECK(std::fabs(p1 - expected) < 0.005);
}

TEST_CASE("single score returns index 0; empty throws") {
  Rng rng(13);
  CHECK(exponential_mechanism({5.0}, 1.0, 1.0, rng) == 0);
  CHECK_THROWS_AS(exponential_mechanism({}, 1.0, 1.0, rng), EmptyInputError);
}

TEST_CASE("analytic e^eps ratio bound on small instances") {
  Rng rng(21);
  for (double eps : {0.5, 1.0, 2.0}) {
    for (int t = 0; t < 50; ++t) {
      std::size_t k = 2 + rng.uniform_index(5);
      std::vector<double> s1(k), s2(k);
      for (std::size_t i = 0; i < k; ++i) {
        s1[i] = 10.0 * rng.uniform();
        s2[i] = s1[i] + (2.0 * rng.uniform() - 1.0);  // differs by <= 1
      }
      auto p = em_probs(s1, 1.0, eps), q = em_probs(s2, 1.0, eps);
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(p[i] <= std::exp(eps) * q[i] + 1e-9);
        CHECK(q[i] <= std::exp(eps) * p[i] + 1e-9);
      }
    }
  }
}

TEST_CASE("exponential mechanism utility bound") {
  Rng rng(31);
  std::vector<double> scores(20);
  for (auto& s : scores) s = 50.0 * rng.uniform();
  double mx = *std::max_element(scores.begin(), scores.end());
  double eps = 1.0, beta = 0.05;
  double thresh = mx - 2.0 * std::log(scores.size() / beta) / eps;
  int bad = 0, draws = 2000;
  for (int i = 0; i < draws; ++i)
    if (scores[exponential_mechanism(scores, 1.0, eps, rng)] < thresh) ++bad;
  CHECK(static_cast<double>(bad) / draws <= beta + 0.02);
}

TEST_CASE("noise samplers") {
  Rng rng(41);
  NoiseSpec trunc{NoiseKind::TruncatedLaplace, 4.0, 9.0, 0.0};
  for (int i = 0; i < 20000; ++i) {
    double z = sample_noise(trunc, rng);
    CHECK(std::fabs(z) <= 9.0);
  }
  NoiseSpec lap{NoiseKind::Laplace, 2.0, 0.0, 0.0};
  double sum = 0, n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_noise(lap, rng);
  CHECK(std::fabs(sum / n) <= 3.0 * 2.0 * std::sqrt(2.0) / std::sqrt(n));

  NoiseSpec gauss{NoiseKind::Gaussian, 0.0, 0.0, 3.0};
  double gs = 0, gs2 = 0;
  for (int i = 0; i < n; ++i) {
    double z = sample_noise(gauss, rng);
    gs += z;
    gs2 += z * z;
  }
  CHECK(std::fabs(gs / n) <= 3.0 * 3.0 / std::sqrt(n));
  CHECK(std::fabs(gs2 / n - 9.0) <= 0.3);
}

TEST_CASE("gap_max noise spec constants") {
  NoiseSpec a = gap_max_noise_spec({1.0, 1e-6}, GapMaxVariant::ApproximateDp);
  CHECK(a.kind == NoiseKind::TruncatedLaplace);
  CHECK(a.scale == doctest::Approx(4.0));
  CHECK(a.truncation == doctest::Approx(4.0 * (1.0 + std::log(1e6))));
  NoiseSpec pure = gap_max_noise_spec({2.0, 0.0}, GapMaxVariant::ApproximateDp);
  CHECK(pure.kind == NoiseKind::Laplace);
  CHECK(pure.scale == doctest::Approx(2.0));
  NoiseSpec g = gap_max_noise_spec({1.0, 0.0}, GapMaxVariant::ConcentratedDp);
  CHECK(g.kind == NoiseKind::Gaussian);
  CHECK(g.std == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("gap_max single candidate and empty set") {
  Rng rng(51);
  GapMaxParams p{1, 0.1, {1.0, 1e-6}, GapMaxVariant::ApproximateDp};
  CHECK(gap_max(1, [](std::size_t) { return 7.0; }, p, rng) == 0);
  CHECK_THROWS_AS(gap_max(0, [](std::size_t) { return 0.0; }, p, rng), EmptyInputError);
}

TEST_CASE("gap_max recovers a planted top candidate") {
  GapMaxParams p{1, 0.1, {1.0, 1e-6}, GapMaxVariant::ApproximateDp};
  auto score = [](std::size_t i) { return i == 17 ? 100.0 : 0.0; };
  int hits = 0, runs = 500;
  for (int r = 0; r < runs; ++r) {
    Rng rng(6000 + r);
    if (gap_max(50, score, p, rng) == 17) ++hits;
  }
  CHECK(static_cast<double>(hits) / runs >= 0.9);
}

TEST_CASE("bucket collision probability matches the k^2/beta analysis") {
  // k planted candidates into m = ceil(k^2/beta) buckets: collision
  // probability among the planted ones is at most beta/2.
  std::size_t k = 3;
  double beta = 0.1;
  std::size_t m = static_cast<std::size_t>(std::ceil(k * k / beta));
  int collisions = 0, runs = 20000;
  for (int r = 0; r < runs; ++r) {
    Rng rng(7000 + r);
    std::vector<std::size_t> b(k);
    bool hit = false;
    for (std::size_t i = 0; i < k; ++i) {
      b[i] = rng.uniform_index(m);
      for (std::size_t j = 0; j < i; ++j) hit |= b[i] == b[j];
    }
    collisions += hit ? 1 : 0;
  }
  CHECK(static_cast<double>(collisions) / runs <= beta / 2.0 + 0.01);
}
