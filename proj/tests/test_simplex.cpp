#include <cmath>
#include <random>

#include <doctest.h>

#include "test_util.hpp"
#include "wonham/simplex.hpp"

using namespace wonham;
using wonham::test::example1_q;
using wonham::test::random_reversible_rate;
using wonham::test::random_simplex;
using wonham::test::random_row;

namespace {
Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("ProbabilityVector validation") {
  CHECK_NOTHROW(ProbabilityVector(vec3(0.2, 0.3, 0.5)));
  CHECK_THROWS_AS(ProbabilityVector(vec3(0.5, 0.3, 0.3)), ValidationError);
  CHECK_THROWS_AS(ProbabilityVector(vec3(-0.1, 0.6, 0.5)), ValidationError);
  // round-off negatives are clamped
  ProbabilityVector p(vec2(1.0 + 1e-16, -1e-16));
  CHECK(p[1] == 0.0);
}

TEST_CASE("kl_divergence closed forms") {
  ProbabilityVector p(vec2(0.3, 0.7));
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(ProbabilityVector(vec2(1.0, 0.0)),
                      ProbabilityVector(vec2(0.5, 0.5))) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const double expected = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  CHECK(kl_divergence(ProbabilityVector(vec2(0.75, 0.25)),
                      ProbabilityVector(vec2(0.5, 0.5))) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("kl_divergence absolute continuity") {
  CHECK_THROWS_WITH_AS(
      kl_divergence(ProbabilityVector(vec2(0.5, 0.5)),
                    ProbabilityVector(vec2(1.0, 0.0))),
      doctest::Contains("index 1"), ValidationError);
}

TEST_CASE("kl_divergence Gibbs inequality on random pairs") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_simplex(rng, 4);
    const auto b = random_simplex(rng, 4);
    CHECK(kl_divergence(a, b) >= 0.0);
    if ((a.entries() - b.entries()).cwiseAbs().maxCoeff() > 1e-6)
      CHECK(kl_divergence(a, b) > 0.0);
  }
}

TEST_CASE("weighted_inner basics") {
  ProbabilityVector pi(vec3(12.0 / 17.0, 3.0 / 17.0, 2.0 / 17.0));
  WeightedMetric inv(pi);
  CHECK(weighted_inner(pi.entries(), pi.entries(), inv) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weighted_inner(vec3(1, 0, 0), vec3(0, 1, 0), inv) == 0.0);
  CHECK_THROWS_AS(weighted_inner(vec2(1, 0), vec3(0, 1, 0), inv),
                  ValidationError);
  CHECK_THROWS_AS(WeightedMetric(ProbabilityVector(vec2(1.0, 0.0))),
                  ValidationError);
}

TEST_CASE("weighted_norm_sq values") {
  ProbabilityVector pi(vec3(12.0 / 17.0, 3.0 / 17.0, 2.0 / 17.0));
  WeightedMetric inv(pi);
  CHECK(weighted_norm_sq(Vec::Zero(3), inv) == 0.0);
  CHECK(weighted_norm_sq(pi.entries(), inv) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weighted_norm_sq(vec3(1, 0, 0), inv) ==
        doctest::Approx(17.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("weighted_inner symmetry is exact") {
  std::mt19937_64 rng(11);
  WeightedMetric metric(random_simplex(rng, 5, 0.05));
  for (int i = 0; i < 50; ++i) {
    const Vec p = random_row(rng, 5);
    const Vec q = random_row(rng, 5);
    CHECK(weighted_inner(p, q, metric) == weighted_inner(q, p, metric));
  }
}

TEST_CASE("generator self-adjointness under detailed balance") {
  // Detailed balance pi_i Q_ij = pi_j Q_ji symmetrizes Q_ij / pi_j, i.e. Q
  // is self-adjoint in the inverse-weighted (pi-divided) inner product.
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    ProbabilityVector pi = ProbabilityVector::uniform(4);
    RateMatrix q = random_reversible_rate(rng, 4, &pi);
    WeightedMetric metric(pi, MetricMode::inverse_weighted);
    const Vec p = random_row(rng, 4);
    const Vec r = random_row(rng, 4);
    const double lhs = weighted_inner(p * q.matrix(), r, metric);
    const double rhs = weighted_inner(p, r * q.matrix(), metric);
    CHECK(std::abs(lhs - rhs) <=
          1e-13 * (1.0 + std::abs(lhs) + std::abs(rhs)));
  }
}

TEST_CASE("normalize") {
  const auto half = normalize(vec2(2.0, 2.0));
  CHECK(half[0] == 0.5);
  CHECK(half[1] == 0.5);

  const Vec eighth = normalize(vec3(1.0, 3.0, 4.0)).entries();
  CHECK(eighth == vec3(0.125, 0.375, 0.5));

  // idempotent on simplex points
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_simplex(rng, 6);
    const auto p2 = normalize(p.entries());
    CHECK((p2.entries() - p.entries()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(p2.entries().sum() - 1.0) <= 1e-12);
  }

  CHECK_THROWS_AS(normalize(Vec::Zero(3)), ValidationError);
  CHECK_THROWS_AS(normalize(vec2(1.0, -0.5)), ValidationError);
}
