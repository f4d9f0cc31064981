#include <catch2/catch_amalgamated.hpp>

#include "mmkit/gh.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace mmkit;

namespace {
FiniteMetric two_points(const Rat& d) {
  return make_metric({"p", "q"}, {{Rat(0), d}, {d, Rat(0)}});
}
FiniteMetric one_point() { return make_metric({"pt"}, {{Rat(0)}}); }
}  // namespace

TEST_CASE("gh of a space with itself is zero") {
  gen::Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    FiniteMetric k = gen::random_metric(rng, gen::pick(rng, 1, 5));
    CHECK(gh_value(k, k) == Rat(0));
  }
}

TEST_CASE("one point against two points at distance 1") {
  // Frozen by hand: the only correspondence covers both right points, so
  // the distortion is 1 and gh is 1/2.
  DistanceResult r = gh(one_point(), two_points(Rat(1)));
  CHECK(r.value == Rat(1, 2));
  const CorrWitness& w = std::get<CorrWitness>(r.witness);
  CHECK(w.distortion == Rat(2) * r.value);
}

TEST_CASE("two two-point spaces: gh is half the diameter gap") {
  // Frozen by enumerating the three correspondence shapes: the matching
  // gives |a-b|, every non-matching shape costs at least max(a, b).
  gen::Rng rng(42);
  for (int t = 0; t < 10; ++t) {
    Rat a(static_cast<long long>(gen::pick(rng, 1, 12)), 4);
    Rat b(static_cast<long long>(gen::pick(rng, 1, 12)), 4);
    CHECK(gh_value(two_points(a), two_points(b)) == abs(a - b) / Rat(2));
  }
}

TEST_CASE("gh is symmetric and satisfies the triangle inequality") {
  gen::Rng rng(43);
  for (int t = 0; t < 10; ++t) {
    FiniteMetric x = gen::random_metric(rng, gen::pick(rng, 1, 4));
    FiniteMetric y = gen::random_metric(rng, gen::pick(rng, 1, 4));
    FiniteMetric z = gen::random_metric(rng, gen::pick(rng, 1, 4));
    Rat xy = gh_value(x, y);
    CHECK(xy == gh_value(y, x));
    CHECK(gh_value(x, z) <= xy + gh_value(y, z));
  }
}

TEST_CASE("gh witness re-verifies with distortion twice the value") {
  gen::Rng rng(44);
  for (int t = 0; t < 10; ++t) {
    FiniteMetric k = gen::random_metric(rng, gen::pick(rng, 1, 4));
    FiniteMetric l = gen::random_metric(rng, gen::pick(rng, 1, 4));
    DistanceResult r = gh(k, l);
    const CorrWitness& w = std::get<CorrWitness>(r.witness);
    CHECK(w.distortion == Rat(2) * r.value);
    CHECK(verify_witness(k, l, w).valid);
  }
}

TEST_CASE("gh relabeling invariance") {
  gen::Rng rng(45);
  FiniteMetric k = gen::random_metric(rng, 4);
  FiniteMetric permuted = k;
  std::swap(permuted.labels[0], permuted.labels[3]);
  for (std::size_t i = 0; i < 4; ++i) std::swap(permuted.dist[0][i], permuted.dist[3][i]);
  for (std::size_t i = 0; i < 4; ++i) std::swap(permuted.dist[i][0], permuted.dist[i][3]);
  CHECK(gh_value(k, permuted) == Rat(0));
}

TEST_CASE("gh-eps map search") {
  SECTION("identity accepted at eps 0") {
    gen::Rng rng(46);
    FiniteMetric k = gen::random_metric(rng, 3);
    auto w = gh_eps_check(k, k, Rat(0));
    REQUIRE(w);
    CHECK(w->f == std::vector<std::size_t>{0, 1, 2});
    CHECK(verify_gh_eps(k, k, *w, Rat(0)).valid);
  }
  SECTION("constant map onto a one-point target works at eps 0") {
    gen::Rng rng(47);
    FiniteMetric k = gen::random_metric(rng, 4);
    auto w = gh_eps_check(k, one_point(), Rat(0));
    REQUIRE(w);
    CHECK(verify_gh_eps(k, one_point(), *w, Rat(0)).valid);
  }
  SECTION("coverage failure is a definitive negative") {
    CHECK(!gh_eps_check(one_point(), two_points(Rat(1)), Rat(1, 4)));
  }
  SECTION("found witnesses always verify") {
    gen::Rng rng(48);
    for (int t = 0; t < 15; ++t) {
      FiniteMetric k = gen::random_metric(rng, gen::pick(rng, 2, 4));
      FiniteMetric l = gen::random_metric(rng, gen::pick(rng, 1, 3));
      Rat eps(static_cast<long long>(gen::pick(rng, 0, 8)), 4);
      auto w = gh_eps_check(k, l, eps);
      if (w) CHECK(verify_gh_eps(k, l, *w, eps).valid);
    }
  }
}

TEST_CASE("gh honors the atom guard") {
  gen::Rng rng(49);
  FiniteMetric k = gen::random_metric(rng, 7);
  FiniteMetric l = gen::random_metric(rng, 6);
  CHECK_THROWS_AS(gh(k, l), SizeGuardError);
}
