#include <catch2/catch_amalgamated.hpp>

#include "mmkit/regularize.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace mmkit;

TEST_CASE("kuratowski embedding is an exact isometry") {
  gen::Rng rng(71);
  SECTION("one point") {
    KuratowskiTable t = kuratowski(make_metric({"p"}, {{Rat(0)}}));
    CHECK(t.rows == std::vector<RatVec>{{Rat(0)}});
  }
  SECTION("two points at distance 1") {
    KuratowskiTable t = kuratowski(fixtures::two_point_uniform(Rat(1)).metric);
    CHECK(t.rows[0] == RatVec{Rat(0), Rat(1)});
    CHECK(t.rows[1] == RatVec{Rat(1), Rat(0)});
    CHECK(sup_dist(t.rows[0], t.rows[1]) == Rat(1));
  }
  SECTION("random five-point metric") {
    FiniteMetric m = gen::random_metric(rng, 5);
    CHECK_NOTHROW(kuratowski(m));
  }
}

TEST_CASE("regularizing an exact witness reproduces the target") {
  gen::Rng rng(72);
  for (int t = 0; t < 10; ++t) {
    MMSpace x = gen::random_space(rng, gen::pick(rng, 2, 5));
    auto [y, w] = gen::dominated_space(rng, x, gen::pick(rng, 1, x.size()));
    EpsWitness ew{w, EpsWitness::full_domain(x.size()), Rat(0)};
    RegularizeResult r = regularize(x, y, ew);
    CHECK(r.box_bound == Rat(0));
    CHECK(mm_isomorphic(r.regular, y));
  }
}

TEST_CASE("regularize postconditions on random eps witnesses") {
  gen::Rng rng(73);
  for (int t = 0; t < 15; ++t) {
    MMSpace x = gen::random_space(rng, gen::pick(rng, 3, 5));
    Rat eps(1, static_cast<long long>(gen::pick(rng, 4, 10)));
    auto [y, ew] = gen::eps_witness_instance(rng, x, gen::pick(rng, 2, 3), eps);
    RegularizeResult r = regularize(x, y, ew);
    CHECK(verify_witness(x, r.regular, r.onto_regular).valid);
    CHECK(r.box_bound <= Rat(3) * eps);
    if (r.box_exact) CHECK(box_value(y, r.regular) == r.box_bound);
  }
}

TEST_CASE("regularize through eps_from_box on the fixture") {
  MMSpace x = fixtures::space_x();
  MMSpace z = fixtures::space_z();
  DistanceResult b = box(z, x);
  EpsWitness w = eps_from_box(z, x, std::get<BoxWitness>(b.witness));
  RegularizeResult r = regularize(z, x, w);
  CHECK(verify_witness(z, r.regular, r.onto_regular).valid);
  CHECK(r.box_bound <= Rat(3) * w.eps);
}

TEST_CASE("regularize of a one-point target is one point") {
  gen::Rng rng(74);
  MMSpace x = gen::random_space(rng, 4);
  MMSpace pt = one_point_space();
  auto w = check_domination(x, pt);
  REQUIRE(w);
  RegularizeResult r =
      regularize(x, pt, EpsWitness{*w, EpsWitness::full_domain(4), Rat(0)});
  CHECK(r.regular.size() == 1);
}

TEST_CASE("regularize falls back to a coupling bound under a tight guard") {
  gen::Rng rng(75);
  MMSpace x = gen::random_space(rng, 4);
  Rat eps(1, 6);
  auto [y, ew] = gen::eps_witness_instance(rng, x, 3, eps);
  Limits limits;
  limits.box_nodes = 1;  // force the non-exact path
  RegularizeResult r = regularize(x, y, ew, limits);
  CHECK(!r.box_exact);
  CHECK(r.box_bound <= Rat(3) * eps);
}

TEST_CASE("gh regularization") {
  SECTION("exact gh domination reproduces the target isometrically") {
    gen::Rng rng(76);
    MMSpace shell = gen::random_space(rng, 4);
    auto [l, f] = gen::gh_eps_instance(rng, shell.metric, 3, Rat(0));
    GhRegularizeResult r = regularize_gh(shell.metric, l, f, Rat(0));
    CHECK(r.gh_bound == Rat(0));
  }
  SECTION("one-point target gives a one-point image") {
    gen::Rng rng(77);
    FiniteMetric k = gen::random_metric(rng, 4);
    FiniteMetric pt = make_metric({"pt"}, {{Rat(0)}});
    GhRegularizeResult r =
        regularize_gh(k, pt, MapWitness{{0, 0, 0, 0}}, Rat(0));
    CHECK(r.regular.size() == 1);
  }
  SECTION("frozen two-point instance") {
    // K two points at 1, L two points at 9/8, identity map at eps 1/8.
    // Hand evaluation: g(x0) = (0, 1), g(x1) = (1, 0), so Z is two points at
    // distance 1 and gh(L, Z) = (9/8 - 1)/2 = 1/16 <= 1/4.
    FiniteMetric k = fixtures::two_point_uniform(Rat(1)).metric;
    FiniteMetric l = fixtures::two_point_uniform(Rat(9, 8)).metric;
    GhRegularizeResult r = regularize_gh(k, l, MapWitness{{0, 1}}, Rat(1, 8));
    REQUIRE(r.regular.size() == 2);
    CHECK(r.regular.dist[0][1] == Rat(1));
    CHECK(r.gh_exact);
    CHECK(r.gh_bound == Rat(1, 16));
    CHECK(r.gh_bound <= Rat(1, 4));
  }
  SECTION("random instances satisfy the 2 eps postcondition") {
    gen::Rng rng(78);
    for (int t = 0; t < 15; ++t) {
      FiniteMetric k = gen::random_metric(rng, gen::pick(rng, 2, 5));
      Rat eps(1, static_cast<long long>(gen::pick(rng, 4, 10)));
      auto [l, f] = gen::gh_eps_instance(rng, k, gen::pick(rng, 1, 3), eps);
      GhRegularizeResult r = regularize_gh(k, l, f, eps);
      CHECK(r.gh_bound <= Rat(2) * eps);
    }
  }
  SECTION("precondition failures are reported") {
    FiniteMetric k = fixtures::two_point_uniform(Rat(1)).metric;
    FiniteMetric l = fixtures::two_point_uniform(Rat(2)).metric;
    CHECK_THROWS_AS(regularize_gh(k, l, MapWitness{{0, 1}}, Rat(1, 8)),
                    PreconditionFailed);
  }
}

TEST_CASE("chain compression") {
  gen::Rng rng(79);
  SECTION("exact chains compose to exact witnesses") {
    for (int t = 0; t < 8; ++t) {
      MMSpace x3 = gen::random_space(rng, gen::pick(rng, 3, 5));
      auto [x2, w23] = gen::dominated_space(rng, x3, gen::pick(rng, 2, x3.size()));
      auto [x1, w12] = gen::dominated_space(rng, x2, gen::pick(rng, 1, x2.size()));
      std::vector<EpsWitness> steps{
          EpsWitness{w12, EpsWitness::full_domain(x2.size()), Rat(0)},
          EpsWitness{w23, EpsWitness::full_domain(x3.size()), Rat(0)}};
      ChainCertificate cert = chain_compress({x1, x2, x3}, steps);
      CHECK(cert.composed.eps == Rat(0));
      CHECK(verify_witness(x3, x1, cert.composed).valid);
    }
  }
  SECTION("two-space chains cross-check against compose_eps") {
    for (int t = 0; t < 10; ++t) {
      MMSpace x2 = gen::random_space(rng, gen::pick(rng, 3, 4));
      Rat eps(1, 8);
      auto [x1, ew] = gen::eps_witness_instance(rng, x2, 2, eps);
      ChainCertificate cert = chain_compress({x1, x2}, {ew});
      CHECK(cert.composed.eps <= Rat(5) * eps);
      // compose with the identity witness as the second leg
      EpsWitness idw{MapWitness::identity(x1.size()),
                     EpsWitness::full_domain(x1.size()), Rat(0)};
      EpsWitness composed = compose_eps(x2, x1, x1, ew, idw);
      CHECK(composed.eps <= Rat(3) * eps);
    }
  }
  SECTION("three perturbed fixture steps at eps 1/20 stay within 3/4") {
    MMSpace x3 = fixtures::space_x();
    Rat eps(1, 20);
    auto [x2, s23] = gen::eps_witness_instance(rng, x3, 3, eps);
    auto [x1, s12] = gen::eps_witness_instance(rng, x2, 2, eps);
    auto [x0, s01] = gen::eps_witness_instance(rng, x1, 2, eps);
    ChainCertificate cert = chain_compress({x0, x1, x2, x3}, {s01, s12, s23});
    CHECK(cert.step_eps_sum == Rat(3, 20));
    CHECK(cert.composed.eps <= Rat(3, 4));
    CHECK(verify_witness(x3, x0, cert.composed).valid);
  }
  SECTION("single-space chain is the identity certificate") {
    MMSpace x = gen::random_space(rng, 3);
    ChainCertificate cert = chain_compress({x}, {});
    CHECK(cert.composed.eps == Rat(0));
  }
}
