#include <catch2/catch_amalgamated.hpp>

#include "mmkit/order.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace mmkit;

namespace {

/// Independent oracle: plain enumeration of all |Y|^|X| maps with no
/// pruning, accepting through the verification gate.
std::optional<MapWitness> naive_domination(const MMSpace& upper,
                                           const MMSpace& lower) {
  std::vector<std::size_t> f(upper.size(), 0);
  for (;;) {
    if (verify_witness(upper, lower, MapWitness{f}).valid)
      return MapWitness{f};
    std::size_t i = 0;
    while (i < f.size() && f[i] + 1 == lower.size()) f[i++] = 0;
    if (i == f.size()) return std::nullopt;
    ++f[i];
  }
}

}  // namespace

TEST_CASE("fixture dominations with the documented witnesses") {
  MMSpace x = fixtures::space_x();
  MMSpace z = fixtures::space_z();
  MMSpace w = fixtures::space_w();

  auto wz = check_domination(x, z);
  REQUIRE(wz);
  CHECK(wz->f == std::vector<std::size_t>{0, 1, 1});  // a->a, b->b, c->b

  auto ww = check_domination(x, w);
  REQUIRE(ww);
  CHECK(ww->f == std::vector<std::size_t>{0, 0, 1});  // a->a, b->a, c->c
}

TEST_CASE("one-point space cannot dominate a split mass") {
  CHECK(!check_domination(one_point_space(), fixtures::space_z()));
}

TEST_CASE("pruned search matches naive enumeration") {
  gen::Rng rng(61);
  int positives = 0;
  for (int t = 0; t < 60; ++t) {
    MMSpace x = gen::random_space(rng, gen::pick(rng, 2, 5), 12);
    MMSpace y = gen::random_space(rng, gen::pick(rng, 1, 4), 12);
    auto fast = check_domination(x, y);
    auto slow = naive_domination(x, y);
    CHECK(fast.has_value() == slow.has_value());
    if (fast) ++positives;
    // Also check instances built to be dominated.
    auto [z, wit] = gen::dominated_space(rng, x, gen::pick(rng, 1, x.size()));
    CHECK(check_domination(x, z).has_value());
  }
  CHECK(positives >= 1);  // the suite exercises both outcomes
}

TEST_CASE("the Lipschitz order is a partial order") {
  gen::Rng rng(62);
  SECTION("reflexivity") {
    MMSpace x = gen::random_space(rng, 4);
    auto w = check_domination(x, x);
    REQUIRE(w);
    CHECK(w->f == MapWitness::identity(4).f);
  }
  SECTION("transitivity by composition") {
    for (int t = 0; t < 15; ++t) {
      MMSpace x = gen::random_space(rng, gen::pick(rng, 3, 6));
      auto [y, wy] = gen::dominated_space(rng, x, gen::pick(rng, 2, x.size()));
      auto [z, wz] = gen::dominated_space(rng, y, gen::pick(rng, 1, y.size()));
      MapWitness composed = compose(wz, wy);
      CHECK(verify_witness(x, z, composed).valid);
    }
  }
  SECTION("antisymmetry up to mm-isomorphism") {
    for (int t = 0; t < 15; ++t) {
      MMSpace x = gen::random_space(rng, gen::pick(rng, 2, 4), 12);
      MMSpace y = gen::random_space(rng, gen::pick(rng, 2, 4), 12);
      if (check_domination(x, y) && check_domination(y, x))
        CHECK(mm_isomorphic(x, y));
    }
    // And a guaranteed positive instance: a relabeled copy.
    MMSpace x = gen::random_space(rng, 3);
    MMSpace y = x;
    std::swap(y.metric.labels[0], y.metric.labels[2]);
    for (std::size_t i = 0; i < 3; ++i) std::swap(y.metric.dist[0][i], y.metric.dist[2][i]);
    for (std::size_t i = 0; i < 3; ++i) std::swap(y.metric.dist[i][0], y.metric.dist[i][2]);
    std::swap(y.mass[0], y.mass[2]);
    REQUIRE(check_domination(x, y));
    REQUIRE(check_domination(y, x));
    CHECK(mm_isomorphic(x, y));
  }
}

TEST_CASE("exact order coincides with the eps order at zero") {
  gen::Rng rng(63);
  for (int t = 0; t < 20; ++t) {
    MMSpace x = gen::random_space(rng, gen::pick(rng, 2, 4), 12);
    MMSpace y = gen::random_space(rng, gen::pick(rng, 1, 3), 12);
    auto exact = check_domination(x, y);
    auto relaxed = check_eps_domination(x, y, Rat(0));
    CHECK(exact.has_value() == relaxed.has_value());
    if (relaxed) {
      CHECK(relaxed->domain_mass(x.mass) == Rat(1));
      // A zero witness stays valid at every larger eps.
      for (int k = 1; k <= 3; ++k) {
        EpsWitness larger = *relaxed;
        larger.eps = Rat(k, 4);
        CHECK(verify_witness(x, y, larger).valid);
      }
    }
  }
}

TEST_CASE("one-point target is dominated at eps zero") {
  gen::Rng rng(64);
  MMSpace x = gen::random_space(rng, 4);
  auto w = check_eps_domination(x, one_point_space(), Rat(0));
  REQUIRE(w);
  CHECK(verify_witness(x, one_point_space(), *w).valid);
}

TEST_CASE("a box witness converts to an eps witness within 3 eps") {
  gen::Rng rng(65);
  for (int t = 0; t < 20; ++t) {
    std::size_t nx = gen::pick(rng, 2, 4), ny = gen::pick(rng, 1, 4);
    MMSpace x = validate_space(gen::random_metric(rng, nx),
                               gen::random_mass(rng, nx, 8));
    MMSpace y = validate_space(gen::random_metric(rng, ny),
                               gen::random_mass(rng, ny, 8));
    DistanceResult b = box(x, y);
    EpsWitness w = eps_from_box(x, y, std::get<BoxWitness>(b.witness));
    CHECK(w.eps <= Rat(3) * b.value);
    CHECK(verify_witness(x, y, w).valid);
    // The relaxed search also succeeds at 3 box.
    auto searched = check_eps_domination(x, y, Rat(3) * b.value);
    CHECK(searched.has_value());
  }
}

TEST_CASE("eps_from_box on a zero-box witness is an exact domination") {
  gen::Rng rng(66);
  MMSpace x = validate_space(gen::random_metric(rng, 3),
                             gen::random_mass(rng, 3, 8));
  DistanceResult b = box(x, x);
  REQUIRE(b.value == Rat(0));
  EpsWitness w = eps_from_box(x, x, std::get<BoxWitness>(b.witness));
  CHECK(w.eps == Rat(0));
  CHECK(w.domain_mass(x.mass) == Rat(1));
}

TEST_CASE("eps_from_box degenerate large-eps case stays verifiable") {
  MMSpace pt = one_point_space();
  MMSpace u = fixtures::two_point_uniform(Rat(1));
  DistanceResult b = box(pt, u);
  REQUIRE(b.value == Rat(1, 2));
  EpsWitness w = eps_from_box(pt, u, std::get<BoxWitness>(b.witness));
  CHECK(w.eps <= Rat(3, 2));
  CHECK(verify_witness(pt, u, w).valid);
}

TEST_CASE("composition of eps witnesses") {
  gen::Rng rng(67);
  SECTION("exact witnesses compose to an exact witness") {
    for (int t = 0; t < 10; ++t) {
      MMSpace x = gen::random_space(rng, gen::pick(rng, 3, 6));
      auto [y, wy] = gen::dominated_space(rng, x, gen::pick(rng, 2, x.size()));
      auto [z, wz] = gen::dominated_space(rng, y, gen::pick(rng, 1, y.size()));
      EpsWitness ey{wy, EpsWitness::full_domain(x.size()), Rat(0)};
      EpsWitness ez{wz, EpsWitness::full_domain(y.size()), Rat(0)};
      EpsWitness composed = compose_eps(x, y, z, ey, ez);
      CHECK(composed.eps == Rat(0));
    }
  }
  SECTION("Z <_0 Y <_eps X composes within 3 eps") {
    for (int t = 0; t < 15; ++t) {
      std::size_t nx = gen::pick(rng, 2, 4), ny = gen::pick(rng, 1, 3);
      MMSpace x = validate_space(gen::random_metric(rng, nx),
                                 gen::random_mass(rng, nx, 8));
      MMSpace y = validate_space(gen::random_metric(rng, ny),
                                 gen::random_mass(rng, ny, 8));
      DistanceResult b = box(x, y);
      EpsWitness yx = eps_from_box(x, y, std::get<BoxWitness>(b.witness));
      auto [z, wz] = gen::dominated_space(rng, y, gen::pick(rng, 1, y.size()));
      EpsWitness zy{wz, EpsWitness::full_domain(y.size()), Rat(0)};
      EpsWitness composed = compose_eps(x, y, z, yx, zy);
      CHECK(composed.eps <= Rat(3) * yx.eps);
      CHECK(verify_witness(x, z, composed).valid);
    }
  }
}

TEST_CASE("domination guards") {
  gen::Rng rng(68);
  Limits limits;
  limits.domination_source = 3;
  MMSpace x = gen::random_space(rng, 4);
  CHECK_THROWS_AS(check_domination(x, x, limits), SizeGuardError);
  Limits tiny;
  tiny.map_search = 10;
  CHECK_THROWS_AS(check_eps_domination(x, x, Rat(1, 2), tiny), SizeGuardError);
}
