#include <catch2/catch_amalgamated.hpp>

#include "mmkit/universal.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace mmkit;

TEST_CASE("digit masses follow the recursion") {
  SECTION("N = 2, depth 3: dyadic digits with tail 1/8") {
    UniversalSpaceSpec s = make_universal_spec(2, Rat(1), 3);
    CHECK(s.p == RatVec{Rat(1, 2), Rat(1, 4), Rat(1, 8)});
    CHECK(s.tail == Rat(1, 8));
    MMSpace u = universal_space(s);
    CHECK(u.mass == RatVec{Rat(1, 2), Rat(1, 4), Rat(1, 8), Rat(1, 8)});
  }
  SECTION("N = 3, depth 2: computed by the recursion") {
    UniversalSpaceSpec s = make_universal_spec(3, Rat(2), 2);
    CHECK(s.p == RatVec{Rat(1, 3), Rat(2, 9)});
    CHECK(s.tail == Rat(4, 9));
  }
  SECTION("masses always sum to one exactly") {
    gen::Rng rng(91);
    for (int t = 0; t < 10; ++t) {
      long long n = 2 + static_cast<long long>(gen::pick(rng, 0, 4));
      std::size_t depth = gen::pick(rng, 1, 9);
      MMSpace u = universal_space(make_universal_spec(n, Rat(1), depth));
      CHECK(sum(u.mass) == Rat(1));
      CHECK(u.size() == depth + 1);
    }
  }
}

TEST_CASE("greedy digits for masses (1/4, 3/4) at depth 4 are exact") {
  UniversalSpaceSpec s = make_universal_spec(2, Rat(1), 4);
  MMSpace u = universal_space(s);
  MMSpace y = validate_space({"a", "b"}, fixtures::all_ones(2),
                             {Rat(1, 4), Rat(3, 4)});
  UniversalDominateResult r = universal_dominate(s, u, y);
  CHECK(r.digits.digit_to_atom == std::vector<std::size_t>{1, 0, 1, 1});
  CHECK(r.digits.tail_to_atom == 1);
  CHECK(r.witness.eps == Rat(0));
}

TEST_CASE("one-point target absorbs every digit at eps zero") {
  UniversalSpaceSpec s = make_universal_spec(2, Rat(1), 5);
  MMSpace u = universal_space(s);
  UniversalDominateResult r = universal_dominate(s, u, one_point_space());
  CHECK(r.witness.eps == Rat(0));
  for (std::size_t a : r.digits.digit_to_atom) CHECK(a == 0);
}

TEST_CASE("non-dyadic masses leave a deficit within twice the tail") {
  UniversalSpaceSpec s = make_universal_spec(2, Rat(1), 6);
  MMSpace u = universal_space(s);
  MMSpace y = validate_space({"a", "b"}, fixtures::all_ones(2),
                             {Rat(1, 3), Rat(2, 3)});
  UniversalDominateResult r = universal_dominate(s, u, y);
  CHECK(r.witness.eps <= Rat(1, 32));  // 2 * 2^-6
  CHECK(r.witness.eps == Rat(1, 192));  // frozen from the greedy run
}

TEST_CASE("random targets verify with eps at most twice the tail") {
  gen::Rng rng(92);
  for (int t = 0; t < 30; ++t) {
    std::size_t depth = gen::pick(rng, 3, 7);
    UniversalSpaceSpec s = make_universal_spec(2, Rat(2), depth);
    MMSpace u = universal_space(s);
    std::size_t atoms = gen::pick(rng, 1, 2);
    MMSpace y = validate_space(gen::random_metric(rng, atoms, 8, 4),
                               gen::random_mass(rng, atoms, 24));
    if (y.metric.diameter() > s.diameter) continue;
    UniversalDominateResult r = universal_dominate(s, u, y);
    CHECK(r.witness.eps <= Rat(2) * s.tail);
    CHECK(verify_witness(u, y, r.witness).valid);
  }
}

TEST_CASE("preconditions: cardinality and diameter") {
  UniversalSpaceSpec s = make_universal_spec(2, Rat(1), 3);
  MMSpace u = universal_space(s);
  gen::Rng rng(93);
  MMSpace big = gen::random_space(rng, 3);
  CHECK_THROWS_AS(universal_dominate(s, u, big), PreconditionFailed);
  MMSpace wide = fixtures::two_point_uniform(Rat(3));
  CHECK_THROWS_AS(universal_dominate(s, u, wide), PreconditionFailed);
}
