#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mmkit/rational.hpp"

using mmkit::BigInt;
using mmkit::Rat;

TEST_CASE("rationals are kept in canonical reduced form") {
  Rat r(6, -4);
  CHECK(r.numerator() == -3);
  CHECK(r.denominator() == 2);
  CHECK(Rat(0, 7).to_string() == "0");
  CHECK(Rat(-10, 5).to_string() == "-2");
  CHECK(Rat(1, 3).to_string() == "1/3");
}

TEST_CASE("arithmetic is exact") {
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK(Rat(1, 2) - Rat(1, 3) == Rat(1, 6));
  CHECK(Rat(2, 3) * Rat(3, 4) == Rat(1, 2));
  CHECK(Rat(1, 2) / Rat(1, 6) == Rat(3));
  CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);

  // No drift over many small steps.
  Rat acc;
  for (int i = 0; i < 1000; ++i) acc += Rat(1, 1000);
  CHECK(acc == Rat(1));
}

TEST_CASE("comparisons, min, max, abs") {
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(-1, 2) < Rat(0));
  CHECK(mmkit::min(Rat(3, 7), Rat(2, 5)) == Rat(2, 5));
  CHECK(mmkit::max(Rat(3, 7), Rat(2, 5)) == Rat(3, 7));
  CHECK(mmkit::abs(Rat(-5, 3)) == Rat(5, 3));
  CHECK(Rat(-5, 3).sign() == -1);
}

TEST_CASE("parse accepts exactly the documented grammar") {
  CHECK(Rat::parse("3/4") == Rat(3, 4));
  CHECK(Rat::parse("-3/6") == Rat(-1, 2));
  CHECK(Rat::parse("+2") == Rat(2));
  CHECK(Rat::parse("17") == Rat(17));
  CHECK(!Rat::parse("1/0"));
  CHECK(!Rat::parse(""));
  CHECK(!Rat::parse("1.5"));
  CHECK(!Rat::parse("1/-2"));
  CHECK(!Rat::parse("1/2/3"));
  CHECK(!Rat::parse(" 1/2"));
}

TEST_CASE("parse and to_string round-trip") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    long long num = static_cast<long long>(rng() % 2001) - 1000;
    long long den = 1 + static_cast<long long>(rng() % 999);
    Rat r(num, den);
    auto back = Rat::parse(r.to_string());
    REQUIRE(back);
    CHECK(*back == r);
  }
}

TEST_CASE("common denominator is the lcm") {
  mmkit::RatVec v{Rat(1, 4), Rat(1, 6), Rat(2)};
  CHECK(mmkit::common_denominator(v) == 12);
  CHECK(mmkit::sum(v) == Rat(29, 12));
}

TEST_CASE("values outside machine range stay exact") {
  Rat tiny(1, 1);
  for (int i = 0; i < 40; ++i) tiny *= Rat(1, 10);
  Rat rebuilt(1);
  for (int i = 0; i < 40; ++i) rebuilt /= Rat(10);
  CHECK(tiny == rebuilt);
  CHECK(tiny.denominator() == boost::multiprecision::pow(BigInt(10), 40));
}
