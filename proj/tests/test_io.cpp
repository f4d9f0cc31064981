#include <catch2/catch_amalgamated.hpp>

#include "mmkit/certify.hpp"
#include "mmkit/io.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace mmkit;

TEST_CASE("space documents round-trip through parse and serialize") {
  gen::Rng rng(131);
  for (int t = 0; t < 20; ++t) {
    MMSpace s = gen::random_space(rng, gen::pick(rng, 1, 6));
    SpaceDocument d = document_from_space("s" + std::to_string(t), s);
    if (t % 2) d.measures["alt"] = gen::random_mass(rng, s.size(), 12);
    if (t % 3 == 0) d.mass.reset();
    Json j = to_json(d);
    SpaceDocument back = parse_space_document(j);
    CHECK(to_json(back) == j);
    CHECK(back.name == d.name);
    CHECK(back.points == d.points);
    CHECK(back.dist == d.dist);
    CHECK(back.mass == d.mass);
    CHECK(back.measures == d.measures);
  }
}

TEST_CASE("serialization is byte-deterministic") {
  MMSpace x = fixtures::space_x();
  SpaceDocument d = document_from_space("X", x);
  CHECK(dump_json(to_json(d)) == dump_json(to_json(d)));
  std::string expected =
      "{\n  \"name\": \"X\",\n  \"points\": [\n    \"a\",\n    \"b\",\n"
      "    \"c\"\n  ],";
  CHECK(dump_json(to_json(d)).substr(0, expected.size()) == expected);
}

TEST_CASE("rationals serialize as strings and reject floats") {
  CHECK(to_json(Rat(1, 3)) == Json("1/3"));
  CHECK(to_json(Rat(-7)) == Json("-7"));
  CHECK(rat_from_json(Json("5/10"), "t") == Rat(1, 2));
  CHECK(rat_from_json(Json(4), "t") == Rat(4));
  CHECK_THROWS_AS(rat_from_json(Json(0.5), "t"), ParseError);
  CHECK_THROWS_AS(rat_from_json(Json("1/0"), "t"), ParseError);
}

TEST_CASE("space documents validate on conversion, not on parse") {
  Json j;
  j["name"] = "bad";
  j["points"] = Json::array({"a", "b"});
  j["dist"] = Json::array({Json::array({"0", "1"}), Json::array({"2", "0"})});
  j["mass"] = Json::array({"1/2", "1/2"});
  SpaceDocument d = parse_space_document(j);
  CHECK_THROWS_AS(space_from_document(d), MetricAxiomViolation);
}

TEST_CASE("witness payloads round-trip") {
  gen::Rng rng(132);
  MMSpace x = gen::random_space(rng, 4);
  auto [y, w] = gen::dominated_space(rng, x, 2);

  SECTION("map") {
    MapWitness back = map_witness_from_json(to_json(w));
    CHECK(back.f == w.f);
  }
  SECTION("eps") {
    EpsWitness ew{w, {true, false, true, true}, Rat(1, 3)};
    EpsWitness back = eps_witness_from_json(to_json(ew), 4);
    CHECK(back.f.f == ew.f.f);
    CHECK(back.domain == ew.domain);
    CHECK(back.eps == ew.eps);
  }
  SECTION("box") {
    DistanceResult r = box(validate_space(x.metric, gen::random_mass(rng, 4, 8)),
                           validate_space(y.metric, gen::random_mass(rng, y.size(), 8)));
    const BoxWitness& bw = std::get<BoxWitness>(r.witness);
    BoxWitness back = box_witness_from_json(to_json(bw));
    CHECK(back.kept == bw.kept);
    CHECK(back.eps == bw.eps);
    CHECK(back.coupling.pi == bw.coupling.pi);
  }
  SECTION("corr") {
    CorrWitness cw{{{0, 0}, {1, 1}, {2, 1}}, Rat(5, 4)};
    CorrWitness back = corr_witness_from_json(to_json(cw));
    CHECK(back.pairs == cw.pairs);
    CHECK(back.distortion == cw.distortion);
  }
}

TEST_CASE("certificates re-verify from their own document") {
  MMSpace x = fixtures::space_x();
  MMSpace z = fixtures::space_z();
  SpaceDocument dx = document_from_space("X", x);
  SpaceDocument dz = document_from_space("Z", z);
  Json cert = certificate_map(dx, dz, MapWitness{{0, 1, 1}});
  CHECK(cert["valid"] == Json(true));
  CHECK(reverify_certificate(cert, certificate_spaces(cert)));

  // Tampering with the payload breaks re-verification.
  Json tampered = cert;
  tampered["payload"]["f"][2] = 0;
  CHECK(!reverify_certificate(tampered, certificate_spaces(tampered)));

  // Tampering with a stored check line breaks the exact-match rule.
  Json edited = cert;
  edited["checks"][0]["lhs"] = "9999";
  CHECK(!reverify_certificate(edited, certificate_spaces(edited)));
}

TEST_CASE("glue certificates reproduce the construction deterministically") {
  MMSpace a = fixtures::two_point_uniform(Rat(1));
  MMSpace b = fixtures::two_point_uniform(Rat(9, 8));
  DistanceResult r = box(a, b);
  const BoxWitness& w = std::get<BoxWitness>(r.witness);
  GlueResult g = glue_pair(a, b, w.coupling, w.eps, w.kept);
  Json cert = certificate_glue({document_from_space("A", a),
                                document_from_space("B", b)},
                               {w.coupling}, {w.eps}, {w.kept}, g);
  CHECK(cert["valid"] == Json(true));
  CHECK(reverify_certificate(cert, certificate_spaces(cert)));
}
