#include <algorithm>
#include <set>

#include "doctest.h"
#include "eulerimg/model.hpp"
#include "eulerimg/numtheory.hpp"
#include "fixtures.hpp"

using namespace eulerimg;
using model::PairSpec;
using nlohmann::json;

namespace {

const char* kAllFixtures[] = {"case_a", "case_b", "case_c", "case_d", "case_e", "pos_675ga", "sec4_675cb"};

json toy_json() {
  return json::parse(R"({
    "spec_version": 1,
    "label_f": "toy",
    "weight_f": 2,
    "gal_HQ": {"orders": [2, 2], "c": [1, 0]},
    "eps_f": ["1", "1"],
    "nu": [{"sigma": [1, 0], "value": "2"}, {"sigma": [0, 1], "value": "3"}, {"sigma": [1, 1], "value": "6"}],
    "g": {"generators": [["1", "0", "0", "-1"]], "gH_character": ["-1"], "gH_character_on_gal": ["-1", "1"]},
    "N_f": 7
  })");
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::uint64_t next_usable_prime(const PairSpec& s, std::uint64_t after, std::size_t group_order) {
  for (std::uint64_t q = nt::next_prime(after);; q = nt::next_prime(q)) {
    bool divides_nu = false;
    for (const auto& r : s.nu) divides_nu = divides_nu || r.num % std::int64_t(q) == 0 || r.den % std::int64_t(q) == 0;
    if (model::good_prime(s, q).good && group_order % q != 0 && !divides_nu) return q;
  }
}

}  // namespace

TEST_CASE("fixtures validate") {
  for (const char* name : kAllFixtures) {
    CAPTURE(name);
    auto v = model::validate_spec(fixture(name));
    CHECK(v.empty());
    for (const auto& s : v) MESSAGE(s);
  }
  CHECK(model::validate_spec(fixture("f_24_3_h_c")).empty());
  CHECK(model::validate_spec(fixture("f_289_2_a_f")).empty());
}

TEST_CASE("validate_spec catches violations") {
  auto j = toy_json();
  CHECK(model::validate_spec(model::spec_from_json(j)).empty());

  auto parity = j;
  parity["weight_f"] = 3;
  CHECK(mentions(model::validate_spec(model::spec_from_json(parity)), "parity"));

  auto mult = j;
  mult["nu"][2]["value"] = "5";  // 2 * 3 / 5 is not a square
  CHECK(mentions(model::validate_spec(model::spec_from_json(mult)), "multiplicativity"));

  auto trivial = j;
  trivial["g"]["generators"] = json::array({json::array({"1", "0", "0", "1"})});
  trivial["g"]["gH_character"] = json::array({"1"});
  trivial["g"]["gH_character_on_gal"] = json::array({"1", "1"});
  CHECK(mentions(model::validate_spec(model::spec_from_json(trivial)), "eps_f eps_g"));

  auto det = j;
  det["g"]["generators"][0] = json::array({"2", "0", "0", "1"});
  CHECK(mentions(model::validate_spec(model::spec_from_json(det)), "det"));

  auto chi = j;
  chi["g"]["gH_character_on_gal"] = json::array({"1", "1"});
  CHECK(mentions(model::validate_spec(model::spec_from_json(chi)), "chi_gal"));

  auto eps = j;
  eps["eps_f"][1] = "z @ 3";
  CHECK(mentions(model::validate_spec(model::spec_from_json(eps)), "eps_f"));

  auto field = j;
  field["F"] = "Q(sqrt 5)";
  CHECK(mentions(model::validate_spec(model::spec_from_json(field)), "unsupported"));

  auto d = fixture("case_d");
  d.exceptional_Q = 10;
  CHECK(mentions(model::validate_spec(d), "exceptional_Q"));
  d = fixture("case_d");
  d.g->eps_g_on_H_image = std::vector<cyclo::CycNum>{cyclo::CycNum::integer(-1)};
  CHECK(mentions(model::validate_spec(d), "eps_g_on_H_image"));
}

TEST_CASE("spec parsing errors") {
  auto j = toy_json();
  auto extra = j;
  extra["colour"] = "blue";
  CHECK_THROWS_AS(model::spec_from_json(extra), model::SpecError);
  auto version = j;
  version["spec_version"] = 2;
  CHECK_THROWS_AS(model::spec_from_json(version), model::SpecError);
  auto missing = j;
  missing["nu"].erase(1);
  CHECK_THROWS_AS(model::spec_from_json(missing), model::SpecError);
  auto bad_cyc = j;
  bad_cyc["eps_f"][0] = "1 + ";
  CHECK_THROWS_WITH_AS(model::spec_from_json(bad_cyc), doctest::Contains("eps_f[0]"), model::SpecError);
  auto zero_nu = j;
  zero_nu["nu"][0]["value"] = "0";
  CHECK_THROWS_AS(model::spec_from_json(zero_nu), model::SpecError);
  CHECK_THROWS_AS(model::load_spec(data_path("fixtures/no_such_file.json")), model::SpecError);
}

TEST_CASE("rationals") {
  auto r = model::Rational::parse("-6/4");
  CHECK(r.num == -3);
  CHECK(r.den == 2);
  CHECK(r.to_string() == "-3/2");
  CHECK(model::Rational::parse("7").to_string() == "7");
  CHECK_THROWS_AS(model::Rational::parse("1/0"), model::SpecError);
  CHECK_THROWS_AS(model::Rational::parse("x"), model::SpecError);
  auto f = ff::make_field(13, 1);
  CHECK(model::reduce_rational(model::Rational::parse("1/2"), f) == f.from_int(7));
  CHECK_THROWS_AS(model::reduce_rational(model::Rational::parse("1/13"), f), model::SpecError);
}

TEST_CASE("json round trip") {
  for (const char* name : kAllFixtures) {
    CAPTURE(name);
    auto s = fixture(name);
    auto j = model::spec_to_json(s);
    auto t = model::spec_from_json(j);
    CHECK(model::spec_to_json(t) == j);
    CHECK(t.nu == s.nu);
  }
}

TEST_CASE("Gal(H/Q) indexing") {
  model::GalGroup g{{2, 3}, {1, 0}, std::nullopt};
  CHECK(g.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(g.index(g.exponents(i)) == i);
  CHECK(g.exponents(1) == std::vector<int>{1, 0});
  CHECK(g.exponents(2) == std::vector<int>{0, 1});
  CHECK(g.mul(3, 3) == g.index({0, 2}));
  CHECK(g.c_index() == 1);
  CHECK(g.label(5) == "(1,2)");
}

TEST_CASE("good primes") {
  auto s = fixture("case_d");
  CHECK(model::good_prime(s, 13).good);
  auto r11 = model::good_prime(s, 11);
  CHECK_FALSE(r11.good);
  CHECK(std::find(r11.reasons.begin(), r11.reasons.end(), "p | N_g") != r11.reasons.end());
  auto r5 = model::good_prime(s, 5);
  CHECK(std::find(r5.reasons.begin(), r5.reasons.end(), "p | 30") != r5.reasons.end());
  CHECK_FALSE(model::good_prime(s, 7).good);  // 7 | 63
  // Oracle: direct divisibility of 30 N_f N_g disc_L.
  for (std::uint64_t p = 3; p < 200; p = nt::next_prime(p)) {
    bool bad = (30 % p == 0) || 63 % p == 0 || 1452 % p == 0 || 12 % p == 0;
    CHECK(model::good_prime(s, p).good == !bad);
  }
}

TEST_CASE("build_image on case d") {
  auto s = fixture("case_d");
  auto m = model::build_image(s, 13);
  REQUIRE(m.blocks.size() == 2);
  CHECK(m.field.degree() == 1);
  const auto& id = m.blocks[0];
  CHECK(id.d.is_one());
  CHECK(id.alpha.is_one());
  CHECK(id.g_part.size() == m.gside->GH.order());
  for (const auto& n : id.g_part) CHECK(m.gside->GH.contains(n));
  const auto& b = m.blocks[1];
  CHECK(b.alpha == m.field.from_int(4));
  CHECK(b.d.is_one());
  CHECK(b.scaling().det() == b.d);
  for (const auto& n : b.g_part) {
    CHECK_FALSE(m.gside->GH.contains(n));
    CHECK(n.det() == -m.field.one());
  }

  auto m17 = model::build_image(s, 17);
  CHECK(m17.field.degree() == 2);
  CHECK_FALSE(ff::in_prime_subfield(m17.blocks[1].alpha));
  CHECK(m17.blocks[1].alpha * m17.blocks[1].alpha == m17.field.from_int(3));

  CHECK_THROWS_AS(model::build_image(s, 11), model::SpecError);
  CHECK_THROWS_AS(model::build_image(fixture("f_289_2_a_f"), 13), model::SpecError);
}

TEST_CASE("block invariants on every fixture") {
  for (const char* name : kAllFixtures) {
    CAPTURE(name);
    auto s = fixture(name);
    auto p = model::validation_prime(s);
    auto m = model::build_image(s, p);
    auto m2 = model::build_image(s, next_usable_prime(s, p, m.gside->G.order()));
    CHECK(m.blocks.size() == s.gal.size());
    CHECK(m2.blocks.size() == m.blocks.size());
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
      const auto& b = m.blocks[i];
      CHECK(b.alpha * b.alpha == b.nu * b.d);
      CHECK(b.g_part.size() == m2.blocks[i].g_part.size());
      // The determinant is constant on cosets of ker(det) inside G_H-cosets:
      // every element's determinant lies in det(first) * det(G_H).
      std::set<std::uint64_t> dh;
      for (const auto& h : m.gside->GH.elements()) dh.insert(h.det().encode());
      for (const auto& n : b.g_part) CHECK(dh.count((n.det() / b.g_part.front().det()).encode()));
    }
    CHECK(model::block_product_check(m));
  }
}

TEST_CASE("block_product_check detects inconsistent nu") {
  auto j = toy_json();
  j["nu"][2]["value"] = "5";
  auto s = model::spec_from_json(j);
  // 30 is a non-residue mod 11? legendre(30, 11) = legendre(8, 11) = -1.
  REQUIRE(nt::legendre(30, 11) == -1);
  auto m = model::build_image(s, 11);
  CHECK_FALSE(model::block_product_check(m));
  auto ok = model::build_image(model::spec_from_json(toy_json()), 11);
  CHECK(model::block_product_check(ok));
}

TEST_CASE("alpha sign option") {
  auto s = fixture("case_d");
  auto a = model::build_image(s, 13);
  auto b = model::build_image(s, 13, {true, true});
  CHECK(b.blocks[1].alpha == -a.blocks[1].alpha);
}

TEST_CASE("validation prime") {
  auto s = fixture("case_d");
  auto p = model::validation_prime(s);
  CHECK(p == 13);
  CHECK(model::validation_prime(fixture("pos_675ga")) % 24 == 1);
}
