#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "eulerimg/checks.hpp"
#include "eulerimg/numtheory.hpp"
#include "fixtures.hpp"

using namespace eulerimg;
using checks::Verdict;
using mat::Mat2;
using mat::Mat4;
using model::Block;
using model::FPartMode;
using model::ImageModel;
using nlohmann::json;

namespace {

Block make_block(std::size_t sigma, ff::FqElem d, ff::FqElem alpha, std::vector<Mat2> g_part) {
  Block b;
  b.sigma = sigma;
  b.d = d;
  b.alpha = alpha;
  b.nu = alpha * alpha / d;
  b.chi = d.field().one();
  b.g_part = std::move(g_part);
  return b;
}

ImageModel mock(ff::Field base, ff::Field field, std::vector<Block> blocks, FPartMode mode = FPartMode::kFullSL2) {
  ImageModel m;
  m.p = base.p();
  m.gal = model::GalGroup{{static_cast<int>(blocks.size())}, {0}, std::nullopt};
  m.base = base;
  m.field = field;
  m.blocks = std::move(blocks);
  m.mode = mode;
  return m;
}

// Oracle: SL2(F_p) by filtering all p^4 matrices.
std::vector<Mat2> naive_sl2(ff::Field f) {
  const auto p = static_cast<std::int64_t>(f.p());
  std::vector<Mat2> out;
  for (std::int64_t a = 0; a < p; ++a)
    for (std::int64_t b = 0; b < p; ++b)
      for (std::int64_t c = 0; c < p; ++c)
        for (std::int64_t d = 0; d < p; ++d)
          if (((a * d - b * c) % p + p) % p == 1) out.push_back(Mat2::of_ints(f, a, b, c, d));
  return out;
}

Mat4 minus_identity(const Mat4& k) {
  Mat4 r = k;
  for (int i = 0; i < 4; ++i) r.at(i, i) -= k.field().one();
  return r;
}

// Oracle for (sE): some M in Delta * SL2(F_p) and N in the g-part with
// rank(M (x) N - I) = 3, by cofactor rank over the naive SL2 list.
bool oracle_sE(const ImageModel& m) {
  auto sl2 = naive_sl2(m.base);
  for (const auto& b : m.blocks)
    for (const auto& s : sl2) {
      Mat2 mm = b.scaling() * mat::embed(s, m.field);
      for (const auto& n : b.g_part)
        if (mat::rank_by_minors(minus_identity(mat::kron(mm, n))) == 3) return true;
    }
  return false;
}

// Oracle for (N): kron(M, N) = -I4 for some pair.
bool oracle_N(const ImageModel& m) {
  auto sl2 = naive_sl2(m.base);
  Mat4 target = Mat4::identity(m.field);
  for (auto& x : target.e) x = -x;
  for (const auto& b : m.blocks)
    for (const auto& s : sl2) {
      Mat2 mm = b.scaling() * mat::embed(s, m.field);
      for (const auto& n : b.g_part)
        if (mat::kron(mm, n) == target) return true;
    }
  return false;
}

Mat2 random_invertible(std::mt19937& rng, ff::Field f) {
  std::uniform_int_distribution<std::uint64_t> d(0, f.order() - 1);
  for (;;) {
    auto m = Mat2::of(f.element_at(d(rng)), f.element_at(d(rng)), f.element_at(d(rng)), f.element_at(d(rng)));
    if (!m.det().is_zero()) return m;
  }
}

model::PairSpec spec_json(const std::string& text) { return model::spec_from_json(json::parse(text)); }

}  // namespace

TEST_CASE("SL2 enumeration") {
  for (std::uint64_t p : {3, 5, 7, 11}) {
    CAPTURE(p);
    auto f = ff::make_field(p, 1);
    std::set<Mat2, bool (*)(const Mat2&, const Mat2&)> seen([](const Mat2& a, const Mat2& b) {
      return a.to_string() < b.to_string();
    });
    for (std::uint64_t i = 0; i < checks::sl2_size(p); ++i) {
      auto m = checks::sl2_element(f, i);
      CHECK(m.det().is_one());
      seen.insert(m);
    }
    CHECK(seen.size() == checks::sl2_size(p));
    CHECK(naive_sl2(f).size() == checks::sl2_size(p));
  }
  auto f = ff::make_field(5, 1);
  CHECK(checks::sl2_element(f, 0) == Mat2::identity(f));
  CHECK(checks::sl2_element(f, 1) == Mat2::of_ints(f, 1, 1, 0, 1));
  CHECK(checks::sl2_element(f, 20) == Mat2::of_ints(f, 0, 4, 1, 0));  // first big-cell element: c = 1, a = d = 0
  CHECK_THROWS_AS(checks::sl2_element(f, 120), std::out_of_range);
}

TEST_CASE("check_N on mocks") {
  auto f = ff::make_field(7, 1);
  auto one = f.one();
  auto id = Mat2::identity(f);
  auto minus = Mat2::scalar(-one);
  CHECK(checks::check_N(mock(f, f, {make_block(0, one, one, {minus})}, FPartMode::kTrivial)) == Verdict::kHolds);
  CHECK(checks::check_N(mock(f, f, {make_block(0, one, one, {id})}, FPartMode::kTrivial)) == Verdict::kFails);
  CHECK(checks::check_N(mock(f, f, {make_block(0, one, one, {id})}, FPartMode::kScalarsOnly)) == Verdict::kHolds);
  CHECK(checks::check_N(mock(f, f, {make_block(0, one, one, {id})})) == Verdict::kHolds);
  // Delta = diag(1, -1): -Delta^-1 has det -1, so no scalar N works.
  auto m = mock(f, f, {make_block(0, -one, one, {id, minus})});
  CHECK(checks::check_N(m) == Verdict::kFails);
  CHECK_FALSE(oracle_N(m));
}

TEST_CASE("check_N agrees with the oracle on fixtures") {
  for (const char* name : {"case_d", "sec4_675cb", "pos_675ga"}) {
    CAPTURE(name);
    auto s = fixture(name);
    auto m = model::build_image(s, 13);
    CHECK((checks::check_N(m) == Verdict::kHolds) == oracle_N(m));
  }
}

TEST_CASE("irreducibility") {
  for (const char* name : {"case_a", "case_b", "case_c", "case_d", "case_e", "pos_675ga", "sec4_675cb"}) {
    CAPTURE(name);
    auto s = fixture(name);
    CHECK(checks::check_irreducible(model::build_image(s, model::validation_prime(s))));
  }
  auto f = ff::make_field(7, 1);
  auto one = f.one();
  auto id = Mat2::identity(f);
  auto h = Mat2::of_ints(f, 1, 0, 0, -1);
  auto w = Mat2::of_ints(f, 0, 1, 1, 0);
  CHECK_FALSE(checks::check_irreducible(mock(f, f, {make_block(0, one, one, {id, h})}, FPartMode::kScalarsOnly)));
  CHECK_FALSE(checks::check_irreducible(mock(f, f, {make_block(0, one, one, {id})})));
  CHECK(checks::check_irreducible(mock(f, f, {make_block(0, one, one, {id, h, w, h * w})})));
}

TEST_CASE("rI exception") {
  auto s = fixture("case_d");
  CHECK_FALSE(checks::rI_exception(s, 13));
  s.exceptional_Q = 10;
  CHECK(checks::rI_exception(s, 5));
  s.exceptional_Q = 2;
  CHECK(checks::rI_exception(s, 13));
  s.exceptional_Q = 15;
  CHECK_THROWS_AS(checks::rI_exception(s, 5), model::SpecError);
  s.exceptional_Q.reset();
  CHECK_THROWS_AS(checks::rI_exception(s, 5), model::SpecError);
}

TEST_CASE("brute search on case d") {
  auto s = fixture("case_d");
  auto m13 = model::build_image(s, 13);
  auto r13 = checks::check_sE_brute(m13);
  REQUIRE(r13.witness);
  auto& w = *r13.witness;
  CHECK(mat::rank_by_minors(minus_identity(mat::kron(w.f_part, w.g_part_elem))) == 3);
  CHECK(w.f_part.det() == m13.blocks[w.sigma].d);
  CHECK(std::find(m13.blocks[w.sigma].g_part.begin(), m13.blocks[w.sigma].g_part.end(), w.g_part_elem) !=
        m13.blocks[w.sigma].g_part.end());

  auto m17 = model::build_image(s, 17);
  auto r17 = checks::check_sE_brute(m17);
  CHECK_FALSE(r17.witness);
  CHECK(r17.pairs_examined > 0);
  CHECK_FALSE(checks::check_wE_symbolic(m17));

  CHECK_THROWS_AS(checks::check_sE_brute(m13, {100, 1, false}), checks::BudgetExceeded);
  CHECK_FALSE(checks::within_budget(m13, 100));
}

TEST_CASE("brute search on a toy block") {
  auto f = ff::make_field(5, 1);
  auto one = f.one();
  auto h = Mat2::of_ints(f, 1, 0, 0, -1);
  // Delta = diag(1, -1) with N = diag(1, -1): M = Delta has eigenvalues 1, -1.
  auto m = mock(f, f, {make_block(0, -one, one, {h})});
  auto r = checks::check_sE_brute(m);
  CHECK(r.witness.has_value() == oracle_sE(m));
  CHECK(r.witness.has_value() == checks::check_wE_symbolic(m).has_value());
  // N = I never gives rank 3: the rank of (M - I) (x) I is even.
  auto m_id = mock(f, f, {make_block(0, -one, one, {Mat2::identity(f)})});
  CHECK_FALSE(checks::check_sE_brute(m_id, {checks::kDefaultBudget, 1, true}).witness);
  CHECK_FALSE(oracle_sE(m_id));
}

TEST_CASE("brute, symbolic and oracle agree on random toys") {
  std::mt19937 rng(20240611);
  int with_witness = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::uint64_t p = trial % 2 ? 5 : 7;
    auto base = ff::make_field(p, 1);
    bool ext = trial % 3 == 0;
    auto field = ext ? ff::make_field(p, 2) : base;
    std::vector<Block> blocks;
    for (std::size_t bi = 0; bi < 2; ++bi) {
      auto d = field.from_int(bi == 0 ? 1 : (rng() % 2 ? 1 : -1));
      std::optional<ff::FqElem> alpha;
      while (!alpha) {
        auto nu = field.from_int(static_cast<std::int64_t>(rng() % (p - 1) + 1));
        if (bi == 0) nu = field.one();
        alpha = ff::sqrt(nu * d);
      }
      std::vector<Mat2> g;
      for (int k = 0; k < 3; ++k) g.push_back(random_invertible(rng, field));
      blocks.push_back(make_block(bi, d, *alpha, g));
    }
    auto m = mock(base, field, blocks);
    CAPTURE(trial);
    auto brute = checks::check_sE_brute(m, {checks::kDefaultBudget, 1, true});
    auto sym = checks::check_wE_symbolic(m);
    bool oracle = oracle_sE(m);
    CHECK(brute.witness.has_value() == oracle);
    CHECK(sym.has_value() == oracle);
    if (sym) {
      auto w = checks::construct_witness(m, *sym);
      CHECK(mat::rank_by_minors(minus_identity(mat::kron(w.f_part, w.g_part_elem))) == 3);
      ++with_witness;
    }
  }
  CHECK(with_witness > 0);
  CHECK(with_witness < 60);
}

TEST_CASE("skipped blocks hold no witness") {
  for (const char* name : {"case_d", "sec4_675cb"}) {
    for (std::uint64_t p : {13, 17}) {
      CAPTURE(name);
      CAPTURE(p);
      auto m = model::build_image(fixture(name), p);
      auto r = checks::check_sE_brute(m);
      auto forced = checks::check_sE_brute(m, {checks::kDefaultBudget, 1, true});
      CHECK(r.witness.has_value() == forced.witness.has_value());
      for (auto bi : r.skipped_blocks) {
        auto one = m;
        one.blocks = {m.blocks[bi]};
        CHECK_FALSE(checks::check_sE_brute(one, {checks::kDefaultBudget, 1, true}).witness);
      }
    }
  }
}

TEST_CASE("thread count does not change the witness") {
  for (const char* name : {"case_d", "pos_675ga"}) {
    CAPTURE(name);
    auto m = model::build_image(fixture(name), 13);
    auto a = checks::check_sE_brute(m, {checks::kDefaultBudget, 1, false});
    auto b = checks::check_sE_brute(m, {checks::kDefaultBudget, 3, false});
    REQUIRE(a.witness);
    REQUIRE(b.witness);
    CHECK(a.witness->sigma == b.witness->sigma);
    CHECK(a.witness->f_part == b.witness->f_part);
    CHECK(a.witness->g_part_elem == b.witness->g_part_elem);
    CHECK(a.pairs_examined == b.pairs_examined);
  }
}

TEST_CASE("symbolic criterion on fixtures") {
  auto pos = model::build_image(fixture("pos_675ga"), 13);
  auto w = checks::check_wE_symbolic(pos);
  REQUIRE(w);
  auto wit = checks::construct_witness(pos, *w);
  CHECK(wit.tensor_rank_defect == 1);
  CHECK(wit.f_part.det() == pos.blocks[w->block].d);
  CHECK_FALSE(checks::check_wE_symbolic(model::build_image(fixture("case_a"), 13)));
  CHECK_THROWS_AS(checks::check_wE_symbolic(mock(pos.base, pos.field, pos.blocks, FPartMode::kTrivial)),
                  std::invalid_argument);
}

TEST_CASE("construct_witness on mocks") {
  auto f = ff::make_field(7, 1);
  auto one = f.one();
  auto jordan = Mat2::of_ints(f, 1, 1, 0, 1);
  auto m = mock(f, f, {make_block(0, one, one, {jordan})});
  CHECK_THROWS_AS(checks::construct_witness(m, {0, jordan, one}), checks::CheckError);
  CHECK_FALSE(checks::check_wE_symbolic(m));
  CHECK_FALSE(oracle_sE(m));

  auto u = f.from_int(2);  // 2^3 = 1 mod 7
  auto n = Mat2::diag(u, one);
  auto m2 = mock(f, f, {make_block(0, one, one, {n})});
  auto w = checks::construct_witness(m2, {0, n, u});
  CHECK(w.tensor_rank_defect == 1);
  CHECK(w.f_part.det().is_one());
  CHECK(mat::rank_by_minors(minus_identity(mat::kron(w.f_part, n))) == 3);
  CHECK_THROWS_AS(checks::construct_witness(m2, {0, n, f.from_int(3)}), checks::CheckError);
  CHECK_THROWS_AS(checks::construct_witness(m2, {1, n, u}), checks::CheckError);
}

TEST_CASE("special2 criterion") {
  CHECK(checks::criterion_special2(fixture("pos_675ga"), 13).outcome == checks::Criterion::kExceptional);
  CHECK(checks::criterion_special2(fixture("sec4_675cb"), 13).outcome == checks::Criterion::kInapplicable);
  auto trivial_gal = spec_json(R"({
    "spec_version": 1, "label_f": "toy", "weight_f": 2, "N_f": 1,
    "gal_HQ": {"orders": [1], "c": [0]}, "eps_f": ["1"], "nu": [],
    "g": {"generators": [["z @ 3", "0", "0", "z^2 @ 3"], ["0", "1", "1", "0"]],
          "gH_character": ["1", "1"], "gH_character_on_gal": ["1"]},
    "cm_field_disc": -3
  })");
  CHECK(checks::criterion_special2(trivial_gal, 13).outcome == checks::Criterion::kSufficient);
}

TEST_CASE("specialq criterion") {
  const std::string a = R"(["(1 + z^6)/2 @ 24", "(1 + z^6)/2 @ 24", "(-1 + z^6)/2 @ 24", "(1 - z^6)/2 @ 24"])";
  const std::string i = R"(["z^6 @ 24", "0", "0", "-z^6 @ 24"])";
  const std::string jI = R"(["z^8 @ 24", "0", "0", "z^8 @ 24"])";
  auto octa = spec_json(R"({"spec_version": 1, "label_f": "toy", "weight_f": 2, "N_f": 1,
    "gal_HQ": {"orders": [2], "c": [1]}, "eps_f": ["1"], "nu": [{"sigma": [1], "value": "1"}],
    "g": {"generators": [)" + a + R"(, ["z^3 @ 24", "0", "0", "z^21 @ 24"], )" + jI + R"(],
          "gH_character": ["1", "1", "1"], "gH_character_on_gal": ["1"]}})");
  auto r = checks::criterion_specialq(octa, 73);
  CHECK(r.outcome == checks::Criterion::kSufficient);
  CHECK(r.detail == "q = 3");

  auto tetra = spec_json(R"({"spec_version": 1, "label_f": "toy", "weight_f": 2, "N_f": 1,
    "gal_HQ": {"orders": [3], "c": [0]}, "eps_f": ["1"],
    "nu": [{"sigma": [1], "value": "1"}, {"sigma": [2], "value": "1"}],
    "g": {"generators": [)" + a + ", " + i + ", " + jI + R"(],
          "gH_character": ["z^8 @ 24", "1", "1"], "gH_character_on_gal": ["z^8 @ 24"]}})");
  CHECK(checks::criterion_specialq(tetra, 73).outcome == checks::Criterion::kExceptional);

  CHECK(checks::criterion_specialq(fixture("case_d"), 13).outcome == checks::Criterion::kInapplicable);
}

TEST_CASE("classify") {
  auto d = checks::classify(fixture("case_d"), 17);
  CHECK(d.sE.verdict == Verdict::kFails);
  CHECK(d.wE.verdict == Verdict::kFails);
  CHECK(d.euler_adapted == Verdict::kFails);
  CHECK(d.gI.verdict == Verdict::kHolds);
  CHECK(std::find(d.sE.methods.begin(), d.sE.methods.end(), "brute") != d.sE.methods.end());
  CHECK_FALSE(d.witness);

  auto pos = checks::classify(fixture("pos_675ga"), 13);
  CHECK(pos.sE.verdict == Verdict::kHolds);
  CHECK(pos.euler_type == Verdict::kHolds);
  CHECK(pos.euler_adapted == Verdict::kHolds);
  CHECK(pos.witness);

  auto j1 = pos.to_json();
  auto j2 = checks::classify(fixture("pos_675ga"), 13).to_json();
  CHECK(j1 == j2);
  CHECK_FALSE(j1.contains("seconds"));
  CHECK(j1["conditions"]["N"]["methods"] == json::array({"symbolic"}));

  checks::ClassifyOptions no_brute;
  no_brute.run_brute = false;
  auto sym = checks::classify(fixture("case_d"), 17, no_brute);
  CHECK(sym.sE.verdict == d.sE.verdict);
  CHECK(sym.sE.methods.front() == "symbolic");
}
