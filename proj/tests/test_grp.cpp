#include <random>

#include "doctest.h"
#include "eulerimg/cyclo.hpp"
#include "eulerimg/grp.hpp"

using namespace eulerimg;
using grp::MatrixGroup;
using grp::ProjKind;
using mat::Mat2;

namespace {

Mat2 cyc_mat(ff::Field f, const char* a, const char* b, const char* c, const char* d) {
  auto r = [&](const char* s) { return cyclo::reduce_mod_p(cyclo::parse(s), f); };
  return Mat2::of(r(a), r(b), r(c), r(d));
}

// Binary icosahedral generators as unit quaternions 1/2(1+i+j+k) and
// 1/2(phi + phi^-1 i + j), with i -> diag(i, -i), j -> [[0,1],[-1,0]].
std::vector<Mat2> binary_icosahedral(ff::Field f) {
  return {cyc_mat(f, "(1 + z^5)/2 @ 20", "(1 + z^5)/2 @ 20", "(-1 + z^5)/2 @ 20", "(1 - z^5)/2 @ 20"),
          cyc_mat(f, "(1 + z^4 + z^16 + z^9 + z^21)/2 @ 20", "1/2", "-1/2", "(1 + z^4 + z^16 - z^9 - z^21)/2 @ 20")};
}

std::vector<Mat2> binary_octahedral(ff::Field f) {
  return {cyc_mat(f, "(1 + z^2)/2 @ 8", "(1 + z^2)/2 @ 8", "(-1 + z^2)/2 @ 8", "(1 - z^2)/2 @ 8"),
          cyc_mat(f, "z @ 8", "0", "0", "z^7 @ 8")};
}

Mat2 random_invertible(std::mt19937& rng, ff::Field f) {
  std::uniform_int_distribution<std::uint64_t> d(0, f.order() - 1);
  for (;;) {
    auto m = Mat2::of(f.element_at(d(rng)), f.element_at(d(rng)), f.element_at(d(rng)), f.element_at(d(rng)));
    if (!m.det().is_zero()) return m;
  }
}

MatrixGroup conjugate(const MatrixGroup& g, const Mat2& c) {
  std::vector<Mat2> gens;
  for (const auto& s : g.generators()) gens.push_back(c * s * c.inverse());
  return MatrixGroup::closure(gens);
}

void check_group_axioms(const MatrixGroup& g) {
  for (const auto& x : g.elements()) {
    CHECK(g.contains(x.inverse()));
    for (const auto& s : g.generators()) CHECK(g.contains(x * s));
  }
  CHECK(g.order() % g.scalars().size() == 0);
  CHECK(grp::scalars_cyclic(g));
}

}  // namespace

TEST_CASE("closure examples") {
  auto f13 = ff::make_field(13, 1);
  auto triv = MatrixGroup::closure({Mat2::identity(f13)});
  CHECK(triv.order() == 1);
  CHECK(grp::projective_type(triv) == grp::ProjType{ProjKind::kCyclic, 1});

  auto f = ff::make_field(17, 2);
  auto z8 = ff::nth_root_of_unity(f, 8);
  auto sc = MatrixGroup::closure({Mat2::scalar(z8)});
  CHECK(sc.order() == 8);
  CHECK(sc.scalars().size() == 8);
  CHECK(sc.proj_order() == 1);
  CHECK(grp::projective_type(sc) == grp::ProjType{ProjKind::kCyclic, 1});

  auto f13_4 = ff::make_field(13, 4);
  auto ico = MatrixGroup::closure(binary_icosahedral(f13_4));
  CHECK(ico.order() == 120);
  CHECK(ico.scalars().size() == 2);
  CHECK(grp::projective_type(ico).kind == ProjKind::kIcosaA5);
  check_group_axioms(ico);
  // Perfect group.
  CHECK(grp::derived_subgroup(ico).order() == 120);
}

TEST_CASE("closure errors") {
  auto f = ff::make_field(13, 1);
  CHECK_THROWS_AS(MatrixGroup::closure({Mat2::of_ints(f, 1, 2, 2, 4)}), grp::GroupError);
  CHECK_THROWS_AS(MatrixGroup::closure({Mat2::of_ints(f, 1, 1, 0, 1), Mat2::of_ints(f, 1, 0, 1, 1)}, 100),
                  grp::GroupError);
  CHECK_THROWS_AS(MatrixGroup::closure({Mat2::identity(f), Mat2::identity(ff::make_field(5, 1))}), grp::GroupError);
  CHECK_THROWS_AS(MatrixGroup::closure({}), grp::GroupError);
}

TEST_CASE("projective types") {
  auto f13 = ff::make_field(13, 1);
  auto klein = MatrixGroup::closure({Mat2::of_ints(f13, 1, 0, 0, -1), Mat2::of_ints(f13, 0, 1, 1, 0)});
  CHECK(klein.proj_order() == 4);
  CHECK(grp::projective_type(klein) == grp::ProjType{ProjKind::kDihedral, 2});

  // diag(j, -j^2) and the swap: projectively dihedral of order 12.
  auto d6 = MatrixGroup::closure({cyc_mat(f13, "z @ 3", "0", "0", "1 + z @ 3"), Mat2::of_ints(f13, 0, 1, 1, 0)});
  CHECK(d6.order() == 24);
  CHECK(d6.scalars().size() == 2);
  CHECK(grp::projective_type(d6) == grp::ProjType{ProjKind::kDihedral, 6});
  auto dd = grp::derived_subgroup(d6);
  CHECK(dd.proj_order() == 3);
  CHECK(grp::projective_type(dd) == grp::ProjType{ProjKind::kCyclic, 3});

  auto f17 = ff::make_field(17, 1);
  auto oct = MatrixGroup::closure(binary_octahedral(f17));
  CHECK(oct.order() == 48);
  CHECK(grp::projective_type(oct).kind == ProjKind::kOctaS4);
  auto tet = grp::derived_subgroup(oct);
  CHECK(tet.order() == 24);
  CHECK(grp::projective_type(tet).kind == ProjKind::kTetraA4);
  check_group_axioms(oct);

  auto cyc = MatrixGroup::closure({Mat2::of_ints(f13, 2, 0, 0, 1)});
  CHECK(grp::projective_type(cyc) == grp::ProjType{ProjKind::kCyclic, 12});
  CHECK(grp::derived_subgroup(cyc).order() == 1);
}

TEST_CASE("projective type is conjugation invariant") {
  std::mt19937 rng(17);
  auto f17 = ff::make_field(17, 1);
  auto f13 = ff::make_field(13, 1);
  std::vector<MatrixGroup> groups{
      MatrixGroup::closure(binary_octahedral(f17)),
      MatrixGroup::closure({cyc_mat(f13, "z @ 3", "0", "0", "1 + z @ 3"), Mat2::of_ints(f13, 0, 1, 1, 0)}),
      MatrixGroup::closure({Mat2::of_ints(f13, 1, 0, 0, -1), Mat2::of_ints(f13, 0, 1, 1, 0)}),
  };
  for (const auto& g : groups) {
    auto t = grp::projective_type(g);
    for (int i = 0; i < 5; ++i) {
      auto h = conjugate(g, random_invertible(rng, g.field()));
      CHECK(h.order() == g.order());
      CHECK(grp::projective_type(h) == t);
    }
  }
}

TEST_CASE("closure is idempotent") {
  auto f17 = ff::make_field(17, 1);
  auto g = MatrixGroup::closure(binary_octahedral(f17));
  auto h = MatrixGroup::closure(g.elements());
  CHECK(h.order() == g.order());
  for (const auto& x : g.elements()) CHECK(h.contains(x));
}

TEST_CASE("subgroup_from_character") {
  auto f7 = ff::make_field(7, 1);
  auto g = MatrixGroup::closure({cyc_mat(f7, "z @ 3", "0", "0", "1 + z @ 3"), Mat2::of_ints(f7, 0, 1, 1, 0)});
  std::vector<ff::FqElem> triv(g.order(), f7.one());
  CHECK(grp::subgroup_from_character(g, triv).order() == g.order());

  // Quadratic character of the determinant; -1 is a non-square mod 7.
  std::vector<ff::FqElem> chi;
  for (const auto& x : g.elements()) chi.push_back(x.det().pow(3));
  auto k = grp::subgroup_from_character(g, chi);
  CHECK(k.order() * 2 == g.order());
  for (const auto& x : k.elements()) CHECK(x.det().pow(3).is_one());

  // Value of order 3 on an involution cannot be a homomorphism.
  auto j = ff::nth_root_of_unity(f7, 3);
  CHECK_THROWS_AS(grp::character_from_generators(g, {f7.one(), j}), grp::GroupError);
  std::vector<ff::FqElem> bad(g.order(), f7.one());
  bad[1] = j;
  CHECK_THROWS_AS(grp::subgroup_from_character(g, bad), grp::GroupError);
}

TEST_CASE("character of S3 x Z/8 with index-two kernel") {
  auto f = ff::make_field(73, 1);
  auto g = MatrixGroup::closure({cyc_mat(f, "z @ 3", "0", "0", "z^2 @ 3"), Mat2::of_ints(f, 0, 1, 1, 0),
                                 cyc_mat(f, "z @ 8", "0", "0", "z @ 8")});
  CHECK(g.order() == 48);
  auto chi = grp::character_from_generators(g, {f.one(), -f.one(), -f.one()});
  auto k = grp::subgroup_from_character(g, chi);
  CHECK(k.order() == 24);
  CHECK(g.order() % k.order() == 0);
  // Consistency with a direct evaluation on every pair.
  for (std::size_t a = 0; a < g.order(); a += 5)
    for (std::size_t b = 0; b < g.order(); b += 3) {
      auto ab = *g.index_of(g.elements()[a] * g.elements()[b]);
      CHECK(chi[ab] == chi[a] * chi[b]);
    }
  // An order-4 value on the scalar generator is still consistent here.
  auto i4 = ff::nth_root_of_unity(f, 4);
  auto chi4 = grp::character_from_generators(g, {f.one(), f.one(), i4});
  CHECK(grp::subgroup_from_character(g, chi4).order() == 12);
}
