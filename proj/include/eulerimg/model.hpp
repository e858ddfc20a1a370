#pragma once

// Pair specifications (the arithmetic data of f and g) and the mod-p image
// model: one block per element of Gal(H/Q), pairing the scaled coset
// diag(alpha, d/alpha) * SL2(F_p) with a coset of rho_g(G_H).

#include <array>
#include <unordered_map>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerimg/cyclo.hpp"
#include "eulerimg/grp.hpp"
#include "json.hpp"

namespace eulerimg::model {

using cyclo::CycNum;
using ff::Field;
using ff::FqElem;
using mat::Mat2;

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  static Rational parse(const std::string& s);
  std::string to_string() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Finite abelian group Z/o_0 x Z/o_1 x ...; elements are indexed in mixed
// radix with the first generator varying fastest.
struct GalGroup {
  std::vector<int> orders;
  std::vector<int> c;                     // complex conjugation
  std::optional<std::vector<int>> sigma0;  // optional distinguished element

  std::size_t size() const;
  std::vector<int> exponents(std::size_t idx) const;
  std::size_t index(const std::vector<int>& exps) const;
  std::size_t mul(std::size_t a, std::size_t b) const;
  std::size_t c_index() const { return index(c); }
  std::string label(std::size_t idx) const;
};

struct GData {
  std::vector<std::array<CycNum, 4>> generators;
  std::vector<CycNum> gH_character;         // chi on the generators; ker chi = rho_g(G_H)
  std::vector<CycNum> gH_character_on_gal;  // chi_gal on the Gal(H/Q) generators
  std::optional<std::vector<CycNum>> eps_g_on_H_image;
};

struct PairingEpsilon {
  std::vector<int> values;  // +-1 on the Gal(H/Q) generators
  std::int64_t field_disc = 0;
};

struct PairSpec {
  int spec_version = 1;
  std::string label_f;
  std::string label_g;
  int weight_f = 2;
  std::string base_field = "Q";
  GalGroup gal;
  std::vector<CycNum> eps_f;  // on the Gal(H/Q) generators
  std::vector<Rational> nu;   // indexed like gal elements
  std::optional<GData> g;
  std::int64_t N_f = 1;
  std::int64_t N_g = 1;
  std::int64_t disc_L = 1;
  std::optional<std::int64_t> cm_field_disc;
  std::optional<std::int64_t> exceptional_Q;
  std::vector<std::int64_t> H_discs;  // discriminants of the quadratic subfields of H
  std::optional<PairingEpsilon> pairing_epsilon;
  nlohmann::json provenance;

  CycNum eps_f_at(std::size_t sigma) const;
  CycNum chi_gal_at(std::size_t sigma) const;
};

PairSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const PairSpec& s);
PairSpec load_spec(const std::string& path);

struct GoodPrime {
  bool good = false;
  std::vector<std::string> reasons;
};

GoodPrime good_prime(const PairSpec& s, std::uint64_t p);

// How the f-part of each block is modeled. The restricted modes exist for
// unit-test mocks only.
enum class FPartMode { kFullSL2, kScalarsOnly, kTrivial };

struct Block {
  std::size_t sigma = 0;
  FqElem d;      // eps_f(sigma)
  FqElem nu;     // nu(sigma) reduced
  FqElem alpha;  // alpha^2 = nu * d
  std::vector<Mat2> g_part;
  FqElem chi;    // common character value of the g_part elements

  Mat2 scaling() const;  // diag(alpha, d / alpha)
};

struct GSide {
  grp::MatrixGroup G;
  grp::MatrixGroup GH;
  std::vector<FqElem> chi;  // on G.elements()
};

struct ImageModel {
  std::uint64_t p = 0;
  GalGroup gal;
  Field base;
  Field field;
  std::vector<Block> blocks;
  FPartMode mode = FPartMode::kFullSL2;
  std::optional<GSide> gside;
};

struct BuildOptions {
  bool negate_alpha = false;  // rebuild with -alpha (sign-invariance tests)
  bool require_good = true;
};

// Smallest GF(p^k) holding all cyclotomic data of the spec (with g's group
// exponent) and the square roots alpha.
ImageModel build_image(const PairSpec& s, std::uint64_t p, const BuildOptions& opts = {});

// g-side only, over a field containing the spec's roots of unity.
GSide build_gside(const PairSpec& s, Field f);
unsigned required_degree(const PairSpec& s, std::uint64_t p, std::uint64_t extra_conductor = 1);

// Smallest prime > 5, 1 mod lcm(conductors, 2), good for the spec, not
// dividing |G| or any nu.
std::uint64_t validation_prime(const PairSpec& s);

std::vector<std::string> validate_spec(const PairSpec& s);

bool block_product_check(const ImageModel& m);

Mat2 reduce_matrix(const std::array<CycNum, 4>& e, Field f);
FqElem reduce_rational(const Rational& r, Field f);

}  // namespace eulerimg::model
