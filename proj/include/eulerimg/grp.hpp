#pragma once

// Finite subgroups of GL2 over a finite field, closed by breadth-first search.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "eulerimg/mat.hpp"

namespace eulerimg::grp {

using mat::Mat2;

inline constexpr std::size_t kDefaultCap = 10000;

class GroupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProjKind { kCyclic, kDihedral, kTetraA4, kOctaS4, kIcosaA5 };

struct ProjType {
  ProjKind kind = ProjKind::kCyclic;
  int n = 1;  // Cyclic(n), Dihedral(n) of order 2n; unused otherwise

  std::string to_string() const;
  friend bool operator==(const ProjType&, const ProjType&) = default;
};

class MatrixGroup {
 public:
  // Errors if a generator is singular, fields differ, or the group exceeds cap.
  static MatrixGroup closure(const std::vector<Mat2>& gens, std::size_t cap = kDefaultCap);
  // Subgroup generated by a subset, with a small generating set picked greedily.
  static MatrixGroup generated_by(const std::vector<Mat2>& candidates, mat::Field f, std::size_t cap = kDefaultCap);

  mat::Field field() const { return field_; }
  const std::vector<Mat2>& generators() const { return gens_; }
  const std::vector<Mat2>& elements() const { return elems_; }  // identity first
  const std::vector<Mat2>& scalars() const { return scalars_; }
  std::size_t order() const { return elems_.size(); }
  std::size_t proj_order() const { return elems_.size() / scalars_.size(); }

  bool contains(const Mat2& m) const { return index_.count(m) != 0; }
  std::optional<std::size_t> index_of(const Mat2& m) const;

  bool is_abelian() const;

 private:
  mat::Field field_;
  std::vector<Mat2> gens_;
  std::vector<Mat2> elems_;
  std::vector<Mat2> scalars_;
  std::unordered_map<Mat2, std::size_t, mat::Mat2Hash> index_;
};

std::uint64_t element_order(const Mat2& m, std::uint64_t bound = kDefaultCap);
// Least n >= 1 with m^n scalar.
std::uint64_t projective_order(const Mat2& m, std::uint64_t bound = kDefaultCap);

bool scalars_cyclic(const MatrixGroup& g);

// Dickson-style classification of G / scalars by order statistics.
ProjType projective_type(const MatrixGroup& g);

MatrixGroup derived_subgroup(const MatrixGroup& g);

// Extends generator values multiplicatively over the Cayley graph; throws if
// the values do not define a homomorphism. Result is indexed like elements().
std::vector<ff::FqElem> character_from_generators(const MatrixGroup& g, const std::vector<ff::FqElem>& gen_values);

// Kernel of chi (indexed like elements()); validates multiplicativity.
MatrixGroup subgroup_from_character(const MatrixGroup& g, const std::vector<ff::FqElem>& chi);

}  // namespace eulerimg::grp
