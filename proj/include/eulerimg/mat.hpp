#pragma once

// 2x2 and 4x4 matrices over a finite field. Kronecker products put the left
// factor outside: kron(M, N) has block (i, j) equal to M(i, j) * N.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "eulerimg/ff.hpp"

namespace eulerimg::mat {

using ff::Field;
using ff::FqElem;

struct Mat2 {
  std::array<FqElem, 4> e;  // row-major

  static Mat2 identity(Field f);
  static Mat2 scalar(const FqElem& x);
  static Mat2 diag(const FqElem& a, const FqElem& b);
  static Mat2 of(const FqElem& a, const FqElem& b, const FqElem& c, const FqElem& d);
  static Mat2 of_ints(Field f, std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);

  const FqElem& operator()(int i, int j) const { return e[static_cast<std::size_t>(2 * i + j)]; }
  Field field() const { return e[0].field(); }

  Mat2 operator*(const Mat2& o) const;
  Mat2 operator+(const Mat2& o) const;
  Mat2 operator-(const Mat2& o) const;
  Mat2 scaled(const FqElem& x) const;
  Mat2 transpose() const;
  Mat2 inverse() const;
  Mat2 pow(std::uint64_t n) const;

  FqElem det() const;
  FqElem trace() const;
  bool is_scalar() const;
  bool is_identity() const;

  friend bool operator==(const Mat2& a, const Mat2& b) { return a.e == b.e; }

  std::string to_string() const;
};

struct Mat2Hash {
  std::size_t operator()(const Mat2& m) const noexcept;
};

struct Mat4 {
  std::array<FqElem, 16> e;  // row-major

  static Mat4 identity(Field f);
  static Mat4 zero(Field f);

  const FqElem& operator()(int i, int j) const { return e[static_cast<std::size_t>(4 * i + j)]; }
  FqElem& at(int i, int j) { return e[static_cast<std::size_t>(4 * i + j)]; }
  Field field() const { return e[0].field(); }

  Mat4 operator*(const Mat4& o) const;
  Mat4 operator+(const Mat4& o) const;
  Mat4 operator-(const Mat4& o) const;

  FqElem det() const;
  FqElem trace() const;

  friend bool operator==(const Mat4& a, const Mat4& b) { return a.e == b.e; }

  std::string to_string() const;
};

Mat4 kron(const Mat2& m, const Mat2& n);

// Rank by cross-multiplying elimination (no field inversions).
int rank(const Mat4& a);
int kernel_dim(const Mat4& a);
// Independent rank: largest nonvanishing minor, by cofactor expansion.
int rank_by_minors(const Mat4& a);

struct EigenData {
  Field field;  // base field, or the quadratic extension when needed
  std::vector<std::pair<FqElem, int>> eigenvalues;  // lexicographically sorted
  bool semisimple = true;
};

EigenData eigen2(const Mat2& m);

Mat2 embed(const Mat2& m, Field target);

}  // namespace eulerimg::mat
