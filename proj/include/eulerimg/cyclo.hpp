#pragma once

// Exact elements of (1/d) Z[zeta_n], stored densely in the power basis
// 1, z, ..., z^(phi(n)-1) modulo the n-th cyclotomic polynomial.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eulerimg/ff.hpp"

namespace eulerimg::cyclo {

inline constexpr int kMaxConductor = 1000;

class CycError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public CycError {
 public:
  ParseError(std::size_t pos, const std::string& msg)
      : CycError("at position " + std::to_string(pos) + ": " + msg), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// Coefficients low degree first; monic of degree phi(n).
const std::vector<std::int64_t>& cyclotomic_poly(int n);

class CycNum {
 public:
  CycNum() : CycNum(integer(0)) {}

  static CycNum integer(std::int64_t v, int n = 1);
  static CycNum rational(std::int64_t num, std::int64_t den, int n = 1);
  // zeta_n^e; any integer exponent.
  static CycNum zeta(int n, std::int64_t e = 1);
  // (1/d) * sum coeffs[i] z^i with z = zeta_n; any length, reduced on entry.
  static CycNum from_poly(int n, const std::vector<std::int64_t>& coeffs, std::int64_t d = 1);

  int conductor() const { return n_; }
  std::int64_t denominator() const { return d_; }
  const std::vector<std::int64_t>& coeffs() const { return c_; }

  // Same number written over conductor m (a multiple of n).
  CycNum lift(int m) const;
  // Same number over a divisor m of n; throws if it does not lie in Q(zeta_m).
  CycNum descend(int m) const;

  CycNum operator+(const CycNum& o) const;
  CycNum operator-(const CycNum& o) const;
  CycNum operator-() const;
  CycNum operator*(const CycNum& o) const;
  CycNum pow(std::uint64_t e) const;

  bool is_zero() const;
  friend bool operator==(const CycNum& a, const CycNum& b);

  std::optional<std::int64_t> root_of_unity_order() const;

  // Round-trips through parse().
  std::string to_string() const;

 private:
  CycNum(int n, std::vector<std::int64_t> c, std::int64_t d);
  void normalize();
  int n_;
  std::int64_t d_;
  std::vector<std::int64_t> c_;
};

std::optional<std::int64_t> is_root_of_unity(const CycNum& c);

// Syntax: "(a0 + a1*z + 3*z^5 - z^2)/d @ n"; "/d" and "@ n" optional, n
// defaults to 1 and is required when z appears.
CycNum parse(std::string_view text);

// Ring map sending zeta_n to ff::nth_root_of_unity(f, n).
ff::FqElem reduce_mod_p(const CycNum& c, ff::Field f);

}  // namespace eulerimg::cyclo
