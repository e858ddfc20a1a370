#pragma once

// Finite fields GF(p^k), p odd, as F_p[x]/(modulus). Field descriptors are
// interned and immutable, so a Field is a cheap handle compared by identity.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eulerimg::ff {

inline constexpr unsigned kMaxDegree = 16;

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldData;
class FqElem;

class Field {
 public:
  Field() = default;

  std::uint64_t p() const;
  unsigned degree() const;
  std::uint64_t order() const;  // p^k
  // Monic modulus, low coefficient first (length k + 1).
  const std::vector<std::uint32_t>& modulus() const;

  FqElem zero() const;
  FqElem one() const;
  FqElem from_int(std::int64_t v) const;
  FqElem from_coeffs(std::span<const std::uint32_t> coeffs) const;
  // Element whose base-p digits (least significant = constant term) spell m.
  FqElem element_at(std::uint64_t m) const;

  // Least generator of the multiplicative group in element_at order.
  const FqElem& primitive_root() const;

  bool valid() const { return data_ != nullptr; }
  const FieldData* data() const { return data_; }

  friend bool operator==(Field a, Field b) { return a.data_ == b.data_; }

  std::string describe() const;

 private:
  friend Field make_field(std::uint64_t p, unsigned k);
  friend class FqElem;
  explicit Field(const FieldData* d) : data_(d) {}
  const FieldData* data_ = nullptr;
};

// Modulus is the least monic irreducible of degree k, enumerating candidate
// coefficient vectors as base-p integers (constant term least significant).
Field make_field(std::uint64_t p, unsigned k);

class FqElem {
 public:
  FqElem() = default;

  Field field() const { return Field(field_); }
  std::uint32_t coeff(unsigned i) const { return c_[i]; }
  std::vector<std::uint32_t> coeffs() const;
  std::uint64_t encode() const;  // inverse of Field::element_at

  bool is_zero() const;
  bool is_one() const;

  FqElem operator+(const FqElem& o) const;
  FqElem operator-(const FqElem& o) const;
  FqElem operator-() const;
  FqElem operator*(const FqElem& o) const;
  FqElem operator/(const FqElem& o) const;
  FqElem& operator+=(const FqElem& o) { return *this = *this + o; }
  FqElem& operator-=(const FqElem& o) { return *this = *this - o; }
  FqElem& operator*=(const FqElem& o) { return *this = *this * o; }

  FqElem pow(std::uint64_t e) const;
  FqElem inverse() const;
  FqElem frobenius() const { return pow(field().p()); }

  // Multiplicative order; the element must be nonzero.
  std::uint64_t order() const;

  friend bool operator==(const FqElem& a, const FqElem& b) {
    return a.field_ == b.field_ && a.c_ == b.c_;
  }
  // Lexicographic on the coefficient list, constant term first.
  friend bool lex_less(const FqElem& a, const FqElem& b) { return a.c_ < b.c_; }

  std::string to_string() const;

 private:
  friend class Field;
  void require_same(const FqElem& o) const;
  const FieldData* field_ = nullptr;
  std::array<std::uint32_t, kMaxDegree> c_{};
};

bool lex_less(const FqElem& a, const FqElem& b);

// Square root choosing the lexicographically smaller of the two roots.
std::optional<FqElem> sqrt(const FqElem& x);
// Reference implementation by exhausting the field (order at most 10^4).
std::optional<FqElem> sqrt_exhaustive(const FqElem& x);

int legendre(std::int64_t a, std::int64_t p);

// primitive_root^((q-1)/n); these are compatible: root(mn)^m == root(n).
FqElem nth_root_of_unity(Field f, std::uint64_t n);

bool in_prime_subfield(const FqElem& x);

// Image of x under the embedding GF(p^k) -> GF(p^K) (k | K) sending the
// generator to the least root of the source modulus.
FqElem embed(const FqElem& x, Field target);

// The same map with the root computed once.
class Embedding {
 public:
  Embedding(Field src, Field target);
  FqElem operator()(const FqElem& x) const;
  Field source() const { return src_; }
  Field target() const { return target_; }

 private:
  Field src_;
  Field target_;
  FqElem root_;
};

}  // namespace eulerimg::ff
