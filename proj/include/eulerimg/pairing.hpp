#pragma once

// The quadratic pairing B(sigma, tau) = tau(sqrt nu(sigma)) / sqrt nu(sigma),
// its specializations at Frobenius, and the negativity criterion.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eulerimg/model.hpp"

namespace eulerimg::pairing {

using model::PairSpec;

class PairingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadratic character of Gal(H/Q), stored by its values on the generators.
struct QuadChar {
  std::vector<int> on_generators;  // +-1

  int at(const model::GalGroup& g, std::size_t sigma) const;
  bool trivial() const;
};

struct PairingTable {
  std::uint64_t p = 0;
  std::vector<int> values;  // indexed like Gal(H/Q) elements
};

PairingTable compute_Bp(const PairSpec& s, std::uint64_t p);

struct KernelM {
  std::vector<std::size_t> elements;
  bool contains(std::size_t sigma) const;
};

// Elements whose nu is a rational square, cross-checked against the first
// 50 usable primes.
KernelM compute_M(const PairSpec& s);

// Throws PairingError unless g has CM by the field of eps and
// eps_f(sigma) * det N = eps(sigma) on every block.
void check_standing_hypothesis(const PairSpec& s, const QuadChar& eps, std::int64_t field_disc);

bool answer_negative(const PairSpec& s, const QuadChar& eps, std::int64_t field_disc);

// (wE) at p under the standing hypothesis, with eps from s.pairing_epsilon:
// holds iff B_p differs from eps.
bool wE_iff_pairing(const PairSpec& s, std::uint64_t p);

// Least nontrivial quadratic character killing M with eps(c) = (-1)^(k-1).
std::optional<QuadChar> exists_epsilon(const PairSpec& s);

}  // namespace eulerimg::pairing
