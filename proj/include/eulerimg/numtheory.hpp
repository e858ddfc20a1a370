#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace eulerimg::nt {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m);

// Deterministic for all 64-bit inputs.
bool is_prime(std::uint64_t n);

// Prime factorisation as (prime, exponent) pairs, primes increasing.
std::vector<std::pair<std::uint64_t, int>> factor(std::uint64_t n);

std::vector<std::uint64_t> prime_divisors(std::uint64_t n);

std::uint64_t next_prime(std::uint64_t n);  // least prime > n

// Multiplicative order of a modulo n; gcd(a, n) must be 1.
std::uint64_t mult_order(std::uint64_t a, std::uint64_t n);

std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t lcm(std::int64_t a, std::int64_t b);

// Checked p^k; nullopt when the result does not fit below 2^63.
std::optional<std::uint64_t> checked_pow(std::uint64_t p, unsigned k);

// Legendre symbol via Euler's criterion. Throws for even or composite p.
int legendre(std::int64_t a, std::int64_t p);

// Euler's totient for small n.
std::int64_t totient(std::int64_t n);

// Squarefree kernel of a nonzero integer, keeping the sign: 12 -> 3, -8 -> -2.
std::int64_t squarefree_part(std::int64_t n);

}  // namespace eulerimg::nt
