#include "eulerimg/numtheory.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eulerimg::nt {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

std::uint64_t pollard_rho(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t x = 2, y = 2, d = 1;
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_into(std::uint64_t n, std::map<std::uint64_t, int>& out) {
  if (n == 1) return;
  for (std::uint64_t q = 2; q < 1000 && q * q <= n; ++q) {
    while (n % q == 0) {
      ++out[q];
      n /= q;
    }
  }
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  std::uint64_t d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<std::uint64_t, int>> factor(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factor: zero");
  std::map<std::uint64_t, int> m;
  factor_into(n, m);
  return {m.begin(), m.end()};
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (auto [q, e] : factor(n)) out.push_back(q);
  return out;
}

std::uint64_t next_prime(std::uint64_t n) {
  std::uint64_t c = n + 1;
  while (!is_prime(c)) ++c;
  return c;
}

std::uint64_t mult_order(std::uint64_t a, std::uint64_t n) {
  if (n == 1) return 1;
  if (std::gcd(a % n, n) != 1) throw std::invalid_argument("mult_order: not a unit");
  // Order divides phi(n); strip prime factors of phi(n).
  std::uint64_t phi = static_cast<std::uint64_t>(totient(static_cast<std::int64_t>(n)));
  std::uint64_t ord = phi;
  for (auto [q, e] : factor(phi)) {
    for (int i = 0; i < e && ord % q == 0 && powmod(a, ord / q, n) == 1; ++i) ord /= q;
  }
  return ord;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t lcm(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  return std::abs(a / gcd(a, b) * b);
}

std::optional<std::uint64_t> checked_pow(std::uint64_t p, unsigned k) {
  unsigned __int128 r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= p;
    if (r >= (static_cast<unsigned __int128>(1) << 63)) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

int legendre(std::int64_t a, std::int64_t p) {
  if (p < 3 || p % 2 == 0 || !is_prime(static_cast<std::uint64_t>(p)))
    throw std::invalid_argument("legendre: modulus " + std::to_string(p) + " is not an odd prime");
  std::int64_t r = a % p;
  if (r < 0) r += p;
  if (r == 0) return 0;
  std::uint64_t e = powmod(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>((p - 1) / 2),
                           static_cast<std::uint64_t>(p));
  return e == 1 ? 1 : -1;
}

std::int64_t totient(std::int64_t n) {
  if (n <= 0) throw std::invalid_argument("totient: nonpositive");
  std::int64_t r = n;
  for (auto [q, e] : factor(static_cast<std::uint64_t>(n))) r = r / static_cast<std::int64_t>(q) * (static_cast<std::int64_t>(q) - 1);
  return r;
}

std::int64_t squarefree_part(std::int64_t n) {
  if (n == 0) throw std::invalid_argument("squarefree_part: zero");
  std::int64_t sign = n < 0 ? -1 : 1;
  std::int64_t r = 1;
  for (auto [q, e] : factor(static_cast<std::uint64_t>(n < 0 ? -n : n))) {
    if (e % 2) r *= static_cast<std::int64_t>(q);
  }
  return sign * r;
}

}  // namespace eulerimg::nt
