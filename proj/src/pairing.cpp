#include "eulerimg/pairing.hpp"

#include <algorithm>
#include <cmath>

#include "eulerimg/numtheory.hpp"

namespace eulerimg::pairing {

namespace {

bool is_square(std::int64_t n) {
  if (n < 0) return false;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n;
}

bool divides_nu(const PairSpec& s, std::uint64_t p) {
  for (const auto& r : s.nu) {
    auto div = [p](std::int64_t n) { return static_cast<std::uint64_t>(n < 0 ? -n : n) % p == 0; };
    if (div(r.num) || div(r.den)) return true;
  }
  return false;
}

QuadChar required_eps(const PairSpec& s) {
  if (!s.pairing_epsilon) throw PairingError("spec declares no pairing_epsilon");
  return QuadChar{s.pairing_epsilon->values};
}

}  // namespace

int QuadChar::at(const model::GalGroup& g, std::size_t sigma) const {
  if (on_generators.size() != g.orders.size()) throw PairingError("character has wrong number of generator values");
  auto e = g.exponents(sigma);
  int v = 1;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] % 2 == 1) v *= on_generators[i];
  return v;
}

bool QuadChar::trivial() const {
  return std::all_of(on_generators.begin(), on_generators.end(), [](int v) { return v == 1; });
}

PairingTable compute_Bp(const PairSpec& s, std::uint64_t p) {
  if (s.base_field != "Q") throw PairingError("unsupported: base field F = " + s.base_field);
  auto gp = model::good_prime(s, p);
  if (!gp.good) throw PairingError("p = " + std::to_string(p) + " is not a good prime");
  PairingTable t;
  t.p = p;
  for (const auto& r : s.nu) {
    int l = nt::legendre(nt::squarefree_part(r.num) * nt::squarefree_part(r.den), static_cast<std::int64_t>(p));
    if (l == 0) throw PairingError("p = " + std::to_string(p) + " divides nu = " + r.to_string());
    t.values.push_back(l);
  }
  return t;
}

bool KernelM::contains(std::size_t sigma) const {
  return std::find(elements.begin(), elements.end(), sigma) != elements.end();
}

KernelM compute_M(const PairSpec& s) {
  if (s.base_field != "Q") throw PairingError("unsupported: base field F = " + s.base_field);
  KernelM m;
  for (std::size_t i = 0; i < s.nu.size(); ++i)
    if (is_square(s.nu[i].num) && is_square(s.nu[i].den)) m.elements.push_back(i);

  std::vector<bool> in_all_kernels(s.nu.size(), true);
  int used = 0;
  for (std::uint64_t p = 7; used < 50; p = nt::next_prime(p)) {
    if (!model::good_prime(s, p).good || divides_nu(s, p)) continue;
    auto t = compute_Bp(s, p);
    for (std::size_t i = 0; i < t.values.size(); ++i)
      if (t.values[i] != 1) in_all_kernels[i] = false;
    ++used;
  }
  for (std::size_t i = 0; i < s.nu.size(); ++i)
    if (in_all_kernels[i] != m.contains(i))
      throw PairingError("M cross-check failed at " + s.gal.label(i) + ": nu = " + s.nu[i].to_string());
  return m;
}

void check_standing_hypothesis(const PairSpec& s, const QuadChar& eps, std::int64_t field_disc) {
  if (eps.on_generators.size() != s.gal.orders.size()) throw PairingError("character has wrong number of values");
  if (eps.trivial()) throw PairingError("eps must be nontrivial");
  if (!s.cm_field_disc || *s.cm_field_disc != field_disc)
    throw PairingError("standing hypothesis: g does not have CM by the field of discriminant " + std::to_string(field_disc));
  std::uint64_t p = model::validation_prime(s);
  auto m = model::build_image(s, p);
  for (const auto& b : m.blocks) {
    auto e = m.field.from_int(eps.at(s.gal, b.sigma));
    for (const auto& n : b.g_part)
      if (!(b.d * n.det() == e))
        throw PairingError("standing hypothesis: eps_g != eps_f^-1 eps on " + s.gal.label(b.sigma));
  }
}

bool answer_negative(const PairSpec& s, const QuadChar& eps, std::int64_t field_disc) {
  check_standing_hypothesis(s, eps, field_disc);
  auto m = compute_M(s);
  return std::all_of(m.elements.begin(), m.elements.end(), [&](std::size_t x) { return eps.at(s.gal, x) == 1; });
}

bool wE_iff_pairing(const PairSpec& s, std::uint64_t p) {
  QuadChar eps = required_eps(s);
  check_standing_hypothesis(s, eps, s.pairing_epsilon->field_disc);
  auto t = compute_Bp(s, p);
  for (std::size_t i = 0; i < t.values.size(); ++i)
    if (t.values[i] != eps.at(s.gal, i)) return true;
  return false;
}

std::optional<QuadChar> exists_epsilon(const PairSpec& s) {
  auto m = compute_M(s);
  std::vector<std::size_t> even;
  for (std::size_t i = 0; i < s.gal.orders.size(); ++i)
    if (s.gal.orders[i] % 2 == 0) even.push_back(i);
  if (even.size() > 20) throw PairingError("too many even-order generators");
  const int want_c = s.weight_f % 2 == 0 ? -1 : 1;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << even.size()); ++mask) {
    QuadChar e{std::vector<int>(s.gal.orders.size(), 1)};
    for (std::size_t b = 0; b < even.size(); ++b)
      if (mask >> b & 1) e.on_generators[even[b]] = -1;
    if (e.at(s.gal, s.gal.c_index()) != want_c) continue;
    bool kills = std::all_of(m.elements.begin(), m.elements.end(), [&](std::size_t x) { return e.at(s.gal, x) == 1; });
    if (kills) return e;
  }
  return std::nullopt;
}

}  // namespace eulerimg::pairing
