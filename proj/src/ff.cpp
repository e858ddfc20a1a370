#include "eulerimg/ff.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "eulerimg/numtheory.hpp"

namespace eulerimg::ff {

struct FieldData {
  std::uint64_t p = 0;
  unsigned k = 0;
  std::uint64_t q = 0;
  std::vector<std::uint32_t> modulus;  // monic, length k + 1
  FqElem generator;                    // least primitive root
};

namespace {

// Dense polynomials over F_p, low coefficient first, no trailing zeros.
using Poly = std::vector<std::uint64_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, std::uint64_t p) {
  trim(a);
  std::uint64_t lead_inv = nt::powmod(m.back(), p - 2, p);
  while (a.size() >= m.size()) {
    std::uint64_t c = nt::mulmod(a.back(), lead_inv, p);
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) {
      a[shift + i] = (a[shift + i] + p - nt::mulmod(c, m[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + nt::mulmod(a[i], b[j], p)) % p;
  return poly_mod(std::move(r), m, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, std::uint64_t p) {
  Poly r{1};
  base = poly_mod(std::move(base), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

bool is_irreducible(const Poly& f, std::uint64_t p) {
  unsigned k = static_cast<unsigned>(f.size() - 1);
  if (k == 1) return true;
  Poly x{0, 1};
  Poly xp = x;
  for (unsigned i = 1; i <= k / 2; ++i) {
    xp = poly_powmod(xp, p, f, p);
    Poly diff = xp;
    diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(diff);
    if (diff.empty()) return false;
    Poly g = poly_gcd(f, diff, p);
    if (g.size() > 1) return false;
  }
  return true;
}

std::vector<std::uint32_t> find_modulus(std::uint64_t p, unsigned k, std::uint64_t q) {
  for (std::uint64_t m = 0; m < q; ++m) {
    Poly f(k + 1, 0);
    std::uint64_t t = m;
    for (unsigned i = 0; i < k; ++i) {
      f[i] = t % p;
      t /= p;
    }
    f[k] = 1;
    if (k > 1 && f[0] == 0) continue;
    if (is_irreducible(f, p)) return {f.begin(), f.end()};
  }
  throw FieldError("no irreducible polynomial found");
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::pair<std::uint64_t, unsigned>, std::unique_ptr<FieldData>>& registry() {
  static std::map<std::pair<std::uint64_t, unsigned>, std::unique_ptr<FieldData>> r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Field

std::uint64_t Field::p() const { return data_->p; }
unsigned Field::degree() const { return data_->k; }
std::uint64_t Field::order() const { return data_->q; }
const std::vector<std::uint32_t>& Field::modulus() const { return data_->modulus; }

FqElem Field::zero() const {
  FqElem e;
  e.field_ = data_;
  return e;
}

FqElem Field::one() const { return from_int(1); }

FqElem Field::from_int(std::int64_t v) const {
  FqElem e = zero();
  std::int64_t p = static_cast<std::int64_t>(data_->p);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  e.c_[0] = static_cast<std::uint32_t>(r);
  return e;
}

FqElem Field::from_coeffs(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() > data_->k) throw FieldError("too many coefficients for " + describe());
  FqElem e = zero();
  for (std::size_t i = 0; i < coeffs.size(); ++i) e.c_[i] = static_cast<std::uint32_t>(coeffs[i] % data_->p);
  return e;
}

FqElem Field::element_at(std::uint64_t m) const {
  if (m >= data_->q) throw FieldError("element index out of range");
  FqElem e = zero();
  for (unsigned i = 0; i < data_->k; ++i) {
    e.c_[i] = static_cast<std::uint32_t>(m % data_->p);
    m /= data_->p;
  }
  return e;
}

const FqElem& Field::primitive_root() const { return data_->generator; }

std::string Field::describe() const {
  if (!data_) return "<no field>";
  if (data_->k == 1) return "F_" + std::to_string(data_->p);
  return "GF(" + std::to_string(data_->p) + "^" + std::to_string(data_->k) + ")";
}

Field make_field(std::uint64_t p, unsigned k) {
  if (p < 3 || !nt::is_prime(p)) throw FieldError("make_field: " + std::to_string(p) + " is not an odd prime");
  if (p >= (1ULL << 31)) throw FieldError("make_field: prime too large");
  if (k < 1 || k > kMaxDegree) throw FieldError("make_field: degree " + std::to_string(k) + " out of range");
  auto q = nt::checked_pow(p, k);
  if (!q) throw FieldError("make_field: field too large");

  std::lock_guard<std::mutex> lock(registry_mutex());
  auto& slot = registry()[{p, k}];
  if (slot) return Field(slot.get());

  auto d = std::make_unique<FieldData>();
  d->p = p;
  d->k = k;
  d->q = *q;
  d->modulus = find_modulus(p, k, *q);
  Field f(d.get());
  auto primes = nt::prime_divisors(*q - 1);
  for (std::uint64_t m = 1; m < *q; ++m) {
    FqElem g = f.element_at(m);
    bool ok = std::all_of(primes.begin(), primes.end(),
                          [&](std::uint64_t r) { return !g.pow((*q - 1) / r).is_one(); });
    if (ok) {
      d->generator = g;
      break;
    }
  }
  slot = std::move(d);
  return f;
}

// ---------------------------------------------------------------- FqElem

void FqElem::require_same(const FqElem& o) const {
  if (field_ != o.field_ || field_ == nullptr) {
    throw FieldError("mixed-field arithmetic: " + field().describe() + " vs " + o.field().describe());
  }
}

std::vector<std::uint32_t> FqElem::coeffs() const { return {c_.begin(), c_.begin() + field_->k}; }

std::uint64_t FqElem::encode() const {
  std::uint64_t m = 0;
  for (unsigned i = field_->k; i-- > 0;) m = m * field_->p + c_[i];
  return m;
}

bool FqElem::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](std::uint32_t v) { return v == 0; });
}

bool FqElem::is_one() const {
  if (c_[0] != 1) return false;
  return std::all_of(c_.begin() + 1, c_.end(), [](std::uint32_t v) { return v == 0; });
}

FqElem FqElem::operator+(const FqElem& o) const {
  require_same(o);
  FqElem r = *this;
  std::uint64_t p = field_->p;
  for (unsigned i = 0; i < field_->k; ++i) r.c_[i] = static_cast<std::uint32_t>((std::uint64_t{c_[i]} + o.c_[i]) % p);
  return r;
}

FqElem FqElem::operator-(const FqElem& o) const {
  require_same(o);
  FqElem r = *this;
  std::uint64_t p = field_->p;
  for (unsigned i = 0; i < field_->k; ++i) r.c_[i] = static_cast<std::uint32_t>((std::uint64_t{c_[i]} + p - o.c_[i]) % p);
  return r;
}

FqElem FqElem::operator-() const {
  FqElem r = *this;
  std::uint64_t p = field_->p;
  for (unsigned i = 0; i < field_->k; ++i) r.c_[i] = static_cast<std::uint32_t>((p - c_[i]) % p);
  return r;
}

FqElem FqElem::operator*(const FqElem& o) const {
  require_same(o);
  const std::uint64_t p = field_->p;
  const unsigned k = field_->k;
  FqElem r;
  r.field_ = field_;
  if (k == 1) {
    r.c_[0] = static_cast<std::uint32_t>(std::uint64_t{c_[0]} * o.c_[0] % p);
    return r;
  }
  std::array<std::uint64_t, 2 * kMaxDegree> t{};
  for (unsigned i = 0; i < k; ++i) {
    if (c_[i] == 0) continue;
    for (unsigned j = 0; j < k; ++j) t[i + j] = (t[i + j] + std::uint64_t{c_[i]} * o.c_[j]) % p;
  }
  const auto& m = field_->modulus;
  for (unsigned i = 2 * k - 2; i >= k; --i) {
    std::uint64_t c = t[i];
    if (c == 0) continue;
    t[i] = 0;
    for (unsigned j = 0; j < k; ++j) t[i - k + j] = (t[i - k + j] + (p - c) * m[j]) % p;
  }
  for (unsigned i = 0; i < k; ++i) r.c_[i] = static_cast<std::uint32_t>(t[i]);
  return r;
}

FqElem FqElem::operator/(const FqElem& o) const { return *this * o.inverse(); }

FqElem FqElem::pow(std::uint64_t e) const {
  FqElem r = field().one();
  FqElem b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

FqElem FqElem::inverse() const {
  if (is_zero()) throw FieldError("inverse of zero in " + field().describe());
  return pow(field_->q - 2);
}

std::uint64_t FqElem::order() const {
  if (is_zero()) throw FieldError("order of zero");
  std::uint64_t ord = field_->q - 1;
  for (auto [r, e] : nt::factor(ord)) {
    for (int i = 0; i < e && ord % r == 0 && pow(ord / r).is_one(); ++i) ord /= r;
  }
  return ord;
}

std::string FqElem::to_string() const {
  if (!field_) return "<unset>";
  if (field_->k == 1) return std::to_string(c_[0]);
  std::ostringstream os;
  os << '[';
  for (unsigned i = 0; i < field_->k; ++i) os << (i ? "," : "") << c_[i];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------- free functions

std::optional<FqElem> sqrt(const FqElem& x) {
  if (x.is_zero()) return x;
  Field f = x.field();
  const std::uint64_t q = f.order();
  if (!x.pow((q - 1) / 2).is_one()) return std::nullopt;

  std::uint64_t t = q - 1;
  unsigned s = 0;
  while (t % 2 == 0) {
    t /= 2;
    ++s;
  }
  // The primitive root is a non-residue.
  FqElem c = f.primitive_root().pow(t);
  FqElem r = x.pow((t + 1) / 2);
  FqElem b = x.pow(t);
  unsigned m = s;
  while (!b.is_one()) {
    unsigned i = 0;
    FqElem bb = b;
    while (!bb.is_one()) {
      bb = bb * bb;
      ++i;
    }
    FqElem w = c;
    for (unsigned j = 0; j + 1 < m - i; ++j) w = w * w;
    r = r * w;
    c = w * w;
    b = b * c;
    m = i;
  }
  FqElem neg = -r;
  return lex_less(neg, r) ? neg : r;
}

std::optional<FqElem> sqrt_exhaustive(const FqElem& x) {
  Field f = x.field();
  if (f.order() > 10000) throw FieldError("sqrt_exhaustive: field too large");
  for (std::uint64_t m = 0; m < f.order(); ++m) {
    FqElem y = f.element_at(m);
    if (y * y == x) {
      FqElem neg = -y;
      return lex_less(neg, y) ? neg : y;
    }
  }
  return std::nullopt;
}

int legendre(std::int64_t a, std::int64_t p) {
  try {
    return nt::legendre(a, p);
  } catch (const std::invalid_argument& e) {
    throw FieldError(e.what());
  }
}

FqElem nth_root_of_unity(Field f, std::uint64_t n) {
  if (n == 0 || (f.order() - 1) % n != 0) {
    throw FieldError("nth_root_of_unity: " + std::to_string(n) + " does not divide " + std::to_string(f.order() - 1));
  }
  return f.primitive_root().pow((f.order() - 1) / n);
}

bool in_prime_subfield(const FqElem& x) { return x.pow(x.field().p()) == x; }

namespace {

// Polynomials over an arbitrary constructed field, low coefficient first.
using FPoly = std::vector<FqElem>;

void ftrim(FPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

FPoly fmod(FPoly a, const FPoly& m) {
  ftrim(a);
  FqElem lead_inv = m.back().inverse();
  while (a.size() >= m.size()) {
    FqElem c = a.back() * lead_inv;
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] -= c * m[i];
    ftrim(a);
  }
  return a;
}

FPoly fmulmod(const FPoly& a, const FPoly& b, const FPoly& m) {
  if (a.empty() || b.empty()) return {};
  Field f = m.back().field();
  FPoly r(a.size() + b.size() - 1, f.zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return fmod(std::move(r), m);
}

FPoly fgcd(FPoly a, FPoly b) {
  ftrim(a);
  ftrim(b);
  while (!b.empty()) {
    FPoly r = fmod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    FqElem inv = a.back().inverse();
    for (auto& c : a) c *= inv;
  }
  return a;
}

FPoly fdiv_exact(FPoly a, const FPoly& b) {
  ftrim(a);
  Field f = b.back().field();
  FqElem lead_inv = b.back().inverse();
  FPoly quo(a.size() - b.size() + 1, f.zero());
  while (a.size() >= b.size()) {
    FqElem c = a.back() * lead_inv;
    std::size_t shift = a.size() - b.size();
    quo[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    ftrim(a);
  }
  return quo;
}

// Roots of a squarefree, fully split polynomial (Cantor-Zassenhaus, with
// deterministic shifts x + a for a running through the field).
void split_roots(const FPoly& g, std::vector<FqElem>& out) {
  if (g.size() <= 1) return;
  if (g.size() == 2) {
    out.push_back(-g[0] / g[1]);
    return;
  }
  Field f = g.back().field();
  const std::uint64_t e = (f.order() - 1) / 2;
  for (std::uint64_t m = 0; m < f.order(); ++m) {
    FPoly base{f.element_at(m), f.one()};
    FPoly r{f.one()};
    std::uint64_t ee = e;
    FPoly b = fmod(base, g);
    while (ee) {
      if (ee & 1) r = fmulmod(r, b, g);
      b = fmulmod(b, b, g);
      ee >>= 1;
    }
    if (r.empty()) r = {f.zero()};
    r[0] -= f.one();
    FPoly h = fgcd(g, r);
    if (h.size() > 1 && h.size() < g.size()) {
      split_roots(h, out);
      split_roots(fdiv_exact(g, h), out);
      return;
    }
  }
  throw FieldError("root splitting failed");
}

}  // namespace

Embedding::Embedding(Field src, Field target) : src_(src), target_(target) {
  if (src.p() != target.p() || target.degree() % src.degree() != 0) {
    throw FieldError("embed: " + src.describe() + " does not embed in " + target.describe());
  }
  if (src == target) return;
  FPoly m;
  for (auto c : src.modulus()) m.push_back(target.from_int(c));
  std::vector<FqElem> roots;
  split_roots(m, roots);
  root_ = *std::min_element(roots.begin(), roots.end(), [](const FqElem& a, const FqElem& b) { return lex_less(a, b); });
}

FqElem Embedding::operator()(const FqElem& x) const {
  if (!(x.field() == src_)) throw FieldError("embed: element not in " + src_.describe());
  if (src_ == target_) return x;
  FqElem r = target_.zero();
  FqElem pw = target_.one();
  for (unsigned i = 0; i < src_.degree(); ++i) {
    r += pw * target_.from_int(x.coeff(i));
    pw *= root_;
  }
  return r;
}

FqElem embed(const FqElem& x, Field target) { return Embedding(x.field(), target)(x); }

}  // namespace eulerimg::ff
