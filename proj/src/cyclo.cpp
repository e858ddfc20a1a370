#include "eulerimg/cyclo.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "eulerimg/numtheory.hpp"

namespace eulerimg::cyclo {

namespace {

std::int64_t add_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw CycError("cyclotomic coefficient overflow");
  return r;
}

std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw CycError("cyclotomic coefficient overflow");
  return r;
}

void check_conductor(int n) {
  if (n < 1 || n > kMaxConductor) throw CycError("conductor " + std::to_string(n) + " out of range");
}

std::vector<std::int64_t> compute_cyclotomic(int n) {
  // x^n - 1 divided exactly by Phi_d for every proper divisor d.
  std::vector<std::int64_t> num(static_cast<std::size_t>(n) + 1, 0);
  num[0] = -1;
  num[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d) continue;
    const auto& den = cyclotomic_poly(d);
    const std::size_t dn = den.size() - 1;
    std::vector<std::int64_t> quo(num.size() - dn, 0);
    for (std::size_t sh = quo.size(); sh-- > 0;) {
      std::int64_t c = num[sh + dn];
      quo[sh] = c;
      for (std::size_t j = 0; j <= dn; ++j) num[sh + j] = add_checked(num[sh + j], -mul_checked(c, den[j]));
    }
    num = std::move(quo);
  }
  return num;
}

// Reduces a dense polynomial in z (any degree) modulo Phi_n.
std::vector<std::int64_t> reduce_poly(std::vector<std::int64_t> t, int n) {
  const auto& phi = cyclotomic_poly(n);
  const std::size_t k = phi.size() - 1;
  // First fold z^n = 1.
  if (t.size() > static_cast<std::size_t>(n)) {
    for (std::size_t i = static_cast<std::size_t>(n); i < t.size(); ++i) {
      t[i % static_cast<std::size_t>(n)] = add_checked(t[i % static_cast<std::size_t>(n)], t[i]);
    }
    t.resize(static_cast<std::size_t>(n));
  }
  for (std::size_t i = t.size(); i-- > k;) {
    std::int64_t c = t[i];
    if (c == 0) continue;
    for (std::size_t j = 0; j <= k; ++j) t[i - k + j] = add_checked(t[i - k + j], -mul_checked(c, phi[j]));
  }
  t.resize(k, 0);
  return t;
}

struct Rat {
  __int128 num = 0;
  __int128 den = 1;
};

Rat make_rat(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  const __int128 lim = static_cast<__int128>(1) << 62;
  if (n > lim || n < -lim || d > lim) throw CycError("rational overflow while changing conductor");
  return {n, d};
}

Rat sub(Rat a, Rat b) { return make_rat(a.num * b.den - b.num * a.den, a.den * b.den); }
Rat mul(Rat a, Rat b) { return make_rat(a.num * b.num, a.den * b.den); }
Rat div(Rat a, Rat b) { return make_rat(a.num * b.den, a.den * b.num); }

}  // namespace

const std::vector<std::int64_t>& cyclotomic_poly(int n) {
  check_conductor(n);
  static std::mutex mu;
  static std::map<int, std::unique_ptr<std::vector<std::int64_t>>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;
  }
  // Computed outside the lock: recursion needs it for smaller divisors.
  auto poly = std::make_unique<std::vector<std::int64_t>>(n == 1 ? std::vector<std::int64_t>{-1, 1}
                                                                 : compute_cyclotomic(n));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(n, std::move(poly));
  return *it->second;
}

// ---------------------------------------------------------------- CycNum

CycNum::CycNum(int n, std::vector<std::int64_t> c, std::int64_t d) : n_(n), d_(d), c_(std::move(c)) { normalize(); }

void CycNum::normalize() {
  if (d_ == 0) throw CycError("zero denominator");
  if (d_ < 0) {
    d_ = -d_;
    for (auto& v : c_) v = -v;
  }
  std::int64_t g = d_;
  for (auto v : c_) g = std::gcd(g, v);
  if (g > 1) {
    d_ /= g;
    for (auto& v : c_) v /= g;
  }
}

CycNum CycNum::integer(std::int64_t v, int n) { return rational(v, 1, n); }

CycNum CycNum::rational(std::int64_t num, std::int64_t den, int n) {
  check_conductor(n);
  std::vector<std::int64_t> c(cyclotomic_poly(n).size() - 1, 0);
  c[0] = num;
  return CycNum(n, std::move(c), den);
}

CycNum CycNum::zeta(int n, std::int64_t e) {
  check_conductor(n);
  std::int64_t r = e % n;
  if (r < 0) r += n;
  std::vector<std::int64_t> t(static_cast<std::size_t>(r) + 1, 0);
  t[static_cast<std::size_t>(r)] = 1;
  return CycNum(n, reduce_poly(std::move(t), n), 1);
}

CycNum CycNum::from_poly(int n, const std::vector<std::int64_t>& coeffs, std::int64_t d) {
  check_conductor(n);
  return CycNum(n, reduce_poly(coeffs, n), d);
}

CycNum CycNum::lift(int m) const {
  check_conductor(m);
  if (m % n_) throw CycError("cannot lift conductor " + std::to_string(n_) + " to " + std::to_string(m));
  if (m == n_) return *this;
  const std::size_t step = static_cast<std::size_t>(m / n_);
  std::vector<std::int64_t> t(c_.size() * step + 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i) t[i * step] = c_[i];
  return CycNum(m, reduce_poly(std::move(t), m), d_);
}

CycNum CycNum::descend(int m) const {
  check_conductor(m);
  if (n_ % m) throw CycError("conductor " + std::to_string(m) + " does not divide " + std::to_string(n_));
  if (m == n_) return *this;
  // Solve sum b_i lift(z_m^i) = c over Q.
  const std::size_t rows = c_.size();
  const std::size_t cols = cyclotomic_poly(m).size() - 1;
  std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols + 1));
  for (std::size_t j = 0; j < cols; ++j) {
    CycNum basis = zeta(m, static_cast<std::int64_t>(j)).lift(n_);
    for (std::size_t i = 0; i < rows; ++i) a[i][j] = make_rat(basis.c_[i], 1);
  }
  for (std::size_t i = 0; i < rows; ++i) a[i][cols] = make_rat(c_[i], d_);
  std::size_t r = 0;
  std::vector<std::size_t> pivots;
  for (std::size_t j = 0; j < cols && r < rows; ++j) {
    std::size_t piv = r;
    while (piv < rows && a[piv][j].num == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[r], a[piv]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][j].num == 0) continue;
      Rat f = div(a[i][j], a[r][j]);
      for (std::size_t l = j; l <= cols; ++l) a[i][l] = sub(a[i][l], mul(f, a[r][l]));
    }
    pivots.push_back(j);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (a[i][cols].num != 0) throw CycError(to_string() + " does not lie in Q(zeta_" + std::to_string(m) + ")");
  }
  std::vector<Rat> sol(cols);
  for (std::size_t i = 0; i < r; ++i) sol[pivots[i]] = div(a[i][cols], a[i][pivots[i]]);
  __int128 den = 1;
  for (auto& s : sol) den = den / std::gcd(static_cast<std::int64_t>(den), static_cast<std::int64_t>(s.den)) * s.den;
  std::vector<std::int64_t> out(cols);
  for (std::size_t j = 0; j < cols; ++j) out[j] = static_cast<std::int64_t>(sol[j].num * (den / sol[j].den));
  return CycNum(m, std::move(out), static_cast<std::int64_t>(den));
}

namespace {

int common(const CycNum& a, const CycNum& b) {
  std::int64_t l = nt::lcm(a.conductor(), b.conductor());
  check_conductor(static_cast<int>(l));
  return static_cast<int>(l);
}

}  // namespace

CycNum CycNum::operator+(const CycNum& o) const {
  int m = common(*this, o);
  CycNum a = lift(m), b = o.lift(m);
  std::int64_t g = std::gcd(a.d_, b.d_);
  std::int64_t fa = b.d_ / g, fb = a.d_ / g;
  std::vector<std::int64_t> c(a.c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = add_checked(mul_checked(a.c_[i], fa), mul_checked(b.c_[i], fb));
  return CycNum(m, std::move(c), mul_checked(a.d_, fa));
}

CycNum CycNum::operator-() const {
  CycNum r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

CycNum CycNum::operator-(const CycNum& o) const { return *this + (-o); }

CycNum CycNum::operator*(const CycNum& o) const {
  int m = common(*this, o);
  CycNum a = lift(m), b = o.lift(m);
  std::vector<std::int64_t> t(a.c_.size() + b.c_.size() - 1, 0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) t[i + j] = add_checked(t[i + j], mul_checked(a.c_[i], b.c_[j]));
  }
  return CycNum(m, reduce_poly(std::move(t), m), mul_checked(a.d_, b.d_));
}

CycNum CycNum::pow(std::uint64_t e) const {
  CycNum r = integer(1, n_);
  CycNum b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

bool CycNum::is_zero() const {
  for (auto v : c_)
    if (v) return false;
  return true;
}

bool operator==(const CycNum& a, const CycNum& b) {
  int m = common(a, b);
  CycNum x = a.lift(m), y = b.lift(m);
  return x.d_ == y.d_ && x.c_ == y.c_;
}

std::optional<std::int64_t> CycNum::root_of_unity_order() const {
  if (d_ != 1 || is_zero()) return std::nullopt;
  std::int64_t bound = nt::lcm(2, n_);
  CycNum one = integer(1, n_);
  if (!(pow(static_cast<std::uint64_t>(bound)) == one)) return std::nullopt;
  std::int64_t ord = bound;
  for (auto q : nt::prime_divisors(static_cast<std::uint64_t>(bound))) {
    while (ord % static_cast<std::int64_t>(q) == 0 &&
           pow(static_cast<std::uint64_t>(ord / static_cast<std::int64_t>(q))) == one) {
      ord /= static_cast<std::int64_t>(q);
    }
  }
  return ord;
}

std::optional<std::int64_t> is_root_of_unity(const CycNum& c) { return c.root_of_unity_order(); }

std::string CycNum::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    std::int64_t v = c_[i];
    if (v == 0) continue;
    std::int64_t a = v < 0 ? -v : v;
    if (first) {
      if (v < 0) os << '-';
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    first = false;
    if (i == 0) {
      os << a;
      continue;
    }
    if (a != 1) os << a << '*';
    os << 'z';
    if (i > 1) os << '^' << i;
  }
  if (first) os << '0';
  std::string body = os.str();
  if (d_ != 1) body = "(" + body + ")/" + std::to_string(d_);
  if (n_ != 1) body += " @ " + std::to_string(n_);
  return body;
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  CycNum run() {
    skip();
    bool paren = false;
    if (peek() == '(') {
      paren = true;
      ++i_;
    }
    parse_sum();
    if (paren) expect(')');
    std::int64_t den = 1;
    skip();
    if (peek() == '/') {
      ++i_;
      skip();
      std::size_t at = i_;
      den = parse_uint();
      if (den == 0) throw ParseError(at, "zero denominator");
    }
    int n = 1;
    bool have_n = false;
    skip();
    if (peek() == '@') {
      have_n = true;
      ++i_;
      skip();
      std::size_t at = i_;
      std::int64_t v = parse_uint();
      if (v < 1 || v > kMaxConductor) throw ParseError(at, "conductor out of range");
      n = static_cast<int>(v);
    }
    skip();
    if (i_ != s_.size()) throw ParseError(i_, std::string("unexpected character '") + s_[i_] + "'");
    if (uses_z_ && !have_n) throw ParseError(z_pos_, "z used without '@ n'");
    std::vector<std::int64_t> poly;
    for (auto [e, c] : terms_) {
      std::int64_t r = e % n;
      if (poly.size() <= static_cast<std::size_t>(r)) poly.resize(static_cast<std::size_t>(r) + 1, 0);
      poly[static_cast<std::size_t>(r)] = add_checked(poly[static_cast<std::size_t>(r)], c);
    }
    if (poly.empty()) poly.push_back(0);
    return CycNum::from_poly(n, poly, den);
  }

 private:
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char c) {
    skip();
    if (peek() != c) throw ParseError(i_, std::string("expected '") + c + "'");
    ++i_;
  }

  std::int64_t parse_uint() {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError(i_, "expected a number");
    std::int64_t v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      std::size_t at = i_;
      try {
        v = add_checked(mul_checked(v, 10), s_[i_] - '0');
      } catch (const CycError&) {
        throw ParseError(at, "number too large");
      }
      ++i_;
    }
    return v;
  }

  void parse_sum() {
    skip();
    int sign = 1;
    if (peek() == '-') {
      sign = -1;
      ++i_;
    } else if (peek() == '+') {
      ++i_;
    }
    parse_term(sign);
    for (;;) {
      skip();
      char c = peek();
      if (c != '+' && c != '-') break;
      ++i_;
      parse_term(c == '-' ? -1 : 1);
    }
  }

  void parse_term(int sign) {
    skip();
    std::int64_t coeff = 1;
    std::int64_t e = 0;
    bool have_num = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coeff = parse_uint();
      have_num = true;
      skip();
      if (peek() == '*') {
        ++i_;
        skip();
        if (peek() != 'z') throw ParseError(i_, "expected 'z' after '*'");
      }
    }
    if (peek() == 'z') {
      if (!uses_z_) z_pos_ = i_;
      uses_z_ = true;
      ++i_;
      e = 1;
      skip();
      if (peek() == '^') {
        ++i_;
        skip();
        e = parse_uint();
      }
    } else if (!have_num) {
      if (i_ >= s_.size()) throw ParseError(i_, "unexpected end of input");
      throw ParseError(i_, std::string("unexpected character '") + s_[i_] + "'");
    }
    terms_.push_back({e, sign * coeff});
  }

  std::string_view s_;
  std::size_t i_ = 0;
  bool uses_z_ = false;
  std::size_t z_pos_ = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> terms_;
};

}  // namespace

CycNum parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------- reduction

ff::FqElem reduce_mod_p(const CycNum& c, ff::Field f) {
  const std::uint64_t p = f.p();
  if (static_cast<std::uint64_t>(c.denominator()) % p == 0) {
    throw CycError("denominator of " + c.to_string() + " is divisible by " + std::to_string(p));
  }
  const int n = c.conductor();
  if ((f.order() - 1) % static_cast<std::uint64_t>(n) != 0) {
    throw CycError(f.describe() + " does not contain the " + std::to_string(n) + "-th roots of unity");
  }
  ff::FqElem z = ff::nth_root_of_unity(f, static_cast<std::uint64_t>(n));
  ff::FqElem acc = f.zero();
  ff::FqElem pw = f.one();
  for (auto v : c.coeffs()) {
    acc += pw * f.from_int(v);
    pw *= z;
  }
  return acc / f.from_int(c.denominator());
}

}  // namespace eulerimg::cyclo
