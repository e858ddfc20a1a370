#include "eulerimg/model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include "eulerimg/numtheory.hpp"

namespace eulerimg::model {

using nlohmann::json;

// ---------------------------------------------------------------- Rational

Rational Rational::parse(const std::string& s) {
  Rational r;
  try {
    std::size_t pos = 0;
    r.num = std::stoll(s, &pos);
    if (pos < s.size()) {
      if (s[pos] != '/') throw SpecError("");
      std::size_t pos2 = 0;
      std::string rest = s.substr(pos + 1);
      r.den = std::stoll(rest, &pos2);
      if (pos2 != rest.size()) throw SpecError("");
    }
  } catch (const std::exception&) {
    throw SpecError("malformed rational '" + s + "'");
  }
  if (r.den == 0) throw SpecError("zero denominator in '" + s + "'");
  if (r.num == 0) throw SpecError("nu values must be nonzero: '" + s + "'");
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  std::int64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

// ---------------------------------------------------------------- GalGroup

std::size_t GalGroup::size() const {
  std::size_t n = 1;
  for (int o : orders) n *= static_cast<std::size_t>(o);
  return n;
}

std::vector<int> GalGroup::exponents(std::size_t idx) const {
  std::vector<int> e(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    e[i] = static_cast<int>(idx % static_cast<std::size_t>(orders[i]));
    idx /= static_cast<std::size_t>(orders[i]);
  }
  return e;
}

std::size_t GalGroup::index(const std::vector<int>& exps) const {
  if (exps.size() != orders.size()) throw SpecError("Gal(H/Q) element has wrong number of exponents");
  std::size_t idx = 0;
  for (std::size_t i = orders.size(); i-- > 0;) {
    int e = exps[i] % orders[i];
    if (e < 0) e += orders[i];
    idx = idx * static_cast<std::size_t>(orders[i]) + static_cast<std::size_t>(e);
  }
  return idx;
}

std::size_t GalGroup::mul(std::size_t a, std::size_t b) const {
  auto ea = exponents(a), eb = exponents(b);
  for (std::size_t i = 0; i < ea.size(); ++i) ea[i] += eb[i];
  return index(ea);
}

std::string GalGroup::label(std::size_t idx) const {
  auto e = exponents(idx);
  std::string s = "(";
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s + ")";
}

CycNum PairSpec::eps_f_at(std::size_t sigma) const {
  auto e = gal.exponents(sigma);
  CycNum v = CycNum::integer(1);
  for (std::size_t i = 0; i < e.size(); ++i) v = v * eps_f[i].pow(static_cast<std::uint64_t>(e[i]));
  return v;
}

CycNum PairSpec::chi_gal_at(std::size_t sigma) const {
  if (!g) throw SpecError("spec has no g data");
  auto e = gal.exponents(sigma);
  CycNum v = CycNum::integer(1);
  for (std::size_t i = 0; i < e.size(); ++i) v = v * g->gH_character_on_gal[i].pow(static_cast<std::uint64_t>(e[i]));
  return v;
}

// ---------------------------------------------------------------- JSON

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw SpecError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!ok) throw SpecError(where + ": unknown field '" + it.key() + "'");
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SpecError(where + ": missing field '" + key + "'");
  return j.at(key);
}

CycNum cyc(const json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return CycNum::integer(j.get<std::int64_t>());
    if (!j.is_string()) throw SpecError(where + ": expected a cyclotomic number");
    return cyclo::parse(j.get<std::string>());
  } catch (const cyclo::CycError& e) {
    throw SpecError(where + ": " + e.what());
  }
}

std::vector<CycNum> cyc_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw SpecError(where + ": expected a list");
  std::vector<CycNum> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(cyc(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> int_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw SpecError(where + ": expected a list of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw SpecError(where + ": expected integers");
    out.push_back(v.get<int>());
  }
  return out;
}

std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SpecError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

json cyc_json(const CycNum& c) { return c.to_string(); }

}  // namespace

PairSpec spec_from_json(const json& j) {
  check_keys(j, "spec", {"spec_version", "label_f", "label_g", "weight_f", "weight_g", "F", "gal_HQ", "eps_f", "nu", "g",
                         "N_f", "N_g", "disc_L", "cm_field_disc", "exceptional_Q", "H_discs", "pairing_epsilon",
                         "provenance"});
  PairSpec s;
  s.spec_version = static_cast<int>(integer(need(j, "spec_version", "spec"), "spec_version"));
  if (s.spec_version != 1) throw SpecError("unsupported spec_version " + std::to_string(s.spec_version));
  s.label_f = need(j, "label_f", "spec").get<std::string>();
  s.label_g = j.value("label_g", "");
  s.weight_f = static_cast<int>(integer(need(j, "weight_f", "spec"), "weight_f"));
  if (j.contains("weight_g") && integer(j["weight_g"], "weight_g") != 1) throw SpecError("weight_g must be 1");
  s.base_field = j.value("F", "Q");

  const json& gal = need(j, "gal_HQ", "spec");
  check_keys(gal, "gal_HQ", {"orders", "c", "sigma0"});
  s.gal.orders = int_list(need(gal, "orders", "gal_HQ"), "gal_HQ.orders");
  for (int o : s.gal.orders)
    if (o < 1) throw SpecError("gal_HQ.orders: orders must be positive");
  s.gal.c = int_list(need(gal, "c", "gal_HQ"), "gal_HQ.c");
  if (s.gal.c.size() != s.gal.orders.size()) throw SpecError("gal_HQ.c: wrong length");
  if (gal.contains("sigma0")) {
    s.gal.sigma0 = int_list(gal["sigma0"], "gal_HQ.sigma0");
    if (s.gal.sigma0->size() != s.gal.orders.size()) throw SpecError("gal_HQ.sigma0: wrong length");
  }

  s.eps_f = cyc_list(need(j, "eps_f", "spec"), "eps_f");
  if (s.eps_f.size() != s.gal.orders.size()) throw SpecError("eps_f: one value per Gal(H/Q) generator required");

  s.nu.assign(s.gal.size(), Rational{});
  std::vector<bool> seen(s.gal.size(), false);
  seen[0] = true;
  const json& nu = need(j, "nu", "spec");
  if (!nu.is_array()) throw SpecError("nu: expected a list");
  for (std::size_t i = 0; i < nu.size(); ++i) {
    std::string where = "nu[" + std::to_string(i) + "]";
    check_keys(nu[i], where, {"sigma", "value"});
    std::size_t idx = s.gal.index(int_list(need(nu[i], "sigma", where), where + ".sigma"));
    const json& v = need(nu[i], "value", where);
    s.nu[idx] = Rational::parse(v.is_string() ? v.get<std::string>() : v.dump());
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw SpecError("nu: missing value for " + s.gal.label(i));

  if (j.contains("g")) {
    const json& g = j["g"];
    check_keys(g, "g", {"generators", "gH_character", "gH_character_on_gal", "eps_g_on_H_image"});
    GData gd;
    const json& gens = need(g, "generators", "g");
    if (!gens.is_array() || gens.empty()) throw SpecError("g.generators: expected a nonempty list");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      std::string where = "g.generators[" + std::to_string(i) + "]";
      auto entries = cyc_list(gens[i], where);
      if (entries.size() != 4) throw SpecError(where + ": expected 4 entries (row-major)");
      gd.generators.push_back({entries[0], entries[1], entries[2], entries[3]});
    }
    gd.gH_character = cyc_list(need(g, "gH_character", "g"), "g.gH_character");
    if (gd.gH_character.size() != gd.generators.size()) throw SpecError("g.gH_character: one value per generator");
    gd.gH_character_on_gal = cyc_list(need(g, "gH_character_on_gal", "g"), "g.gH_character_on_gal");
    if (gd.gH_character_on_gal.size() != s.gal.orders.size())
      throw SpecError("g.gH_character_on_gal: one value per Gal(H/Q) generator");
    if (g.contains("eps_g_on_H_image")) gd.eps_g_on_H_image = cyc_list(g["eps_g_on_H_image"], "g.eps_g_on_H_image");
    s.g = std::move(gd);
  }

  s.N_f = integer(need(j, "N_f", "spec"), "N_f");
  s.N_g = j.contains("N_g") ? integer(j["N_g"], "N_g") : 1;
  s.disc_L = j.contains("disc_L") ? integer(j["disc_L"], "disc_L") : 1;
  if (j.contains("cm_field_disc")) s.cm_field_disc = integer(j["cm_field_disc"], "cm_field_disc");
  if (j.contains("exceptional_Q")) s.exceptional_Q = integer(j["exceptional_Q"], "exceptional_Q");
  if (j.contains("H_discs")) {
    for (const auto& v : j["H_discs"]) s.H_discs.push_back(integer(v, "H_discs"));
  }
  if (j.contains("pairing_epsilon")) {
    const json& pe = j["pairing_epsilon"];
    check_keys(pe, "pairing_epsilon", {"values", "field_disc"});
    PairingEpsilon e;
    e.values = int_list(need(pe, "values", "pairing_epsilon"), "pairing_epsilon.values");
    if (e.values.size() != s.gal.orders.size()) throw SpecError("pairing_epsilon.values: one value per generator");
    for (int v : e.values)
      if (v != 1 && v != -1) throw SpecError("pairing_epsilon.values: entries must be +1 or -1");
    e.field_disc = integer(need(pe, "field_disc", "pairing_epsilon"), "pairing_epsilon.field_disc");
    s.pairing_epsilon = e;
  }
  if (j.contains("provenance")) s.provenance = j["provenance"];
  return s;
}

json spec_to_json(const PairSpec& s) {
  json j;
  j["spec_version"] = s.spec_version;
  j["label_f"] = s.label_f;
  if (!s.label_g.empty()) j["label_g"] = s.label_g;
  j["weight_f"] = s.weight_f;
  j["F"] = s.base_field;
  json gal{{"orders", s.gal.orders}, {"c", s.gal.c}};
  if (s.gal.sigma0) gal["sigma0"] = *s.gal.sigma0;
  j["gal_HQ"] = gal;
  j["eps_f"] = json::array();
  for (const auto& v : s.eps_f) j["eps_f"].push_back(cyc_json(v));
  j["nu"] = json::array();
  for (std::size_t i = 1; i < s.nu.size(); ++i)
    j["nu"].push_back({{"sigma", s.gal.exponents(i)}, {"value", s.nu[i].to_string()}});
  if (s.g) {
    json g;
    g["generators"] = json::array();
    for (const auto& m : s.g->generators) {
      json row = json::array();
      for (const auto& e : m) row.push_back(cyc_json(e));
      g["generators"].push_back(row);
    }
    g["gH_character"] = json::array();
    for (const auto& v : s.g->gH_character) g["gH_character"].push_back(cyc_json(v));
    g["gH_character_on_gal"] = json::array();
    for (const auto& v : s.g->gH_character_on_gal) g["gH_character_on_gal"].push_back(cyc_json(v));
    if (s.g->eps_g_on_H_image) {
      g["eps_g_on_H_image"] = json::array();
      for (const auto& v : *s.g->eps_g_on_H_image) g["eps_g_on_H_image"].push_back(cyc_json(v));
    }
    j["g"] = g;
  }
  j["N_f"] = s.N_f;
  j["N_g"] = s.N_g;
  j["disc_L"] = s.disc_L;
  if (s.cm_field_disc) j["cm_field_disc"] = *s.cm_field_disc;
  if (s.exceptional_Q) j["exceptional_Q"] = *s.exceptional_Q;
  if (!s.H_discs.empty()) j["H_discs"] = s.H_discs;
  if (s.pairing_epsilon) j["pairing_epsilon"] = {{"values", s.pairing_epsilon->values}, {"field_disc", s.pairing_epsilon->field_disc}};
  if (!s.provenance.is_null()) j["provenance"] = s.provenance;
  return j;
}

PairSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path + ": " + e.what());
  }
  try {
    return spec_from_json(j);
  } catch (const json::exception& e) {
    throw SpecError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------- good primes

GoodPrime good_prime(const PairSpec& s, std::uint64_t p) {
  GoodPrime r;
  if (!nt::is_prime(p)) {
    r.reasons.push_back("p is not prime");
    return r;
  }
  if (30 % p == 0) r.reasons.push_back("p | 30");
  auto divides = [p](std::int64_t n) { return n != 0 && static_cast<std::uint64_t>(n < 0 ? -n : n) % p == 0; };
  if (divides(s.N_f)) r.reasons.push_back("p | N_f");
  if (divides(s.N_g)) r.reasons.push_back("p | N_g");
  if (divides(s.disc_L)) r.reasons.push_back("p | disc_L");
  r.good = r.reasons.empty();
  return r;
}

// ---------------------------------------------------------------- reduction

Mat2 reduce_matrix(const std::array<CycNum, 4>& e, Field f) {
  return Mat2::of(cyclo::reduce_mod_p(e[0], f), cyclo::reduce_mod_p(e[1], f), cyclo::reduce_mod_p(e[2], f),
                  cyclo::reduce_mod_p(e[3], f));
}

FqElem reduce_rational(const Rational& r, Field f) {
  std::uint64_t p = f.p();
  auto div = [p](std::int64_t n) { return static_cast<std::uint64_t>(n < 0 ? -n : n) % p == 0; };
  if (div(r.num) || div(r.den)) throw SpecError("p = " + std::to_string(p) + " divides " + r.to_string());
  return f.from_int(r.num) / f.from_int(r.den);
}

namespace {

std::int64_t conductor_lcm(const PairSpec& s) {
  std::int64_t l = 2;
  auto add = [&](const CycNum& c) { l = nt::lcm(l, c.conductor()); };
  for (const auto& v : s.eps_f) add(v);
  if (s.g) {
    for (const auto& m : s.g->generators)
      for (const auto& e : m) add(e);
    for (const auto& v : s.g->gH_character) add(v);
    for (const auto& v : s.g->gH_character_on_gal) add(v);
    if (s.g->eps_g_on_H_image)
      for (const auto& v : *s.g->eps_g_on_H_image) add(v);
  }
  return l;
}

unsigned degree_for(std::uint64_t p, std::int64_t modulus) {
  if (static_cast<std::uint64_t>(modulus) % p == 0) throw SpecError("p divides a required root-of-unity order");
  auto k = nt::mult_order(p % static_cast<std::uint64_t>(modulus), static_cast<std::uint64_t>(modulus));
  if (k > ff::kMaxDegree) throw SpecError("required extension degree " + std::to_string(k) + " exceeds the cap");
  return static_cast<unsigned>(k);
}

std::int64_t group_exponent(const grp::MatrixGroup& g) {
  std::int64_t e = 1;
  for (const auto& x : g.elements()) e = nt::lcm(e, static_cast<std::int64_t>(grp::element_order(x)));
  return e;
}

std::vector<Mat2> reduced_generators(const PairSpec& s, Field f) {
  std::vector<Mat2> gens;
  for (const auto& m : s.g->generators) gens.push_back(reduce_matrix(m, f));
  return gens;
}

}  // namespace

unsigned required_degree(const PairSpec& s, std::uint64_t p, std::uint64_t extra_conductor) {
  std::int64_t l = nt::lcm(conductor_lcm(s), static_cast<std::int64_t>(extra_conductor));
  unsigned k = degree_for(p, l);
  if (s.g) {
    Field f0 = ff::make_field(p, k);
    auto g0 = grp::MatrixGroup::closure(reduced_generators(s, f0));
    l = nt::lcm(l, group_exponent(g0));
    k = degree_for(p, l);
  }
  Field f1 = ff::make_field(p, k);
  for (std::size_t i = 0; i < s.gal.size(); ++i) {
    FqElem nd = reduce_rational(s.nu[i], f1) * cyclo::reduce_mod_p(s.eps_f_at(i), f1);
    if (!ff::sqrt(nd)) return 2 * k;
  }
  return k;
}

GSide build_gside(const PairSpec& s, Field f) {
  if (!s.g) throw SpecError("spec has no g data");
  auto G = grp::MatrixGroup::closure(reduced_generators(s, f));
  std::vector<FqElem> gen_vals;
  for (const auto& v : s.g->gH_character) gen_vals.push_back(cyclo::reduce_mod_p(v, f));
  std::vector<FqElem> chi;
  try {
    chi = grp::character_from_generators(G, gen_vals);
  } catch (const grp::GroupError& e) {
    throw SpecError(std::string("gH_character: ") + e.what());
  }
  auto GH = grp::subgroup_from_character(G, chi);
  return GSide{std::move(G), std::move(GH), std::move(chi)};
}

Mat2 Block::scaling() const { return Mat2::diag(alpha, d / alpha); }

ImageModel build_image(const PairSpec& s, std::uint64_t p, const BuildOptions& opts) {
  if (s.base_field != "Q") throw SpecError("unsupported: base field F = " + s.base_field + " (only F = Q is modeled)");
  if (!s.g) throw SpecError("spec has no g data; cannot build the image model");
  if (opts.require_good) {
    auto gp = good_prime(s, p);
    if (!gp.good) {
      std::string why;
      for (const auto& r : gp.reasons) why += (why.empty() ? "" : ", ") + r;
      throw SpecError("p = " + std::to_string(p) + " is not a good prime: " + why);
    }
  }
  ImageModel m;
  m.p = p;
  m.gal = s.gal;
  m.base = ff::make_field(p, 1);
  m.field = ff::make_field(p, required_degree(s, p));
  Field f = m.field;
  GSide gs = build_gside(s, f);

  for (std::size_t i = 0; i < s.gal.size(); ++i) {
    Block b;
    b.sigma = i;
    b.d = cyclo::reduce_mod_p(s.eps_f_at(i), f);
    b.nu = reduce_rational(s.nu[i], f);
    auto a = ff::sqrt(b.nu * b.d);
    if (!a) throw SpecError("no square root of nu * eps_f in " + f.describe());
    b.alpha = opts.negate_alpha ? -*a : *a;
    b.chi = cyclo::reduce_mod_p(s.chi_gal_at(i), f);
    for (std::size_t k = 0; k < gs.G.order(); ++k)
      if (gs.chi[k] == b.chi) b.g_part.push_back(gs.G.elements()[k]);
    if (b.g_part.empty()) throw SpecError("empty g-part for sigma = " + s.gal.label(i) + ": chi_gal value not attained");
    m.blocks.push_back(std::move(b));
  }
  m.gside = std::move(gs);
  return m;
}

std::uint64_t validation_prime(const PairSpec& s) {
  std::int64_t l = conductor_lcm(s);
  std::set<std::uint64_t> bad;
  auto add_bad = [&](std::int64_t n) {
    if (n == 0) return;
    for (auto q : nt::prime_divisors(static_cast<std::uint64_t>(n < 0 ? -n : n))) bad.insert(q);
  };
  for (const auto& r : s.nu) {
    add_bad(r.num);
    add_bad(r.den);
  }
  if (s.g)
    for (const auto& m : s.g->generators)
      for (const auto& e : m) add_bad(e.denominator());
  for (std::uint64_t p = static_cast<std::uint64_t>(l) + 1;; p += static_cast<std::uint64_t>(l)) {
    if (p <= 5 || !nt::is_prime(p) || bad.count(p) || !good_prime(s, p).good) continue;
    if (s.g) {
      Field f = ff::make_field(p, required_degree(s, p));
      auto G = grp::MatrixGroup::closure(reduced_generators(s, f));
      if (G.order() % p == 0) continue;
    }
    return p;
  }
}

// ---------------------------------------------------------------- validation

std::vector<std::string> validate_spec(const PairSpec& s) {
  std::vector<std::string> v;
  if (s.base_field != "Q") {
    v.push_back("unsupported: base field F = " + s.base_field + " (only F = Q is modeled)");
    return v;
  }
  if (s.weight_f < 2) v.push_back("weight: weight_f must be at least 2");

  // eps_f is a character of Gal(H/Q) with finite-order values.
  for (std::size_t i = 0; i < s.eps_f.size(); ++i) {
    if (!cyclo::is_root_of_unity(s.eps_f[i]) ||
        !(s.eps_f[i].pow(static_cast<std::uint64_t>(s.gal.orders[i])) == CycNum::integer(1))) {
      v.push_back("eps_f: value on generator " + std::to_string(i) + " is not a root of unity of the generator's order");
    }
  }
  CycNum ec = s.eps_f_at(s.gal.c_index());
  if (!(ec == CycNum::integer(s.weight_f % 2 == 0 ? 1 : -1))) {
    v.push_back("parity: eps_f(c) = " + ec.to_string() + " but (-1)^k = " + (s.weight_f % 2 == 0 ? "1" : "-1"));
  }

  // nu is multiplicative modulo rational squares, with nu(id) a square.
  auto sq_class = [](const Rational& r) { return nt::squarefree_part(r.num) * nt::squarefree_part(r.den); };
  auto normalize = [](std::int64_t x) { return nt::squarefree_part(x); };
  if (normalize(sq_class(s.nu[0])) != 1) v.push_back("nu multiplicativity: nu(id) = " + s.nu[0].to_string() + " is not a square");
  for (std::size_t a = 0; a < s.gal.size(); ++a)
    for (std::size_t b = a; b < s.gal.size(); ++b) {
      std::size_t ab = s.gal.mul(a, b);
      std::int64_t t = normalize(sq_class(s.nu[a]));
      t = normalize(t * normalize(sq_class(s.nu[b])));
      t = normalize(t * normalize(sq_class(s.nu[ab])));
      if (t != 1) {
        v.push_back("nu multiplicativity: nu(" + s.gal.label(ab) + ") / (nu(" + s.gal.label(a) + ") nu(" +
                    s.gal.label(b) + ")) is not a rational square");
      }
    }

  if (s.pairing_epsilon && s.pairing_epsilon->values.size() == s.gal.orders.size()) {
    for (std::size_t i = 0; i < s.gal.orders.size(); ++i)
      if (s.pairing_epsilon->values[i] == -1 && s.gal.orders[i] % 2 != 0)
        v.push_back("pairing_epsilon: value -1 on a generator of odd order");
  }

  if (!s.g) return v;

  // g-side checks run at an automatically chosen validation prime.
  for (std::size_t i = 0; i < s.g->generators.size(); ++i) {
    const auto& m = s.g->generators[i];
    CycNum det = m[0] * m[3] - m[1] * m[2];
    if (!cyclo::is_root_of_unity(det)) v.push_back("det: generator " + std::to_string(i) + " has determinant " + det.to_string() + ", not a root of unity");
  }
  for (std::size_t i = 0; i < s.g->gH_character_on_gal.size(); ++i) {
    const auto& c = s.g->gH_character_on_gal[i];
    if (!(c.pow(static_cast<std::uint64_t>(s.gal.orders[i])) == CycNum::integer(1)))
      v.push_back("chi_gal: value on generator " + std::to_string(i) + " has order not dividing the generator's order");
  }
  if (!v.empty()) return v;

  std::uint64_t p;
  Field f;
  GSide gs;
  try {
    p = validation_prime(s);
    f = ff::make_field(p, required_degree(s, p));
    gs = build_gside(s, f);
  } catch (const std::exception& e) {
    v.push_back(std::string("g-group: ") + e.what());
    return v;
  }

  std::set<std::uint64_t> chi_image, gal_image;
  for (const auto& x : gs.chi) chi_image.insert(x.encode());
  for (std::size_t i = 0; i < s.gal.size(); ++i) gal_image.insert(cyclo::reduce_mod_p(s.chi_gal_at(i), f).encode());
  if (chi_image != gal_image) v.push_back("chi_gal: image of chi_gal differs from chi(rho_g(G_Q))");

  bool nontrivial = false;
  for (std::size_t i = 0; i < s.gal.size() && !nontrivial; ++i) {
    FqElem d = cyclo::reduce_mod_p(s.eps_f_at(i), f);
    FqElem c = cyclo::reduce_mod_p(s.chi_gal_at(i), f);
    for (std::size_t k = 0; k < gs.G.order(); ++k)
      if (gs.chi[k] == c && !(d * gs.G.elements()[k].det()).is_one()) {
        nontrivial = true;
        break;
      }
  }
  if (!nontrivial) v.push_back("eps_f eps_g: the product character is trivial");

  if (s.g->eps_g_on_H_image) {
    std::set<std::uint64_t> declared, actual;
    for (const auto& c : *s.g->eps_g_on_H_image) declared.insert(cyclo::reduce_mod_p(c, f).encode());
    for (const auto& x : gs.GH.elements()) actual.insert(x.det().encode());
    if (declared != actual) v.push_back("eps_g_on_H_image: declared image differs from det(rho_g(G_H))");
  }
  if (s.exceptional_Q && static_cast<std::size_t>(*s.exceptional_Q) != gs.G.proj_order()) {
    v.push_back("exceptional_Q: declared " + std::to_string(*s.exceptional_Q) + " but |rho'_g(G_Q)| = " +
                std::to_string(gs.G.proj_order()));
  }
  return v;
}

bool block_product_check(const ImageModel& m) {
  if (m.blocks.size() != m.gal.size()) throw SpecError("block_product_check: model has no Gal(H/Q) structure");
  for (const auto& a : m.blocks)
    for (const auto& b : m.blocks) {
      const Block& c = m.blocks[m.gal.mul(a.sigma, b.sigma)];
      if (!(c.d == a.d * b.d)) return false;
      FqElem r = a.alpha * b.alpha / c.alpha;
      if (!ff::in_prime_subfield(r)) return false;
      std::unordered_map<Mat2, bool, mat::Mat2Hash> target;
      for (const auto& n : c.g_part) target.emplace(n, true);
      for (const auto& x : a.g_part)
        for (const auto& y : b.g_part)
          if (!target.count(x * y)) return false;
    }
  return true;
}

}  // namespace eulerimg::model
