#include "eulerimg/checks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "eulerimg/numtheory.hpp"
#include "eulerimg/pairing.hpp"

namespace eulerimg::checks {

using ff::Field;
using ff::FqElem;
using mat::Mat4;
using model::Block;
using model::FPartMode;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kFails:
      return "fails";
    case Verdict::kNotDecided:
      return "not-decided";
  }
  return "?";
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::kSufficient:
      return "sufficient";
    case Criterion::kExceptional:
      return "exceptional";
    case Criterion::kInapplicable:
      return "inapplicable";
  }
  return "?";
}

// ---------------------------------------------------------------- SL2 order

std::uint64_t sl2_size(std::uint64_t p) { return p * (p - 1) * (p + 1); }

Mat2 sl2_element(Field f, std::uint64_t index) {
  const std::uint64_t p = f.p();
  if (index >= sl2_size(p)) throw std::out_of_range("sl2_element: index out of range");
  auto inv = [p](std::uint64_t x) { return nt::powmod(x, p - 2, p); };
  auto el = [&](std::uint64_t x) { return f.from_int(static_cast<std::int64_t>(x)); };
  const std::uint64_t borel = (p - 1) * p;
  if (index < borel) {
    std::uint64_t a = index / p + 1, b = index % p;
    return Mat2::of(el(a), el(b), f.zero(), el(inv(a)));
  }
  index -= borel;
  std::uint64_t c = index / (p * p) + 1;
  std::uint64_t r = index % (p * p);
  std::uint64_t a = r / p, d = r % p;
  std::uint64_t b = nt::mulmod((nt::mulmod(a, d, p) + p - 1) % p, inv(c), p);
  return Mat2::of(el(a), el(b), el(c), el(d));
}

std::uint64_t f_part_size(const ImageModel& m) {
  switch (m.mode) {
    case FPartMode::kFullSL2:
      return sl2_size(m.p);
    case FPartMode::kScalarsOnly:
      return 2;
    case FPartMode::kTrivial:
      return 1;
  }
  return 0;
}

namespace {

Mat2 f_part_core(const ImageModel& m, std::uint64_t index) {
  switch (m.mode) {
    case FPartMode::kFullSL2:
      return sl2_element(m.field, index);
    case FPartMode::kScalarsOnly:
      return index == 0 ? Mat2::identity(m.field) : Mat2::scalar(-m.field.one());
    case FPartMode::kTrivial:
      break;
  }
  return Mat2::identity(m.field);
}

bool in_f_core(const ImageModel& m, const Mat2& s) {
  switch (m.mode) {
    case FPartMode::kFullSL2:
      return s.det().is_one() && std::all_of(s.e.begin(), s.e.end(), [](const FqElem& x) { return ff::in_prime_subfield(x); });
    case FPartMode::kScalarsOnly:
      return s.is_identity() || s == Mat2::scalar(-m.field.one());
    case FPartMode::kTrivial:
      return s.is_identity();
  }
  return false;
}

Mat4 tensor_minus_identity(const Mat2& a, const Mat2& b) {
  Mat4 k = mat::kron(a, b);
  FqElem one = a.field().one();
  for (int i = 0; i < 4; ++i) k.at(i, i) -= one;
  return k;
}

bool trivial_block(const Block& b) {
  return std::all_of(b.g_part.begin(), b.g_part.end(), [&](const Mat2& n) { return (b.d * n.det()).is_one(); });
}

}  // namespace

Mat2 f_part_element(const ImageModel& m, std::uint64_t index) {
  if (index >= f_part_size(m)) throw std::out_of_range("f_part_element: index out of range");
  return f_part_core(m, index);
}

// ---------------------------------------------------------------- (N)

Verdict check_N(const ImageModel& m) {
  // -I4 = M (x) N forces M and N scalar: N = mu I and M = -mu^-1 I.
  for (const auto& b : m.blocks) {
    if (b.g_part.empty()) throw CheckError("check_N: empty g-part");
    Mat2 delta_inv = b.scaling().inverse();
    for (const auto& n : b.g_part) {
      if (!n.is_scalar()) continue;
      Mat2 s = delta_inv.scaled(-n(0, 0).inverse());
      if (in_f_core(m, s)) return Verdict::kHolds;
    }
  }
  return Verdict::kFails;
}

// ---------------------------------------------------------------- Burnside

namespace {

class Span {
 public:
  explicit Span(Field f) : f_(f) {}

  // Adds v if independent; returns whether it was added.
  bool add(const Mat4& m) {
    std::array<FqElem, 16> v = m.e;
    for (const auto& [col, row] : rows_) {
      const FqElem& x = v[col];
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < 16; ++j) v[j] -= x * row[j];
    }
    auto it = std::find_if(v.begin(), v.end(), [](const FqElem& x) { return !x.is_zero(); });
    if (it == v.end()) return false;
    std::size_t col = static_cast<std::size_t>(it - v.begin());
    FqElem inv = v[col].inverse();
    for (auto& x : v) x *= inv;
    for (auto& [c, row] : rows_) {
      const FqElem y = row[col];
      if (y.is_zero()) continue;
      for (std::size_t j = 0; j < 16; ++j) row[j] -= y * v[j];
    }
    rows_.emplace_back(col, v);
    return true;
  }

  std::size_t dim() const { return rows_.size(); }

 private:
  Field f_;
  std::vector<std::pair<std::size_t, std::array<FqElem, 16>>> rows_;
};

}  // namespace

bool check_irreducible(const ImageModel& m) {
  Field f = m.field;
  Mat2 id = Mat2::identity(f);
  std::vector<Mat4> gens;
  if (m.mode == FPartMode::kFullSL2) {
    Mat2 u = Mat2::of_ints(f, 1, 1, 0, 1);
    gens.push_back(mat::kron(u, id));
    gens.push_back(mat::kron(u.transpose(), id));
  } else if (m.mode == FPartMode::kScalarsOnly) {
    gens.push_back(mat::kron(Mat2::scalar(-f.one()), id));
  }
  if (m.gside) {
    for (const auto& h : m.gside->GH.generators()) gens.push_back(mat::kron(id, h));
  } else if (!m.blocks.empty()) {
    for (const auto& h : m.blocks.front().g_part) gens.push_back(mat::kron(id, h));
  }
  for (std::size_t i = 1; i < m.blocks.size(); ++i)
    gens.push_back(mat::kron(m.blocks[i].scaling(), m.blocks[i].g_part.front()));

  Span span(f);
  std::vector<Mat4> basis{Mat4::identity(f)};
  span.add(basis.front());
  for (std::size_t i = 0; i < basis.size() && span.dim() < 16; ++i)
    for (const auto& g : gens) {
      Mat4 x = basis[i] * g;
      if (span.add(x)) basis.push_back(x);
    }
  return span.dim() == 16;
}

bool rI_exception(const PairSpec& s, std::uint64_t p) {
  if (!s.exceptional_Q) throw model::SpecError("rI_exception: exceptional_Q not declared");
  std::int64_t q = *s.exceptional_Q;
  if (q <= 0 || q % 2 != 0) throw model::SpecError("rI_exception: Q = " + std::to_string(q) + " is not even");
  auto h = static_cast<std::uint64_t>(q / 2);
  while (h % p == 0) h /= p;
  return h == 1;
}

// ---------------------------------------------------------------- (sE) brute

bool within_budget(const ImageModel& m, std::uint64_t budget) {
  std::size_t g = 0;
  for (const auto& b : m.blocks) g = std::max(g, b.g_part.size());
  std::uint64_t f = f_part_size(m);
  return g == 0 || f <= budget / g;
}

namespace {

struct Hit {
  std::uint64_t s_index = std::numeric_limits<std::uint64_t>::max();
  std::size_t n_index = 0;
};

Hit search_block(const ImageModel& m, const Block& b, unsigned threads) {
  const std::uint64_t total = f_part_size(m);
  const Mat2 delta = b.scaling();
  constexpr std::uint64_t kChunk = 512;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  Hit hit;
  std::mutex mu;

  auto worker = [&] {
    for (;;) {
      std::uint64_t start = next.fetch_add(kChunk);
      if (start >= total || start >= best.load()) return;
      std::uint64_t end = std::min(total, start + kChunk);
      for (std::uint64_t i = start; i < end && i < best.load(); ++i) {
        Mat2 mm = delta * f_part_core(m, i);
        for (std::size_t j = 0; j < b.g_part.size(); ++j) {
          if (mat::rank(tensor_minus_identity(mm, b.g_part[j])) != 3) continue;
          std::lock_guard<std::mutex> lock(mu);
          if (i < hit.s_index) {
            hit = Hit{i, j};
            best.store(i);
          }
          return;
        }
      }
    }
  };

  unsigned n = std::max(1u, threads);
  if (n == 1 || total < 2 * kChunk) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return hit;
}

}  // namespace

BruteResult check_sE_brute(const ImageModel& m, const BruteOptions& opts) {
  if (!within_budget(m, opts.budget)) {
    throw BudgetExceeded("brute enumeration exceeds the budget of " + std::to_string(opts.budget) + " pairs at p = " +
                         std::to_string(m.p));
  }
  BruteResult r;
  for (std::size_t bi = 0; bi < m.blocks.size(); ++bi) {
    const Block& b = m.blocks[bi];
    if (!opts.force_all_blocks && trivial_block(b)) {
      r.skipped_blocks.push_back(bi);
      continue;
    }
    Hit h = search_block(m, b, opts.threads);
    if (h.s_index != std::numeric_limits<std::uint64_t>::max()) {
      r.pairs_examined += h.s_index * b.g_part.size() + h.n_index + 1;
      Mat2 mm = b.scaling() * f_part_core(m, h.s_index);
      const Mat2& n = b.g_part[h.n_index];
      if (mat::rank_by_minors(tensor_minus_identity(mm, n)) != 3) throw CheckError("brute witness failed re-verification");
      r.witness = Witness{b.sigma, mm, n, 1};
      return r;
    }
    r.pairs_examined += f_part_size(m) * b.g_part.size();
  }
  return r;
}

// ---------------------------------------------------------------- (wE) symbolic

namespace {

// Evaluates the criterion for one eigenvalue u of N; d and alpha are given
// in the field of u.
bool criterion_holds(const mat::EigenData& ed, const FqElem& u, const FqElem& d, const FqElem& alpha) {
  if (ed.eigenvalues.size() == 1 && ed.semisimple) return false;  // scalar N
  if (!ff::in_prime_subfield((u.inverse() + d * u) / alpha)) return false;
  if (ed.eigenvalues.size() == 2) {
    const FqElem& v = ed.eigenvalues[0].first == u ? ed.eigenvalues[1].first : ed.eigenvalues[0].first;
    return !(d * u * v).is_one();
  }
  return !(d * u * u).is_one();
}

}  // namespace

std::optional<WitnessDescriptor> check_wE_symbolic(const ImageModel& m) {
  if (m.mode != FPartMode::kFullSL2) throw std::invalid_argument("check_wE_symbolic: requires the full SL2 f-part");
  std::optional<ff::Embedding> ext;
  for (std::size_t bi = 0; bi < m.blocks.size(); ++bi) {
    const Block& b = m.blocks[bi];
    for (const auto& n : b.g_part) {
      if (n.is_scalar()) continue;
      auto ed = mat::eigen2(n);
      FqElem d = b.d, alpha = b.alpha;
      if (!(ed.field == m.field)) {
        if (!ext || !(ext->target() == ed.field)) ext.emplace(m.field, ed.field);
        d = (*ext)(d);
        alpha = (*ext)(alpha);
      }
      for (const auto& [u, mult] : ed.eigenvalues)
        if (criterion_holds(ed, u, d, alpha)) return WitnessDescriptor{bi, n, u};
    }
  }
  return std::nullopt;
}

Witness construct_witness(const ImageModel& m, const WitnessDescriptor& w) {
  if (w.block >= m.blocks.size()) throw CheckError("construct_witness: no such block");
  const Block& b = m.blocks[w.block];
  if (!(w.N.field() == m.field)) throw CheckError("construct_witness: N is not over the model field");
  auto ed = mat::eigen2(w.N);
  if (!(ed.field == w.u.field())) throw CheckError("construct_witness: u is not an eigenvalue of N");
  bool eigen = std::any_of(ed.eigenvalues.begin(), ed.eigenvalues.end(), [&](const auto& e) { return e.first == w.u; });
  if (!eigen) throw CheckError("construct_witness: u is not an eigenvalue of N");
  ff::Embedding emb(m.field, ed.field);
  FqElem d = emb(b.d), alpha = emb(b.alpha);
  if (!criterion_holds(ed, w.u, d, alpha)) throw CheckError("construct_witness: descriptor violates the criterion");

  // S = [[c, -1], [1, 0]] has trace c, so Delta * S has trace alpha * c.
  FqElem c_ext = (w.u.inverse() + d * w.u) / alpha;
  FqElem c = m.field.from_int(static_cast<std::int64_t>(c_ext.coeff(0)));
  Mat2 s = Mat2::of(c, -m.field.one(), m.field.one(), m.field.zero());
  Mat2 f_part = b.scaling() * s;
  int r = mat::rank_by_minors(tensor_minus_identity(f_part, w.N));
  if (r != 3) throw CheckError("construct_witness: rank " + std::to_string(r) + " instead of 3 (criterion bug)");
  return Witness{b.sigma, f_part, w.N, 4 - r};
}

// ---------------------------------------------------------------- criteria

namespace {

std::set<std::uint64_t> det_image(const grp::MatrixGroup& g) {
  std::set<std::uint64_t> out;
  for (const auto& x : g.elements()) out.insert(x.det().encode());
  return out;
}

model::GSide gside_at(const PairSpec& s, std::uint64_t p) {
  Field f = ff::make_field(p, model::required_degree(s, p));
  return model::build_gside(s, f);
}

}  // namespace

CriterionResult criterion_special2(const PairSpec& s, std::uint64_t p) {
  auto gs = gside_at(s, p);
  Field f = gs.G.field();
  auto dets = det_image(gs.GH);
  if (!dets.count((-f.one()).encode())) return {Criterion::kInapplicable, "-1 not in eps_g(G_H)"};
  if (s.cm_field_disc && std::find(s.H_discs.begin(), s.H_discs.end(), *s.cm_field_disc) != s.H_discs.end())
    return {Criterion::kInapplicable, "CM field of g lies in H"};

  bool proper = gs.GH.order() < gs.G.order();
  bool minus_one_square = false;
  for (auto e : dets) {
    FqElem x = f.element_at(e);
    if ((x * x) == -f.one()) minus_one_square = true;
  }
  grp::ProjType t = grp::projective_type(gs.G);
  bool dihedral = t.kind == grp::ProjKind::kDihedral && t.n > 2;
  bool even_clause = t.n % 2 != 0 || (t.n % 4 != 0 && gs.GH.proj_order() != gs.G.proj_order());
  if (proper && minus_one_square && dihedral && even_clause)
    return {Criterion::kExceptional, "dihedral exceptional configuration, " + t.to_string()};
  return {Criterion::kSufficient, "projective image " + t.to_string()};
}

CriterionResult criterion_specialq(const PairSpec& s, std::uint64_t p) {
  auto gs = gside_at(s, p);
  const std::size_t det_order = det_image(gs.GH).size();
  std::vector<std::uint64_t> qs;
  for (auto q : nt::prime_divisors(gs.G.proj_order()))
    if (q != 2 && q != p && det_order % q == 0) qs.push_back(q);
  if (qs.empty()) return {Criterion::kInapplicable, "no odd prime q with an order-q element in eps_g(G_H)"};
  if (std::any_of(qs.begin(), qs.end(), [](std::uint64_t q) { return q != 3; }))
    return {Criterion::kSufficient, "odd prime q >= 5 available"};

  bool a4 = grp::projective_type(gs.G).kind == grp::ProjKind::kTetraA4;
  bool first = a4 && s.gal.size() % 3 == 0 && gs.GH.proj_order() == 4;
  bool second = false;
  if (a4 && gs.GH.proj_order() == 12 && det_order % 9 == 0) {
    std::size_t sl = 0, sl_scalars = 0;
    for (const auto& x : gs.GH.elements())
      if (x.det().is_one()) {
        ++sl;
        if (x.is_scalar()) ++sl_scalars;
      }
    second = sl / sl_scalars != gs.GH.proj_order();
  }
  if (first || second) return {Criterion::kExceptional, "A4 exceptional configuration with q = 3"};
  return {Criterion::kSufficient, "q = 3"};
}

// ---------------------------------------------------------------- classify

namespace {

Verdict all_of(std::initializer_list<Verdict> vs) {
  bool undecided = false;
  for (auto v : vs) {
    if (v == Verdict::kFails) return Verdict::kFails;
    if (v == Verdict::kNotDecided) undecided = true;
  }
  return undecided ? Verdict::kNotDecided : Verdict::kHolds;
}

Verdict of(bool b) { return b ? Verdict::kHolds : Verdict::kFails; }

nlohmann::json condition_json(const ConditionResult& c) {
  nlohmann::json j{{"verdict", to_string(c.verdict)}, {"methods", c.methods}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

void append_note(std::string& note, const std::string& s) { note += (note.empty() ? "" : "; ") + s; }

}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["label"] = label;
  j["p"] = p;
  j["field"] = field;
  j["conditions"] = {{"N", condition_json(N)},
                     {"gI", condition_json(gI)},
                     {"rI", condition_json(rI)},
                     {"wE", condition_json(wE)},
                     {"sE", condition_json(sE)}};
  j["euler_type"] = to_string(euler_type);
  j["euler_adapted"] = to_string(euler_adapted);
  if (witness) {
    j["witness"] = {{"sigma", witness->sigma},
                    {"f_part", witness->f_part.to_string()},
                    {"g_part", witness->g_part_elem.to_string()},
                    {"rank_defect", witness->tensor_rank_defect}};
  }
  j["skipped_blocks"] = skipped_blocks;
  j["special2"] = {{"outcome", to_string(special2.outcome)}, {"detail", special2.detail}};
  j["specialq"] = {{"outcome", to_string(specialq.outcome)}, {"detail", specialq.detail}};
  j["assumptions"] = assumptions;
  return j;
}

CheckReport classify(const PairSpec& s, std::uint64_t p, const ClassifyOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  CheckReport r;
  r.label = s.label_f + (s.label_g.empty() ? "" : " x " + s.label_g);
  r.p = p;
  auto m = model::build_image(s, p);
  r.field = m.field.describe();
  r.assumptions.push_back("surjectivity clause of the good-prime definition assumed at p = " + std::to_string(p));

  r.N = {check_N(m), {"symbolic"}, ""};

  bool irreducible = check_irreducible(m);
  r.gI = {irreducible ? Verdict::kHolds : Verdict::kNotDecided, {"burnside"}, ""};
  r.rI = r.gI;
  if (!irreducible) r.rI.note = r.gI.note = "span test below full dimension";
  if (s.exceptional_Q) {
    try {
      if (rI_exception(s, p)) append_note(r.rI.note, "Q/2 is a power of p; decided by the span test alone");
    } catch (const model::SpecError& e) {
      append_note(r.rI.note, e.what());
    }
  }

  r.descriptor = check_wE_symbolic(m);
  std::optional<Witness> constructed;
  if (r.descriptor) constructed = construct_witness(m, *r.descriptor);
  const bool symbolic = r.descriptor.has_value();
  r.wE = {of(symbolic), {"symbolic"}, ""};
  r.sE = {of(symbolic), {}, ""};

  if (opts.run_brute && within_budget(m, opts.brute.budget)) {
    auto br = check_sE_brute(m, opts.brute);
    r.skipped_blocks = br.skipped_blocks;
    if (br.witness.has_value() != symbolic) {
      throw CheckError("brute and symbolic deciders disagree at p = " + std::to_string(p) + " (brute " +
                       (br.witness ? "found" : "found no") + " witness)");
    }
    r.sE.methods = {"brute", "symbolic"};
    r.witness = br.witness ? br.witness : constructed;
  } else {
    r.sE.methods = {"symbolic"};
    if (opts.run_brute) r.sE.note = "brute enumeration over budget";
    r.witness = constructed;
  }

  auto guarded = [&](auto fn) -> CriterionResult {
    try {
      return fn(s, p);
    } catch (const grp::GroupError& e) {
      return {Criterion::kInapplicable, e.what()};
    }
  };
  r.special2 = guarded(criterion_special2);
  r.specialq = guarded(criterion_specialq);
  for (const auto& [c, tag] : {std::pair{r.special2, "criterion-special2"}, std::pair{r.specialq, "criterion-specialq"}}) {
    if (c.outcome != Criterion::kSufficient) continue;
    if (r.sE.verdict != Verdict::kHolds) throw CheckError(std::string(tag) + " is sufficient but (sE) fails");
    r.sE.methods.push_back(tag);
  }

  if (s.pairing_epsilon) {
    try {
      bool v = pairing::wE_iff_pairing(s, p);
      if (of(v) != r.sE.verdict) throw CheckError("pairing criterion disagrees with the deciders");
      r.wE.methods.push_back("pairing");
      r.sE.methods.push_back("pairing");
    } catch (const pairing::PairingError& e) {
      append_note(r.wE.note, std::string("pairing n/a: ") + e.what());
      r.sE.methods.push_back("pairing-na");
    }
  } else {
    r.sE.methods.push_back("pairing-na");
  }

  r.euler_type = all_of({r.N.verdict, r.gI.verdict, r.wE.verdict});
  r.euler_adapted = all_of({r.N.verdict, r.rI.verdict, r.sE.verdict});
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace eulerimg::checks
