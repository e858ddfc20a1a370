#include "eulerimg/grp.hpp"

#include <algorithm>
#include <map>

namespace eulerimg::grp {

std::string ProjType::to_string() const {
  switch (kind) {
    case ProjKind::kCyclic:
      return "Cyclic(" + std::to_string(n) + ")";
    case ProjKind::kDihedral:
      return "Dihedral(" + std::to_string(n) + ")";
    case ProjKind::kTetraA4:
      return "A4";
    case ProjKind::kOctaS4:
      return "S4";
    case ProjKind::kIcosaA5:
      return "A5";
  }
  return "?";
}

MatrixGroup MatrixGroup::closure(const std::vector<Mat2>& gens, std::size_t cap) {
  if (gens.empty()) throw GroupError("closure: no generators");
  if (cap < 1) throw GroupError("closure: cap must be positive");
  MatrixGroup g;
  g.field_ = gens.front().field();
  for (const auto& s : gens) {
    if (!(s.field() == g.field_)) throw GroupError("closure: generators over different fields");
    if (s.det().is_zero()) throw GroupError("closure: singular generator " + s.to_string());
  }
  g.gens_ = gens;
  Mat2 id = Mat2::identity(g.field_);
  g.elems_.push_back(id);
  g.index_.emplace(id, 0);
  for (std::size_t i = 0; i < g.elems_.size(); ++i) {
    for (const auto& s : gens) {
      Mat2 h = g.elems_[i] * s;
      if (g.index_.count(h)) continue;
      if (g.elems_.size() >= cap) {
        throw GroupError("closure: group exceeds cap of " + std::to_string(cap) + " elements");
      }
      g.index_.emplace(h, g.elems_.size());
      g.elems_.push_back(h);
    }
  }
  for (const auto& m : g.elems_)
    if (m.is_scalar()) g.scalars_.push_back(m);
  return g;
}

MatrixGroup MatrixGroup::generated_by(const std::vector<Mat2>& candidates, mat::Field f, std::size_t cap) {
  MatrixGroup g = closure({Mat2::identity(f)}, cap);
  std::vector<Mat2> gens;
  for (const auto& c : candidates) {
    if (g.contains(c)) continue;
    gens.push_back(c);
    g = closure(gens, cap);
  }
  return g;
}

std::optional<std::size_t> MatrixGroup::index_of(const Mat2& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool MatrixGroup::is_abelian() const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    for (std::size_t j = i + 1; j < gens_.size(); ++j)
      if (!(gens_[i] * gens_[j] == gens_[j] * gens_[i])) return false;
  return true;
}

std::uint64_t element_order(const Mat2& m, std::uint64_t bound) {
  Mat2 x = m;
  for (std::uint64_t n = 1; n <= bound; ++n) {
    if (x.is_identity()) return n;
    x = x * m;
  }
  throw GroupError("element_order: exceeds bound");
}

std::uint64_t projective_order(const Mat2& m, std::uint64_t bound) {
  Mat2 x = m;
  for (std::uint64_t n = 1; n <= bound; ++n) {
    if (x.is_scalar()) return n;
    x = x * m;
  }
  throw GroupError("projective_order: exceeds bound");
}

bool scalars_cyclic(const MatrixGroup& g) {
  for (const auto& s : g.scalars())
    if (element_order(s) == g.scalars().size()) return true;
  return false;
}

ProjType projective_type(const MatrixGroup& g) {
  const std::size_t m = g.proj_order();
  const std::size_t z = g.scalars().size();
  std::vector<std::uint64_t> po;
  po.reserve(g.order());
  for (const auto& x : g.elements()) po.push_back(projective_order(x));

  if (std::find(po.begin(), po.end(), m) != po.end()) return {ProjKind::kCyclic, static_cast<int>(m)};

  if (m % 2 == 0) {
    const std::uint64_t half = m / 2;
    for (std::size_t i = 0; i < po.size(); ++i) {
      if (po[i] != half) continue;
      // The projective cyclic subgroup generated by this element.
      const Mat2& r = g.elements()[i];
      std::vector<Mat2> coset_reps;
      Mat2 x = Mat2::identity(g.field());
      for (std::uint64_t k = 0; k < half; ++k, x = x * r) coset_reps.push_back(x);
      auto in_cyclic = [&](const Mat2& y) {
        for (const auto& c : coset_reps) {
          if ((y * c.inverse()).is_scalar()) return true;
        }
        return false;
      };
      bool dihedral = true;
      for (std::size_t j = 0; j < po.size() && dihedral; ++j) {
        if (!in_cyclic(g.elements()[j]) && po[j] != 2) dihedral = false;
      }
      if (dihedral) return {ProjKind::kDihedral, static_cast<int>(half)};
      break;
    }
  }

  std::map<std::uint64_t, std::size_t> stats;
  for (auto o : po) stats[o] += 1;
  for (auto& [o, c] : stats) c /= z;
  using Stats = std::map<std::uint64_t, std::size_t>;
  if (m == 12 && stats == Stats{{1, 1}, {2, 3}, {3, 8}}) return {ProjKind::kTetraA4, 0};
  if (m == 24 && stats == Stats{{1, 1}, {2, 9}, {3, 8}, {4, 6}}) return {ProjKind::kOctaS4, 0};
  if (m == 60 && stats == Stats{{1, 1}, {2, 15}, {3, 20}, {5, 24}}) return {ProjKind::kIcosaA5, 0};
  throw GroupError("projective_type: projective image of order " + std::to_string(m) +
                   " matches no finite subgroup of PGL2");
}

MatrixGroup derived_subgroup(const MatrixGroup& g) {
  std::vector<Mat2> comms;
  std::vector<Mat2> inv;
  inv.reserve(g.order());
  for (const auto& x : g.elements()) inv.push_back(x.inverse());
  std::unordered_map<Mat2, bool, mat::Mat2Hash> uniq;
  for (std::size_t i = 0; i < g.order(); ++i)
    for (std::size_t j = 0; j < g.order(); ++j) {
      Mat2 c = g.elements()[i] * g.elements()[j] * inv[i] * inv[j];
      if (uniq.emplace(c, true).second) comms.push_back(c);
    }
  return MatrixGroup::generated_by(comms, g.field());
}

std::vector<ff::FqElem> character_from_generators(const MatrixGroup& g, const std::vector<ff::FqElem>& gen_values) {
  const auto& gens = g.generators();
  if (gen_values.size() != gens.size()) throw GroupError("character: one value per generator required");
  std::vector<std::optional<ff::FqElem>> chi(g.order());
  chi[0] = g.field().one();
  // Elements are stored in BFS order from the identity, so every element is
  // reached from an earlier one before it is used as a source.
  for (std::size_t i = 0; i < g.order(); ++i) {
    if (!chi[i]) throw GroupError("character: element unreachable");
    for (std::size_t s = 0; s < gens.size(); ++s) {
      std::size_t j = *g.index_of(g.elements()[i] * gens[s]);
      ff::FqElem v = *chi[i] * gen_values[s];
      if (!chi[j]) {
        chi[j] = v;
      } else if (!(*chi[j] == v)) {
        throw GroupError("character: generator values do not define a homomorphism");
      }
    }
  }
  std::vector<ff::FqElem> out;
  out.reserve(chi.size());
  for (auto& v : chi) out.push_back(*v);
  return out;
}

MatrixGroup subgroup_from_character(const MatrixGroup& g, const std::vector<ff::FqElem>& chi) {
  if (chi.size() != g.order()) throw GroupError("character: wrong number of values");
  if (!chi[0].is_one()) throw GroupError("character: value at identity is not 1");
  for (std::size_t i = 0; i < g.order(); ++i)
    for (const auto& s : g.generators()) {
      std::size_t j = *g.index_of(g.elements()[i] * s);
      std::size_t js = *g.index_of(s);
      if (!(chi[j] == chi[i] * chi[js])) throw GroupError("character: not multiplicative");
    }
  std::vector<Mat2> kernel;
  for (std::size_t i = 0; i < g.order(); ++i)
    if (chi[i].is_one()) kernel.push_back(g.elements()[i]);
  MatrixGroup k = MatrixGroup::generated_by(kernel, g.field());
  if (k.order() != kernel.size()) throw GroupError("character: kernel is not closed");
  return k;
}

}  // namespace eulerimg::grp
