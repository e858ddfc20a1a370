#include "eulerimg/mat.hpp"

#include <algorithm>
#include <sstream>

namespace eulerimg::mat {

// ---------------------------------------------------------------- Mat2

Mat2 Mat2::identity(Field f) { return diag(f.one(), f.one()); }

Mat2 Mat2::scalar(const FqElem& x) { return diag(x, x); }

Mat2 Mat2::diag(const FqElem& a, const FqElem& b) {
  Field f = a.field();
  return of(a, f.zero(), f.zero(), b);
}

Mat2 Mat2::of(const FqElem& a, const FqElem& b, const FqElem& c, const FqElem& d) {
  Field f = a.field();
  if (!(b.field() == f && c.field() == f && d.field() == f)) throw ff::FieldError("Mat2: entries from different fields");
  return Mat2{{a, b, c, d}};
}

Mat2 Mat2::of_ints(Field f, std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return of(f.from_int(a), f.from_int(b), f.from_int(c), f.from_int(d));
}

Mat2 Mat2::operator*(const Mat2& o) const {
  return Mat2{{e[0] * o.e[0] + e[1] * o.e[2], e[0] * o.e[1] + e[1] * o.e[3], e[2] * o.e[0] + e[3] * o.e[2],
               e[2] * o.e[1] + e[3] * o.e[3]}};
}

Mat2 Mat2::operator+(const Mat2& o) const {
  return Mat2{{e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2], e[3] + o.e[3]}};
}

Mat2 Mat2::operator-(const Mat2& o) const {
  return Mat2{{e[0] - o.e[0], e[1] - o.e[1], e[2] - o.e[2], e[3] - o.e[3]}};
}

Mat2 Mat2::scaled(const FqElem& x) const { return Mat2{{e[0] * x, e[1] * x, e[2] * x, e[3] * x}}; }

Mat2 Mat2::transpose() const { return Mat2{{e[0], e[2], e[1], e[3]}}; }

Mat2 Mat2::inverse() const {
  FqElem d = det();
  if (d.is_zero()) throw ff::FieldError("Mat2: singular matrix");
  FqElem di = d.inverse();
  return Mat2{{e[3] * di, -e[1] * di, -e[2] * di, e[0] * di}};
}

Mat2 Mat2::pow(std::uint64_t n) const {
  Mat2 r = identity(field());
  Mat2 b = *this;
  while (n) {
    if (n & 1) r = r * b;
    b = b * b;
    n >>= 1;
  }
  return r;
}

FqElem Mat2::det() const { return e[0] * e[3] - e[1] * e[2]; }
FqElem Mat2::trace() const { return e[0] + e[3]; }
bool Mat2::is_scalar() const { return e[1].is_zero() && e[2].is_zero() && e[0] == e[3]; }
bool Mat2::is_identity() const { return is_scalar() && e[0].is_one(); }

std::string Mat2::to_string() const {
  std::ostringstream os;
  os << "[[" << e[0].to_string() << ", " << e[1].to_string() << "], [" << e[2].to_string() << ", "
     << e[3].to_string() << "]]";
  return os.str();
}

std::size_t Mat2Hash::operator()(const Mat2& m) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  unsigned k = m.field().degree();
  for (const auto& x : m.e) {
    for (unsigned i = 0; i < k; ++i) {
      h ^= x.coeff(i);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

// ---------------------------------------------------------------- Mat4

Mat4 Mat4::zero(Field f) {
  Mat4 m;
  m.e.fill(f.zero());
  return m;
}

Mat4 Mat4::identity(Field f) {
  Mat4 m = zero(f);
  for (int i = 0; i < 4; ++i) m.at(i, i) = f.one();
  return m;
}

Mat4 Mat4::operator*(const Mat4& o) const {
  Mat4 r = zero(field());
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      if ((*this)(i, k).is_zero()) continue;
      for (int j = 0; j < 4; ++j) r.at(i, j) += (*this)(i, k) * o(k, j);
    }
  return r;
}

Mat4 Mat4::operator+(const Mat4& o) const {
  Mat4 r = *this;
  for (std::size_t i = 0; i < 16; ++i) r.e[i] += o.e[i];
  return r;
}

Mat4 Mat4::operator-(const Mat4& o) const {
  Mat4 r = *this;
  for (std::size_t i = 0; i < 16; ++i) r.e[i] -= o.e[i];
  return r;
}

FqElem Mat4::trace() const { return e[0] + e[5] + e[10] + e[15]; }

namespace {

// Determinant of the submatrix on the given rows/columns by cofactor expansion.
FqElem minor_det(const Mat4& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.size() == 1) return a(rows[0], cols[0]);
  FqElem acc = a.field().zero();
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const FqElem& x = a(rows[0], cols[j]);
    if (x.is_zero()) continue;
    std::vector<int> sub_cols;
    for (std::size_t l = 0; l < cols.size(); ++l)
      if (l != j) sub_cols.push_back(cols[l]);
    FqElem t = x * minor_det(a, sub_rows, sub_cols);
    acc = (j % 2 == 0) ? acc + t : acc - t;
  }
  return acc;
}

void subsets(int n, int r, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == r) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, r, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

FqElem Mat4::det() const { return minor_det(*this, {0, 1, 2, 3}, {0, 1, 2, 3}); }

std::string Mat4::to_string() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < 4; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < 4; ++j) os << (j ? ", " : "") << (*this)(i, j).to_string();
    os << ']';
  }
  os << ']';
  return os.str();
}

Mat4 kron(const Mat2& m, const Mat2& n) {
  if (!(m.field() == n.field())) throw ff::FieldError("kron: matrices over different fields");
  Mat4 r;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int j1 = 0; j1 < 2; ++j1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j2 = 0; j2 < 2; ++j2)
          r.e[static_cast<std::size_t>(4 * (2 * i1 + i2) + 2 * j1 + j2)] = m(i1, j1) * n(i2, j2);
  return r;
}

int rank(const Mat4& a) {
  std::array<FqElem, 16> m = a.e;
  int r = 0;
  for (int col = 0; col < 4 && r < 4; ++col) {
    int piv = -1;
    for (int i = r; i < 4; ++i)
      if (!m[static_cast<std::size_t>(4 * i + col)].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < 4; ++j) std::swap(m[static_cast<std::size_t>(4 * piv + j)], m[static_cast<std::size_t>(4 * r + j)]);
    const FqElem pv = m[static_cast<std::size_t>(4 * r + col)];
    for (int i = r + 1; i < 4; ++i) {
      const FqElem x = m[static_cast<std::size_t>(4 * i + col)];
      if (x.is_zero()) continue;
      for (int j = col; j < 4; ++j) {
        auto& t = m[static_cast<std::size_t>(4 * i + j)];
        t = t * pv - x * m[static_cast<std::size_t>(4 * r + j)];
      }
    }
    ++r;
  }
  return r;
}

int kernel_dim(const Mat4& a) { return 4 - rank(a); }

int rank_by_minors(const Mat4& a) {
  for (int r = 4; r >= 1; --r) {
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    subsets(4, r, 0, cur, idx);
    for (const auto& rows : idx)
      for (const auto& cols : idx)
        if (!minor_det(a, rows, cols).is_zero()) return r;
  }
  return 0;
}

// ---------------------------------------------------------------- eigen2

Mat2 embed(const Mat2& m, Field target) {
  ff::Embedding emb(m.field(), target);
  return Mat2{{emb(m.e[0]), emb(m.e[1]), emb(m.e[2]), emb(m.e[3])}};
}

EigenData eigen2(const Mat2& m) {
  Field f = m.field();
  FqElem t = m.trace();
  FqElem disc = t * t - m.det() * f.from_int(4);
  auto s = ff::sqrt(disc);
  if (!s) {
    f = ff::make_field(f.p(), 2 * f.degree());
    ff::Embedding emb(m.field(), f);
    t = emb(t);
    s = ff::sqrt(emb(disc));
  }
  FqElem half = f.from_int(2).inverse();
  FqElem a = (t + *s) * half;
  FqElem b = (t - *s) * half;
  EigenData out;
  out.field = f;
  if (a == b) {
    out.eigenvalues = {{a, 2}};
    out.semisimple = m.is_scalar();
  } else {
    if (ff::lex_less(b, a)) std::swap(a, b);
    out.eigenvalues = {{a, 1}, {b, 1}};
  }
  return out;
}

}  // namespace eulerimg::mat
