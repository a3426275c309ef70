#include "catidem/backend_poly.hpp"

#include <algorithm>
#include <sstream>

namespace catidem {

namespace {

using Tuple = std::vector<int>;
using Vec = std::map<Tuple, Scalar>;  // basis tuple -> coefficient

struct PolyElem final : ElemBase {
  int src_len = 0, dst_len = 0, deg = 0;
  std::vector<Vec> img;  // per generator; size 1 when src_len == 0
};

int gen_count(int src_len) { return src_len == 0 ? 1 : 1 << (src_len - 1); }

const PolyElem& cast(const ElemPtr& e) {
  auto p = dynamic_cast<const PolyElem*>(e.get());
  if (!p) fail("NotComposable", "foreign element passed to poly backend");
  return *p;
}

int tuple_alpha_sum(const Tuple& t) {
  int s = 0;
  for (int e : t) s += e;
  return s;
}

// Interior exponents stay in {0,1}; alpha^2 slides into the next slot.
void normalize_tuple(Tuple& t, int bound) {
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (t[i] >= 2) {
      t[i + 1] += t[i] - (t[i] & 1);
      t[i] &= 1;
    }
  if (tuple_alpha_sum(t) > bound)
    fail("DegreeBoundExceeded", "alpha exponent exceeds the degree bound");
}

void acc_term(const Ring& R, Vec& v, Tuple t, const Scalar& c, int bound) {
  if (s_is_zero(c)) return;
  normalize_tuple(t, bound);
  auto it = v.find(t);
  if (it == v.end()) {
    v.emplace(std::move(t), c);
  } else {
    it->second = s_add(R, it->second, c);
    if (s_is_zero(it->second)) v.erase(it);
  }
}

Vec vec_add(const Ring& R, const Vec& a, const Vec& b) {
  Vec out = a;
  for (const auto& [t, c] : b) {
    auto it = out.find(t);
    if (it == out.end()) {
      out.emplace(t, c);
    } else {
      it->second = s_add(R, it->second, c);
      if (s_is_zero(it->second)) out.erase(it);
    }
  }
  return out;
}

Vec vec_scale(const Ring& R, const Scalar& c, const Vec& a) {
  Vec out;
  if (s_is_zero(c)) return out;
  for (const auto& [t, x] : a) {
    Scalar m = s_mul(R, c, x);
    if (!s_is_zero(m)) out.emplace(t, m);
  }
  return out;
}

Vec mul_left(const Ring& R, int m, const Vec& a, int bound) {
  if (m == 0) return a;
  Vec out;
  for (const auto& [t, c] : a) {
    Tuple u = t;
    u[0] += m;
    acc_term(R, out, std::move(u), c, bound);
  }
  return out;
}

Vec mul_right(const Ring& R, const Vec& a, int m, int bound) {
  if (m == 0) return a;
  Vec out;
  for (const auto& [t, c] : a) {
    Tuple u = t;
    u.back() += m;
    acc_term(R, out, std::move(u), c, bound);
  }
  return out;
}

// Join two basis tuples across a tensor-over-R junction.
Tuple tuple_concat(const Tuple& a, const Tuple& b) {
  Tuple out(a.begin(), a.end() - 1);
  out.push_back(a.back() + b.front());
  out.insert(out.end(), b.begin() + 1, b.end());
  return out;
}

Vec vec_concat(const Ring& R, const Vec& a, const Vec& b, int bound) {
  Vec out;
  for (const auto& [ta, ca] : a)
    for (const auto& [tb, cb] : b)
      acc_term(R, out, tuple_concat(ta, tb), s_mul(R, ca, cb), bound);
  return out;
}

// Evaluate a morphism on a normalized basis tuple of its source word.
Vec eval_basis(const Ring& R, const PolyElem& f, const Tuple& t, int bound) {
  if (f.src_len == 0) return mul_right(R, f.img[0], t[0], bound);
  int w = 0;
  for (int i = 1; i < f.src_len; ++i) w |= (t[i] & 1) << (i - 1);
  return mul_left(R, t[0], mul_right(R, f.img[w], t.back(), bound), bound);
}

Vec eval_vec(const Ring& R, const PolyElem& f, const Vec& v, int bound) {
  Vec out;
  for (const auto& [t, c] : v) {
    Vec part = vec_scale(R, c, eval_basis(R, f, t, bound));
    out = vec_add(R, out, part);
  }
  return out;
}

// Basis tuples of C^len in one intrinsic degree, in canonical order
// (interior-and-first exponents as an ascending bit counter).
std::vector<Tuple> basis_tuples(int len, int deg) {
  std::vector<Tuple> out;
  if (deg < 0 || deg % 2 != 0) return out;
  if (len == 0) {
    out.push_back({deg / 2});
    return out;
  }
  for (int idx = 0; idx < (1 << len); ++idx) {
    Tuple t(len + 1, 0);
    int sum = 0;
    for (int i = 0; i < len; ++i) {
      t[i] = (idx >> i) & 1;
      sum += t[i];
    }
    int rest = deg / 2 - sum;
    if (rest < 0) continue;
    t[len] = rest;
    out.push_back(std::move(t));
  }
  return out;
}

std::string tuple_str(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i)
    s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

}  // namespace

PolyBackend::PolyBackend(const Ring& R, int degree_bound)
    : ring_(R), degree_bound_(degree_bound) {
  if (degree_bound < 1) fail("ShapeMismatch", "degree bound must be positive");
}

int PolyBackend::word_len(const std::string& w) {
  if (w == "1") return 0;
  int n = 1;
  for (char c : w) n += c == '.';
  return n;
}

std::string PolyBackend::word_of_len(int n) {
  if (n == 0) return "1";
  std::string w = "C";
  for (int i = 1; i < n; ++i) w += ".C";
  return w;
}

bool PolyBackend::word_valid(const std::string& w) const {
  return w == word_of_len(word_len(w)) && (w == "1" || w[0] == 'C');
}

std::string PolyBackend::concat(const std::string& a,
                                const std::string& b) const {
  return word_of_len(word_len(a) + word_len(b));
}

TensorNF PolyBackend::tensor_words(const std::string& a,
                                   const std::string& b) const {
  TensorNF out;
  out.raw = concat(a, b);
  if (a == unit_word() || b == unit_word()) {
    const std::string& other = a == unit_word() ? b : a;
    out.parts = {{other, 0}};
    out.incl = {identity(other)};
    out.proj = {identity(other)};
    return out;
  }
  if (a != "C" || b != "C")
    fail("NotSupported", "tensor normal form is defined on atomic words");
  // C (x) C ~ C (+) q^2 C with the section Delta and the alpha-difference
  // complement; the four zig-zag identities are covered by unit tests.
  const Ring& R = ring_;
  Scalar one = s_one(R), minus = s_from_int(R, -1);
  out.parts = {{"C", 0}, {"C", 2}};
  out.incl = {
      make_elem(1, 2, 0, {{{{0, 0, 0}, one}}}),
      make_elem(1, 2, 2, {{{{0, 1, 0}, one}, {{0, 0, 1}, minus}}}),
  };
  out.proj = {
      make_elem(2, 1, 0, {{{{0, 0}, one}}, {{{0, 1}, one}}}),
      make_elem(2, 1, -2, {{}, {{{0, 0}, one}}}),
  };
  return out;
}

ElemPtr PolyBackend::make_elem(
    int src_len, int dst_len, int deg,
    std::vector<std::map<std::vector<int>, Scalar>> img) const {
  if (static_cast<int>(img.size()) != gen_count(src_len))
    fail("ShapeMismatch", "generator image count mismatch");
  auto e = std::make_shared<PolyElem>();
  e->src_len = src_len;
  e->dst_len = dst_len;
  e->deg = deg;
  e->img.resize(img.size());
  for (std::size_t w = 0; w < img.size(); ++w) {
    int want = deg + 2 * __builtin_popcount(static_cast<unsigned>(w));
    for (auto& [t, c] : img[w]) {
      if (static_cast<int>(t.size()) != dst_len + 1)
        fail("ShapeMismatch", "image tuple length mismatch");
      if (2 * tuple_alpha_sum(t) != want)
        fail("DegreeMismatch", "image tuple " + tuple_str(t) +
                                   " has the wrong degree");
      acc_term(ring_, e->img[w], t, c, degree_bound_);
    }
  }
  if (src_len == 0) {
    // Maps out of the unit must land in the centralizer of alpha.
    Vec left = mul_left(ring_, 1, e->img[0], degree_bound_);
    Vec right = mul_right(ring_, e->img[0], 1, degree_bound_);
    if (vec_add(ring_, left, vec_scale(ring_, s_from_int(ring_, -1), right))
            .size() != 0)
      fail("NotComposable", "image of the unit does not centralize alpha");
  }
  return e;
}

ElemPtr PolyBackend::identity(const std::string& w) const {
  int len = word_len(w);
  std::vector<std::map<std::vector<int>, Scalar>> img(gen_count(len));
  if (len == 0) {
    img[0][{0}] = s_one(ring_);
  } else {
    for (int idx = 0; idx < gen_count(len); ++idx) {
      Tuple t(len + 1, 0);
      for (int i = 1; i < len; ++i) t[i] = (idx >> (i - 1)) & 1;
      img[idx][t] = s_one(ring_);
    }
  }
  return make_elem(len, len, 0, std::move(img));
}

ElemPtr PolyBackend::zero_elem(const std::string& src, const std::string& dst,
                               int deg) const {
  auto e = std::make_shared<PolyElem>();
  e->src_len = word_len(src);
  e->dst_len = word_len(dst);
  e->deg = deg;
  e->img.resize(gen_count(e->src_len));
  return e;
}

ElemPtr PolyBackend::compose(const ElemPtr& ga, const ElemPtr& fa) const {
  const PolyElem& g = cast(ga);
  const PolyElem& f = cast(fa);
  if (f.dst_len != g.src_len)
    fail("NotComposable", "word lengths do not chain");
  auto e = std::make_shared<PolyElem>();
  e->src_len = f.src_len;
  e->dst_len = g.dst_len;
  e->deg = f.deg + g.deg;
  e->img.resize(f.img.size());
  for (std::size_t w = 0; w < f.img.size(); ++w)
    e->img[w] = eval_vec(ring_, g, f.img[w], degree_bound_);
  return e;
}

ElemPtr PolyBackend::add(const ElemPtr& aa, const ElemPtr& ba) const {
  const PolyElem& a = cast(aa);
  const PolyElem& b = cast(ba);
  if (a.src_len != b.src_len || a.dst_len != b.dst_len)
    fail("ShapeMismatch", "adding elements between different words");
  if (is_zero(aa)) return ba;
  if (is_zero(ba)) return aa;
  if (a.deg != b.deg) fail("DegreeMismatch", "adding elements of different degrees");
  auto e = std::make_shared<PolyElem>();
  e->src_len = a.src_len;
  e->dst_len = a.dst_len;
  e->deg = a.deg;
  e->img.resize(a.img.size());
  for (std::size_t w = 0; w < a.img.size(); ++w)
    e->img[w] = vec_add(ring_, a.img[w], b.img[w]);
  return e;
}

ElemPtr PolyBackend::scale(const Scalar& c, const ElemPtr& aa) const {
  const PolyElem& a = cast(aa);
  auto e = std::make_shared<PolyElem>();
  e->src_len = a.src_len;
  e->dst_len = a.dst_len;
  e->deg = a.deg;
  e->img.resize(a.img.size());
  for (std::size_t w = 0; w < a.img.size(); ++w)
    e->img[w] = vec_scale(ring_, c, a.img[w]);
  return e;
}

ElemPtr PolyBackend::tensor_elems(const ElemPtr& aa, const ElemPtr& ba) const {
  const PolyElem& a = cast(aa);
  const PolyElem& b = cast(ba);
  auto e = std::make_shared<PolyElem>();
  e->src_len = a.src_len + b.src_len;
  e->dst_len = a.dst_len + b.dst_len;
  e->deg = a.deg + b.deg;
  e->img.resize(gen_count(e->src_len));
  if (a.src_len == 0 && b.src_len == 0) {
    e->img[0] = vec_concat(ring_, a.img[0], b.img[0], degree_bound_);
  } else if (a.src_len == 0) {
    for (std::size_t w = 0; w < b.img.size(); ++w)
      e->img[w] = vec_concat(ring_, a.img[0], b.img[w], degree_bound_);
  } else if (b.src_len == 0) {
    for (std::size_t w = 0; w < a.img.size(); ++w)
      e->img[w] = vec_concat(ring_, a.img[w], b.img[0], degree_bound_);
  } else {
    // Generator pattern (w_a, m, w_b); the junction exponent m multiplies
    // into the right edge of the first factor's image.
    for (int wa = 0; wa < gen_count(a.src_len); ++wa)
      for (int m = 0; m < 2; ++m)
        for (int wb = 0; wb < gen_count(b.src_len); ++wb) {
          int w = wa | (m << (a.src_len - 1)) | (wb << a.src_len);
          e->img[w] = vec_concat(
              ring_, mul_right(ring_, a.img[wa], m, degree_bound_),
              b.img[wb], degree_bound_);
        }
  }
  return e;
}

bool PolyBackend::is_zero(const ElemPtr& aa) const {
  const PolyElem& a = cast(aa);
  return std::all_of(a.img.begin(), a.img.end(),
                     [](const Vec& v) { return v.empty(); });
}

std::string PolyBackend::elem_src(const ElemPtr& a) const {
  return word_of_len(cast(a).src_len);
}
std::string PolyBackend::elem_dst(const ElemPtr& a) const {
  return word_of_len(cast(a).dst_len);
}
int PolyBackend::elem_deg(const ElemPtr& a) const { return cast(a).deg; }

std::optional<Scalar> PolyBackend::identity_factor(const ElemPtr& aa) const {
  const PolyElem& a = cast(aa);
  if (is_zero(aa)) return s_zero(ring_);
  if (a.src_len != a.dst_len || a.deg != 0) return std::nullopt;
  ElemPtr idp = identity(word_of_len(a.src_len));
  const PolyElem& id = cast(idp);
  std::optional<Scalar> c;
  for (std::size_t w = 0; w < a.img.size(); ++w) {
    const Tuple& gt = id.img[w].begin()->first;
    auto it = a.img[w].find(gt);
    Scalar cw = it == a.img[w].end() ? s_zero(ring_) : it->second;
    if (!c)
      c = cw;
    else if (!(*c == cw))
      return std::nullopt;
    Vec diff = vec_add(ring_, a.img[w],
                       vec_scale(ring_, s_neg(ring_, cw), id.img[w]));
    if (!diff.empty()) return std::nullopt;
  }
  return c;
}

std::string PolyBackend::elem_repr(const ElemPtr& aa) const {
  const PolyElem& a = cast(aa);
  std::ostringstream os;
  os << word_of_len(a.src_len) << "->" << word_of_len(a.dst_len) << "@"
     << a.deg << "{";
  for (std::size_t w = 0; w < a.img.size(); ++w) {
    if (a.img[w].empty()) continue;
    os << "g" << w << ":";
    for (const auto& [t, c] : a.img[w])
      os << tuple_str(t) << "*" << s_to_string(ring_, c) << " ";
  }
  os << "}";
  return os.str();
}

std::vector<ElemPtr> PolyBackend::hom_basis(const std::string& src,
                                            const std::string& dst,
                                            int deg) const {
  int a = word_len(src), b = word_len(dst);
  std::vector<ElemPtr> out;
  if (a >= 1) {
    for (int w = 0; w < gen_count(a); ++w) {
      int dw = deg + 2 * __builtin_popcount(static_cast<unsigned>(w));
      for (const auto& t : basis_tuples(b, dw)) {
        std::vector<std::map<std::vector<int>, Scalar>> img(gen_count(a));
        img[w][t] = s_one(ring_);
        out.push_back(make_elem(a, b, deg, std::move(img)));
      }
    }
    return out;
  }
  // Unit source: the image must commute with alpha.  Solve for the kernel
  // of z -> alpha z - z alpha on the degree-deg slice of the target word.
  std::vector<Tuple> dom = basis_tuples(b, deg);
  std::vector<Tuple> cod = basis_tuples(b, deg + 2);
  if (dom.empty()) return out;
  std::map<Tuple, int> cod_index;
  for (std::size_t i = 0; i < cod.size(); ++i) cod_index[cod[i]] = i;
  Mat A(ring_, static_cast<int>(cod.size()), static_cast<int>(dom.size()));
  for (std::size_t j = 0; j < dom.size(); ++j) {
    Vec z;
    z[dom[j]] = s_one(ring_);
    Vec comm = vec_add(
        ring_, mul_left(ring_, 1, z, degree_bound_),
        vec_scale(ring_, s_from_int(ring_, -1),
                  mul_right(ring_, z, 1, degree_bound_)));
    for (const auto& [t, c] : comm)
      A.at(cod_index.at(t), static_cast<int>(j)) = c;
  }
  for (const auto& kvec : nullspace(A)) {
    std::map<std::vector<int>, Scalar> im;
    for (std::size_t j = 0; j < dom.size(); ++j)
      if (!s_is_zero(kvec[j])) im[dom[j]] = kvec[j];
    out.push_back(make_elem(0, b, deg, {im}));
  }
  return out;
}

std::vector<Scalar> PolyBackend::elem_coords(const ElemPtr& aa) const {
  const PolyElem& a = cast(aa);
  std::vector<Scalar> out;
  if (a.src_len >= 1) {
    for (int w = 0; w < gen_count(a.src_len); ++w) {
      int dw = a.deg + 2 * __builtin_popcount(static_cast<unsigned>(w));
      for (const auto& t : basis_tuples(a.dst_len, dw)) {
        auto it = a.img[w].find(t);
        out.push_back(it == a.img[w].end() ? s_zero(ring_) : it->second);
      }
    }
    return out;
  }
  std::vector<ElemPtr> basis =
      hom_basis(word_of_len(0), word_of_len(a.dst_len), a.deg);
  if (basis.empty()) return out;
  std::vector<Tuple> dom = basis_tuples(a.dst_len, a.deg);
  std::map<Tuple, int> dom_index;
  for (std::size_t i = 0; i < dom.size(); ++i) dom_index[dom[i]] = i;
  Mat A(ring_, static_cast<int>(dom.size()), static_cast<int>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (const auto& [t, c] : cast(basis[j]).img[0])
      A.at(dom_index.at(t), static_cast<int>(j)) = c;
  std::vector<Scalar> rhs(dom.size(), s_zero(ring_));
  for (const auto& [t, c] : a.img[0]) rhs[dom_index.at(t)] = c;
  auto sol = solve_linear(A, rhs);
  if (!sol)
    fail("NotComposable", "element is outside the span of the hom basis");
  return *sol;
}

CounitalObject poly_counital(const PolyBackend& B) {
  CounitalObject co;
  co.c = fo_single("C");
  co.counit = bm_zero(co.c, fo_unit(B), 0);
  bm_set(B, co.counit, 0, 0,
         B.make_elem(1, 0, 0, {{{{0}, s_one(B.ring())}}}));
  FormalObject cc = tensor_objects(B, co.c, co.c);
  co.delta_r = bm_zero(co.c, cc, 0);
  bm_set(B, co.delta_r, 0, 0, B.identity("C"));
  co.delta_l = co.delta_r;
  return co;
}

ElemPtr poly_alpha_left(const PolyBackend& B) {
  return B.make_elem(1, 1, 2, {{{{1, 0}, s_one(B.ring())}}});
}

ElemPtr poly_alpha_right(const PolyBackend& B) {
  return B.make_elem(1, 1, 2, {{{{0, 1}, s_one(B.ring())}}});
}

}  // namespace catidem
