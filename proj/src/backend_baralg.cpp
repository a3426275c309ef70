#include "catidem/backend_baralg.hpp"

#include <algorithm>
#include <sstream>

namespace catidem {

namespace {

struct BarElem final : ElemBase {
  int src_len = 0, dst_len = 0, deg = 0;
  SparseMat mat;
};

const BarElem& cast(const ElemPtr& p) {
  return *static_cast<const BarElem*>(p.get());
}

ElemPtr wrap(BarElem e) { return std::make_shared<BarElem>(std::move(e)); }

int popcount(int v) { return __builtin_popcount((unsigned)v); }

void sp_add(const Ring& R, SparseMat& m, int r, int c, const Scalar& v) {
  if (s_is_zero(v)) return;
  auto key = std::make_pair(r, c);
  auto it = m.find(key);
  if (it == m.end()) {
    m.emplace(key, v);
    return;
  }
  it->second = s_add(R, it->second, v);
  if (s_is_zero(it->second)) m.erase(it);
}

// Left/right multiplication by x on the tensor basis of a word with
// n_factors factors: sets the boundary bit, killing terms where it is set.
std::optional<int> mult_x_left(int idx) {
  if (idx & 1) return std::nullopt;
  return idx | 1;
}
std::optional<int> mult_x_right(int idx, int n_factors) {
  int top = 1 << (n_factors - 1);
  if (idx & top) return std::nullopt;
  return idx | top;
}

}  // namespace

BarBackend::BarBackend(const Ring& R) : ring_(R) {}

int BarBackend::word_len(const std::string& w) {
  if (w == "1") return 0;
  int n = 1;
  for (char ch : w)
    if (ch == '.') ++n;
  return n;
}

std::string BarBackend::word_of_len(int n) {
  if (n == 0) return "1";
  std::string w = "C";
  for (int i = 1; i < n; ++i) w += ".C";
  return w;
}

bool BarBackend::word_valid(const std::string& w) const {
  if (w == "1") return true;
  return w == word_of_len(word_len(w)) &&
         w.find('1') == std::string::npos && !w.empty() && w[0] == 'C';
}

std::string BarBackend::concat(const std::string& a,
                               const std::string& b) const {
  return word_of_len(word_len(a) + word_len(b));
}

TensorNF BarBackend::tensor_words(const std::string& a,
                                  const std::string& b) const {
  TensorNF nf;
  nf.raw = concat(a, b);
  nf.parts = {{nf.raw, 0}};
  nf.incl = {identity(nf.raw)};
  nf.proj = {identity(nf.raw)};
  return nf;
}

ElemPtr BarBackend::identity(const std::string& w) const {
  BarElem e;
  e.src_len = e.dst_len = word_len(w);
  e.deg = 0;
  int dim = space_dim(w);
  for (int i = 0; i < dim; ++i) e.mat.emplace(std::make_pair(i, i), s_one(ring_));
  return wrap(std::move(e));
}

ElemPtr BarBackend::zero_elem(const std::string& src, const std::string& dst,
                              int deg) const {
  BarElem e;
  e.src_len = word_len(src);
  e.dst_len = word_len(dst);
  e.deg = deg;
  return wrap(std::move(e));
}

ElemPtr BarBackend::compose(const ElemPtr& g, const ElemPtr& f) const {
  const BarElem& a = cast(g);
  const BarElem& b = cast(f);
  if (b.dst_len != a.src_len)
    fail("NotComposable", "word mismatch in composition");
  BarElem r;
  r.src_len = b.src_len;
  r.dst_len = a.dst_len;
  r.deg = a.deg + b.deg;
  std::map<int, std::vector<std::pair<int, Scalar>>> a_by_col;
  for (const auto& [rc, v] : a.mat)
    a_by_col[rc.second].push_back({rc.first, v});
  for (const auto& [rc, v] : b.mat) {
    auto it = a_by_col.find(rc.first);
    if (it == a_by_col.end()) continue;
    for (const auto& [row, w] : it->second)
      sp_add(ring_, r.mat, row, rc.second, s_mul(ring_, w, v));
  }
  return wrap(std::move(r));
}

ElemPtr BarBackend::add(const ElemPtr& a, const ElemPtr& b) const {
  const BarElem& x = cast(a);
  const BarElem& y = cast(b);
  if (x.src_len != y.src_len || x.dst_len != y.dst_len)
    fail("NotComposable", "word mismatch in addition");
  if (x.deg != y.deg && !x.mat.empty() && !y.mat.empty())
    fail("DegreeMismatch", "degree mismatch in addition");
  BarElem r = x.mat.empty() ? y : x;
  if (x.mat.empty() || y.mat.empty()) return wrap(std::move(r));
  for (const auto& [rc, v] : y.mat) sp_add(ring_, r.mat, rc.first, rc.second, v);
  return wrap(std::move(r));
}

ElemPtr BarBackend::scale(const Scalar& c, const ElemPtr& a) const {
  const BarElem& x = cast(a);
  BarElem r;
  r.src_len = x.src_len;
  r.dst_len = x.dst_len;
  r.deg = x.deg;
  if (!s_is_zero(c))
    for (const auto& [rc, v] : x.mat)
      r.mat.emplace(rc, s_mul(ring_, c, v));
  return wrap(std::move(r));
}

ElemPtr BarBackend::tensor_elems(const ElemPtr& a, const ElemPtr& b) const {
  const BarElem& f = cast(a);
  const BarElem& g = cast(b);
  BarElem r;
  r.src_len = f.src_len + g.src_len;
  r.dst_len = f.dst_len + g.dst_len;
  r.deg = f.deg + g.deg;
  int m1 = f.src_len + 1;  // source factors of f
  int kk = f.dst_len;      // top factor index in f's target
  for (const auto& [uv, cf] : f.mat) {
    int u = uv.first, v = uv.second;
    int uk = (u >> kk) & 1;
    for (const auto& [zw, cg] : g.mat) {
      int z = zw.first, w = zw.second;
      // Basis tensors split as v (x)_A (1 (x) rest); columns of g whose
      // first factor is x are determined by these and never read.
      if (w & 1) continue;
      int z0 = z & 1;
      if (uk && z0) continue;  // boundary product x.x = 0
      int src = v | ((w >> 1) << m1);
      int dst = (u & ~(1 << kk)) | ((uk | z0) << kk) | ((z >> 1) << (kk + 1));
      sp_add(ring_, r.mat, dst, src, s_mul(ring_, cf, cg));
    }
  }
  return wrap(std::move(r));
}

bool BarBackend::is_zero(const ElemPtr& a) const { return cast(a).mat.empty(); }

std::string BarBackend::elem_src(const ElemPtr& a) const {
  return word_of_len(cast(a).src_len);
}

std::string BarBackend::elem_dst(const ElemPtr& a) const {
  return word_of_len(cast(a).dst_len);
}

int BarBackend::elem_deg(const ElemPtr& a) const { return cast(a).deg; }

std::optional<Scalar> BarBackend::identity_factor(const ElemPtr& a) const {
  const BarElem& x = cast(a);
  if (x.src_len != x.dst_len) return std::nullopt;
  if (x.mat.empty()) return s_from_int(ring_, 0);
  if (x.deg != 0) return std::nullopt;
  Scalar c = x.mat.begin()->second;
  int dim = 1 << (x.src_len + 1);
  for (const auto& [rc, v] : x.mat)
    if (rc.first != rc.second) return std::nullopt;
  if ((int)x.mat.size() != dim) return std::nullopt;
  for (const auto& [rc, v] : x.mat)
    if (!(v == c)) return std::nullopt;
  return c;
}

std::string BarBackend::elem_repr(const ElemPtr& a) const {
  const BarElem& x = cast(a);
  std::ostringstream os;
  os << word_of_len(x.src_len) << "->" << word_of_len(x.dst_len) << "@"
     << x.deg << "{";
  for (const auto& [rc, v] : x.mat)
    os << "(" << rc.first << "," << rc.second << "):" << s_to_string(ring_, v)
       << " ";
  os << "}";
  return os.str();
}

ElemPtr BarBackend::make_elem(int src_len, int dst_len, int deg,
                              SparseMat mat) const {
  int sdim = 1 << (src_len + 1), ddim = 1 << (dst_len + 1);
  for (const auto& [rc, v] : mat) {
    if (rc.first < 0 || rc.first >= ddim || rc.second < 0 || rc.second >= sdim)
      fail("BadElement", "matrix index out of range");
    if (s_is_zero(v)) fail("BadElement", "explicit zero entry");
    if (2 * (popcount(rc.first) - popcount(rc.second)) != deg)
      fail("DegreeMismatch", "entry violates homogeneity");
  }
  // Bimodule property: commutes with x acting on the left and right.
  auto xmat = [&](int n_factors, bool left) {
    SparseMat m;
    for (int j = 0; j < (1 << n_factors); ++j) {
      std::optional<int> t = left ? mult_x_left(j) : mult_x_right(j, n_factors);
      if (t) m.emplace(std::make_pair(*t, j), s_one(ring_));
    }
    return m;
  };
  auto sp_mul = [&](const SparseMat& a, const SparseMat& b) {
    SparseMat r;
    std::map<int, std::vector<std::pair<int, Scalar>>> a_by_col;
    for (const auto& [rc, v] : a) a_by_col[rc.second].push_back({rc.first, v});
    for (const auto& [rc, v] : b) {
      auto it = a_by_col.find(rc.first);
      if (it == a_by_col.end()) continue;
      for (const auto& [row, w] : it->second)
        sp_add(ring_, r, row, rc.second, s_mul(ring_, w, v));
    }
    return r;
  };
  auto check_side = [&](bool left) {
    SparseMat lhs = sp_mul(xmat(dst_len + 1, left), mat);
    SparseMat rhs = sp_mul(mat, xmat(src_len + 1, left));
    if (!(lhs == rhs))
      fail("BadElement", left ? "not left-linear over x" : "not right-linear over x");
  };
  check_side(true);
  check_side(false);
  BarElem e;
  e.src_len = src_len;
  e.dst_len = dst_len;
  e.deg = deg;
  e.mat = std::move(mat);
  return wrap(std::move(e));
}

Mat BarBackend::elem_matrix(const ElemPtr& a) const {
  const BarElem& x = cast(a);
  Mat m(ring_, 1 << (x.dst_len + 1), 1 << (x.src_len + 1));
  for (const auto& [rc, v] : x.mat) m.at(rc.first, rc.second) = v;
  return m;
}

int BarBackend::elem_trace(const ElemPtr& a) const {
  const BarElem& x = cast(a);
  if (x.src_len != x.dst_len) fail("NotComposable", "trace of a non-square map");
  Scalar t = s_from_int(ring_, 0);
  for (const auto& [rc, v] : x.mat)
    if (rc.first == rc.second) t = s_add(ring_, t, v);
  if (ring_.kind == RingKind::Rationals && t.den != 1)
    fail("InternalError", "non-integer trace");
  return (int)t.num;
}

std::vector<ElemPtr> BarBackend::hom_basis(const std::string& src,
                                           const std::string& dst,
                                           int deg) const {
  int m = word_len(src), kD = word_len(dst);
  int ddim = 1 << (kD + 1);
  std::vector<ElemPtr> basis;
  if (m >= 1) {
    // The source is the free bimodule on its interior: one basis map per
    // interior basis tensor t and target basis tensor u of matching degree,
    // sending 1 (x) t (x) 1 to u.
    int idim = 1 << (m - 1);
    for (int t = 0; t < idim; ++t) {
      for (int u = 0; u < ddim; ++u) {
        if (2 * (popcount(u) - popcount(t)) != deg) continue;
        BarElem e;
        e.src_len = m;
        e.dst_len = kD;
        e.deg = deg;
        for (int ab = 0; ab < 4; ++ab) {
          int a = ab & 1, b = (ab >> 1) & 1;
          int val = u;
          if (a) {
            std::optional<int> v2 = mult_x_left(val);
            if (!v2) continue;
            val = *v2;
          }
          if (b) {
            std::optional<int> v2 = mult_x_right(val, kD + 1);
            if (!v2) continue;
            val = *v2;
          }
          int s = a | (t << 1) | (b << m);
          e.mat.emplace(std::make_pair(val, s), s_one(ring_));
        }
        basis.push_back(wrap(std::move(e)));
      }
    }
    return basis;
  }
  // Maps out of the unit are the centralizer: z with x.z = z.x, one map
  // a -> a.z per solution z in the degree slice.
  if (deg < 0 || deg % 2 != 0) return basis;
  std::vector<int> slice, upper;
  for (int z = 0; z < ddim; ++z) {
    if (2 * popcount(z) == deg) slice.push_back(z);
    if (2 * popcount(z) == deg + 2) upper.push_back(z);
  }
  if (slice.empty()) return basis;
  Mat cm(ring_, (int)upper.size(), (int)slice.size());
  for (int j = 0; j < (int)slice.size(); ++j) {
    std::optional<int> l = mult_x_left(slice[j]);
    std::optional<int> r = mult_x_right(slice[j], kD + 1);
    for (int i = 0; i < (int)upper.size(); ++i) {
      Scalar v = s_from_int(ring_, 0);
      if (l && *l == upper[i]) v = s_add(ring_, v, s_one(ring_));
      if (r && *r == upper[i]) v = s_sub(ring_, v, s_one(ring_));
      cm.at(i, j) = v;
    }
  }
  std::vector<std::vector<Scalar>> null = nullspace(cm);
  for (const auto& z : null) {
    BarElem e;
    e.src_len = 0;
    e.dst_len = kD;
    e.deg = deg;
    for (int j = 0; j < (int)slice.size(); ++j) {
      if (s_is_zero(z[j])) continue;
      sp_add(ring_, e.mat, slice[j], 0, z[j]);
      std::optional<int> l = mult_x_left(slice[j]);
      if (l) sp_add(ring_, e.mat, *l, 1, z[j]);
    }
    basis.push_back(wrap(std::move(e)));
  }
  return basis;
}

std::vector<Scalar> BarBackend::elem_coords(const ElemPtr& a) const {
  const BarElem& x = cast(a);
  int m = x.src_len, kD = x.dst_len;
  int ddim = 1 << (kD + 1);
  std::vector<Scalar> co;
  if (m >= 1) {
    int idim = 1 << (m - 1);
    for (int t = 0; t < idim; ++t) {
      for (int u = 0; u < ddim; ++u) {
        if (2 * (popcount(u) - popcount(t)) != x.deg) continue;
        auto it = x.mat.find(std::make_pair(u, t << 1));
        co.push_back(it == x.mat.end() ? s_from_int(ring_, 0) : it->second);
      }
    }
    return co;
  }
  std::vector<ElemPtr> basis =
      hom_basis(word_of_len(0), word_of_len(kD), x.deg);
  std::vector<int> slice;
  for (int z = 0; z < ddim; ++z)
    if (2 * popcount(z) == x.deg) slice.push_back(z);
  Mat bmat(ring_, (int)slice.size(), (int)basis.size());
  for (int j = 0; j < (int)basis.size(); ++j) {
    const BarElem& b = cast(basis[j]);
    for (int i = 0; i < (int)slice.size(); ++i) {
      auto it = b.mat.find(std::make_pair(slice[i], 0));
      if (it != b.mat.end()) bmat.at(i, j) = it->second;
    }
  }
  std::vector<Scalar> rhs((int)slice.size(), s_from_int(ring_, 0));
  for (int i = 0; i < (int)slice.size(); ++i) {
    auto it = x.mat.find(std::make_pair(slice[i], 0));
    if (it != x.mat.end()) rhs[i] = it->second;
  }
  std::optional<std::vector<Scalar>> sol = solve_linear(bmat, rhs);
  if (!sol) fail("InternalError", "element outside its hom space");
  return *sol;
}

CounitalObject bar_counital(const BarBackend& B) {
  const Ring& R = B.ring();
  CounitalObject cu;
  cu.c = fo_single("C");

  SparseMat mu;  // multiplication A (x) A -> A
  mu.emplace(std::make_pair(0, 0), s_one(R));   // 1(x)1 -> 1
  mu.emplace(std::make_pair(1, 1), s_one(R));   // x(x)1 -> x
  mu.emplace(std::make_pair(1, 2), s_one(R));   // 1(x)x -> x
  ElemPtr eps = B.make_elem(1, 0, 0, std::move(mu));
  cu.counit = bm_zero(cu.c, fo_unit(B), 0);
  bm_set(B, cu.counit, 0, 0, eps);

  SparseMat ins;  // a (x) b -> a (x) 1 (x) b
  for (int v = 0; v < 4; ++v) {
    int dst = (v & 1) | ((v >> 1) << 2);
    ins.emplace(std::make_pair(dst, v), s_one(R));
  }
  ElemPtr delta = B.make_elem(1, 2, 0, std::move(ins));
  FormalObject cc = tensor_objects(B, cu.c, cu.c);
  cu.delta_r = bm_zero(cu.c, cc, 0);
  bm_set(B, cu.delta_r, 0, 0, delta);
  cu.delta_l = cu.delta_r;
  return cu;
}

ElemPtr bar_e_formula(const BarBackend& B, int k) {
  if (k < 0) fail("NotSupported", "e_n needs n >= 1");
  const Ring& R = B.ring();
  int n_factors = k + 2;
  int dim = 1 << n_factors;
  SparseMat acc;
  for (int S = 0; S < (1 << k); ++S) {
    Scalar sgn = s_from_int(R, popcount(S) % 2 == 0 ? 1 : -1);
    auto in_S = [&](int i) { return i >= 1 && i <= k && ((S >> (i - 1)) & 1); };
    for (int src = 0; src < dim; ++src) {
      auto a = [&](int i) { return (src >> i) & 1; };
      int dst = a(0);
      bool dead = false;
      for (int i = 1; i <= k + 1 && !dead; ++i) {
        bool cur = in_S(i), prev = in_S(i - 1);
        int b;
        if (!cur && !prev) b = a(i);
        else if (cur && !prev) b = 0;
        else if (!cur && prev) {
          if (a(i - 1) && a(i)) { dead = true; break; }
          b = a(i - 1) | a(i);
        } else b = a(i - 1);
        dst |= b << i;
      }
      if (dead) continue;
      auto key = std::make_pair(dst, src);
      auto it = acc.find(key);
      if (it == acc.end()) acc.emplace(key, sgn);
      else {
        it->second = s_add(R, it->second, sgn);
        if (s_is_zero(it->second)) acc.erase(it);
      }
    }
  }
  return B.make_elem(k + 1, k + 1, 0, std::move(acc));
}

}  // namespace catidem
