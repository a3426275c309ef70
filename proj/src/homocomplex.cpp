#include "catidem/homocomplex.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace catidem {

namespace {

void validate_complex(const TruncatedComplex& x) {
  if (x.hi < x.lo) fail("WindowMismatch", "empty window");
  if ((int)x.obj.size() != x.hi - x.lo + 1)
    fail("WindowMismatch", "object count does not match window");
  if ((int)x.diff.size() != x.hi - x.lo)
    fail("WindowMismatch", "differential count does not match window");
  for (int k = x.lo; k < x.hi; ++k) {
    const BlockMorphism& d = x.diff[k - x.lo];
    if (d.degree != 0) fail("DegreeMismatch", "differential must have degree 0");
    if (!fo_equal(*x.B, d.src, x.at(k)) || !fo_equal(*x.B, d.dst, x.at(k + 1)))
      fail("WindowMismatch", "differential endpoints do not match objects");
  }
  for (int k = x.lo; k + 1 < x.hi; ++k) {
    BlockMorphism dd = bm_compose(*x.B, x.diff[k + 1 - x.lo], x.diff[k - x.lo]);
    if (!bm_is_zero(*x.B, dd))
      fail("NotAComplex", "d.d != 0 between degrees " + std::to_string(k) +
                              " and " + std::to_string(k + 2));
  }
}

}  // namespace

const FormalObject& TruncatedComplex::at(int k) const {
  if (!in_window(k)) fail("WindowMismatch", "degree outside window");
  return obj[k - lo];
}

const BlockMorphism& TruncatedComplex::d(int k) const {
  if (k < lo || k >= hi) fail("WindowMismatch", "differential outside window");
  return diff[k - lo];
}

TruncatedComplex cx_make(const Backend& B, int lo,
                         std::vector<FormalObject> objs,
                         std::vector<BlockMorphism> diffs, bool lo_artificial,
                         bool hi_artificial) {
  TruncatedComplex x;
  x.B = &B;
  x.lo = lo;
  x.hi = lo + (int)objs.size() - 1;
  x.lo_artificial = lo_artificial;
  x.hi_artificial = hi_artificial;
  x.obj = std::move(objs);
  x.diff = std::move(diffs);
  validate_complex(x);
  return x;
}

TruncatedComplex cx_single(const Backend& B, const FormalObject& x, int at) {
  return cx_make(B, at, {x}, {}, false, false);
}

TruncatedComplex cx_unit(const Backend& B) {
  return cx_single(B, fo_unit(B), 0);
}

TruncatedComplex cx_shift(const TruncatedComplex& x, int k) {
  TruncatedComplex r = x;
  r.lo = x.lo - k;
  r.hi = x.hi - k;
  if (k % 2 != 0)
    for (BlockMorphism& d : r.diff) d = bm_scale(*x.B, s_from_int(x.B->ring(), -1), d);
  return r;
}

bool cx_equal(const TruncatedComplex& x, const TruncatedComplex& y) {
  if (x.lo != y.lo || x.hi != y.hi) return false;
  if (x.lo_artificial != y.lo_artificial || x.hi_artificial != y.hi_artificial)
    return false;
  for (int k = x.lo; k <= x.hi; ++k)
    if (!fo_equal(*x.B, x.at(k), y.at(k))) return false;
  for (int k = x.lo; k < x.hi; ++k)
    if (!bm_equal(*x.B, x.d(k), y.d(k))) return false;
  return true;
}

std::string cx_to_string(const TruncatedComplex& x) {
  std::ostringstream os;
  os << (x.lo_artificial ? "(" : "[") << x.lo << ", " << x.hi
     << (x.hi_artificial ? ")" : "]") << ":";
  for (int k = x.lo; k <= x.hi; ++k)
    os << "\n  " << k << ": " << fo_to_string(x.at(k));
  return os.str();
}

bool chainmap_closed(const ChainMap& f, std::string* why) {
  const Backend& B = *f.src.B;
  Scalar sign = s_from_int(B.ring(), f.hdeg % 2 == 0 ? 1 : -1);
  auto get_comp = [&](int k) -> const BlockMorphism* {
    auto it = f.comp.find(k);
    return it == f.comp.end() ? nullptr : &it->second;
  };
  for (int k = f.src.lo; k <= f.src.hi; ++k) {
    int kd = k + f.hdeg;
    // A differential beyond a true edge is zero; beyond an artificial edge
    // it is unknown and the degree cannot be checked.
    bool src_d_zero = k >= f.src.hi;
    if (src_d_zero && f.src.hi_artificial) continue;
    bool dst_d_zero = kd < f.dst.lo || kd >= f.dst.hi;
    if (kd >= f.dst.hi && f.dst.hi_artificial) continue;
    if (kd < f.dst.lo && f.dst.lo_artificial) continue;

    const BlockMorphism* fk = get_comp(k);
    const BlockMorphism* fk1 = get_comp(k + 1);
    std::optional<BlockMorphism> lhs, rhs;
    if (!dst_d_zero && fk) lhs = bm_compose(B, f.dst.d(kd), *fk);
    if (!src_d_zero && fk1)
      rhs = bm_scale(B, sign, bm_compose(B, *fk1, f.src.d(k)));
    bool ok = true;
    if (lhs && rhs)
      ok = bm_equal(B, *lhs, *rhs);
    else if (lhs)
      ok = bm_is_zero(B, *lhs);
    else if (rhs)
      ok = bm_is_zero(B, *rhs);
    if (!ok) {
      if (why) *why = "chain condition fails at degree " + std::to_string(k);
      return false;
    }
  }
  return true;
}

ChainMap chainmap_identity(const TruncatedComplex& x) {
  ChainMap f;
  f.src = x;
  f.dst = x;
  f.hdeg = 0;
  for (int k = x.lo; k <= x.hi; ++k)
    f.comp[k] = bm_identity(*x.B, x.at(k));
  return f;
}

ChainMap chainmap_compose(const ChainMap& g, const ChainMap& f) {
  const Backend& B = *f.src.B;
  ChainMap r;
  r.src = f.src;
  r.dst = g.dst;
  r.hdeg = f.hdeg + g.hdeg;
  for (const auto& [k, fk] : f.comp) {
    auto gk = g.comp.find(k + f.hdeg);
    if (gk == g.comp.end()) continue;
    BlockMorphism c = bm_compose(B, gk->second, fk);
    if (!bm_is_zero(B, c)) r.comp[k] = std::move(c);
  }
  return r;
}

TruncatedComplex cx_cone(const ChainMap& f) {
  if (f.hdeg != 0) fail("NotSupported", "cone of a nonzero-degree map");
  std::string why;
  if (!chainmap_closed(f, &why)) fail("NotAComplex", "cone of a non-chain map: " + why);
  const Backend& B = *f.src.B;
  const TruncatedComplex& X = f.src;
  const TruncatedComplex& Y = f.dst;

  // Cone^k = X^{k+1} (+) Y^k.  A degree is kept only when both pieces are
  // determined; a true edge determines the complex (as zero) beyond it.
  long lo = std::numeric_limits<int>::min(), hi = std::numeric_limits<int>::max();
  bool lo_art = false, hi_art = false;
  if (X.lo_artificial && lo < X.lo - 1) { lo = X.lo - 1; lo_art = true; }
  if (Y.lo_artificial && lo < Y.lo) { lo = Y.lo; lo_art = true; }
  if (X.hi_artificial && hi > X.hi - 1) { hi = X.hi - 1; hi_art = true; }
  if (Y.hi_artificial && hi > Y.hi) { hi = Y.hi; hi_art = true; }
  long content_lo = std::min(X.lo - 1, Y.lo);
  long content_hi = std::max(X.hi - 1, Y.hi);
  lo = std::max(lo, content_lo);
  hi = std::min(hi, content_hi);
  if (lo > hi) fail("WindowMismatch", "cone window is empty");

  auto xpart = [&](int k) {
    return X.in_window(k + 1) ? X.at(k + 1) : FormalObject{};
  };
  auto ypart = [&](int k) { return Y.in_window(k) ? Y.at(k) : FormalObject{}; };

  std::vector<FormalObject> objs;
  for (int k = (int)lo; k <= (int)hi; ++k)
    objs.push_back(fo_direct_sum(xpart(k), ypart(k)));
  std::vector<BlockMorphism> diffs;
  Scalar minus = s_from_int(B.ring(), -1);
  for (int k = (int)lo; k < (int)hi; ++k) {
    BlockMorphism d = bm_zero(objs[k - lo], objs[k + 1 - lo], 0);
    int nx = (int)xpart(k).size();
    int nxd = (int)xpart(k + 1).size();
    if (k + 1 >= X.lo && k + 2 <= X.hi) {
      const BlockMorphism& dx = X.d(k + 1);
      for (const auto& [key, e] : dx.entries)
        bm_set(B, d, key.first, key.second, B.scale(minus, e));
    }
    if (k >= Y.lo && k + 1 <= Y.hi) {
      const BlockMorphism& dy = Y.d(k);
      for (const auto& [key, e] : dy.entries)
        bm_set(B, d, nxd + key.first, nx + key.second, e);
    }
    auto fk = f.comp.find(k + 1);
    if (fk != f.comp.end())
      for (const auto& [key, e] : fk->second.entries)
        bm_set(B, d, nxd + key.first, key.second, e);
    diffs.push_back(std::move(d));
  }
  return cx_make(B, (int)lo, std::move(objs), std::move(diffs), lo_art, hi_art);
}

TruncatedComplex cx_tensor(const TruncatedComplex& x,
                           const TruncatedComplex& y) {
  const Backend& B = *x.B;

  // Degree k of the product is complete only if every pair (i, k-i) that
  // could contribute is determined on both sides.
  long lo = std::numeric_limits<int>::min(), hi = std::numeric_limits<int>::max();
  bool lo_art = false, hi_art = false;
  if (x.lo_artificial && lo < (long)x.lo + y.hi) { lo = (long)x.lo + y.hi; lo_art = true; }
  if (y.lo_artificial && lo < (long)y.lo + x.hi) { lo = (long)y.lo + x.hi; lo_art = true; }
  if (x.hi_artificial && hi > (long)x.hi + y.lo) { hi = (long)x.hi + y.lo; hi_art = true; }
  if (y.hi_artificial && hi > (long)y.hi + x.lo) { hi = (long)y.hi + x.lo; hi_art = true; }
  lo = std::max(lo, (long)x.lo + y.lo);
  hi = std::min(hi, (long)x.hi + y.hi);
  if (lo > hi) fail("WindowMismatch", "tensor window is empty");

  // Per degree: pairs (i, j = k - i) with i ascending, plus the offset of
  // each pair's block inside the concatenated object.
  struct Pair { int i, j, offset; };
  std::vector<std::vector<Pair>> pairs(hi - lo + 1);
  std::vector<FormalObject> objs(hi - lo + 1);
  for (int k = (int)lo; k <= (int)hi; ++k) {
    int off = 0;
    for (int i = std::max(x.lo, k - y.hi); i <= std::min(x.hi, k - y.lo); ++i) {
      int j = k - i;
      FormalObject part = tensor_objects(B, x.at(i), y.at(j));
      pairs[k - lo].push_back({i, j, off});
      off += (int)part.size();
      for (auto& s : part.summands) objs[k - lo].summands.push_back(std::move(s));
    }
  }

  auto find_pair = [&](int k, int i) -> const Pair* {
    for (const Pair& p : pairs[k - lo])
      if (p.i == i) return &p;
    return nullptr;
  };

  std::vector<BlockMorphism> diffs;
  for (int k = (int)lo; k < (int)hi; ++k) {
    BlockMorphism d = bm_zero(objs[k - lo], objs[k + 1 - lo], 0);
    for (const Pair& p : pairs[k - lo]) {
      if (p.i + 1 <= x.hi) {
        const Pair* q = find_pair(k + 1, p.i + 1);
        if (q) {
          BlockMorphism part = tensor_morphisms(
              B, x.d(p.i), bm_identity(B, y.at(p.j)));
          for (const auto& [key, e] : part.entries)
            bm_set(B, d, q->offset + key.first, p.offset + key.second, e);
        }
      }
      if (p.j + 1 <= y.hi) {
        const Pair* q = find_pair(k + 1, p.i);
        if (q) {
          BlockMorphism part = tensor_morphisms(
              B, bm_identity(B, x.at(p.i)), y.d(p.j));
          Scalar sgn = s_from_int(B.ring(), p.i % 2 == 0 ? 1 : -1);
          for (const auto& [key, e] : part.entries)
            bm_set(B, d, q->offset + key.first, p.offset + key.second,
                   B.scale(sgn, e));
        }
      }
    }
    diffs.push_back(std::move(d));
  }
  return cx_make(B, (int)lo, std::move(objs), std::move(diffs), lo_art, hi_art);
}

TruncatedComplex cx_tensor_power(const TruncatedComplex& x, int n) {
  if (n < 0) fail("NotSupported", "negative tensor power");
  TruncatedComplex r = cx_unit(*x.B);
  for (int i = 0; i < n; ++i) r = cx_tensor(r, x);
  return r;
}

namespace {

// Is this entry an invertible multiple of the identity between equal
// summands?  Returns the unit, or nullopt.
std::optional<Scalar> unit_identity_entry(const Backend& B, const Summand& src,
                                          const Summand& dst,
                                          const ElemPtr& e) {
  if (!summand_equal(B, src, dst)) return std::nullopt;
  if (B.is_zero(e)) return std::nullopt;
  if (!src.idem) {
    std::optional<Scalar> c = B.identity_factor(e);
    if (c && s_is_unit(B.ring(), *c)) return c;
    return std::nullopt;
  }
  // Image summand: test against small units times the idempotent.
  for (int u : {1, -1}) {
    Scalar su = s_from_int(B.ring(), u);
    if (B.equal(e, B.scale(su, src.idem))) return su;
  }
  return std::nullopt;
}

struct StepMaps {
  // Per-degree replacement maps for one cancellation, identity elsewhere.
  std::map<int, BlockMorphism> f;  // old -> new
  std::map<int, BlockMorphism> g;  // new -> old
  std::map<int, BlockMorphism> h;  // old^k -> old^{k-1}
};

BlockMorphism keep_map(const Backend& B, const FormalObject& from, int drop,
                       bool as_projection) {
  FormalObject kept;
  for (int i = 0; i < (int)from.size(); ++i)
    if (i != drop) kept.summands.push_back(from.summands[i]);
  const FormalObject& src = as_projection ? from : kept;
  const FormalObject& dst = as_projection ? kept : from;
  BlockMorphism m = bm_zero(src, dst, 0);
  int kept_idx = 0;
  for (int i = 0; i < (int)from.size(); ++i) {
    if (i == drop) continue;
    const Summand& s = from.summands[i];
    ElemPtr id = s.idem ? s.idem : B.identity(s.word);
    if (as_projection)
      bm_set(B, m, kept_idx, i, id);
    else
      bm_set(B, m, i, kept_idx, id);
    ++kept_idx;
  }
  return m;
}

}  // namespace

ReduceResult gaussian_reduce(const TruncatedComplex& x, bool with_witness) {
  const Backend& B = *x.B;
  ReduceResult res;
  res.cx = x;
  HomotopyWitness acc;
  if (with_witness) {
    for (int k = x.lo; k <= x.hi; ++k) {
      acc.f[k] = bm_identity(B, x.at(k));
      acc.g[k] = bm_identity(B, x.at(k));
    }
  }

  bool progress = true;
  while (progress) {
    progress = false;
    for (int k = res.cx.lo; k < res.cx.hi && !progress; ++k) {
      const BlockMorphism& dk = res.cx.d(k);
      for (const auto& [key, e] : dk.entries) {
        int r = key.first, c = key.second;
        std::optional<Scalar> u = unit_identity_entry(
            B, res.cx.at(k).summands[c], res.cx.at(k + 1).summands[r], e);
        if (!u) continue;

        // Cancel source summand c in degree k against target summand r in
        // degree k+1.
        const Summand& sc = res.cx.at(k).summands[c];
        ElemPtr phi_inv =
            B.scale(s_inv(B.ring(), *u), sc.idem ? sc.idem : B.identity(sc.word));
        Scalar minus = s_from_int(B.ring(), -1);

        StepMaps step;
        if (with_witness) {
          step.f[k] = keep_map(B, res.cx.at(k), c, true);
          step.g[k] = keep_map(B, res.cx.at(k), c, false);
          // g^k picks up -phi^{-1} . d(r, j) into the dropped summand.
          for (const auto& [key2, e2] : dk.entries) {
            if (key2.first != r || key2.second == c) continue;
            int new_j = key2.second - (key2.second > c ? 1 : 0);
            bm_set(B, step.g[k], c, new_j,
                   B.scale(minus, B.compose(phi_inv, e2)));
          }
          step.f[k + 1] = keep_map(B, res.cx.at(k + 1), r, true);
          step.g[k + 1] = keep_map(B, res.cx.at(k + 1), r, false);
          // f^{k+1} picks up -d(i, c) . phi^{-1} out of the dropped summand.
          for (const auto& [key2, e2] : dk.entries) {
            if (key2.second != c || key2.first == r) continue;
            int new_i = key2.first - (key2.first > r ? 1 : 0);
            bm_set(B, step.f[k + 1], new_i, r,
                   B.scale(minus, B.compose(e2, phi_inv)));
          }
          BlockMorphism hk1 = bm_zero(res.cx.at(k + 1), res.cx.at(k), 0);
          bm_set(B, hk1, c, r, phi_inv);
          step.h[k + 1] = std::move(hk1);
        }

        // Rebuild the three affected differentials.
        FormalObject new_k, new_k1;
        for (int i = 0; i < (int)res.cx.at(k).size(); ++i)
          if (i != c) new_k.summands.push_back(res.cx.at(k).summands[i]);
        for (int i = 0; i < (int)res.cx.at(k + 1).size(); ++i)
          if (i != r) new_k1.summands.push_back(res.cx.at(k + 1).summands[i]);

        BlockMorphism nd = bm_zero(new_k, new_k1, 0);
        for (const auto& [key2, e2] : dk.entries) {
          if (key2.first == r || key2.second == c) continue;
          bm_set(B, nd, key2.first - (key2.first > r ? 1 : 0),
                 key2.second - (key2.second > c ? 1 : 0), e2);
        }
        for (const auto& [kr, er] : dk.entries) {
          if (kr.first != r || kr.second == c) continue;
          for (const auto& [kc, ec] : dk.entries) {
            if (kc.second != c || kc.first == r) continue;
            ElemPtr corr = B.scale(
                minus, B.compose(ec, B.compose(phi_inv, er)));
            int ni = kc.first - (kc.first > r ? 1 : 0);
            int nj = kr.second - (kr.second > c ? 1 : 0);
            bm_set(B, nd, ni, nj, B.add(bm_entry(B, nd, ni, nj), corr));
          }
        }

        std::vector<FormalObject> objs = res.cx.obj;
        std::vector<BlockMorphism> diffs = res.cx.diff;
        objs[k - res.cx.lo] = new_k;
        objs[k + 1 - res.cx.lo] = new_k1;
        diffs[k - res.cx.lo] = std::move(nd);
        if (k - 1 >= res.cx.lo) {
          const BlockMorphism& prev = res.cx.d(k - 1);
          BlockMorphism np = bm_zero(res.cx.at(k - 1), new_k, 0);
          for (const auto& [key2, e2] : prev.entries) {
            if (key2.first == c) continue;
            bm_set(B, np, key2.first - (key2.first > c ? 1 : 0), key2.second,
                   e2);
          }
          diffs[k - 1 - res.cx.lo] = std::move(np);
        }
        if (k + 1 < res.cx.hi) {
          const BlockMorphism& next = res.cx.d(k + 1);
          BlockMorphism nn = bm_zero(new_k1, res.cx.at(k + 2), 0);
          for (const auto& [key2, e2] : next.entries) {
            if (key2.second == r) continue;
            bm_set(B, nn, key2.first, key2.second - (key2.second > r ? 1 : 0),
                   e2);
          }
          diffs[k + 1 - res.cx.lo] = std::move(nn);
        }
        res.cx.obj = std::move(objs);
        res.cx.diff = std::move(diffs);

        if (with_witness) {
          // Fold the step into the accumulated equivalence:
          // f = fs . f, g = g . gs, h = h + g_old . hs . f_old.
          std::map<int, BlockMorphism> f_old = acc.f, g_old = acc.g;
          for (const auto& [deg, hs] : step.h) {
            BlockMorphism add = bm_compose(
                B, g_old.at(deg - 1), bm_compose(B, hs, f_old.at(deg)));
            auto it = acc.h.find(deg);
            if (it == acc.h.end())
              acc.h[deg] = std::move(add);
            else
              it->second = bm_add(B, it->second, add);
          }
          for (const auto& [deg, fs] : step.f)
            acc.f[deg] = bm_compose(B, fs, f_old.at(deg));
          for (const auto& [deg, gs] : step.g)
            acc.g[deg] = bm_compose(B, g_old.at(deg), gs);
        }

        ++res.steps;
        progress = true;
        break;
      }
    }
  }
  if (with_witness) res.witness = std::move(acc);
  return res;
}

bool check_reduction_witness(const TruncatedComplex& orig,
                             const TruncatedComplex& red,
                             const HomotopyWitness& w, std::string* why) {
  const Backend& B = *orig.B;
  auto fails = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  ChainMap f{orig, red, 0, w.f}, g{red, orig, 0, w.g};
  std::string detail;
  if (!chainmap_closed(f, &detail)) return fails("f: " + detail);
  if (!chainmap_closed(g, &detail)) return fails("g: " + detail);
  for (int k = red.lo; k <= red.hi; ++k) {
    BlockMorphism fg = bm_compose(B, w.f.at(k), w.g.at(k));
    if (!bm_equal(B, fg, bm_identity(B, red.at(k))))
      return fails("f g != id at degree " + std::to_string(k));
  }
  for (int k = orig.lo; k <= orig.hi; ++k) {
    BlockMorphism lhs = bm_sub(B, bm_identity(B, orig.at(k)),
                               bm_compose(B, w.g.at(k), w.f.at(k)));
    BlockMorphism rhs = bm_zero(orig.at(k), orig.at(k), 0);
    auto hk = w.h.find(k);
    if (hk != w.h.end() && k - 1 >= orig.lo)
      rhs = bm_add(B, rhs, bm_compose(B, orig.d(k - 1), hk->second));
    auto hk1 = w.h.find(k + 1);
    if (hk1 != w.h.end() && k < orig.hi)
      rhs = bm_add(B, rhs, bm_compose(B, hk1->second, orig.d(k)));
    if (!bm_equal(B, lhs, rhs))
      return fails("id - g f != d h + h d at degree " + std::to_string(k));
  }
  return true;
}

NullHomotopyCheck check_nullhomotopy(const TruncatedComplex& x,
                                     const std::map<int, BlockMorphism>& h,
                                     int from, int to) {
  const Backend& B = *x.B;
  NullHomotopyCheck res;
  for (int k = from; k <= to; ++k) {
    if (!x.in_window(k)) {
      res.detail = "degree " + std::to_string(k) + " outside window";
      return res;
    }
    BlockMorphism sum = bm_zero(x.at(k), x.at(k), 0);
    auto hk = h.find(k);
    if (hk != h.end()) {
      if (k - 1 < x.lo) {
        res.detail = "h at degree " + std::to_string(k) +
                     " needs a differential outside the window";
        return res;
      }
      sum = bm_add(B, sum, bm_compose(B, x.d(k - 1), hk->second));
    }
    auto hk1 = h.find(k + 1);
    if (hk1 != h.end()) {
      if (k >= x.hi) {
        res.detail = "h at degree " + std::to_string(k + 1) +
                     " needs a differential outside the window";
        return res;
      }
      sum = bm_add(B, sum, bm_compose(B, hk1->second, x.d(k)));
    }
    if (!bm_equal(B, sum, bm_identity(B, x.at(k)))) {
      res.detail = "d h + h d != id at degree " + std::to_string(k);
      return res;
    }
  }
  res.ok = true;
  return res;
}

namespace {

std::string summand_sort_key(const Summand& s) {
  return s.word + "\x01" + std::to_string(100000 + s.shift) + "\x01" +
         s.idem_tag;
}

// Leading coefficient of an entry in a deterministic coordinate order.
std::optional<Scalar> leading_coeff(const Backend& B, const Summand& src,
                                    const Summand& dst, const ElemPtr& e) {
  if (B.is_zero(e)) return std::nullopt;
  if (src.idem || dst.idem) {
    // Lazy images have no coordinate system; recognize +-1 multiples of a
    // shared idempotent and leave anything else unnormalized.
    if (summand_equal(B, src, dst)) {
      for (int u : {1, -1}) {
        Scalar su = s_from_int(B.ring(), u);
        if (B.equal(e, B.scale(su, src.idem))) return su;
      }
    }
    return std::nullopt;
  }
  std::vector<Scalar> co = B.elem_coords(e);
  for (const Scalar& c : co)
    if (!s_is_zero(c)) return c;
  return std::nullopt;
}

}  // namespace

TruncatedComplex cx_canonicalize(const TruncatedComplex& x) {
  const Backend& B = *x.B;
  TruncatedComplex r = x;

  // Sort summands in each degree, permuting adjacent differentials.
  for (int k = r.lo; k <= r.hi; ++k) {
    FormalObject& o = r.obj[k - r.lo];
    std::vector<int> perm(o.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
      return summand_sort_key(o.summands[a]) < summand_sort_key(o.summands[b]);
    });
    FormalObject sorted;
    std::vector<int> inv(o.size());
    for (int i = 0; i < (int)perm.size(); ++i) {
      sorted.summands.push_back(o.summands[perm[i]]);
      inv[perm[i]] = i;
    }
    if (k < r.hi) {
      BlockMorphism nd = bm_zero(sorted, r.at(k + 1), 0);
      for (const auto& [key, e] : r.d(k).entries)
        bm_set(B, nd, key.first, inv[key.second], e);
      r.diff[k - r.lo] = std::move(nd);
    }
    if (k > r.lo) {
      BlockMorphism nd = bm_zero(r.at(k - 1), sorted, 0);
      for (const auto& [key, e] : r.d(k - 1).entries)
        bm_set(B, nd, inv[key.first], key.second, e);
      r.diff[k - 1 - r.lo] = std::move(nd);
    }
    o = std::move(sorted);
  }

  // Unit rescaling sweep anchored at the top: normalize each summand by the
  // leading coefficient of its first outgoing entry.  Working downward, the
  // targets of d^k are already fixed when degree k is processed, so the
  // result on a degree depends only on the complex at and above it.
  for (int k = r.hi - 1; k >= r.lo; --k) {
    for (int j = 0; j < (int)r.at(k).size(); ++j) {
      const BlockMorphism& dk = r.d(k);
      std::optional<Scalar> lead;
      for (int i = 0; i < (int)r.at(k + 1).size() && !lead; ++i)
        lead = leading_coeff(B, r.at(k).summands[j], r.at(k + 1).summands[i],
                             bm_entry(B, dk, i, j));
      if (!lead) continue;
      Scalar u;  // rescale summand j so the leading coefficient is canonical
      if (B.ring().kind == RingKind::Integers)
        u = s_from_int(B.ring(), lead->num < 0 ? -1 : 1);
      else
        u = s_inv(B.ring(), *lead);
      if (s_is_one(u)) continue;
      BlockMorphism nd = r.d(k);
      for (auto& [key, e] : nd.entries)
        if (key.second == j) e = B.scale(u, e);
      r.diff[k - r.lo] = std::move(nd);
      if (k > r.lo) {
        Scalar uinv = s_inv(B.ring(), u);
        BlockMorphism np = r.d(k - 1);
        for (auto& [key, e] : np.entries)
          if (key.first == j) e = B.scale(uinv, e);
        r.diff[k - 1 - r.lo] = std::move(np);
      }
    }
  }
  validate_complex(r);
  return r;
}

bool cx_window_equal(const TruncatedComplex& x, const TruncatedComplex& y,
                     int from, int to) {
  if (!x.in_window(from) || !x.in_window(to)) return false;
  if (!y.in_window(from) || !y.in_window(to)) return false;
  TruncatedComplex cx = cx_canonicalize(x);
  TruncatedComplex cy = cx_canonicalize(y);
  for (int k = from; k <= to; ++k)
    if (!fo_equal(*x.B, cx.at(k), cy.at(k))) return false;
  for (int k = from; k < to; ++k)
    if (!bm_equal(*x.B, cx.d(k), cy.d(k))) return false;
  return true;
}

bool cx_is_zero_on(const TruncatedComplex& x, int from, int to) {
  for (int k = from; k <= to; ++k) {
    if (!x.in_window(k)) return false;
    if (!x.at(k).summands.empty()) return false;
  }
  return true;
}

EulerResult euler_series(const TruncatedComplex& x) {
  EulerResult res;
  res.exact = !x.lo_artificial && !x.hi_artificial;
  res.edge_min_shift = std::numeric_limits<int>::max();
  const Ring& R = x.B->ring();
  for (int k = x.lo; k <= x.hi; ++k) {
    Scalar sgn = s_from_int(R, k % 2 == 0 ? 1 : -1);
    bool edge = (k == x.lo && x.lo_artificial) || (k == x.hi && x.hi_artificial);
    for (const Summand& s : x.at(k).summands) {
      std::string key = s.idem ? s.idem_tag : s.word;
      auto it = res.classes.find(key);
      if (it == res.classes.end())
        it = res.classes.emplace(key, LaurentPoly::zero(R)).first;
      it->second = it->second.add(LaurentPoly::monomial(R, s.shift, sgn));
      if (edge) res.edge_min_shift = std::min(res.edge_min_shift, s.shift);
    }
  }
  if (res.edge_min_shift == std::numeric_limits<int>::max())
    res.edge_min_shift = 0;
  return res;
}

}  // namespace catidem
