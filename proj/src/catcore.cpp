#include "catidem/catcore.hpp"

#include <algorithm>
#include <sstream>

namespace catidem {

bool Backend::equal(const ElemPtr& a, const ElemPtr& b) const {
  if (elem_src(a) != elem_src(b) || elem_dst(a) != elem_dst(b)) return false;
  if (elem_deg(a) != elem_deg(b)) return is_zero(a) && is_zero(b);
  return is_zero(sub(a, b));
}

ElemPtr Backend::sub(const ElemPtr& a, const ElemPtr& b) const {
  return add(a, scale(s_from_int(ring(), -1), b));
}

// ---- formal objects ----

FormalObject fo_single(const std::string& word, int shift) {
  FormalObject x;
  x.summands.push_back({word, shift, nullptr, ""});
  return x;
}

FormalObject fo_unit(const Backend& B) { return fo_single(B.unit_word(), 0); }

FormalObject fo_shifted(const FormalObject& x, int shift) {
  FormalObject out = x;
  for (auto& s : out.summands) s.shift += shift;
  return out;
}

FormalObject fo_direct_sum(const FormalObject& a, const FormalObject& b) {
  FormalObject out = a;
  out.summands.insert(out.summands.end(), b.summands.begin(),
                      b.summands.end());
  return out;
}

bool summand_equal(const Backend& B, const Summand& a, const Summand& b) {
  if (a.word != b.word || a.shift != b.shift) return false;
  if (!a.idem && !b.idem) return true;
  if (!a.idem || !b.idem) return false;
  return B.equal(a.idem, b.idem);
}

bool fo_equal(const Backend& B, const FormalObject& a, const FormalObject& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    if (!summand_equal(B, a.summands[i], b.summands[i])) return false;
  return true;
}

std::string fo_to_string(const FormalObject& x) {
  if (x.summands.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& s : x.summands) {
    if (!first) os << " + ";
    if (s.shift != 0) os << "q^" << s.shift << " ";
    if (s.idem)
      os << "im(" << (s.idem_tag.empty() ? "e" : s.idem_tag) << "|" << s.word
         << ")";
    else
      os << s.word;
    first = false;
  }
  return os.str();
}

// ---- block morphisms ----

BlockMorphism bm_zero(const FormalObject& src, const FormalObject& dst,
                      int degree) {
  return {src, dst, degree, {}};
}

BlockMorphism bm_identity(const Backend& B, const FormalObject& x) {
  BlockMorphism m = bm_zero(x, x, 0);
  for (int i = 0; i < x.size(); ++i) {
    const Summand& s = x.summands[i];
    m.entries[{i, i}] = s.idem ? s.idem : B.identity(s.word);
  }
  return m;
}

void bm_set(const Backend& B, BlockMorphism& m, int i, int j,
            const ElemPtr& e) {
  if (i < 0 || i >= m.dst.size() || j < 0 || j >= m.src.size())
    fail("ShapeMismatch", "block entry out of range");
  const Summand& s = m.src.summands[j];
  const Summand& d = m.dst.summands[i];
  if (B.elem_src(e) != s.word || B.elem_dst(e) != d.word)
    fail("NotComposable", "entry words do not match summands: " +
                              B.elem_src(e) + "->" + B.elem_dst(e) + " vs " +
                              s.word + "->" + d.word);
  int want = m.degree + s.shift - d.shift;
  if (B.elem_deg(e) != want)
    fail("DegreeMismatch",
         "entry degree " + std::to_string(B.elem_deg(e)) + ", expected " +
             std::to_string(want));
  if (B.is_zero(e))
    m.entries.erase({i, j});
  else
    m.entries[{i, j}] = e;
}

ElemPtr bm_entry(const Backend& B, const BlockMorphism& m, int i, int j) {
  auto it = m.entries.find({i, j});
  if (it != m.entries.end()) return it->second;
  const Summand& s = m.src.summands[j];
  const Summand& d = m.dst.summands[i];
  return B.zero_elem(s.word, d.word, m.degree + s.shift - d.shift);
}

BlockMorphism bm_compose(const Backend& B, const BlockMorphism& g,
                         const BlockMorphism& f) {
  if (!fo_equal(B, g.src, f.dst))
    fail("NotComposable", "middle objects differ: " + fo_to_string(g.src) +
                              " vs " + fo_to_string(f.dst));
  BlockMorphism out = bm_zero(f.src, g.dst, f.degree + g.degree);
  for (const auto& [gk, ge] : g.entries)
    for (const auto& [fk, fe] : f.entries) {
      if (gk.second != fk.first) continue;
      ElemPtr prod = B.compose(ge, fe);
      if (B.is_zero(prod)) continue;
      auto key = std::make_pair(gk.first, fk.second);
      auto it = out.entries.find(key);
      if (it == out.entries.end())
        out.entries[key] = prod;
      else {
        ElemPtr sum = B.add(it->second, prod);
        if (B.is_zero(sum))
          out.entries.erase(it);
        else
          it->second = sum;
      }
    }
  return out;
}

BlockMorphism bm_add(const Backend& B, const BlockMorphism& a,
                     const BlockMorphism& b) {
  if (!fo_equal(B, a.src, b.src) || !fo_equal(B, a.dst, b.dst))
    fail("ShapeMismatch", "adding morphisms with different endpoints");
  if (a.degree != b.degree) {
    if (a.entries.empty()) return {a.src, a.dst, b.degree, b.entries};
    if (b.entries.empty()) return a;
    fail("DegreeMismatch", "adding morphisms of different degrees");
  }
  BlockMorphism out = a;
  for (const auto& [k, e] : b.entries) {
    auto it = out.entries.find(k);
    if (it == out.entries.end())
      out.entries[k] = e;
    else {
      ElemPtr sum = B.add(it->second, e);
      if (B.is_zero(sum))
        out.entries.erase(it);
      else
        it->second = sum;
    }
  }
  return out;
}

BlockMorphism bm_sub(const Backend& B, const BlockMorphism& a,
                     const BlockMorphism& b) {
  return bm_add(B, a, bm_scale(B, s_from_int(B.ring(), -1), b));
}

BlockMorphism bm_scale(const Backend& B, const Scalar& c,
                       const BlockMorphism& a) {
  BlockMorphism out = bm_zero(a.src, a.dst, a.degree);
  if (s_is_zero(c)) return out;
  for (const auto& [k, e] : a.entries) {
    ElemPtr se = B.scale(c, e);
    if (!B.is_zero(se)) out.entries[k] = se;
  }
  return out;
}

BlockMorphism bm_shift(const BlockMorphism& a, int shift) {
  BlockMorphism out = a;
  out.src = fo_shifted(a.src, shift);
  out.dst = fo_shifted(a.dst, shift);
  return out;
}

bool bm_is_zero(const Backend& B, const BlockMorphism& m) {
  for (const auto& [k, e] : m.entries)
    if (!B.is_zero(e)) return false;
  return true;
}

bool bm_equal(const Backend& B, const BlockMorphism& a,
              const BlockMorphism& b) {
  if (!fo_equal(B, a.src, b.src) || !fo_equal(B, a.dst, b.dst)) return false;
  if (a.degree != b.degree)
    return bm_is_zero(B, a) && bm_is_zero(B, b);
  return bm_is_zero(B, bm_sub(B, a, b));
}

BlockMorphism bm_direct_sum(const Backend& B, const BlockMorphism& f,
                            const BlockMorphism& g) {
  if (f.degree != g.degree && !f.entries.empty() && !g.entries.empty())
    fail("DegreeMismatch", "direct sum of morphisms of different degrees");
  int degree = f.entries.empty() ? g.degree : f.degree;
  BlockMorphism out = bm_zero(fo_direct_sum(f.src, g.src),
                              fo_direct_sum(f.dst, g.dst), degree);
  for (const auto& [k, e] : f.entries) out.entries[k] = e;
  int ro = f.dst.size(), co = f.src.size();
  for (const auto& [k, e] : g.entries)
    out.entries[{k.first + ro, k.second + co}] = e;
  (void)B;
  return out;
}

std::string bm_to_string(const Backend& B, const BlockMorphism& m) {
  std::ostringstream os;
  os << fo_to_string(m.src) << " -> " << fo_to_string(m.dst) << " (deg "
     << m.degree << ")";
  for (const auto& [k, e] : m.entries)
    os << "\n  [" << k.first << "," << k.second << "] " << B.elem_repr(e);
  return os.str();
}

// ---- tensor products ----

TensorResult tensor_objects_full(const Backend& B, const FormalObject& x,
                                 const FormalObject& y) {
  TensorResult out;
  for (const auto& sx : x.summands)
    for (const auto& sy : y.summands) {
      int begin = out.nf.size();
      if (sx.idem || sy.idem) {
        if (!B.trivial_concat())
          fail("NotSupported",
               "image summands can be tensored only over concatenation "
               "backends; split them first");
        ElemPtr ex = sx.idem ? sx.idem : B.identity(sx.word);
        ElemPtr ey = sy.idem ? sy.idem : B.identity(sy.word);
        std::string tag;
        if (sx.idem) tag += sx.idem_tag;
        if (sy.idem) {
          if (!tag.empty()) tag += "*";
          tag += sy.idem_tag;
        }
        out.nf.summands.push_back({B.concat(sx.word, sy.word),
                                   sx.shift + sy.shift,
                                   B.tensor_elems(ex, ey), tag});
      } else {
        TensorNF nf = B.tensor_words(sx.word, sy.word);
        for (const auto& [w, extra] : nf.parts)
          out.nf.summands.push_back({w, sx.shift + sy.shift + extra, nullptr,
                                     ""});
      }
      out.ranges.push_back({begin, out.nf.size()});
    }
  std::vector<int> order(out.nf.summands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const Summand& sa = out.nf.summands[a];
    const Summand& sb = out.nf.summands[b];
    if (sa.word != sb.word) return sa.word < sb.word;
    if (sa.idem_tag != sb.idem_tag) return sa.idem_tag < sb.idem_tag;
    return sa.shift < sb.shift;
  });
  FormalObject sorted;
  sorted.summands.reserve(order.size());
  out.pos.resize(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) {
    sorted.summands.push_back(std::move(out.nf.summands[order[p]]));
    out.pos[order[p]] = p;
  }
  out.nf = std::move(sorted);
  return out;
}

FormalObject tensor_objects(const Backend& B, const FormalObject& x,
                            const FormalObject& y) {
  return tensor_objects_full(B, x, y).nf;
}

BlockMorphism tensor_morphisms(const Backend& B, const BlockMorphism& f,
                               const BlockMorphism& g) {
  TensorResult ts = tensor_objects_full(B, f.src, g.src);
  TensorResult td = tensor_objects_full(B, f.dst, g.dst);
  BlockMorphism out = bm_zero(ts.nf, td.nf, f.degree + g.degree);
  const int ys = g.src.size(), yd = g.dst.size();
  for (const auto& [fk, fe] : f.entries)
    for (const auto& [gk, ge] : g.entries) {
      ElemPtr raw = B.tensor_elems(fe, ge);
      int src_pair = fk.second * ys + gk.second;
      int dst_pair = fk.first * yd + gk.first;
      if (B.trivial_concat()) {
        bm_set(B, out, td.pos[td.ranges[dst_pair].first],
               ts.pos[ts.ranges[src_pair].first], raw);
        continue;
      }
      TensorNF nfs = B.tensor_words(f.src.summands[fk.second].word,
                                    g.src.summands[gk.second].word);
      TensorNF nfd = B.tensor_words(f.dst.summands[fk.first].word,
                                    g.dst.summands[gk.first].word);
      for (std::size_t p = 0; p < nfs.parts.size(); ++p)
        for (std::size_t p2 = 0; p2 < nfd.parts.size(); ++p2) {
          ElemPtr e =
              B.compose(nfd.proj[p2], B.compose(raw, nfs.incl[p]));
          if (B.is_zero(e)) continue;
          bm_set(B, out,
                 td.pos[td.ranges[dst_pair].first + static_cast<int>(p2)],
                 ts.pos[ts.ranges[src_pair].first + static_cast<int>(p)], e);
        }
    }
  return out;
}

FormalObject tensor_many(const Backend& B,
                         const std::vector<FormalObject>& xs) {
  FormalObject acc = fo_unit(B);
  for (const auto& x : xs) acc = tensor_objects(B, acc, x);
  return acc;
}

BlockMorphism tensor_many_morphisms(const Backend& B,
                                    const std::vector<BlockMorphism>& fs) {
  BlockMorphism acc = bm_identity(B, fo_unit(B));
  for (const auto& f : fs) acc = tensor_morphisms(B, acc, f);
  return acc;
}

FormalObject tensor_power(const Backend& B, const FormalObject& x, int n) {
  if (n < 0) fail("ShapeMismatch", "negative tensor power");
  FormalObject acc = fo_unit(B);
  for (int i = 0; i < n; ++i) acc = tensor_objects(B, acc, x);
  return acc;
}

static void require_plain(const FormalObject& x, const char* what) {
  for (const auto& s : x.summands)
    if (s.idem)
      fail("NotSupported",
           std::string(what) + " is not defined on lazy image summands");
}

// ---- tensor decompositions tracked against flat concatenations ----

FlatDecomp flat_leaf(const Backend& B, const FormalObject& x) {
  require_plain(x, "flattening");
  FlatDecomp out;
  out.obj = x;
  out.leaves.push_back(x);
  out.choice.resize(x.size());
  out.incl.resize(x.size());
  out.proj.resize(x.size());
  for (int i = 0; i < x.size(); ++i) {
    out.choice[i] = {i};
    out.incl[i] = B.identity(x.summands[i].word);
    out.proj[i] = out.incl[i];
  }
  return out;
}

FlatDecomp flat_unit(const Backend& B) {
  FlatDecomp out;
  out.obj = fo_unit(B);
  out.choice.push_back({});
  out.incl.push_back(B.identity(B.unit_word()));
  out.proj.push_back(out.incl.back());
  return out;
}

FlatDecomp flat_tensor(const Backend& B, const FlatDecomp& x,
                       const FlatDecomp& y) {
  require_plain(x.obj, "flattening");
  require_plain(y.obj, "flattening");
  TensorResult tr = tensor_objects_full(B, x.obj, y.obj);
  FlatDecomp out;
  out.obj = tr.nf;
  out.leaves = x.leaves;
  out.leaves.insert(out.leaves.end(), y.leaves.begin(), y.leaves.end());
  const int n = out.obj.size();
  out.choice.resize(n);
  out.incl.resize(n);
  out.proj.resize(n);
  int pair = 0;
  for (int i = 0; i < x.obj.size(); ++i)
    for (int j = 0; j < y.obj.size(); ++j, ++pair) {
      TensorNF tn = B.tensor_words(x.obj.summands[i].word,
                                   y.obj.summands[j].word);
      ElemPtr big_in = B.tensor_elems(x.incl[i], y.incl[j]);
      ElemPtr big_pr = B.tensor_elems(x.proj[i], y.proj[j]);
      for (std::size_t k = 0; k < tn.parts.size(); ++k) {
        int p = tr.pos[tr.ranges[pair].first + static_cast<int>(k)];
        out.choice[p] = x.choice[i];
        out.choice[p].insert(out.choice[p].end(), y.choice[j].begin(),
                             y.choice[j].end());
        out.incl[p] = B.compose(big_in, tn.incl[k]);
        out.proj[p] = B.compose(tn.proj[k], big_pr);
      }
    }
  return out;
}

BlockMorphism flat_transport(const Backend& B, const FlatDecomp& from,
                             const FlatDecomp& to) {
  if (from.leaves.size() != to.leaves.size())
    fail("ShapeMismatch", "flat_transport: leaf sequences differ in length");
  for (std::size_t k = 0; k < from.leaves.size(); ++k)
    if (!fo_equal(B, from.leaves[k], to.leaves[k]))
      fail("ShapeMismatch", "flat_transport: leaf factors differ");
  BlockMorphism out = bm_zero(from.obj, to.obj, 0);
  for (int t = 0; t < from.obj.size(); ++t)
    for (int s = 0; s < to.obj.size(); ++s) {
      if (to.choice[s] != from.choice[t]) continue;
      ElemPtr e = B.compose(to.proj[s], from.incl[t]);
      if (B.is_zero(e)) continue;
      bm_set(B, out, s, t, e);
    }
  return out;
}

// ---- hom spaces as coordinate vectors ----

std::vector<BlockMorphism> bm_hom_basis(const Backend& B,
                                        const FormalObject& x,
                                        const FormalObject& y, int degree) {
  require_plain(x, "hom basis");
  require_plain(y, "hom basis");
  std::vector<BlockMorphism> out;
  for (int j = 0; j < x.size(); ++j)
    for (int i = 0; i < y.size(); ++i) {
      int deg = degree + x.summands[j].shift - y.summands[i].shift;
      for (const auto& e :
           B.hom_basis(x.summands[j].word, y.summands[i].word, deg)) {
        BlockMorphism m = bm_zero(x, y, degree);
        bm_set(B, m, i, j, e);
        out.push_back(std::move(m));
      }
    }
  return out;
}

std::vector<Scalar> bm_coords(const Backend& B, const BlockMorphism& m) {
  require_plain(m.src, "coordinates");
  require_plain(m.dst, "coordinates");
  std::vector<Scalar> out;
  for (int j = 0; j < m.src.size(); ++j)
    for (int i = 0; i < m.dst.size(); ++i) {
      std::vector<Scalar> c = B.elem_coords(bm_entry(B, m, i, j));
      out.insert(out.end(), c.begin(), c.end());
    }
  return out;
}

BlockMorphism bm_from_coords(const Backend& B, const FormalObject& x,
                             const FormalObject& y, int degree,
                             const std::vector<Scalar>& coords) {
  std::vector<BlockMorphism> basis = bm_hom_basis(B, x, y, degree);
  if (coords.size() != basis.size())
    fail("ShapeMismatch", "coordinate vector length");
  BlockMorphism out = bm_zero(x, y, degree);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (s_is_zero(coords[k])) continue;
    out = bm_add(B, out, bm_scale(B, coords[k], basis[k]));
  }
  return out;
}

// ---- idempotents ----

SplitResult split_idempotent(const Backend& B, const BlockMorphism& e) {
  if (!B.supports_splitting())
    fail("NotSupported", "backend cannot split idempotents into words");
  if (!fo_equal(B, e.src, e.dst) || e.degree != 0)
    fail("NotIdempotent", "expected a degree-0 endomorphism");
  require_plain(e.src, "idempotent splitting");
  if (!bm_equal(B, bm_compose(B, e, e), e))
    fail("NotIdempotent", "morphism does not square to itself");
  const Ring& R = B.ring();
  const FormalObject& X = e.src;

  // Candidate (word, shift) pairs, most negative shift first.
  std::vector<std::pair<std::string, int>> cands;
  for (const auto& s : X.summands) cands.push_back({s.word, s.shift});
  std::sort(cands.begin(), cands.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second
                                          : a.first < b.first;
            });
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  BlockMorphism rem = e;
  std::vector<Summand> parts;
  std::vector<BlockMorphism> sigmas, pis;

  while (!bm_is_zero(B, rem)) {
    bool peeled = false;
    for (const auto& [w, s] : cands) {
      FormalObject piece = fo_single(w, s);
      std::vector<BlockMorphism> ub = bm_hom_basis(B, piece, X, 0);
      std::vector<BlockMorphism> vb = bm_hom_basis(B, X, piece, 0);
      if (ub.empty() || vb.empty()) continue;

      Mat P(R, static_cast<int>(vb.size()), static_cast<int>(ub.size()));
      for (std::size_t b = 0; b < vb.size(); ++b)
        for (std::size_t a = 0; a < ub.size(); ++a) {
          BlockMorphism comp =
              bm_compose(B, vb[b], bm_compose(B, rem, ub[a]));
          ElemPtr entry = bm_entry(B, comp, 0, 0);
          auto c = B.identity_factor(entry);
          if (!c) fail("NotSupported",
                       "word has a non-scalar degree-0 endomorphism: " + w);
          P.at(static_cast<int>(b), static_cast<int>(a)) = *c;
        }
      if (P.is_zero()) continue;

      // Find u', v' with v' rem u' = unit * id.
      std::optional<std::pair<std::vector<Scalar>, std::vector<Scalar>>> hit;
      if (R.kind == RingKind::Integers) {
        SmithForm f = smith_normal_form(P);
        if (std::llabs(f.D.at(0, 0).num) == 1) {
          std::vector<Scalar> vc(vb.size()), uc(ub.size());
          for (std::size_t b = 0; b < vb.size(); ++b)
            vc[b] = f.S.at(0, static_cast<int>(b));
          for (std::size_t a = 0; a < ub.size(); ++a)
            uc[a] = f.T.at(static_cast<int>(a), 0);
          if (f.D.at(0, 0).num == -1)
            for (auto& c : vc) c = s_neg(R, c);
          hit = {vc, uc};
        }
      } else {
        for (std::size_t b = 0; b < vb.size() && !hit; ++b)
          for (std::size_t a = 0; a < ub.size() && !hit; ++a)
            if (!s_is_zero(P.at(static_cast<int>(b), static_cast<int>(a)))) {
              std::vector<Scalar> vc(vb.size(), s_zero(R)),
                  uc(ub.size(), s_zero(R));
              vc[b] = s_inv(R, P.at(static_cast<int>(b), static_cast<int>(a)));
              uc[a] = s_one(R);
              hit = {vc, uc};
            }
      }
      if (!hit) continue;

      BlockMorphism u = bm_zero(piece, X, 0), v = bm_zero(X, piece, 0);
      for (std::size_t a = 0; a < ub.size(); ++a)
        if (!s_is_zero(hit->second[a]))
          u = bm_add(B, u, bm_scale(B, hit->second[a], ub[a]));
      for (std::size_t b = 0; b < vb.size(); ++b)
        if (!s_is_zero(hit->first[b]))
          v = bm_add(B, v, bm_scale(B, hit->first[b], vb[b]));

      BlockMorphism sigma = bm_compose(B, rem, u);
      BlockMorphism pi = bm_compose(B, v, rem);
      if (!bm_equal(B, bm_compose(B, pi, sigma), bm_identity(B, piece)))
        fail("NotSplittable", "peel section failed to verify");
      rem = bm_sub(B, rem, bm_compose(B, sigma, pi));
      parts.push_back({w, s, nullptr, ""});
      sigmas.push_back(std::move(sigma));
      pis.push_back(std::move(pi));
      peeled = true;
      break;
    }
    if (!peeled)
      fail("NotSplittable",
           "no word summand admits a unit pairing with the idempotent");
  }

  SplitResult out;
  out.image.summands = parts;
  out.sigma = bm_zero(out.image, X, 0);
  out.pi = bm_zero(X, out.image, 0);
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    for (const auto& [key, el] : sigmas[k].entries)
      bm_set(B, out.sigma, key.first, static_cast<int>(k), el);
    for (const auto& [key, el] : pis[k].entries)
      bm_set(B, out.pi, static_cast<int>(k), key.second, el);
  }
  if (!bm_equal(B, bm_compose(B, out.pi, out.sigma),
                bm_identity(B, out.image)) ||
      !bm_equal(B, bm_compose(B, out.sigma, out.pi), e))
    fail("NotSplittable", "assembled splitting failed verification");
  return out;
}

FormalObject karoubi_image(const Backend& B, const BlockMorphism& e,
                           const std::string& tag) {
  if (!fo_equal(B, e.src, e.dst) || e.degree != 0 || e.src.size() != 1 ||
      e.src.summands[0].idem)
    fail("NotSupported",
         "lazy images require a degree-0 idempotent on a single plain word");
  if (!bm_equal(B, bm_compose(B, e, e), e))
    fail("NotIdempotent", "morphism does not square to itself");
  FormalObject out;
  out.summands.push_back({e.src.summands[0].word, e.src.summands[0].shift,
                          bm_entry(B, e, 0, 0), tag});
  return out;
}

BlockMorphism karoubi_project(const Backend& B, const BlockMorphism& e,
                              const FormalObject& image) {
  BlockMorphism out = bm_zero(e.src, image, 0);
  bm_set(B, out, 0, 0, image.summands[0].idem);
  return out;
}

BlockMorphism karoubi_include(const Backend& B, const BlockMorphism& e,
                              const FormalObject& image) {
  BlockMorphism out = bm_zero(image, e.src, 0);
  bm_set(B, out, 0, 0, image.summands[0].idem);
  return out;
}

// ---- counital structures ----

CounitalCheck verify_counital(const Backend& B, const CounitalObject& co) {
  CounitalCheck out;
  BlockMorphism idc = bm_identity(B, co.c);
  BlockMorphism right =
      bm_compose(B, tensor_morphisms(B, idc, co.counit), co.delta_r);
  BlockMorphism left =
      bm_compose(B, tensor_morphisms(B, co.counit, idc), co.delta_l);
  out.right_ok = bm_equal(B, right, idc);
  out.left_ok = bm_equal(B, left, idc);
  if (!out.right_ok) out.detail += "(id x eps) . delta_r != id; ";
  if (!out.left_ok) out.detail += "(eps x id) . delta_l != id; ";
  if (out.detail.empty()) out.detail = "ok";
  return out;
}

CounitalObject direct_sum_counital(const Backend& B, const CounitalObject& a,
                                   const CounitalObject& b) {
  CounitalObject out;
  out.c = fo_direct_sum(a.c, b.c);
  out.counit = bm_zero(out.c, fo_unit(B), 0);
  int na = a.c.size();
  for (const auto& [k, e] : a.counit.entries)
    bm_set(B, out.counit, 0, k.second, e);
  for (const auto& [k, e] : b.counit.entries)
    bm_set(B, out.counit, 0, k.second + na, e);

  // Transfer each diagonal comultiplication into the big tensor square.
  TensorResult big = tensor_objects_full(B, out.c, out.c);
  FormalObject cc = big.nf;
  auto transfer = [&](const CounitalObject& part, int off,
                      const BlockMorphism& delta) {
    BlockMorphism res = bm_zero(part.c, cc, 0);
    TensorResult small = tensor_objects_full(B, part.c, part.c);
    std::vector<int> small_raw(small.pos.size());
    for (std::size_t r = 0; r < small.pos.size(); ++r)
      small_raw[small.pos[r]] = static_cast<int>(r);
    int n = part.c.size();
    for (const auto& [k, e] : delta.entries) {
      // Locate the (i1, j1) pair and offset of the destination slot.
      int slot = small_raw[k.first];
      int pair = -1;
      for (std::size_t r = 0; r < small.ranges.size(); ++r)
        if (slot >= small.ranges[r].first && slot < small.ranges[r].second) {
          pair = static_cast<int>(r);
          break;
        }
      if (pair < 0) fail("ShapeMismatch", "slot outside tensor layout");
      int i1 = pair / n, j1 = pair % n;
      int big_pair = (i1 + off) * out.c.size() + (j1 + off);
      int target =
          big.pos[big.ranges[big_pair].first + (slot - small.ranges[pair].first)];
      bm_set(B, res, target, k.second, e);
    }
    return res;
  };
  BlockMorphism dra = transfer(a, 0, a.delta_r);
  BlockMorphism drb = transfer(b, na, b.delta_r);
  BlockMorphism dla = transfer(a, 0, a.delta_l);
  BlockMorphism dlb = transfer(b, na, b.delta_l);
  out.delta_r = bm_zero(out.c, cc, 0);
  out.delta_l = bm_zero(out.c, cc, 0);
  for (const auto& [k, e] : dra.entries) bm_set(B, out.delta_r, k.first, k.second, e);
  for (const auto& [k, e] : drb.entries)
    bm_set(B, out.delta_r, k.first, k.second + na, e);
  for (const auto& [k, e] : dla.entries) bm_set(B, out.delta_l, k.first, k.second, e);
  for (const auto& [k, e] : dlb.entries)
    bm_set(B, out.delta_l, k.first, k.second + na, e);
  return out;
}

}  // namespace catidem
