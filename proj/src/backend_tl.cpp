#include "catidem/backend_tl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace catidem {

namespace {

struct Tangle {
  int n = 0;
  std::vector<int> partner;  // size 2n, involution without fixed points
  int circles = 0;
  // Elementary layer words for circled stacks, top to bottom.  Circle
  // indices of a layered word always mean the canonical order produced by
  // restacking the layers, so labelings on the word are unambiguous no
  // matter which route produced them.
  std::vector<std::string> layers;
};

struct TLElem final : ElemBase {
  std::string src, dst;
  int deg = 0;
  std::map<std::uint32_t, Scalar> terms;
};

const TLElem& cast(const ElemPtr& p) {
  return *static_cast<const TLElem*>(p.get());
}

ElemPtr wrap(TLElem e) { return std::make_shared<TLElem>(std::move(e)); }

int popcount32(std::uint32_t v) { return __builtin_popcount(v); }

Tangle parse_word(const std::string& w) {
  Tangle t;
  std::size_t colon = w.find(':');
  if (w.size() < 2 || w[0] != 'n' || colon == std::string::npos)
    fail("BadWord", "malformed tangle word: " + w);
  t.n = std::stoi(w.substr(1, colon - 1));
  std::string rest = w.substr(colon + 1);
  std::size_t plus = rest.find("+o");
  if (plus != std::string::npos) {
    std::string tail = rest.substr(plus + 2);
    std::size_t bar = tail.find('|');
    if (bar != std::string::npos) {
      std::stringstream ls(tail.substr(bar + 1));
      std::string layer;
      while (std::getline(ls, layer, '|')) t.layers.push_back(layer);
      tail = tail.substr(0, bar);
    }
    t.circles = std::stoi(tail);
    rest = rest.substr(0, plus);
  }
  if (!rest.empty()) {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) t.partner.push_back(std::stoi(item));
  }
  if ((int)t.partner.size() != 2 * t.n || t.circles < 0)
    fail("BadWord", "point count mismatch in tangle word: " + w);
  if (t.layers.size() == 1)
    fail("BadWord", "stray layer metadata in tangle word: " + w);
  return t;
}

std::string format_word(const Tangle& t) {
  std::string s = "n" + std::to_string(t.n) + ":";
  for (int i = 0; i < 2 * t.n; ++i) {
    if (i) s += ",";
    s += std::to_string(t.partner[i]);
  }
  if (t.circles > 0 || !t.layers.empty())
    s += "+o" + std::to_string(t.circles);
  for (const auto& lw : t.layers) s += "|" + lw;
  return s;
}

// Position on the boundary circle: bottom left to right, then top right to
// left, so a matching is planar exactly when no two pairs interleave.
int circ_pos(int pt, int n) { return pt < n ? pt : 3 * n - 1 - pt; }

bool involution_ok(const Tangle& t) {
  for (int i = 0; i < 2 * t.n; ++i) {
    int j = t.partner[i];
    if (j < 0 || j >= 2 * t.n || j == i || t.partner[j] != i) return false;
  }
  return true;
}

bool noncrossing(const Tangle& t) {
  int n = t.n;
  for (int i = 0; i < 2 * n; ++i) {
    if (t.partner[i] <= i) continue;
    for (int j = i + 1; j < 2 * n; ++j) {
      if (t.partner[j] <= j) continue;
      int a = circ_pos(i, n), b = circ_pos(t.partner[i], n);
      int c = circ_pos(j, n), d = circ_pos(t.partner[j], n);
      if (a > b) std::swap(a, b);
      bool c_in = a < c && c < b, d_in = a < d && d < b;
      if (c_in != d_in) return false;
    }
  }
  return true;
}

std::vector<std::pair<int, int>> arcs_of(const Tangle& t) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < 2 * t.n; ++i)
    if (t.partner[i] > i) out.push_back({i, t.partner[i]});
  return out;
}

struct UF {
  std::vector<int> p;
  explicit UF(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int a) {
    while (p[a] != a) a = p[a] = p[p[a]];
    return a;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Circles of the glued diagram W(src, dst), listed boundary circles first
// (ordered by smallest boundary point), then the free circles of src, then
// those of dst.
struct HomCircles {
  int count = 0;
  int n_boundary = 0;
  std::vector<int> src_arc_circle, dst_arc_circle;
  std::vector<int> src_free, dst_free;
};

HomCircles hom_circles_for(const Tangle& s, const Tangle& d) {
  if (s.n != d.n) fail("NotComposable", "strand count mismatch in hom pair");
  auto sa = arcs_of(s), da = arcs_of(d);
  std::vector<int> s_arc_at(2 * s.n, -1), d_arc_at(2 * s.n, -1);
  for (std::size_t i = 0; i < sa.size(); ++i)
    s_arc_at[sa[i].first] = s_arc_at[sa[i].second] = (int)i;
  for (std::size_t i = 0; i < da.size(); ++i)
    d_arc_at[da[i].first] = d_arc_at[da[i].second] = (int)i;
  UF uf((int)(sa.size() + da.size()));
  for (int p = 0; p < 2 * s.n; ++p)
    uf.unite(s_arc_at[p], (int)sa.size() + d_arc_at[p]);
  HomCircles hc;
  std::map<int, int> idx;
  for (int p = 0; p < 2 * s.n; ++p) {
    int r = uf.find(s_arc_at[p]);
    if (!idx.count(r)) idx[r] = hc.count++;
  }
  hc.n_boundary = hc.count;
  hc.src_arc_circle.assign(sa.size(), -1);
  hc.dst_arc_circle.assign(da.size(), -1);
  for (std::size_t i = 0; i < sa.size(); ++i)
    hc.src_arc_circle[i] = idx[uf.find((int)i)];
  for (std::size_t i = 0; i < da.size(); ++i)
    hc.dst_arc_circle[i] = idx[uf.find((int)(sa.size() + i))];
  for (int i = 0; i < s.circles; ++i) hc.src_free.push_back(hc.count++);
  for (int i = 0; i < d.circles; ++i) hc.dst_free.push_back(hc.count++);
  return hc;
}

// Every word is an (n, n)-tangle, so both sides have n boundary arcs and
// the degree normalization is always n.
int label_degree(int n, int n_circ, std::uint32_t mask) {
  return 2 * popcount32(mask) - n_circ + n;
}

// Stacking a above b: a's bottom boundary glued to b's top boundary.
// Result points: bottom = b's bottom (0..n-1), top = a's top (n..2n-1).
// Resulting circles are ordered: a's free circles, b's free circles, then
// closed chains of arcs in trace order.
struct StackInfo {
  Tangle t;
  // per result arc, the member arcs as (layer, arc index), layer 0 = a
  std::vector<std::vector<std::pair<int, int>>> arc_members;
  std::vector<std::vector<std::pair<int, int>>> chain_members;
};

StackInfo stack_tangles(const Tangle& a, const Tangle& b) {
  if (a.n != b.n) fail("NotComposable", "strand count mismatch in stacking");
  int n = a.n;
  auto aa = arcs_of(a), ba = arcs_of(b);
  std::vector<int> a_arc_at(2 * n, -1), b_arc_at(2 * n, -1);
  for (std::size_t i = 0; i < aa.size(); ++i)
    a_arc_at[aa[i].first] = a_arc_at[aa[i].second] = (int)i;
  for (std::size_t i = 0; i < ba.size(); ++i)
    b_arc_at[ba[i].first] = b_arc_at[ba[i].second] = (int)i;

  StackInfo st;
  st.t.n = n;
  st.t.partner.assign(2 * n, -1);
  std::vector<std::vector<bool>> seen(2);
  seen[0].assign(aa.size(), false);
  seen[1].assign(ba.size(), false);

  // Walk from a result boundary point to its partner, crossing the glued
  // interface: b's top point n+i meets a's bottom point i.
  auto walk = [&](int layer, int pt, std::vector<std::pair<int, int>>& members) {
    for (;;) {
      int arc = layer == 0 ? a_arc_at[pt] : b_arc_at[pt];
      seen[layer][arc] = true;
      members.push_back({layer, arc});
      int q = layer == 0 ? a.partner[pt] : b.partner[pt];
      if (layer == 1 && q < n) return q;           // result bottom point
      if (layer == 0 && q >= n) return q;          // result top point
      if (layer == 1) {                            // b's top -> a's bottom
        layer = 0;
        pt = q - n;
      } else {                                     // a's bottom -> b's top
        layer = 1;
        pt = q + n;
      }
    }
  };

  // Scanning points in increasing order discovers result arcs sorted by
  // their smallest point, matching the arc order used everywhere else.
  for (int p = 0; p < 2 * n; ++p) {
    if (st.t.partner[p] != -1) continue;
    std::vector<std::pair<int, int>> members;
    int layer = p < n ? 1 : 0;
    int end = walk(layer, p, members);
    st.t.partner[p] = end;
    st.t.partner[end] = p;
    st.arc_members.push_back(std::move(members));
  }

  // Closed chains from unvisited arcs, traced from the smallest unvisited
  // arc of a, then of b.
  for (int layer = 0; layer < 2; ++layer) {
    const auto& arcs = layer == 0 ? aa : ba;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (seen[layer][i]) continue;
      std::vector<std::pair<int, int>> members;
      int cl = layer, pt = arcs[i].first;
      int start_layer = layer, start_pt = pt;
      do {
        int arc = cl == 0 ? a_arc_at[pt] : b_arc_at[pt];
        seen[cl][arc] = true;
        members.push_back({cl, arc});
        int q = cl == 0 ? a.partner[pt] : b.partner[pt];
        if (cl == 1 && q < n) fail("InternalError", "chain left the stack");
        if (cl == 0 && q >= n) fail("InternalError", "chain left the stack");
        if (cl == 1) {
          cl = 0;
          pt = q - n;
        } else {
          cl = 1;
          pt = q + n;
        }
      } while (!(cl == start_layer && pt == start_pt));
      st.chain_members.push_back(std::move(members));
    }
  }
  st.t.circles = a.circles + b.circles + (int)st.chain_members.size();
  return st;
}

bool is_unit_tangle(const Tangle& t) {
  if (t.circles != 0) return false;
  for (int i = 0; i < t.n; ++i)
    if (t.partner[i] != t.n + i) return false;
  return true;
}

// Elementary layers of a word, top to bottom.  A word without metadata is
// its own single layer.
std::vector<Tangle> flatten_tangle(const Tangle& t) {
  if (t.layers.empty()) return {t};
  std::vector<Tangle> out;
  for (const auto& lw : t.layers) {
    Tangle lt = parse_word(lw);
    if (!lt.layers.empty())
      fail("InternalError", "nested layer metadata in tangle word");
    out.push_back(std::move(lt));
  }
  return out;
}

// Full geometry of a stack of layers, layer 0 on top.  Circles are listed
// in the order they appear as layers are added one at a time from the top,
// which is the canonical circle order for layered words: carried circles
// keep their positions, then each new layer contributes its own free
// circles followed by the chains it closes, in trace order.
struct MultiCircle {
  int layer = -1, free_index = -1;           // free circle carried by a layer
  std::vector<std::pair<int, int>> members;  // closed chain: (layer, arc)
};

struct MultiStack {
  Tangle t;  // partner and circle count only
  std::vector<std::vector<std::pair<int, int>>> arc_members;
  std::vector<MultiCircle> circles;
};

MultiStack stack_many(const std::vector<Tangle>& layers) {
  if (layers.empty()) fail("InternalError", "empty layer stack");
  MultiStack ms;
  ms.t = layers[0];
  ms.t.layers.clear();
  ms.arc_members.resize(arcs_of(layers[0]).size());
  for (std::size_t i = 0; i < ms.arc_members.size(); ++i)
    ms.arc_members[i] = {{0, (int)i}};
  for (int j = 0; j < layers[0].circles; ++j)
    ms.circles.push_back({0, j, {}});
  for (std::size_t m = 1; m < layers.size(); ++m) {
    StackInfo st = stack_tangles(ms.t, layers[m]);
    auto expand = [&](const std::vector<std::pair<int, int>>& mem) {
      std::vector<std::pair<int, int>> out;
      for (const auto& [layer, arc] : mem) {
        if (layer == 0)
          out.insert(out.end(), ms.arc_members[arc].begin(),
                     ms.arc_members[arc].end());
        else
          out.push_back({(int)m, arc});
      }
      return out;
    };
    std::vector<std::vector<std::pair<int, int>>> na;
    na.reserve(st.arc_members.size());
    for (const auto& mem : st.arc_members) na.push_back(expand(mem));
    std::vector<MultiCircle> nc = ms.circles;
    for (int j = 0; j < layers[m].circles; ++j)
      nc.push_back({(int)m, j, {}});
    for (const auto& mem : st.chain_members) {
      MultiCircle c;
      c.members = expand(mem);
      nc.push_back(std::move(c));
    }
    ms.t = st.t;
    ms.t.layers.clear();
    ms.arc_members = std::move(na);
    ms.circles = std::move(nc);
  }
  return ms;
}

// Canonical word for a stacked diagram.  The metadata always lists the
// elementary layers flat, so the word is independent of the order the
// stack was assembled in; transparent identity layers are dropped so unit
// factors leave words unchanged, and a single surviving layer needs no
// metadata at all.
std::string format_stacked(const MultiStack& ms,
                           const std::vector<Tangle>& layers) {
  Tangle t = ms.t;
  std::vector<std::string> kept;
  for (const auto& l : layers)
    if (!is_unit_tangle(l)) kept.push_back(format_word(l));
  if (kept.size() >= 2) t.layers = std::move(kept);
  return format_word(t);
}

// A word together with its layer geometry and reverse lookups from
// elementary (layer, arc) pairs to the word's own arcs and circles.
struct WordGeom {
  std::vector<Tangle> layers;
  MultiStack ms;
  std::map<std::pair<int, int>, int> arc_at;
  std::map<std::pair<int, int>, int> circ_at;
};

WordGeom geom_of(const Tangle& t) {
  WordGeom g;
  g.layers = flatten_tangle(t);
  g.ms = stack_many(g.layers);
  if (g.ms.t.partner != t.partner || g.ms.t.circles != t.circles)
    fail("InternalError", "layer metadata disagrees with its tangle word");
  for (std::size_t i = 0; i < g.ms.arc_members.size(); ++i)
    for (const auto& la : g.ms.arc_members[i]) g.arc_at[la] = (int)i;
  for (std::size_t i = 0; i < g.ms.circles.size(); ++i)
    for (const auto& la : g.ms.circles[i].members) g.circ_at[la] = (int)i;
  return g;
}

// Grouping-independent identity of a circle inside a larger stack, used to
// match a factor's circles against the circles of a combined stack.
using CircleKey = std::vector<std::array<int, 3>>;

CircleKey circle_key(const MultiCircle& c, int layer_offset) {
  CircleKey k;
  if (c.layer >= 0) {
    k.push_back({-1, c.layer + layer_offset, c.free_index});
  } else {
    for (const auto& [l, a] : c.members)
      k.push_back({0, l + layer_offset, a});
    std::sort(k.begin(), k.end());
  }
  return k;
}

// Connected-component evaluation of a glued cobordism.  Inputs are the
// circles of the two factors (with their labels); outputs are the circles
// of the result diagram; strips each lower the Euler characteristic by
// one.  A component of genus g with inputs l_1..l_p and q outputs
// contributes Delta^(q)((2x)^g . l_1...l_p), where Delta^(0) is the trace.
std::map<std::uint32_t, Scalar> evaluate_glue(
    const Ring& R, const TLElem& f, int nf, const TLElem& g, int ng, UF& uf,
    int nr, const std::vector<std::pair<int, int>>& strip_edges) {
  struct Comp {
    std::vector<int> fc, gc, rc;
    int strips = 0;
  };
  std::map<int, Comp> comps;
  for (int i = 0; i < nf; ++i) comps[uf.find(i)].fc.push_back(i);
  for (int i = 0; i < ng; ++i) comps[uf.find(nf + i)].gc.push_back(i);
  for (int i = 0; i < nr; ++i) comps[uf.find(nf + ng + i)].rc.push_back(i);
  for (const auto& e : strip_edges) comps[uf.find(e.first)].strips++;

  std::map<std::uint32_t, Scalar> out;
  Scalar two = s_from_int(R, 2);
  for (const auto& [fm, fcoeff] : f.terms)
    for (const auto& [gm, gcoeff] : g.terms) {
      std::vector<std::pair<std::uint32_t, Scalar>> partial = {
          {0u, s_mul(R, fcoeff, gcoeff)}};
      bool dead = false;
      for (const auto& [root, ci] : comps) {
        (void)root;
        int xs = 0;
        for (int i : ci.fc)
          if ((fm >> i) & 1u) ++xs;
        for (int i : ci.gc)
          if ((gm >> i) & 1u) ++xs;
        if (xs >= 2) {
          dead = true;
          break;
        }
        int p = (int)(ci.fc.size() + ci.gc.size());
        int q = (int)ci.rc.size();
        int genus2 = 2 - p - q + ci.strips;
        if (genus2 < 0 || genus2 % 2 != 0)
          fail("InternalError", "bad component genus in tangle evaluation");
        int genus = genus2 / 2;
        if (genus >= 2) {
          dead = true;
          break;
        }
        bool doubled = false;
        if (genus == 1) {
          if (xs == 1) {
            dead = true;
            break;
          }
          xs = 1;
          doubled = true;
        }
        std::vector<std::pair<std::uint32_t, Scalar>> branches;
        Scalar unitc = doubled ? two : s_one(R);
        if (q == 0) {
          if (xs == 0) {
            dead = true;  // trace of 1 vanishes
            break;
          }
          branches.push_back({0u, unitc});
        } else if (xs == 1) {
          std::uint32_t madd = 0;
          for (int rcirc : ci.rc) madd |= 1u << rcirc;
          branches.push_back({madd, unitc});
        } else {
          for (int j = 0; j < q; ++j) {
            std::uint32_t madd = 0;
            for (int k = 0; k < q; ++k)
              if (k != j) madd |= 1u << ci.rc[k];
            branches.push_back({madd, unitc});
          }
        }
        std::vector<std::pair<std::uint32_t, Scalar>> next;
        for (const auto& [m, c] : partial)
          for (const auto& [ma, cb] : branches)
            next.push_back({m | ma, s_mul(R, c, cb)});
        partial = std::move(next);
      }
      if (dead) continue;
      for (const auto& [m, c] : partial) {
        auto it = out.find(m);
        if (it == out.end()) {
          if (!s_is_zero(c)) out.emplace(m, c);
        } else {
          it->second = s_add(R, it->second, c);
          if (s_is_zero(it->second)) out.erase(it);
        }
      }
    }
  return out;
}

}  // namespace

TLBackend::TLBackend(int strands, const Ring& R) : n_(strands), ring_(R) {
  if (strands < 0) fail("BadWord", "negative strand count");
}

std::string TLBackend::name() const {
  return "tl" + std::to_string(n_);
}

std::string TLBackend::unit_word() const {
  Tangle t;
  t.n = n_;
  t.partner.resize(2 * n_);
  for (int i = 0; i < n_; ++i) {
    t.partner[i] = n_ + i;
    t.partner[n_ + i] = i;
  }
  return format_word(t);
}

bool TLBackend::word_valid(const std::string& w) const {
  try {
    Tangle t = parse_word(w);
    return t.n == n_ && t.circles == 0 && involution_ok(t) && noncrossing(t);
  } catch (const Error&) {
    return false;
  }
}

std::string TLBackend::concat(const std::string& a,
                              const std::string& b) const {
  std::vector<Tangle> layers = flatten_tangle(parse_word(a));
  for (auto& l : flatten_tangle(parse_word(b))) layers.push_back(std::move(l));
  MultiStack ms = stack_many(layers);
  return format_stacked(ms, layers);
}

std::string TLBackend::make_word(const std::vector<int>& partner,
                                 int circles) const {
  Tangle t;
  t.n = n_;
  t.partner = partner;
  t.circles = circles;
  if ((int)partner.size() != 2 * n_ || !involution_ok(t) || !noncrossing(t))
    fail("BadWord", "not a planar matching on " + std::to_string(2 * n_) +
                        " points");
  return format_word(t);
}

int TLBackend::hom_circle_count(const std::string& src,
                                const std::string& dst) const {
  return hom_circles_for(parse_word(src), parse_word(dst)).count;
}

ElemPtr TLBackend::labeling(const std::string& src, const std::string& dst,
                            std::uint32_t mask) const {
  Tangle s = parse_word(src), d = parse_word(dst);
  HomCircles hc = hom_circles_for(s, d);
  if (hc.count < 32 && (mask >> hc.count) != 0)
    fail("BadElement", "labeling mask addresses a missing circle");
  TLElem e;
  e.src = src;
  e.dst = dst;
  e.deg = label_degree(n_, hc.count, mask);
  e.terms.emplace(mask, s_one(ring_));
  return wrap(std::move(e));
}

ElemPtr TLBackend::all_one(const std::string& src,
                           const std::string& dst) const {
  return labeling(src, dst, 0);
}

ElemPtr TLBackend::saddle(const std::string& src,
                          const std::string& dst) const {
  Tangle s = parse_word(src), d = parse_word(dst);
  if (s.circles != 0 || d.circles != 0)
    fail("BadElement", "saddles are defined between circle-free words");
  std::set<std::pair<int, int>> sp, dp;
  for (const auto& a : arcs_of(s)) sp.insert(a);
  for (const auto& a : arcs_of(d)) dp.insert(a);
  std::vector<std::pair<int, int>> only_s, only_d;
  for (const auto& a : sp)
    if (!dp.count(a)) only_s.push_back(a);
  for (const auto& a : dp)
    if (!sp.count(a)) only_d.push_back(a);
  std::set<int> pts;
  for (const auto& a : only_s) {
    pts.insert(a.first);
    pts.insert(a.second);
  }
  std::set<int> ptd;
  for (const auto& a : only_d) {
    ptd.insert(a.first);
    ptd.insert(a.second);
  }
  if (only_s.size() != 2 || only_d.size() != 2 || pts != ptd)
    fail("BadElement",
         "saddle endpoints must differ by rerouting exactly one pair of arcs");
  return all_one(src, dst);
}

ElemPtr TLBackend::identity(const std::string& w) const {
  Tangle t = parse_word(w);
  HomCircles hc = hom_circles_for(t, t);
  TLElem e;
  e.src = e.dst = w;
  e.deg = 0;
  int c = t.circles;
  for (std::uint32_t pick = 0; pick < (1u << c); ++pick) {
    std::uint32_t mask = 0;
    for (int i = 0; i < c; ++i) {
      if ((pick >> i) & 1u)
        mask |= 1u << hc.src_free[i];
      else
        mask |= 1u << hc.dst_free[i];
    }
    e.terms.emplace(mask, s_one(ring_));
  }
  return wrap(std::move(e));
}

ElemPtr TLBackend::zero_elem(const std::string& src, const std::string& dst,
                             int deg) const {
  TLElem e;
  e.src = src;
  e.dst = dst;
  e.deg = deg;
  return wrap(std::move(e));
}

ElemPtr TLBackend::compose(const ElemPtr& gp, const ElemPtr& fp) const {
  const TLElem& g = cast(gp);
  const TLElem& f = cast(fp);
  if (f.dst != g.src)
    fail("NotComposable", "word mismatch in composition: " + f.dst +
                              " vs " + g.src);
  Tangle t0 = parse_word(f.src), t1 = parse_word(f.dst),
         t2 = parse_word(g.dst);
  HomCircles fc = hom_circles_for(t0, t1);
  HomCircles gc = hom_circles_for(t1, t2);
  HomCircles rc = hom_circles_for(t0, t2);
  int nf = fc.count, ng = gc.count, nr = rc.count;
  UF uf(nf + ng + nr);
  std::vector<std::pair<int, int>> strips;
  auto mid_arcs = arcs_of(t1);
  for (std::size_t a = 0; a < mid_arcs.size(); ++a) {
    int u = fc.dst_arc_circle[a];
    int v = nf + gc.src_arc_circle[a];
    uf.unite(u, v);
    strips.push_back({u, v});
  }
  for (int i = 0; i < t1.circles; ++i)
    uf.unite(fc.dst_free[i], nf + gc.src_free[i]);
  auto a0 = arcs_of(t0);
  auto a2 = arcs_of(t2);
  for (std::size_t a = 0; a < a0.size(); ++a)
    uf.unite(nf + ng + rc.src_arc_circle[a], fc.src_arc_circle[a]);
  for (std::size_t a = 0; a < a2.size(); ++a)
    uf.unite(nf + ng + rc.dst_arc_circle[a], nf + gc.dst_arc_circle[a]);
  for (int i = 0; i < t0.circles; ++i)
    uf.unite(nf + ng + rc.src_free[i], fc.src_free[i]);
  for (int i = 0; i < t2.circles; ++i)
    uf.unite(nf + ng + rc.dst_free[i], nf + gc.dst_free[i]);

  TLElem r;
  r.src = f.src;
  r.dst = g.dst;
  r.deg = f.deg + g.deg;
  r.terms = evaluate_glue(ring_, f, nf, g, ng, uf, nr, strips);
  for (const auto& [m, v] : r.terms) {
    (void)v;
    if (label_degree(n_, nr, m) != r.deg)
      fail("InternalError", "composition broke the grading");
  }
  return wrap(std::move(r));
}

ElemPtr TLBackend::tensor_elems(const ElemPtr& ap, const ElemPtr& bp) const {
  const TLElem& f = cast(ap);  // upper factor
  const TLElem& g = cast(bp);  // lower factor
  Tangle t0 = parse_word(f.src), t1 = parse_word(f.dst);
  Tangle s0 = parse_word(g.src), s1 = parse_word(g.dst);
  WordGeom f0 = geom_of(t0), f1 = geom_of(t1);
  WordGeom g0 = geom_of(s0), g1 = geom_of(s1);
  int cut_src = (int)f0.layers.size(), cut_dst = (int)f1.layers.size();

  std::vector<Tangle> src_layers = f0.layers, dst_layers = f1.layers;
  for (const auto& l : g0.layers) src_layers.push_back(l);
  for (const auto& l : g1.layers) dst_layers.push_back(l);
  MultiStack msrc = stack_many(src_layers);
  MultiStack mdst = stack_many(dst_layers);

  HomCircles fc = hom_circles_for(t0, t1);
  HomCircles gc = hom_circles_for(s0, s1);
  HomCircles rc = hom_circles_for(msrc.t, mdst.t);
  int nf = fc.count, ng = gc.count, nr = rc.count;
  UF uf(nf + ng + nr);
  std::vector<std::pair<int, int>> strips;

  std::vector<int> t0_arc_at(2 * n_, -1), s0_arc_at(2 * n_, -1);
  auto t0a = arcs_of(t0), s0a = arcs_of(s0);
  for (std::size_t i = 0; i < t0a.size(); ++i)
    t0_arc_at[t0a[i].first] = t0_arc_at[t0a[i].second] = (int)i;
  for (std::size_t i = 0; i < s0a.size(); ++i)
    s0_arc_at[s0a[i].first] = s0_arc_at[s0a[i].second] = (int)i;
  for (int p = 0; p < n_; ++p) {
    // interface point p: f's bottom point p meets g's top point n + p
    int u = fc.src_arc_circle[t0_arc_at[p]];
    int v = nf + gc.src_arc_circle[s0_arc_at[n_ + p]];
    uf.unite(u, v);
    strips.push_back({u, v});
  }

  // Membership of result circles, one boundary side at a time.  Each
  // elementary (layer, arc) pair locates its carrier inside the factor it
  // came from, so the linking is independent of how either factor word was
  // itself assembled.
  auto link_side = [&](const MultiStack& comb, int cut, const WordGeom& up,
                       const WordGeom& lo, const std::vector<int>& arc_up,
                       const std::vector<int>& arc_lo,
                       const std::vector<int>& free_up,
                       const std::vector<int>& free_lo,
                       const std::vector<int>& r_arc_circle,
                       const std::vector<int>& r_free) {
    auto side_node = [&](int layer, int arc) -> int {
      if (layer < cut) {
        auto it = up.arc_at.find({layer, arc});
        if (it != up.arc_at.end()) return arc_up[it->second];
        return free_up[up.circ_at.at({layer, arc})];
      }
      auto it = lo.arc_at.find({layer - cut, arc});
      if (it != lo.arc_at.end()) return nf + arc_lo[it->second];
      return nf + free_lo[lo.circ_at.at({layer - cut, arc})];
    };
    std::map<CircleKey, int> where;
    for (std::size_t i = 0; i < comb.circles.size(); ++i)
      where[circle_key(comb.circles[i], 0)] = (int)i;
    auto match_free = [&](const MultiStack& part, int off,
                          const std::vector<int>& part_free, int node_off) {
      for (std::size_t i = 0; i < part.circles.size(); ++i) {
        auto it = where.find(circle_key(part.circles[i], off));
        if (it == where.end())
          fail("InternalError", "factor circle missing from stacked word");
        uf.unite(node_off + part_free[i], nf + ng + r_free[it->second]);
      }
    };
    match_free(up.ms, 0, free_up, 0);
    match_free(lo.ms, cut, free_lo, nf);
    for (std::size_t ra = 0; ra < comb.arc_members.size(); ++ra)
      for (const auto& [layer, arc] : comb.arc_members[ra])
        uf.unite(nf + ng + r_arc_circle[ra], side_node(layer, arc));
    for (std::size_t ci = 0; ci < comb.circles.size(); ++ci)
      for (const auto& [layer, arc] : comb.circles[ci].members)
        uf.unite(nf + ng + r_free[ci], side_node(layer, arc));
  };
  link_side(msrc, cut_src, f0, g0, fc.src_arc_circle, gc.src_arc_circle,
            fc.src_free, gc.src_free, rc.src_arc_circle, rc.src_free);
  link_side(mdst, cut_dst, f1, g1, fc.dst_arc_circle, gc.dst_arc_circle,
            fc.dst_free, gc.dst_free, rc.dst_arc_circle, rc.dst_free);

  TLElem r;
  r.src = format_stacked(msrc, src_layers);
  r.dst = format_stacked(mdst, dst_layers);
  r.deg = f.deg + g.deg;
  r.terms = evaluate_glue(ring_, f, nf, g, ng, uf, nr, strips);
  for (const auto& [m, v] : r.terms) {
    (void)v;
    if (label_degree(n_, nr, m) != r.deg)
      fail("InternalError", "tensoring broke the grading");
  }
  return wrap(std::move(r));
}

TensorNF TLBackend::tensor_words(const std::string& aw,
                                 const std::string& bw) const {
  TensorNF nf;
  nf.raw = concat(aw, bw);
  Tangle raw = parse_word(nf.raw);
  Tangle stripped = raw;
  stripped.circles = 0;
  stripped.layers.clear();
  std::string sw = format_word(stripped);
  int c = raw.circles;
  HomCircles up = hom_circles_for(stripped, raw);
  HomCircles dn = hom_circles_for(raw, stripped);
  struct Part {
    int shift;
    std::uint32_t inclmask, projmask;
  };
  std::vector<Part> parts = {{0, 0u, 0u}};
  for (int i = 0; i < c; ++i) {
    std::vector<Part> next;
    for (const auto& pt : parts) {
      next.push_back(
          {pt.shift + 1, pt.inclmask | (1u << up.dst_free[i]), pt.projmask});
      next.push_back(
          {pt.shift - 1, pt.inclmask, pt.projmask | (1u << dn.src_free[i])});
    }
    parts = std::move(next);
  }
  for (const auto& pt : parts) {
    nf.parts.push_back({sw, pt.shift});
    nf.incl.push_back(labeling(sw, nf.raw, pt.inclmask));
    nf.proj.push_back(labeling(nf.raw, sw, pt.projmask));
  }
  return nf;
}

ElemPtr TLBackend::add(const ElemPtr& a, const ElemPtr& b) const {
  const TLElem& x = cast(a);
  const TLElem& y = cast(b);
  if (x.src != y.src || x.dst != y.dst)
    fail("NotComposable", "word mismatch in addition");
  if (x.deg != y.deg && !x.terms.empty() && !y.terms.empty())
    fail("DegreeMismatch", "degree mismatch in addition");
  TLElem r = x.terms.empty() ? y : x;
  if (x.terms.empty() || y.terms.empty()) return wrap(std::move(r));
  for (const auto& [m, v] : y.terms) {
    auto it = r.terms.find(m);
    if (it == r.terms.end()) {
      r.terms.emplace(m, v);
    } else {
      it->second = s_add(ring_, it->second, v);
      if (s_is_zero(it->second)) r.terms.erase(it);
    }
  }
  return wrap(std::move(r));
}

ElemPtr TLBackend::scale(const Scalar& c, const ElemPtr& a) const {
  const TLElem& x = cast(a);
  TLElem r;
  r.src = x.src;
  r.dst = x.dst;
  r.deg = x.deg;
  if (!s_is_zero(c))
    for (const auto& [m, v] : x.terms) r.terms.emplace(m, s_mul(ring_, c, v));
  return wrap(std::move(r));
}

bool TLBackend::is_zero(const ElemPtr& a) const { return cast(a).terms.empty(); }

std::string TLBackend::elem_src(const ElemPtr& a) const { return cast(a).src; }
std::string TLBackend::elem_dst(const ElemPtr& a) const { return cast(a).dst; }
int TLBackend::elem_deg(const ElemPtr& a) const { return cast(a).deg; }

std::optional<Scalar> TLBackend::identity_factor(const ElemPtr& a) const {
  const TLElem& x = cast(a);
  if (x.src != x.dst) return std::nullopt;
  if (x.terms.empty()) return s_from_int(ring_, 0);
  if (x.deg != 0) return std::nullopt;
  ElemPtr idp = identity(x.src);
  const TLElem& id = cast(idp);
  if (x.terms.size() != id.terms.size()) return std::nullopt;
  auto it0 = x.terms.find(id.terms.begin()->first);
  if (it0 == x.terms.end()) return std::nullopt;
  Scalar c = it0->second;
  for (const auto& [m, v] : id.terms) {
    (void)v;
    auto jt = x.terms.find(m);
    if (jt == x.terms.end() || !(jt->second == c)) return std::nullopt;
  }
  return c;
}

std::string TLBackend::elem_repr(const ElemPtr& a) const {
  const TLElem& x = cast(a);
  int nc = hom_circle_count(x.src, x.dst);
  std::ostringstream os;
  os << x.src << "->" << x.dst << "@" << x.deg << "{";
  for (const auto& [m, v] : x.terms) {
    os << "[";
    for (int i = 0; i < nc; ++i) os << (((m >> i) & 1u) ? 'x' : '1');
    os << "]:" << s_to_string(ring_, v) << " ";
  }
  os << "}";
  return os.str();
}

std::vector<ElemPtr> TLBackend::hom_basis(const std::string& src,
                                          const std::string& dst,
                                          int deg) const {
  HomCircles hc = hom_circles_for(parse_word(src), parse_word(dst));
  int pc2 = deg + hc.count - n_;
  std::vector<ElemPtr> out;
  if (pc2 < 0 || pc2 % 2 != 0) return out;
  int pc = pc2 / 2;
  if (pc > hc.count) return out;
  for (std::uint32_t m = 0; m < (1u << hc.count); ++m)
    if (popcount32(m) == pc) out.push_back(labeling(src, dst, m));
  return out;
}

std::vector<Scalar> TLBackend::elem_coords(const ElemPtr& a) const {
  const TLElem& x = cast(a);
  HomCircles hc = hom_circles_for(parse_word(x.src), parse_word(x.dst));
  int pc2 = x.deg + hc.count - n_;
  std::vector<Scalar> out;
  if (!x.terms.empty() && (pc2 < 0 || pc2 % 2 != 0))
    fail("InternalError", "element outside its hom space");
  int pc = pc2 / 2;
  for (std::uint32_t m = 0; m < (1u << hc.count); ++m) {
    if (popcount32(m) != pc) continue;
    auto it = x.terms.find(m);
    out.push_back(it == x.terms.end() ? s_from_int(ring_, 0) : it->second);
  }
  return out;
}

std::string tl_cup_word(const TLBackend& B,
                        const std::vector<std::pair<int, int>>& cups) {
  int n = B.strands();
  std::vector<int> partner(2 * n, -1);
  for (const auto& [i, j] : cups) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      fail("BadWord", "cup endpoints must be distinct bottom positions");
    partner[i] = j;
    partner[j] = i;
    partner[n + i] = n + j;
    partner[n + j] = n + i;
  }
  std::vector<int> through;
  for (int i = 0; i < n; ++i)
    if (partner[i] == -1) through.push_back(i);
  for (int i : through) {
    partner[i] = n + i;
    partner[n + i] = i;
  }
  return B.make_word(partner);
}

CounitalObject tl_cup_counital(const TLBackend& B,
                               const std::vector<std::pair<int, int>>& cups) {
  int r = (int)cups.size();
  std::string w = tl_cup_word(B, cups);

  CounitalObject cu;
  cu.c = fo_single(w, r);

  // Counit: one saddle per matched pair, outermost pair first (sorted by
  // left endpoint); each saddle turns a cup-cap pair into through strands.
  std::vector<std::pair<int, int>> order = cups;
  for (auto& pr : order)
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
  std::sort(order.begin(), order.end());
  int n = B.strands();
  Tangle cur = parse_word(w);
  ElemPtr eps;
  std::string cur_w = w;
  for (const auto& [i, j] : order) {
    Tangle nxt = cur;
    nxt.partner[i] = n + i;
    nxt.partner[n + i] = i;
    nxt.partner[j] = n + j;
    nxt.partner[n + j] = j;
    std::string nxt_w = format_word(nxt);
    ElemPtr step = B.saddle(cur_w, nxt_w);
    eps = eps ? B.compose(step, eps) : step;
    cur = nxt;
    cur_w = nxt_w;
  }
  if (!eps) eps = B.identity(w);
  cu.counit = bm_zero(cu.c, fo_unit(B), 0);
  bm_set(B, cu.counit, 0, 0, eps);

  // Comultiplication: the all-one labeling into the raw square, projected
  // onto the delooped parts.
  TensorResult square = tensor_objects_full(B, cu.c, cu.c);
  FormalObject cc = square.nf;
  TensorNF nf = B.tensor_words(w, w);
  ElemPtr delta_raw = B.all_one(w, nf.raw);
  BlockMorphism delta = bm_zero(cu.c, cc, 0);
  for (std::size_t k = 0; k < nf.parts.size(); ++k) {
    ElemPtr entry = B.compose(nf.proj[k], delta_raw);
    if (!B.is_zero(entry)) bm_set(B, delta, square.pos[k], 0, entry);
  }
  cu.delta_r = delta;
  cu.delta_l = delta;
  return cu;
}

}  // namespace catidem
