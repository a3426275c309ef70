#include "catidem/idemfactory.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "catidem/linalg.hpp"

namespace catidem {

namespace {

bool summand_key_less(const Summand& a, const Summand& b) {
  if (a.word != b.word) return a.word < b.word;
  if (a.idem_tag != b.idem_tag) return a.idem_tag < b.idem_tag;
  return a.shift < b.shift;
}

bool carrier_canonical(const FormalObject& x) {
  for (std::size_t i = 1; i < x.summands.size(); ++i)
    if (summand_key_less(x.summands[i], x.summands[i - 1])) return false;
  return true;
}

// Left fold with the first factor taken verbatim, so endpoints line up
// with the memoized powers built the same way.
BlockMorphism fold_tensor(const Backend& B,
                          const std::vector<const BlockMorphism*>& fs) {
  BlockMorphism acc = *fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i)
    acc = tensor_morphisms(B, acc, *fs[i]);
  return acc;
}

TruncatedComplex reduce_canonical(const TruncatedComplex& x) {
  return cx_canonicalize(gaussian_reduce(x).cx);
}

int honest_from(const TruncatedComplex& x) {
  return x.lo_artificial ? x.lo + 1 : x.lo;
}

}  // namespace

CounitalObject counital_canonical(const Backend& B, const CounitalObject& cu) {
  if (carrier_canonical(cu.c)) return cu;
  const int n = cu.c.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return summand_key_less(cu.c.summands[static_cast<std::size_t>(a)],
                            cu.c.summands[static_cast<std::size_t>(b)]);
  });
  FormalObject sorted;
  sorted.summands.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    sorted.summands.push_back(cu.c.summands[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  BlockMorphism uinv = bm_zero(sorted, cu.c, 0);
  for (int i = 0; i < n; ++i) {
    FormalObject one;
    one.summands.push_back(sorted.summands[static_cast<std::size_t>(i)]);
    BlockMorphism idone = bm_identity(B, one);
    bm_set(B, uinv, order[static_cast<std::size_t>(i)], i,
           bm_entry(B, idone, 0, 0));
  }
  CounitalObject out;
  out.c = sorted;
  out.counit = bm_compose(B, cu.counit, uinv);
  // The tensor square of the reordered carrier contains the same summands,
  // but pairs with equal keys land in different slots.  View both squares
  // over the sorted carrier as leaves and transport the comultiplications
  // through the shared concatenation.
  FlatDecomp orig;
  orig.obj = cu.c;
  orig.leaves.push_back(sorted);
  orig.choice.resize(static_cast<std::size_t>(n));
  orig.incl.resize(static_cast<std::size_t>(n));
  orig.proj.resize(static_cast<std::size_t>(n));
  std::vector<int> inv(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p)
    inv[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;
  for (int i = 0; i < n; ++i) {
    orig.choice[static_cast<std::size_t>(i)] = {
        inv[static_cast<std::size_t>(i)]};
    orig.incl[static_cast<std::size_t>(i)] =
        B.identity(cu.c.summands[static_cast<std::size_t>(i)].word);
    orig.proj[static_cast<std::size_t>(i)] =
        orig.incl[static_cast<std::size_t>(i)];
  }
  FlatDecomp square_orig = flat_tensor(B, orig, orig);
  FlatDecomp square_sorted =
      flat_tensor(B, flat_leaf(B, sorted), flat_leaf(B, sorted));
  BlockMorphism move = flat_transport(B, square_orig, square_sorted);
  out.delta_r = bm_compose(B, move, bm_compose(B, cu.delta_r, uinv));
  out.delta_l = bm_compose(B, move, bm_compose(B, cu.delta_l, uinv));
  if (!fo_equal(B, out.delta_r.dst, tensor_objects(B, sorted, sorted)))
    fail("CoherenceFailure",
         "counital_canonical: tensor square changed under reordering");
  return out;
}

IdemFactory::IdemFactory(const Backend& B, const CounitalObject& cu)
    : B_(&B), cu_(cu) {
  if (!carrier_canonical(cu_.c))
    fail("InvalidArgument",
         "IdemFactory: carrier summands not in canonical order; "
         "run counital_canonical first");
  CounitalCheck chk = verify_counital(B, cu_);
  if (!chk.right_ok || !chk.left_ok)
    fail("CounitInvalid", "IdemFactory: " + chk.detail);
  pow_.push_back(fo_unit(B));
  pow_.push_back(cu_.c);
}

const FormalObject& IdemFactory::power(int n) {
  if (n < 0) fail("InvalidArgument", "power: negative exponent");
  while (static_cast<int>(pow_.size()) <= n)
    pow_.push_back(tensor_objects(*B_, pow_.back(), cu_.c));
  return pow_[static_cast<std::size_t>(n)];
}

const FlatDecomp& IdemFactory::flat(int n) {
  if (n < 0) fail("InvalidArgument", "flat: negative exponent");
  if (flat_.empty()) {
    flat_.push_back(flat_unit(*B_));
    flat_.push_back(flat_leaf(*B_, cu_.c));
  }
  while (static_cast<int>(flat_.size()) <= n)
    flat_.push_back(flat_tensor(*B_, flat_.back(), flat_[1]));
  return flat_[static_cast<std::size_t>(n)];
}

int IdemFactory::power_index_of(const FormalObject& x) {
  for (int n = 0; n <= 64; ++n) {
    const FormalObject& p = power(n);
    if (fo_equal(*B_, p, x)) return n;
    if (n >= 1 && p.size() > x.size()) break;
  }
  fail("InvalidArgument",
       "tensor_slots: factor endpoints are not carrier powers");
}

BlockMorphism IdemFactory::tensor_slots(
    const std::vector<const BlockMorphism*>& fs) {
  if (fs.empty()) fail("InvalidArgument", "tensor_slots: no factors");
  std::vector<int> as, bs;
  as.reserve(fs.size());
  bs.reserve(fs.size());
  for (const BlockMorphism* f : fs) {
    as.push_back(power_index_of(f->src));
    bs.push_back(power_index_of(f->dst));
  }
  BlockMorphism acc = *fs.front();
  FlatDecomp fsrc = flat(as[0]);
  FlatDecomp fdst = flat(bs[0]);
  for (std::size_t i = 1; i < fs.size(); ++i) {
    acc = tensor_morphisms(*B_, acc, *fs[i]);
    fsrc = flat_tensor(*B_, fsrc, flat(as[i]));
    fdst = flat_tensor(*B_, fdst, flat(bs[i]));
  }
  int at = 0, bt = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    at += as[i];
    bt += bs[i];
  }
  BlockMorphism into = flat_transport(*B_, flat(at), fsrc);
  BlockMorphism back = flat_transport(*B_, fdst, flat(bt));
  return bm_compose(*B_, back, bm_compose(*B_, acc, into));
}

const BlockMorphism& IdemFactory::eps_insert(int n, int l) {
  if (n < 1 || l < 1 || l > n)
    fail("InvalidArgument", "eps_insert: slot out of range");
  auto key = std::make_pair(n, l);
  auto it = eps_.find(key);
  if (it != eps_.end()) return it->second;
  BlockMorphism left = bm_identity(*B_, power(l - 1));
  BlockMorphism right = bm_identity(*B_, power(n - l));
  BlockMorphism m = tensor_slots({&left, &cu_.counit, &right});
  if (!fo_equal(*B_, m.src, power(n)) || !fo_equal(*B_, m.dst, power(n - 1)))
    fail("CoherenceFailure", "eps_insert: endpoints disagree with powers");
  return eps_.emplace(key, std::move(m)).first->second;
}

const BlockMorphism& IdemFactory::delta_insert(int n, int l) {
  if (n < 1 || l < 1 || l > n)
    fail("InvalidArgument", "delta_insert: slot out of range");
  auto key = std::make_pair(n, l);
  auto it = del_.find(key);
  if (it != del_.end()) return it->second;
  BlockMorphism left = bm_identity(*B_, power(l - 1));
  BlockMorphism right = bm_identity(*B_, power(n - l));
  BlockMorphism m = tensor_slots({&left, &cu_.delta_r, &right});
  if (!fo_equal(*B_, m.src, power(n)) || !fo_equal(*B_, m.dst, power(n + 1)))
    fail("CoherenceFailure", "delta_insert: endpoints disagree with powers");
  return del_.emplace(key, std::move(m)).first->second;
}

const BlockMorphism& IdemFactory::en(int n) {
  if (n < 0) fail("InvalidArgument", "en: negative index");
  auto it = en_.find(n);
  if (it != en_.end()) return it->second;
  BlockMorphism e = bm_identity(*B_, power(n));
  if (n >= 2) {
    std::optional<BlockMorphism> acc;
    BlockMorphism idn = e;
    for (int l = n - 1; l >= 1; --l) {
      BlockMorphism f = bm_sub(
          *B_, idn,
          bm_compose(*B_, delta_insert(n - 1, l), eps_insert(n, l + 1)));
      acc = acc ? bm_compose(*B_, f, *acc) : f;
    }
    e = std::move(*acc);
    if (!bm_equal(*B_, bm_compose(*B_, e, e), e))
      fail("CoherenceFailure",
           "en: product of correction factors is not idempotent");
  }
  return en_.emplace(n, std::move(e)).first->second;
}

const SplitRecursion& IdemFactory::split_recursion(int n) {
  if (n < 1) fail("InvalidArgument", "split_recursion: needs n >= 1");
  auto it = split_.find(n);
  if (it != split_.end()) return it->second;
  BlockMorphism idc = bm_identity(*B_, cu_.c);
  BlockMorphism idtens = tensor_slots({&idc, &en(n)});
  SplitRecursion s;
  s.pi = bm_compose(*B_, eps_insert(n + 1, 2), idtens);
  s.sigma = bm_compose(*B_, delta_insert(n, 1), en(n));
  if (!bm_equal(*B_, bm_compose(*B_, s.pi, s.sigma), en(n)))
    fail("CoherenceFailure", "split_recursion: pi . sigma != e_n");
  if (!bm_equal(*B_, bm_sub(*B_, idtens, bm_compose(*B_, s.sigma, s.pi)),
                en(n + 1)))
    fail("CoherenceFailure",
         "split_recursion: id * e_n - sigma . pi != e_{n+1}");
  if (!bm_equal(*B_, bm_compose(*B_, idtens, s.sigma), s.sigma))
    fail("CoherenceFailure", "split_recursion: id * e_n does not absorb sigma");
  if (!bm_equal(*B_, bm_compose(*B_, s.pi, idtens), s.pi))
    fail("CoherenceFailure", "split_recursion: pi does not absorb id * e_n");
  return split_.emplace(n, std::move(s)).first->second;
}

const ImageObject& IdemFactory::image(int n) {
  if (n < 0) fail("InvalidArgument", "image: negative index");
  auto it = img_.find(n);
  if (it != img_.end()) return it->second;
  ImageObject im;
  if (n <= 1) {
    im.x = power(n);
    im.incl = bm_identity(*B_, im.x);
    im.proj = im.incl;
  } else if (B_->supports_splitting()) {
    SplitResult sp = split_idempotent(*B_, en(n));
    im.x = sp.image;
    im.incl = sp.sigma;
    im.proj = sp.pi;
  } else {
    const BlockMorphism& e = en(n);
    std::string tag = "e" + std::to_string(n);
    im.x = karoubi_image(*B_, e, tag);
    im.incl = karoubi_include(*B_, e, im.x);
    im.proj = karoubi_project(*B_, e, im.x);
  }
  if (!bm_equal(*B_, bm_compose(*B_, im.incl, im.proj), en(n)))
    fail("CoherenceFailure", "image: incl . proj != e_n");
  if (!bm_equal(*B_, bm_compose(*B_, im.proj, im.incl),
                bm_identity(*B_, im.x)))
    fail("CoherenceFailure", "image: proj . incl != id");
  return img_.emplace(n, std::move(im)).first->second;
}

const BlockMorphism& IdemFactory::delta_full(int n) {
  if (n < 1) fail("InvalidArgument", "delta_full: needs n >= 1");
  auto it = dfull_.find(n);
  if (it != dfull_.end()) return it->second;
  BlockMorphism d = bm_compose(*B_, eps_insert(n, 1), en(n));
  if (n >= 2) {
    if (!bm_equal(*B_, bm_compose(*B_, en(n - 1), d), d))
      fail("CoherenceFailure", "delta_full: e_{n-1} does not absorb delta_n");
    if (!bm_is_zero(*B_, bm_compose(*B_, delta_full(n - 1), d)))
      fail("CoherenceFailure", "delta_full: consecutive maps do not vanish");
  }
  return dfull_.emplace(n, std::move(d)).first->second;
}

const BlockMorphism& IdemFactory::delta_hat(int n) {
  if (n < 1) fail("InvalidArgument", "delta_hat: needs n >= 1");
  auto it = dhat_.find(n);
  if (it != dhat_.end()) return it->second;
  const ImageObject& top = image(n);
  const ImageObject& bot = image(n - 1);
  BlockMorphism d = bm_compose(*B_, bot.proj,
                               bm_compose(*B_, delta_full(n), top.incl));
  if (!bm_equal(*B_, bm_compose(*B_, bot.incl, d),
                bm_compose(*B_, delta_full(n), top.incl)))
    fail("CoherenceFailure",
         "delta_hat: delta_n does not restrict to the image summands");
  if (n >= 2 && !bm_is_zero(*B_, bm_compose(*B_, delta_hat(n - 1), d)))
    fail("CoherenceFailure", "delta_hat: consecutive maps do not vanish");
  return dhat_.emplace(n, std::move(d)).first->second;
}

TruncatedComplex IdemFactory::build_P(int depth) {
  if (depth < 0) fail("InvalidArgument", "build_P: negative depth");
  std::vector<FormalObject> objs;
  std::vector<BlockMorphism> diffs;
  for (int k = depth; k >= 0; --k) {
    objs.push_back(power(k + 1));
    if (k >= 1) {
      BlockMorphism d = bm_zero(power(k + 1), power(k), 0);
      for (int i = 0; i <= k; ++i) {
        const BlockMorphism& t = eps_insert(k + 1, i + 1);
        d = (i % 2 == 0) ? bm_add(*B_, d, t) : bm_sub(*B_, d, t);
      }
      diffs.push_back(std::move(d));
    }
  }
  return cx_make(*B_, -depth, std::move(objs), std::move(diffs), true, false);
}

ChainMap IdemFactory::counit_map(int depth) {
  ChainMap f;
  f.src = build_P(depth);
  f.dst = cx_unit(*B_);
  f.hdeg = 0;
  f.comp[0] = cu_.counit;
  std::string why;
  if (!chainmap_closed(f, &why))
    fail("CoherenceFailure", "counit_map: " + why);
  return f;
}

TruncatedComplex IdemFactory::build_A(int depth) {
  return cx_cone(counit_map(depth));
}

ChainMap IdemFactory::unit_map(int depth) {
  ChainMap f;
  f.src = cx_unit(*B_);
  f.dst = build_A(depth);
  f.hdeg = 0;
  const FormalObject& a0 = f.dst.at(0);
  if (a0.size() != 1)
    fail("CoherenceFailure", "unit_map: cone has unexpected degree-0 part");
  BlockMorphism u = bm_zero(fo_unit(*B_), a0, 0);
  bm_set(*B_, u, 0, 0, B_->identity(B_->unit_word()));
  f.comp[0] = std::move(u);
  std::string why;
  if (!chainmap_closed(f, &why)) fail("CoherenceFailure", "unit_map: " + why);
  return f;
}

IdempotentBundle IdemFactory::build_bundle(int depth) {
  IdempotentBundle b;
  b.c = cu_;
  b.P = build_P(depth);
  b.A = build_A(depth);
  b.counit = counit_map(depth);
  b.unit = unit_map(depth);
  b.depth = depth;
  return b;
}

Normalized IdemFactory::build_normalized(int depth) {
  if (depth < 0) fail("InvalidArgument", "build_normalized: negative depth");
  Normalized out;
  {
    std::vector<FormalObject> objs;
    std::vector<BlockMorphism> diffs;
    for (int k = depth; k >= 0; --k) {
      objs.push_back(image(k + 1).x);
      if (k >= 1) diffs.push_back(delta_hat(k + 1));
    }
    out.P = cx_make(*B_, -depth, std::move(objs), std::move(diffs), true,
                    false);
  }
  {
    std::vector<FormalObject> objs;
    std::vector<BlockMorphism> diffs;
    for (int k = depth; k >= 1; --k) {
      objs.push_back(image(k).x);
      diffs.push_back(delta_hat(k));
    }
    objs.push_back(power(0));
    out.A = cx_make(*B_, -depth, std::move(objs), std::move(diffs), true,
                    false);
  }
  return out;
}

TruncatedComplex IdemFactory::cone_of_counit() {
  ChainMap f;
  f.src = cx_single(*B_, cu_.c, 0);
  f.dst = cx_unit(*B_);
  f.hdeg = 0;
  f.comp[0] = cu_.counit;
  return cx_cone(f);
}

Stabilization IdemFactory::stabilize_power(int depth, int max_power) {
  if (depth < 1) fail("InvalidArgument", "stabilize_power: needs depth >= 1");
  if (max_power <= 0) max_power = depth + 4;
  TruncatedComplex F = cone_of_counit();
  TruncatedComplex prev = cx_canonicalize(gaussian_reduce(F).cx);
  TruncatedComplex acc = F;
  const int from = -depth + 1;
  for (int p = 2; p <= max_power; ++p) {
    acc = gaussian_reduce(cx_tensor(acc, F)).cx;
    TruncatedComplex can = cx_canonicalize(acc);
    if (cx_window_equal(prev, can, from, 0)) {
      Stabilization s;
      s.stable = can;
      s.power = p;
      s.window_from = from;
      if (B_->supports_splitting()) {
        Normalized nn = build_normalized(depth);
        s.matches_normalized =
            cx_window_equal(cx_canonicalize(nn.A), can, from, 0);
      }
      return s;
    }
    prev = std::move(can);
  }
  fail("NoStabilization",
       "stabilize_power: window [" + std::to_string(from) +
           ", 0] still changing after power " + std::to_string(max_power));
}

LaurentPoly IdemFactory::quasi_lambda() {
  if (cu_.c.size() != 1)
    fail("NotQuasiIdempotent",
         "quasi_lambda: carrier must be a single summand");
  const Summand& s = cu_.c.summands[0];
  const FormalObject& sq = power(2);
  LaurentPoly lam = LaurentPoly::zero(B_->ring());
  for (const Summand& t : sq.summands) {
    if (t.word != s.word || t.idem_tag != s.idem_tag)
      fail("NotQuasiIdempotent",
           "quasi_lambda: tensor square leaves the carrier's word");
    lam = lam.add(LaurentPoly::q_power(B_->ring(), t.shift - s.shift));
  }
  return lam;
}

K0Class k0_class_Xn(const Backend& B, const CounitalObject& cu, int n,
                    bool quasi) {
  if (n < 1) fail("InvalidArgument", "k0_class_Xn: needs n >= 1");
  K0Class out(B.ring());
  std::ostringstream sym;
  sym << "[C]([C]-1)^" << (n - 1);
  out.symbolic = sym.str();
  out.quasi = quasi;
  if (quasi) {
    IdemFactory fac(B, cu);
    out.lambda = fac.quasi_lambda();
    LaurentPoly lm1 = out.lambda.sub(LaurentPoly::one(B.ring()));
    LaurentPoly c = LaurentPoly::one(B.ring());
    for (int i = 1; i < n; ++i) c = c.mul(lm1);
    out.coeff = c;
  }
  return out;
}

bool counit_order_witness(const Backend& B, const CounitalObject& c1,
                          const CounitalObject& c2, const BlockMorphism& nu,
                          std::string* why) {
  if (nu.degree != 0 || !fo_equal(B, nu.src, c1.c) ||
      !fo_equal(B, nu.dst, c2.c)) {
    if (why) *why = "witness endpoints or degree mismatch";
    return false;
  }
  if (!bm_equal(B, bm_compose(B, c2.counit, nu), c1.counit)) {
    if (why) *why = "counits do not intertwine";
    return false;
  }
  return true;
}

RelativeIdempotent relative_idempotent(const Backend& B,
                                       const CounitalObject& c1,
                                       const CounitalObject& c2,
                                       const BlockMorphism& nu, int depth,
                                       bool verify) {
  std::string why;
  if (!counit_order_witness(B, c1, c2, nu, &why))
    fail("WitnessInvalid", "relative_idempotent: " + why);
  IdemFactory f1(B, c1);
  IdemFactory f2(B, c2);
  ChainMap phi;
  phi.src = f1.build_P(depth);
  phi.dst = f2.build_P(depth);
  phi.hdeg = 0;
  for (int k = 0; k <= depth; ++k) {
    std::vector<const BlockMorphism*> fs(static_cast<std::size_t>(k + 1),
                                         &nu);
    phi.comp[-k] = fold_tensor(B, fs);
  }
  if (!chainmap_closed(phi, &why))
    fail("CoherenceFailure", "relative_idempotent: phi not a chain map: " + why);
  RelativeIdempotent out;
  out.phi = phi;
  out.E = cx_cone(phi);
  if (verify) {
    const TruncatedComplex& E = out.E;
    const TruncatedComplex& P1 = phi.src;
    const TruncatedComplex& P2 = phi.dst;
    TruncatedComplex ep = gaussian_reduce(cx_tensor(E, P1)).cx;
    TruncatedComplex pe = gaussian_reduce(cx_tensor(P1, E)).cx;
    out.kills = cx_is_zero_on(ep, honest_from(ep), ep.hi) &&
                cx_is_zero_on(pe, honest_from(pe), pe.hi);
    TruncatedComplex er = reduce_canonical(E);
    TruncatedComplex ep2 = reduce_canonical(cx_tensor(E, P2));
    TruncatedComplex p2e = reduce_canonical(cx_tensor(P2, E));
    out.absorbed =
        cx_window_equal(ep2, er, std::max(honest_from(ep2), honest_from(er)),
                        0) &&
        cx_window_equal(p2e, er, std::max(honest_from(p2e), honest_from(er)),
                        0);
    TruncatedComplex ee = reduce_canonical(cx_tensor(E, E));
    out.idempotent = cx_window_equal(
        ee, er, std::max(honest_from(ee), honest_from(er)), 0);
    std::ostringstream d;
    d << "kills=" << (out.kills ? "yes" : "no")
      << " absorbed=" << (out.absorbed ? "yes" : "no")
      << " idempotent=" << (out.idempotent ? "yes" : "no");
    out.detail = d.str();
  }
  return out;
}

int tl_word_through_degree(const std::string& word) {
  std::size_t colon = word.find(':');
  if (word.empty() || word[0] != 'n' || colon == std::string::npos)
    fail("InvalidArgument", "tl_word_through_degree: bad word " + word);
  int n = std::stoi(word.substr(1, colon - 1));
  std::string rest = word.substr(colon + 1);
  std::size_t plus = rest.find('+');
  if (plus != std::string::npos) rest = rest.substr(0, plus);
  std::vector<int> partner;
  std::stringstream ss(rest);
  std::string tok;
  while (std::getline(ss, tok, ',')) partner.push_back(std::stoi(tok));
  if (static_cast<int>(partner.size()) != 2 * n)
    fail("InvalidArgument", "tl_word_through_degree: bad word " + word);
  int through = 0;
  for (int i = 0; i < n; ++i)
    if (partner[static_cast<std::size_t>(i)] >= n) ++through;
  return through;
}

namespace {

void admissible_rec(int n, int k, std::vector<int>& cur, int sum,
                    std::vector<std::vector<int>>& out) {
  int left = n - static_cast<int>(cur.size());
  if (left == 0) {
    if (sum == k) out.push_back(cur);
    return;
  }
  if (sum + left < k || sum - left > k) return;
  cur.push_back(1);
  admissible_rec(n, k, cur, sum + 1, out);
  cur.pop_back();
  if (sum >= 1) {
    cur.push_back(-1);
    admissible_rec(n, k, cur, sum - 1, out);
    cur.pop_back();
  }
}

std::vector<std::pair<int, int>> stack_matching(const std::vector<int>& eps) {
  std::vector<std::pair<int, int>> cups;
  std::vector<int> stack;
  for (int i = 0; i < static_cast<int>(eps.size()); ++i) {
    if (eps[static_cast<std::size_t>(i)] == 1) {
      stack.push_back(i);
    } else {
      cups.push_back({stack.back(), i});
      stack.pop_back();
    }
  }
  std::sort(cups.begin(), cups.end());
  return cups;
}

}  // namespace

TLFamily tl_family(const TLBackend& B, int depth, bool verify) {
  const int n = B.strands();
  if (n < 1) fail("InvalidArgument", "tl_family: needs at least one strand");
  TLFamily fam;
  fam.strands = n;
  fam.depth = depth;

  struct Layer {
    int k = 0;
    std::vector<std::vector<int>> eps;  // sorted by cup word
    std::vector<std::string> words;
    std::map<std::string, int> index;
    std::optional<CounitalObject> c;
  };
  std::vector<Layer> layers;
  for (int k = n % 2; k <= n; k += 2) {
    Layer L;
    L.k = k;
    std::vector<int> cur;
    admissible_rec(n, k, cur, 0, L.eps);
    if (L.eps.empty())
      fail("Internal", "tl_family: no admissible sequences at a layer");
    std::vector<std::pair<std::string, int>> order;
    for (int i = 0; i < static_cast<int>(L.eps.size()); ++i)
      order.push_back({tl_cup_word(B, stack_matching(
                           L.eps[static_cast<std::size_t>(i)])),
                       i});
    std::sort(order.begin(), order.end());
    std::vector<std::vector<int>> sorted_eps;
    for (auto& [w, i] : order) {
      sorted_eps.push_back(L.eps[static_cast<std::size_t>(i)]);
      L.words.push_back(w);
    }
    L.eps = std::move(sorted_eps);
    for (int i = 0; i < static_cast<int>(L.words.size()); ++i)
      L.index[L.words[static_cast<std::size_t>(i)]] = i;
    std::optional<CounitalObject> acc;
    for (auto& e : L.eps) {
      CounitalObject cue = tl_cup_counital(B, stack_matching(e));
      acc = acc ? direct_sum_counital(B, *acc, cue) : cue;
    }
    L.c = std::move(acc);
    layers.push_back(std::move(L));
  }

  std::vector<TLFamilyMember> asc;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    Layer& L = layers[li];
    TLFamilyMember m;
    m.k = L.k;
    m.c = *L.c;
    if (li == 0) {
      IdemFactory fac(B, m.c);
      m.P = fac.build_P(depth);
      m.E = m.P;
      m.has_nu = false;
    } else {
      Layer& prev = layers[li - 1];
      BlockMorphism nu = bm_zero(prev.c->c, L.c->c, 0);
      for (int j = 0; j < static_cast<int>(prev.eps.size()); ++j) {
        auto cups = stack_matching(prev.eps[static_cast<std::size_t>(j)]);
        auto pr = cups.front();  // smallest left endpoint, outermost
        std::vector<int> mu = prev.eps[static_cast<std::size_t>(j)];
        mu[static_cast<std::size_t>(pr.second)] = 1;
        std::string muw = tl_cup_word(B, stack_matching(mu));
        auto it = L.index.find(muw);
        if (it == L.index.end())
          fail("Internal", "tl_family: flipped sequence left the layer");
        bm_set(B, nu, it->second, j,
               B.saddle(prev.words[static_cast<std::size_t>(j)], muw));
      }
      RelativeIdempotent rel =
          relative_idempotent(B, *prev.c, *L.c, nu, depth, false);
      m.P = rel.phi.dst;
      m.E = rel.E;
      m.nu = std::move(nu);
      m.has_nu = true;
    }
    asc.push_back(std::move(m));
  }
  fam.members.assign(asc.rbegin(), asc.rend());

  // Assemble the one-sided twist: block diagonal of the E layers plus an
  // identity connector from the shifted lower-layer part of each cone
  // into the matching part of the next layer down.
  int lo = 0;
  for (auto& m : fam.members) lo = std::min(lo, m.E.lo);
  const int hi = 0;
  const int nm = static_cast<int>(fam.members.size());
  auto member_part = [&](int mi, int j) -> FormalObject {
    const TruncatedComplex& E = fam.members[static_cast<std::size_t>(mi)].E;
    return E.in_window(j) ? E.at(j) : FormalObject{};
  };
  // size of the shifted lower-layer block at degree j inside member mi
  auto xsize = [&](int mi, int j) -> int {
    const TLFamilyMember& m = fam.members[static_cast<std::size_t>(mi)];
    if (!m.has_nu) return 0;
    const TruncatedComplex& PL =
        fam.members[static_cast<std::size_t>(mi + 1)].P;
    return PL.in_window(j + 1) ? PL.at(j + 1).size() : 0;
  };
  std::vector<FormalObject> objs;
  std::vector<BlockMorphism> diffs;
  std::vector<std::vector<int>> offs;  // per degree, per member
  for (int j = lo; j <= hi; ++j) {
    FormalObject total;
    std::vector<int> off;
    for (int mi = 0; mi < nm; ++mi) {
      off.push_back(total.size());
      FormalObject part = member_part(mi, j);
      for (auto& s : part.summands) total.summands.push_back(s);
    }
    offs.push_back(std::move(off));
    objs.push_back(std::move(total));
  }
  const Scalar minus_one = s_from_int(B.ring(), -1);
  for (int j = lo; j < hi; ++j) {
    BlockMorphism d = bm_zero(objs[static_cast<std::size_t>(j - lo)],
                              objs[static_cast<std::size_t>(j - lo + 1)], 0);
    for (int mi = 0; mi < nm; ++mi) {
      const TLFamilyMember& m = fam.members[static_cast<std::size_t>(mi)];
      if (m.E.in_window(j) && m.E.in_window(j + 1) && j < m.E.hi) {
        const BlockMorphism& dm = m.E.d(j);
        for (auto& [ij, el] : dm.entries)
          bm_set(B, d, offs[static_cast<std::size_t>(j - lo + 1)]
                               [static_cast<std::size_t>(mi)] +
                           ij.first,
                 offs[static_cast<std::size_t>(j - lo)]
                     [static_cast<std::size_t>(mi)] +
                     ij.second,
                 el);
      }
      // connector into the next layer down
      if (m.has_nu) {
        const TLFamilyMember& low =
            fam.members[static_cast<std::size_t>(mi + 1)];
        const TruncatedComplex& PL = low.P;
        if (!PL.in_window(j + 1)) continue;
        const FormalObject& blk = PL.at(j + 1);
        if (blk.size() == 0) continue;
        if (!low.E.in_window(j + 1)) continue;
        int src_base = offs[static_cast<std::size_t>(j - lo)]
                           [static_cast<std::size_t>(mi)];
        int dst_base = offs[static_cast<std::size_t>(j - lo + 1)]
                           [static_cast<std::size_t>(mi + 1)] +
                       xsize(mi + 1, j + 1);
        for (int s = 0; s < blk.size(); ++s) {
          FormalObject one;
          one.summands.push_back(blk.summands[static_cast<std::size_t>(s)]);
          BlockMorphism idone = bm_identity(B, one);
          bm_set(B, d, dst_base + s, src_base + s,
                 B.scale(minus_one, bm_entry(B, idone, 0, 0)));
        }
      }
    }
    diffs.push_back(std::move(d));
  }
  fam.assembled = cx_make(B, lo, std::move(objs), std::move(diffs), true,
                          false);

  if (verify) {
    for (auto& m : fam.members)
      for (int j = m.E.lo; j <= m.E.hi; ++j)
        for (auto& s : m.E.at(j).summands)
          if (tl_word_through_degree(s.word) > m.k)
            fail("CoherenceFailure",
                 "tl_family: word above the layer's through-strand bound");
    TruncatedComplex red = reduce_canonical(fam.assembled);
    bool unit_ok = cx_is_zero_on(red, fam.assembled.lo + 1, -1) &&
                   red.in_window(0) && fo_equal(B, red.at(0), fo_unit(B));
    if (!unit_ok)
      fail("CoherenceFailure",
           "tl_family: assembly does not reduce to the unit");
  }
  return fam;
}

RecognizeReport recognize(const Backend& B, const TruncatedComplex& p,
                          const BlockMorphism& eps0, int depth) {
  for (int k = 1; k <= p.hi; ++k)
    if (p.in_window(k) && p.at(k).size() > 0)
      fail("InvalidArgument", "recognize: complex has positive-degree support");
  if (!p.in_window(0))
    fail("InvalidArgument", "recognize: no degree-0 part to work from");
  FormalObject C = p.at(0);
  if (!carrier_canonical(C))
    fail("InvalidArgument",
         "recognize: degree-0 part not in canonical summand order");
  if (eps0.degree != 0 || !fo_equal(B, eps0.src, C) ||
      !fo_equal(B, eps0.dst, fo_unit(B)))
    fail("InvalidArgument", "recognize: counit candidate endpoints mismatch");
  FormalObject CC = tensor_objects(B, C, C);
  std::vector<BlockMorphism> basis = bm_hom_basis(B, C, CC, 0);
  BlockMorphism idc = bm_identity(B, C);
  std::vector<Scalar> target = bm_coords(B, idc);
  auto solve_side = [&](bool right) -> BlockMorphism {
    BlockMorphism cover = right ? tensor_morphisms(B, idc, eps0)
                                : tensor_morphisms(B, eps0, idc);
    Mat M(B.ring(), static_cast<int>(target.size()),
          static_cast<int>(basis.size()));
    for (int j = 0; j < static_cast<int>(basis.size()); ++j) {
      std::vector<Scalar> col = bm_coords(
          B, bm_compose(B, cover, basis[static_cast<std::size_t>(j)]));
      for (int i = 0; i < static_cast<int>(col.size()); ++i)
        M.at(i, j) = col[static_cast<std::size_t>(i)];
    }
    auto sol = solve_linear(M, target);
    if (!sol)
      fail("NoRightInverse",
           right ? "recognize: no right-sided section of the counit"
                 : "recognize: no left-sided section of the counit");
    return bm_from_coords(B, C, CC, 0, *sol);
  };
  CounitalObject cu;
  cu.c = C;
  cu.counit = eps0;
  cu.delta_r = solve_side(true);
  cu.delta_l = solve_side(false);
  CounitalCheck chk = verify_counital(B, cu);
  if (!chk.right_ok || !chk.left_ok)
    fail("CoherenceFailure", "recognize: solved sections fail the counit laws");
  IdemFactory fac(B, cu);
  TruncatedComplex rp = reduce_canonical(p);
  TruncatedComplex rq = reduce_canonical(fac.build_P(depth));
  int from = std::max({honest_from(rp), honest_from(rq), -depth + 1});
  RecognizeReport out;
  out.c = cu;
  out.window_match = cx_window_equal(rp, rq, from, 0);
  std::ostringstream d;
  d << "compared degrees [" << from << ", 0]";
  out.detail = d.str();
  return out;
}

}  // namespace catidem
