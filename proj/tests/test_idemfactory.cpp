#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "catidem/backend_baralg.hpp"
#include "catidem/backend_poly.hpp"
#include "catidem/backend_tl.hpp"
#include "catidem/idemfactory.hpp"
#include "catidem/linalg.hpp"

using namespace catidem;

namespace {

PolyBackend& pb() {
  static PolyBackend b(Ring::integers());
  return b;
}

BarBackend& bb() {
  static BarBackend b(Ring::rationals());
  return b;
}

TLBackend& t2() {
  static TLBackend b(2, Ring::integers());
  return b;
}

TLBackend& t3() {
  static TLBackend b(3, Ring::integers());
  return b;
}

bool elem_equal(const Backend& B, const ElemPtr& a, const ElemPtr& b) {
  if (B.is_zero(a) && B.is_zero(b)) return true;
  ElemPtr d = B.add(a, B.scale(s_from_int(B.ring(), -1), b));
  return B.is_zero(d);
}

TruncatedComplex redc(const TruncatedComplex& x) {
  return cx_canonicalize(gaussian_reduce(x).cx);
}

int honest(const TruncatedComplex& x) {
  return x.lo_artificial ? x.lo + 1 : x.lo;
}

bool same_window(const TruncatedComplex& a, const TruncatedComplex& b) {
  return cx_window_equal(a, b, std::max(honest(a), honest(b)), 0);
}

std::map<int, int> shift_counts(const FormalObject& x) {
  std::map<int, int> out;
  for (const Summand& s : x.summands) ++out[s.shift];
  return out;
}

}  // namespace

TEST_CASE("tensor powers of the polynomial object") {
  IdemFactory fac(pb(), poly_counital(pb()));
  REQUIRE(fac.power(0).size() == 1);
  REQUIRE(fac.power(0).summands[0].word == pb().unit_word());
  REQUIRE(fac.power(1).size() == 1);
  REQUIRE(fac.power(3).size() == 4);
  std::map<int, int> c3 = shift_counts(fac.power(3));
  REQUIRE(c3 == std::map<int, int>{{0, 1}, {2, 2}, {4, 1}});
  // multiplicity of shift 2j in the n-th power is binomial(n-1, j)
  std::map<int, int> c4 = shift_counts(fac.power(4));
  REQUIRE(c4 == std::map<int, int>{{0, 1}, {2, 3}, {4, 3}, {6, 1}});
}

TEST_CASE("insertions obey the counit laws in every slot") {
  IdemFactory fac(pb(), poly_counital(pb()));
  for (int n = 1; n <= 3; ++n)
    for (int l = 1; l <= n; ++l) {
      BlockMorphism round =
          bm_compose(pb(), fac.eps_insert(n + 1, l + 1), fac.delta_insert(n, l));
      REQUIRE(bm_equal(pb(), round, bm_identity(pb(), fac.power(n))));
      // this comultiplication also has the counit as a left inverse
      BlockMorphism round2 =
          bm_compose(pb(), fac.eps_insert(n + 1, l), fac.delta_insert(n, l));
      REQUIRE(bm_equal(pb(), round2, bm_identity(pb(), fac.power(n))));
    }
}

TEST_CASE("higher idempotents on the polynomial object") {
  IdemFactory fac(pb(), poly_counital(pb()));
  std::string w = poly_counital(pb()).c.summands[0].word;

  // e_2 projects onto the shifted copy inside C * C
  BlockMorphism expect = bm_zero(fac.power(2), fac.power(2), 0);
  bm_set(pb(), expect, 1, 1, pb().identity(w));
  REQUIRE(bm_equal(pb(), fac.en(2), expect));

  // e_3 agrees with the two-sided product of shifted e_2
  BlockMorphism idc = bm_identity(pb(), poly_counital(pb()).c);
  BlockMorphism left = fac.tensor_slots({&fac.en(2), &idc});
  BlockMorphism right = fac.tensor_slots({&idc, &fac.en(2)});
  REQUIRE(bm_equal(pb(), fac.en(3), bm_compose(pb(), left, right)));

  REQUIRE_NOTHROW(fac.en(6));

  // counit insertions in any slot past the first kill e_n
  for (int n = 2; n <= 4; ++n) {
    for (int l = 2; l <= n; ++l)
      REQUIRE(bm_is_zero(pb(),
                         bm_compose(pb(), fac.eps_insert(n, l), fac.en(n))));
    REQUIRE_FALSE(
        bm_is_zero(pb(), bm_compose(pb(), fac.eps_insert(n, 1), fac.en(n))));
  }
}

TEST_CASE("splitting recursion and image summands (poly)") {
  IdemFactory fac(pb(), poly_counital(pb()));
  std::string w = poly_counital(pb()).c.summands[0].word;
  for (int n = 1; n <= 3; ++n) REQUIRE_NOTHROW(fac.split_recursion(n));
  for (int n = 1; n <= 4; ++n) {
    const ImageObject& im = fac.image(n);
    REQUIRE(im.x.size() == 1);
    REQUIRE(im.x.summands[0].word == w);
    REQUIRE(im.x.summands[0].shift == 2 * (n - 1));
  }
}

TEST_CASE("normalized complexes of the polynomial object") {
  IdemFactory fac(pb(), poly_counital(pb()));
  std::string w = poly_counital(pb()).c.summands[0].word;
  Normalized nn = fac.build_normalized(4);
  for (int k = 0; k <= 4; ++k) {
    REQUIRE(nn.P.at(-k).size() == 1);
    REQUIRE(nn.P.at(-k).summands[0].shift == 2 * k);
  }
  REQUIRE(nn.A.at(0).summands[0].word == pb().unit_word());
  for (int k = 1; k <= 4; ++k)
    REQUIRE(nn.A.at(-k).summands[0].shift == 2 * (k - 1));
  for (int k = -4; k < 0; ++k) REQUIRE_FALSE(bm_is_zero(pb(), nn.P.d(k)));

  EulerResult eu = euler_series(nn.P);
  LaurentPoly expect = LaurentPoly::zero(pb().ring());
  for (int k = 0; k <= 4; ++k) {
    LaurentPoly t = LaurentPoly::q_power(pb().ring(), 2 * k);
    expect = (k % 2 == 0) ? expect.add(t) : expect.sub(t);
  }
  REQUIRE(eu.classes.at(w) == expect);
}

TEST_CASE("bundle complexes and their reduction to the normalized model") {
  IdemFactory fac(pb(), poly_counital(pb()));
  IdempotentBundle b = fac.build_bundle(3);
  REQUIRE(b.P.at(0).size() == 1);
  REQUIRE(b.A.at(0).size() == 1);
  REQUIRE(b.A.at(0).summands[0].word == pb().unit_word());
  for (int k = 1; k <= 3; ++k) REQUIRE(b.A.at(-k).size() == (1 << (k - 1)));

  Normalized nn = fac.build_normalized(3);
  REQUIRE(same_window(redc(b.P), cx_canonicalize(nn.P)));
  REQUIRE(same_window(redc(b.A), cx_canonicalize(nn.A)));
}

TEST_CASE("truncated idempotence of the normalized complex (poly)") {
  IdemFactory fac(pb(), poly_counital(pb()));
  Normalized nn = fac.build_normalized(3);
  TruncatedComplex sq = redc(cx_tensor(nn.P, nn.P));
  REQUIRE(same_window(sq, redc(nn.P)));
}

TEST_CASE("stabilized cone powers match the normalized model (poly)") {
  IdemFactory fac(pb(), poly_counital(pb()));
  Stabilization st = fac.stabilize_power(4);
  REQUIRE(st.matches_normalized);
  REQUIRE(st.power <= 8);
  REQUIRE(st.stable.at(0).size() == 1);
  REQUIRE(st.stable.at(0).summands[0].word == pb().unit_word());
}

TEST_CASE("relative complement collapses for the identity witness") {
  CounitalObject cu = poly_counital(pb());
  RelativeIdempotent rel = relative_idempotent(
      pb(), cu, cu, bm_identity(pb(), cu.c), 3, true);
  REQUIRE(rel.kills);
  REQUIRE(rel.absorbed);
  REQUIRE(rel.idempotent);
  TruncatedComplex red = redc(rel.E);
  REQUIRE(cx_is_zero_on(red, honest(red), 0));
}

TEST_CASE("relative complement over the zero object is the whole complex") {
  CounitalObject cu = poly_counital(pb());
  CounitalObject zero;
  zero.counit = bm_zero(zero.c, fo_unit(pb()), 0);
  zero.delta_r = bm_zero(zero.c, zero.c, 0);
  zero.delta_l = zero.delta_r;
  BlockMorphism nu = bm_zero(zero.c, cu.c, 0);
  RelativeIdempotent rel = relative_idempotent(pb(), zero, cu, nu, 3, true);
  REQUIRE(rel.kills);
  REQUIRE(rel.absorbed);
  REQUIRE(rel.idempotent);
  IdemFactory fac(pb(), cu);
  REQUIRE(same_window(redc(rel.E), redc(fac.build_P(3))));
}

TEST_CASE("witness validation rejects maps that break the counit") {
  CounitalObject cu = poly_counital(pb());
  BlockMorphism bad = bm_zero(cu.c, cu.c, 0);
  REQUIRE_THROWS_AS(relative_idempotent(pb(), cu, cu, bad, 2, false), Error);
  std::string why;
  REQUIRE_FALSE(counit_order_witness(pb(), cu, cu, bad, &why));
  REQUIRE(counit_order_witness(pb(), cu, cu, bm_identity(pb(), cu.c)));
}

TEST_CASE("K0 class of the split summands (poly)") {
  CounitalObject cu = poly_counital(pb());
  K0Class k0 = k0_class_Xn(pb(), cu, 3, true);
  REQUIRE(k0.symbolic == "[C]([C]-1)^2");
  REQUIRE(k0.quasi);
  LaurentPoly lam = LaurentPoly::one(pb().ring())
                        .add(LaurentPoly::q_power(pb().ring(), 2));
  REQUIRE(k0.lambda == lam);
  REQUIRE(k0.coeff == LaurentPoly::q_power(pb().ring(), 4));

  IdemFactory fac(pb(), cu);
  REQUIRE(k0.coeff ==
          LaurentPoly::q_power(pb().ring(), fac.image(3).x.summands[0].shift));

  K0Class sym = k0_class_Xn(pb(), cu, 3, false);
  REQUIRE_FALSE(sym.quasi);
  REQUIRE(sym.coeff.is_zero());
}

TEST_CASE("counital structure recovered from the complex (poly)") {
  CounitalObject cu = poly_counital(pb());
  IdemFactory fac(pb(), cu);
  TruncatedComplex p = fac.build_P(4);
  RecognizeReport rep = recognize(pb(), p, cu.counit, 4);
  REQUIRE(rep.window_match);
  CounitalCheck chk = verify_counital(pb(), rep.c);
  REQUIRE(chk.right_ok);
  REQUIRE(chk.left_ok);

  // the cone of the counit admits no section over its degree-0 part
  TruncatedComplex a = fac.build_A(3);
  BlockMorphism eps0 = bm_zero(a.at(0), fo_unit(pb()), 0);
  REQUIRE_THROWS_AS(recognize(pb(), a, eps0, 3), Error);

  // complexes with positive-degree support are rejected up front
  TruncatedComplex moved = cx_shift(p, -1);
  REQUIRE_THROWS_AS(recognize(pb(), moved, cu.counit, 3), Error);
}

TEST_CASE("factory rejects broken counital structures") {
  CounitalObject cu = poly_counital(pb());
  cu.counit = bm_zero(cu.c, fo_unit(pb()), 0);
  REQUIRE_THROWS_AS(IdemFactory(pb(), cu), Error);
}

TEST_CASE("bar idempotents match the subset-shift formula") {
  IdemFactory fac(bb(), bar_counital(bb()));
  for (int n = 2; n <= 5; ++n) {
    ElemPtr built = bm_entry(bb(), fac.en(n), 0, 0);
    ElemPtr formula = bar_e_formula(bb(), n - 1);
    REQUIRE(elem_equal(bb(), built, formula));
  }
}

TEST_CASE("bar idempotents all have rank four") {
  IdemFactory fac(bb(), bar_counital(bb()));
  for (int n = 1; n <= 5; ++n) {
    Mat m = bb().elem_matrix(bm_entry(bb(), fac.en(n), 0, 0));
    REQUIRE(rank_over_field(m) == 4);
  }
}

TEST_CASE("bar counit insertions kill the idempotent past slot one") {
  IdemFactory fac(bb(), bar_counital(bb()));
  for (int n = 2; n <= 4; ++n) {
    for (int l = 2; l <= n; ++l)
      REQUIRE(bm_is_zero(bb(),
                         bm_compose(bb(), fac.eps_insert(n, l), fac.en(n))));
    REQUIRE_FALSE(
        bm_is_zero(bb(), bm_compose(bb(), fac.eps_insert(n, 1), fac.en(n))));
  }
}

TEST_CASE("bar images are lazy summands and chain together") {
  IdemFactory fac(bb(), bar_counital(bb()));
  const ImageObject& im = fac.image(2);
  REQUIRE(im.x.size() == 1);
  REQUIRE(im.x.summands[0].idem_tag == "e2");
  Normalized nn = fac.build_normalized(3);
  for (int k = 0; k <= 3; ++k) REQUIRE(nn.P.at(-k).size() == 1);
  REQUIRE(nn.A.at(0).summands[0].word == bb().unit_word());
}

TEST_CASE("bar cone powers do not stabilize") {
  IdemFactory fac(bb(), bar_counital(bb()));
  REQUIRE_THROWS_AS(fac.stabilize_power(2, 4), Error);
}

TEST_CASE("cup object tower on two strands") {
  CounitalObject cu = tl_cup_counital(t2(), {{0, 1}});
  IdemFactory fac(t2(), cu);
  std::string w = cu.c.summands[0].word;
  for (int n = 1; n <= 3; ++n) {
    const ImageObject& im = fac.image(n);
    REQUIRE(im.x.size() == 1);
    REQUIRE(im.x.summands[0].word == w);
    REQUIRE(im.x.summands[0].shift == 2 * n - 1);
  }
  std::map<int, int> c3 = shift_counts(fac.power(3));
  REQUIRE(c3 == std::map<int, int>{{1, 1}, {3, 2}, {5, 1}});
  LaurentPoly lam = LaurentPoly::one(t2().ring())
                        .add(LaurentPoly::q_power(t2().ring(), 2));
  REQUIRE(fac.quasi_lambda() == lam);

  BlockMorphism idc = bm_identity(t2(), cu.c);
  BlockMorphism left = fac.tensor_slots({&fac.en(2), &idc});
  BlockMorphism right = fac.tensor_slots({&idc, &fac.en(2)});
  REQUIRE(bm_equal(t2(), fac.en(3), bm_compose(t2(), left, right)));

  Normalized nn = fac.build_normalized(3);
  EulerResult eu = euler_series(nn.A);
  REQUIRE(eu.classes.at(t2().unit_word()) ==
          LaurentPoly::one(t2().ring()));
  LaurentPoly expect = LaurentPoly::zero(t2().ring());
  for (int k = 1; k <= 3; ++k) {
    LaurentPoly t = LaurentPoly::q_power(t2().ring(), 2 * k - 1);
    expect = (k % 2 == 0) ? expect.add(t) : expect.sub(t);
  }
  REQUIRE(eu.classes.at(w) == expect);

  Stabilization st = fac.stabilize_power(3);
  REQUIRE(st.matches_normalized);
}

TEST_CASE("two-strand family assembles to the unit") {
  TLFamily fam = tl_family(t2(), 4, true);
  REQUIRE(fam.members.size() == 2);
  REQUIRE(fam.members[0].k == 2);
  REQUIRE(fam.members[1].k == 0);
  REQUIRE(fam.members[0].has_nu);
  REQUIRE_FALSE(fam.members[1].has_nu);
  REQUIRE(cx_equal(fam.members[1].E, fam.members[1].P));

  // the top layer's cone is the cone complex of the layer below
  CounitalObject c20 = tl_cup_counital(t2(), {{0, 1}});
  IdemFactory f20(t2(), c20);
  REQUIRE(same_window(redc(fam.members[0].E), redc(f20.build_A(4))));

  // objects of lower through-degree annihilate the top layer's cone
  TruncatedComplex x = cx_single(t2(), c20.c, 0);
  TruncatedComplex left = gaussian_reduce(cx_tensor(x, fam.members[0].E)).cx;
  TruncatedComplex right = gaussian_reduce(cx_tensor(fam.members[0].E, x)).cx;
  REQUIRE(cx_is_zero_on(left, honest(left), 0));
  REQUIRE(cx_is_zero_on(right, honest(right), 0));
}

TEST_CASE("three-strand family assembles to the unit") {
  TLFamily fam = tl_family(t3(), 2, true);
  REQUIRE(fam.members.size() == 2);
  REQUIRE(fam.members[0].k == 3);
  REQUIRE(fam.members[1].k == 1);
  REQUIRE(fam.members[1].c.c.size() == 2);
  REQUIRE(fam.members[0].nu.entries.size() == 2);
}

TEST_CASE("direct sums with a dominated summand keep the dominant complex") {
  CounitalObject c33 = tl_cup_counital(t3(), {});
  CounitalObject d = tl_cup_counital(t3(), {{0, 1}});
  CounitalObject sum = direct_sum_counital(t3(), c33, d);
  REQUIRE_THROWS_AS(IdemFactory(t3(), sum), Error);
  CounitalObject fixed = counital_canonical(t3(), sum);
  IdemFactory fs(t3(), fixed);
  IdemFactory f33(t3(), c33);
  REQUIRE(same_window(redc(fs.build_P(2)), redc(f33.build_P(2))));
}

TEST_CASE("through-degree of tangle words") {
  REQUIRE(tl_word_through_degree(t2().unit_word()) == 2);
  REQUIRE(tl_word_through_degree(t2().make_word({1, 0, 3, 2})) == 0);
  REQUIRE(tl_word_through_degree(t3().unit_word()) == 3);
  REQUIRE(tl_word_through_degree(tl_cup_word(t3(), {{0, 1}})) == 1);
}
