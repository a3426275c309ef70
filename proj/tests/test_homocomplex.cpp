#include "catidem/homocomplex.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "catidem/backend_poly.hpp"

using namespace catidem;

namespace {

const PolyBackend& poly() {
  static PolyBackend b(Ring::integers());
  return b;
}

// Two-term complex C -> 1 in degrees -1, 0, given by the counit.
TruncatedComplex counit_cone() {
  const PolyBackend& B = poly();
  CounitalObject cu = poly_counital(B);
  ChainMap eps;
  eps.src = cx_single(B, cu.c, 0);
  eps.dst = cx_unit(B);
  eps.hdeg = 0;
  eps.comp[0] = cu.counit;
  return cx_cone(eps);
}

}  // namespace

TEST_CASE("construction validates complexes") {
  const PolyBackend& B = poly();
  FormalObject c = fo_single("C");
  FormalObject one = fo_single(B.unit_word());

  BlockMorphism eps = poly_counital(B).counit;
  CHECK_NOTHROW(cx_make(B, -1, {c, one}, {eps}, false, false));

  BlockMorphism bad = bm_zero(c, c, 0);
  CHECK_THROWS_WITH(cx_make(B, -1, {c, one}, {bad}, false, false),
                    Catch::Matchers::ContainsSubstring("endpoints"));

  // id . id != 0, so C -> C -> C is not a complex.
  BlockMorphism idc = bm_identity(B, c);
  CHECK_THROWS_WITH(cx_make(B, -2, {c, c, c}, {idc, idc}, false, false),
                    Catch::Matchers::ContainsSubstring("d.d"));
}

TEST_CASE("cone of the counit and its shift") {
  const PolyBackend& B = poly();
  TruncatedComplex f = counit_cone();
  REQUIRE(f.lo == -1);
  REQUIRE(f.hi == 0);
  CHECK_FALSE(f.lo_artificial);
  CHECK_FALSE(f.hi_artificial);
  CHECK(fo_equal(B, f.at(-1), fo_single("C")));
  CHECK(fo_equal(B, f.at(0), fo_unit(B)));
  CHECK_FALSE(bm_is_zero(B, f.d(-1)));

  TruncatedComplex s = cx_shift(f, 1);
  CHECK(s.lo == -2);
  CHECK(s.hi == -1);
  // Odd shift negates the differential.
  CHECK(bm_equal(B, s.d(-2), bm_scale(B, s_from_int(B.ring(), -1), f.d(-1))));
  TruncatedComplex s2 = cx_shift(s, -1);
  CHECK(cx_equal(f, s2));
}

TEST_CASE("tensor square of the counit cone") {
  const PolyBackend& B = poly();
  TruncatedComplex f = counit_cone();
  // cx_make inside cx_tensor checks d.d = 0, so this also validates the
  // sign rule on the second factor.
  TruncatedComplex t = cx_tensor(f, f);
  REQUIRE(t.lo == -2);
  REQUIRE(t.hi == 0);
  CHECK(fo_equal(B, t.at(-2), fo_direct_sum(fo_single("C"),
                                            fo_single("C", 2))));
  REQUIRE(t.at(-1).size() == 2);
  CHECK(t.at(-1).summands[0].word == "C");
  CHECK(t.at(-1).summands[1].word == "C");
  CHECK(fo_equal(B, t.at(0), fo_unit(B)));
}

TEST_CASE("a sign flip in the tensor differential is caught") {
  const PolyBackend& B = poly();
  TruncatedComplex f = counit_cone();
  TruncatedComplex t = cx_tensor(f, f);
  std::vector<BlockMorphism> diffs = t.diff;
  // Negate one entry of the bottom differential.
  const auto& [key, e] = *diffs[0].entries.begin();
  BlockMorphism broken = diffs[0];
  bm_set(B, broken, key.first, key.second,
         B.scale(s_from_int(B.ring(), -1), e));
  diffs[0] = broken;
  CHECK_THROWS_WITH(cx_make(B, t.lo, t.obj, diffs, false, false),
                    Catch::Matchers::ContainsSubstring("d.d"));
}

TEST_CASE("gaussian reduction cancels the contractible cone") {
  const PolyBackend& B = poly();
  TruncatedComplex x = cx_single(B, fo_single("C"), 0);
  TruncatedComplex cone = cx_cone(chainmap_identity(x));
  ReduceResult r = gaussian_reduce(cone, true);
  CHECK(r.steps == 1);
  for (int k = r.cx.lo; k <= r.cx.hi; ++k) CHECK(r.cx.at(k).size() == 0);
  std::string why;
  CHECK(check_reduction_witness(cone, r.cx, r.witness, &why));
  INFO(why);
}

TEST_CASE("tensor square reduces to a three step complex") {
  const PolyBackend& B = poly();
  TruncatedComplex t = cx_tensor(counit_cone(), counit_cone());
  ReduceResult r = gaussian_reduce(t, true);
  CHECK(r.steps == 1);
  REQUIRE(r.cx.lo == -2);
  REQUIRE(r.cx.hi == 0);
  CHECK(fo_equal(B, r.cx.at(-2), fo_single("C", 2)));
  CHECK(fo_equal(B, r.cx.at(-1), fo_single("C")));
  CHECK(fo_equal(B, r.cx.at(0), fo_unit(B)));
  CHECK_FALSE(bm_is_zero(B, r.cx.d(-2)));
  CHECK_FALSE(bm_is_zero(B, r.cx.d(-1)));

  std::string why;
  bool ok = check_reduction_witness(t, r.cx, r.witness, &why);
  INFO(why);
  CHECK(ok);

  // Reduction is deterministic.
  ReduceResult r2 = gaussian_reduce(t, false);
  CHECK(cx_equal(r.cx, r2.cx));

  // Euler characteristic per class is preserved.
  EulerResult e1 = euler_series(t);
  EulerResult e2 = euler_series(r.cx);
  CHECK(e1.exact);
  REQUIRE(e1.classes.size() == 2);
  CHECK(e1.classes.at("C") == e2.classes.at("C"));
  CHECK(e1.classes.at(B.unit_word()) == e2.classes.at(B.unit_word()));
  // class of C: q^2 at degree -2, one C surviving at -2 and two at -1.
  LaurentPoly expect = LaurentPoly::q_power(B.ring(), 2)
                           .add(LaurentPoly::one(B.ring()))
                           .sub(LaurentPoly::constant(B.ring(),
                                                      s_from_int(B.ring(), 2)));
  CHECK(e1.classes.at("C") == expect);
}

TEST_CASE("explicit nullhomotopy of the identity cone") {
  const PolyBackend& B = poly();
  TruncatedComplex x = cx_single(B, fo_single("C"), 0);
  TruncatedComplex cone = cx_cone(chainmap_identity(x));
  std::map<int, BlockMorphism> h;
  h[0] = bm_identity(B, cone.at(0));
  NullHomotopyCheck ok = check_nullhomotopy(cone, h, -1, 0);
  INFO(ok.detail);
  CHECK(ok.ok);

  // The zero homotopy fails.
  NullHomotopyCheck notok = check_nullhomotopy(cone, {}, -1, 0);
  CHECK_FALSE(notok.ok);
}

TEST_CASE("canonical form removes unit ambiguity") {
  const PolyBackend& B = poly();
  TruncatedComplex a = counit_cone();
  std::vector<BlockMorphism> negated = a.diff;
  negated[0] = bm_scale(B, s_from_int(B.ring(), -1), negated[0]);
  TruncatedComplex b = cx_make(B, a.lo, a.obj, negated, false, false);
  CHECK_FALSE(cx_equal(a, b));
  CHECK(cx_window_equal(a, b, -1, 0));
  // Canonicalization itself is idempotent.
  TruncatedComplex ca = cx_canonicalize(a);
  CHECK(cx_equal(ca, cx_canonicalize(ca)));
}

TEST_CASE("artificial edges restrict result windows") {
  const PolyBackend& B = poly();
  FormalObject c = fo_single("C");
  // C in degrees -2..0 with zero differentials, continuing below -2.
  TruncatedComplex x =
      cx_make(B, -2, {c, c, c},
              {bm_zero(c, c, 0), bm_zero(c, c, 0)}, true, false);
  TruncatedComplex k = counit_cone();
  TruncatedComplex t = cx_tensor(x, k);
  CHECK(t.lo == -2);
  CHECK(t.hi == 0);
  CHECK(t.lo_artificial);
  CHECK_FALSE(t.hi_artificial);
  // Degree -2 holds C(x)1 plus both parts of C(x)C.
  CHECK(t.at(-2).size() == 3);
  CHECK(t.at(0).size() == 1);

  EulerResult e = euler_series(t);
  CHECK_FALSE(e.exact);

  TruncatedComplex tk = cx_tensor(k, x);
  CHECK(tk.lo == -2);
  CHECK(tk.lo_artificial);
}

TEST_CASE("cone windows follow both inputs") {
  const PolyBackend& B = poly();
  FormalObject c = fo_single("C");
  TruncatedComplex x =
      cx_make(B, -2, {c, c, c},
              {bm_zero(c, c, 0), bm_zero(c, c, 0)}, true, false);
  // Zero chain map from the truncated complex to the unit.
  ChainMap z;
  z.src = x;
  z.dst = cx_unit(B);
  z.hdeg = 0;
  TruncatedComplex cone = cx_cone(z);
  CHECK(cone.lo == -3);
  CHECK(cone.hi == 0);
  CHECK(cone.lo_artificial);
  CHECK(fo_equal(B, cone.at(0), fo_unit(B)));
  CHECK(fo_equal(B, cone.at(-3), c));
}

TEST_CASE("chain map composition and closedness") {
  const PolyBackend& B = poly();
  TruncatedComplex f = counit_cone();
  ChainMap idf = chainmap_identity(f);
  CHECK(chainmap_closed(idf));
  ChainMap sq = chainmap_compose(idf, idf);
  CHECK(bm_equal(B, sq.comp.at(0), idf.comp.at(0)));

  // A non-chain map is rejected by the cone construction.
  ChainMap bad;
  bad.src = cx_single(B, fo_single("C"), -1);
  bad.dst = cx_make(B, -1, {fo_single("C"), fo_unit(B)},
                    {poly_counital(B).counit}, false, false);
  bad.hdeg = 0;
  bad.comp[-1] = bm_identity(B, fo_single("C"));
  CHECK_FALSE(chainmap_closed(bad));
  CHECK_THROWS_WITH(cx_cone(bad),
                    Catch::Matchers::ContainsSubstring("chain"));
}
