// Tests for the graded bimodule backend: counital axioms for C, the
// witnessed normal form C (x) C ~ C (+) q^2 C, hom space dimensions and
// idempotent splitting.

#include <catch2/catch_amalgamated.hpp>

#include "catidem/backend_poly.hpp"

using namespace catidem;

namespace {

PolyBackend make_backend() { return PolyBackend(Ring::integers()); }

// e2 = id - Delta . (id x eps), the complement of the counit section.
BlockMorphism make_e2(const PolyBackend& B, const CounitalObject& co) {
  FormalObject cc = tensor_objects(B, co.c, co.c);
  BlockMorphism id_cc = bm_identity(B, cc);
  BlockMorphism id_eps =
      tensor_morphisms(B, bm_identity(B, co.c), co.counit);
  return bm_sub(B, id_cc, bm_compose(B, co.delta_r, id_eps));
}

}  // namespace

TEST_CASE("word helpers", "[poly]") {
  PolyBackend B = make_backend();
  CHECK(B.unit_word() == "1");
  CHECK(PolyBackend::word_len("1") == 0);
  CHECK(PolyBackend::word_len("C") == 1);
  CHECK(PolyBackend::word_len("C.C.C") == 3);
  CHECK(B.concat("C", "C") == "C.C");
  CHECK(B.concat("1", "C") == "C");
  CHECK(B.word_valid("C.C"));
  CHECK_FALSE(B.word_valid("D"));
}

TEST_CASE("counit axioms hold for C", "[poly]") {
  PolyBackend B = make_backend();
  CounitalObject co = poly_counital(B);
  CounitalCheck chk = verify_counital(B, co);
  CHECK(chk.right_ok);
  CHECK(chk.left_ok);
}

TEST_CASE("normal form of C (x) C is witnessed by an isomorphism", "[poly]") {
  PolyBackend B = make_backend();
  TensorNF nf = B.tensor_words("C", "C");
  REQUIRE(nf.parts.size() == 2);
  CHECK(nf.parts[0] == std::make_pair(std::string("C"), 0));
  CHECK(nf.parts[1] == std::make_pair(std::string("C"), 2));

  // proj_k . incl_l = delta_{kl} id
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l) {
      ElemPtr comp = B.compose(nf.proj[k], nf.incl[l]);
      if (k == l)
        CHECK(B.equal(comp, B.identity("C")));
      else
        CHECK(B.is_zero(comp));
    }
  // sum_k incl_k . proj_k = id on the raw concatenation
  ElemPtr total = B.add(B.compose(nf.incl[0], nf.proj[0]),
                        B.compose(nf.incl[1], nf.proj[1]));
  CHECK(B.equal(total, B.identity("C.C")));
}

TEST_CASE("hom space dimensions", "[poly]") {
  PolyBackend B = make_backend();
  CHECK(B.hom_basis("C", "C", 0).size() == 1);
  CHECK(B.hom_basis("C", "C", 2).size() == 2);
  CHECK(B.hom_basis("C", "C", 1).empty());
  CHECK(B.hom_basis("C", "C", -2).empty());
  CHECK(B.hom_basis("C", "1", 0).size() == 1);
  CHECK(B.hom_basis("C", "1", 2).size() == 1);
  CHECK(B.hom_basis("1", "C", 0).empty());
  CHECK(B.hom_basis("1", "C", 2).size() == 1);
  CHECK(B.hom_basis("1", "1", 0).size() == 1);
  CHECK(B.hom_basis("1", "1", 2).size() == 1);

  // The only degree-2 map out of the unit is alpha (x) 1 + 1 (x) alpha
  // up to scale; check it differs from either alpha action alone.
  ElemPtr coev = B.hom_basis("1", "C", 2)[0];
  ElemPtr al = poly_alpha_left(B), ar = poly_alpha_right(B);
  CHECK_FALSE(B.equal(coev, al));
  ElemPtr eps = B.make_elem(1, 0, 0, {{{{0}, s_one(B.ring())}}});
  // eps . alpha_left = eps . alpha_right (multiplication is commutative)
  CHECK(B.equal(B.compose(eps, al), B.compose(eps, ar)));
}

TEST_CASE("coordinates round-trip through the hom basis", "[poly]") {
  PolyBackend B = make_backend();
  FormalObject x = fo_direct_sum(fo_single("C"), fo_single("C", 2));
  FormalObject y = fo_direct_sum(fo_single("C"), fo_single("1"));
  std::vector<BlockMorphism> basis = bm_hom_basis(B, x, y, 0);
  REQUIRE(!basis.empty());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    std::vector<Scalar> c = bm_coords(B, basis[k]);
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK(s_is_one(c[i]) == (i == k));
    BlockMorphism back = bm_from_coords(B, x, y, 0, c);
    CHECK(bm_equal(B, back, basis[k]));
  }
}

TEST_CASE("tensor of morphisms is functorial", "[poly]") {
  PolyBackend B = make_backend();
  CounitalObject co = poly_counital(B);
  BlockMorphism idc = bm_identity(B, co.c);
  BlockMorphism al = bm_zero(co.c, co.c, 2);
  bm_set(B, al, 0, 0, poly_alpha_left(B));

  // (f x id) . (id x g) = f x g with f = alpha_left, g = eps
  BlockMorphism lhs = bm_compose(
      B, tensor_morphisms(B, al, bm_identity(B, fo_unit(B))),
      tensor_morphisms(B, idc, co.counit));
  BlockMorphism rhs = tensor_morphisms(B, al, co.counit);
  CHECK(bm_equal(B, lhs, rhs));

  // (id x g) . (f x id) = f x g on the other side
  BlockMorphism lhs2 = bm_compose(
      B, tensor_morphisms(B, idc, co.counit),
      tensor_morphisms(B, al, bm_identity(B, co.c)));
  CHECK(bm_equal(B, lhs2, rhs));
}

TEST_CASE("complement of the counit section is idempotent and splits",
          "[poly]") {
  PolyBackend B = make_backend();
  CounitalObject co = poly_counital(B);
  BlockMorphism e2 = make_e2(B, co);
  CHECK(bm_equal(B, bm_compose(B, e2, e2), e2));

  // (id x eps) kills e2
  BlockMorphism id_eps =
      tensor_morphisms(B, bm_identity(B, co.c), co.counit);
  CHECK(bm_is_zero(B, bm_compose(B, id_eps, e2)));

  SplitResult sp = split_idempotent(B, e2);
  REQUIRE(sp.image.size() == 1);
  CHECK(sp.image.summands[0].word == "C");
  CHECK(sp.image.summands[0].shift == 2);
  CHECK(bm_equal(B, bm_compose(B, sp.pi, sp.sigma),
                 bm_identity(B, sp.image)));
  CHECK(bm_equal(B, bm_compose(B, sp.sigma, sp.pi), e2));
}

TEST_CASE("splitting rejects non-idempotents", "[poly]") {
  PolyBackend B = make_backend();
  FormalObject c = fo_single("C");
  BlockMorphism f = bm_zero(c, c, 0);
  bm_set(B, f, 0, 0, B.scale(s_from_int(B.ring(), 2), B.identity("C")));
  try {
    split_idempotent(B, f);
    FAIL("expected NotIdempotent");
  } catch (const Error& e) {
    CHECK(e.code() == "NotIdempotent");
  }
}

TEST_CASE("degree bound failures are reported", "[poly]") {
  PolyBackend B(Ring::integers(), 4);
  ElemPtr a3 = B.make_elem(0, 0, 6, {{{{3}, s_one(B.ring())}}});
  CHECK_THROWS_AS(B.compose(a3, a3), Error);
  try {
    B.compose(a3, a3);
    FAIL("expected DegreeBoundExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == "DegreeBoundExceeded");
  }
}

TEST_CASE("direct sums of counital objects stay counital", "[poly]") {
  PolyBackend B = make_backend();
  CounitalObject co = poly_counital(B);
  CounitalObject sum = direct_sum_counital(B, co, co);
  CHECK(sum.c.size() == 2);
  CounitalCheck chk = verify_counital(B, sum);
  CHECK(chk.right_ok);
  CHECK(chk.left_ok);
}
