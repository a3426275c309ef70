// Tests for the backend-independent layer: formal objects, block morphism
// algebra, tensor normal forms and their bookkeeping.  Exercised through
// the bimodule backend, which has small exactly-known hom spaces.

#include <catch2/catch_amalgamated.hpp>

#include "catidem/backend_poly.hpp"

using namespace catidem;

TEST_CASE("formal object helpers", "[catcore]") {
  PolyBackend B(Ring::integers());
  FormalObject c = fo_single("C");
  FormalObject two = fo_direct_sum(c, fo_shifted(c, 3));
  CHECK(two.size() == 2);
  CHECK(two.summands[1].shift == 3);
  CHECK(fo_equal(B, two, two));
  CHECK_FALSE(fo_equal(B, two, c));
  CHECK(fo_to_string(two) == "C + q^3 C");
  CHECK(fo_unit(B).summands[0].word == "1");
}

TEST_CASE("block entry validation", "[catcore]") {
  PolyBackend B(Ring::integers());
  FormalObject c = fo_single("C");
  BlockMorphism m = bm_zero(c, fo_shifted(c, 2), 0);
  // A degree-0 map C -> q^2 C needs an intrinsic degree -2 entry; the
  // identity (degree 0) must be rejected.
  try {
    bm_set(B, m, 0, 0, B.identity("C"));
    FAIL("expected DegreeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == "DegreeMismatch");
  }
  BlockMorphism ok = bm_zero(c, fo_shifted(c, 2), 2);
  bm_set(B, ok, 0, 0, B.identity("C"));
  CHECK(ok.entries.size() == 1);

  BlockMorphism unit_target = bm_zero(c, fo_unit(B), 0);
  try {
    bm_set(B, unit_target, 0, 0, B.identity("C"));
    FAIL("expected NotComposable");
  } catch (const Error& e) {
    CHECK(e.code() == "NotComposable");
  }
}

TEST_CASE("composition and addition of blocks", "[catcore]") {
  PolyBackend B(Ring::integers());
  CounitalObject co = poly_counital(B);
  FormalObject cc = tensor_objects(B, co.c, co.c);
  BlockMorphism id_eps = tensor_morphisms(B, bm_identity(B, co.c), co.counit);
  BlockMorphism eps_id = tensor_morphisms(B, co.counit, bm_identity(B, co.c));

  // Composition endpoints are enforced.
  CHECK_THROWS_AS(bm_compose(B, id_eps, id_eps), Error);

  BlockMorphism zero = bm_sub(B, id_eps, id_eps);
  CHECK(bm_is_zero(B, zero));
  CHECK(bm_equal(B, bm_add(B, zero, eps_id), eps_id));

  // Associativity on a nontrivial triple.
  BlockMorphism a = bm_compose(B, co.counit, bm_compose(B, id_eps, co.delta_r));
  BlockMorphism b = bm_compose(B, bm_compose(B, co.counit, id_eps), co.delta_r);
  CHECK(bm_equal(B, a, b));
}

TEST_CASE("tensor powers expand into shifted words", "[catcore]") {
  PolyBackend B(Ring::integers());
  FormalObject c = fo_single("C");
  FormalObject c2 = tensor_power(B, c, 2);
  REQUIRE(c2.size() == 2);
  CHECK(c2.summands[0].shift == 0);
  CHECK(c2.summands[1].shift == 2);

  FormalObject c3 = tensor_power(B, c, 3);
  REQUIRE(c3.size() == 4);
  std::vector<int> shifts;
  for (const auto& s : c3.summands) {
    CHECK(s.word == "C");
    shifts.push_back(s.shift);
  }
  CHECK(shifts == std::vector<int>{0, 2, 2, 4});

  CHECK(tensor_power(B, c, 0).summands[0].word == "1");
}

TEST_CASE("tensoring with the unit is strict", "[catcore]") {
  PolyBackend B(Ring::integers());
  CounitalObject co = poly_counital(B);
  BlockMorphism f = co.delta_r;
  BlockMorphism lhs =
      tensor_morphisms(B, bm_identity(B, fo_unit(B)), f);
  CHECK(bm_equal(B, lhs, f));
  BlockMorphism rhs =
      tensor_morphisms(B, f, bm_identity(B, fo_unit(B)));
  CHECK(bm_equal(B, rhs, f));
}

TEST_CASE("left-fold n-fold tensors agree with pairwise splits",
          "[catcore]") {
  PolyBackend B(Ring::integers());
  FormalObject c = fo_single("C");
  // nf(nf(C x C) x C) must equal the canonical 3-fold expansion.
  FormalObject ab_c = tensor_objects(B, tensor_objects(B, c, c), c);
  CHECK(fo_equal(B, ab_c, tensor_power(B, c, 3)));
  FormalObject via_many = tensor_many(B, {c, c, c});
  CHECK(fo_equal(B, via_many, tensor_power(B, c, 3)));
}

TEST_CASE("morphism direct sums", "[catcore]") {
  PolyBackend B(Ring::integers());
  CounitalObject co = poly_counital(B);
  BlockMorphism two_eps = bm_direct_sum(B, co.counit, co.counit);
  CHECK(two_eps.src.size() == 2);
  CHECK(two_eps.dst.size() == 2);
  CHECK(two_eps.entries.size() == 2);
  CHECK(two_eps.entries.count({1, 1}) == 1);
}
