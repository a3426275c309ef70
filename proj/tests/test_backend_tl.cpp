#include <catch2/catch_amalgamated.hpp>

#include "catidem/backend_tl.hpp"

using namespace catidem;

namespace {

TLBackend& b2() {
  static TLBackend b(2, Ring::integers());
  return b;
}

// Cup-cap tangle on two strands: bottom pair matched, top pair matched.
std::string cupcap() { return b2().make_word({1, 0, 3, 2}); }

bool elem_equal(const Backend& B, const ElemPtr& a, const ElemPtr& b) {
  if (B.is_zero(a) && B.is_zero(b)) return true;
  ElemPtr d = B.add(a, B.scale(s_from_int(B.ring(), -1), b));
  return B.is_zero(d);
}

}  // namespace

TEST_CASE("tangle words validate and normalize") {
  TLBackend& b = b2();
  REQUIRE(b.unit_word() == "n2:2,3,0,1");
  REQUIRE(b.word_valid(b.unit_word()));
  REQUIRE(b.word_valid(cupcap()));
  REQUIRE_FALSE(b.word_valid("n2:1,0,3,2+o1"));  // objects carry no circles
  REQUIRE_FALSE(b.word_valid("n3:1,0,3,2"));
  // crossing matching: bottom 0 to top 1, bottom 1 to top 0
  REQUIRE_THROWS_AS(b.make_word({3, 2, 1, 0}), Error);
}

TEST_CASE("glued diagram circle counts") {
  TLBackend& b = b2();
  REQUIRE(b.hom_circle_count(b.unit_word(), b.unit_word()) == 2);
  REQUIRE(b.hom_circle_count(cupcap(), cupcap()) == 2);
  REQUIRE(b.hom_circle_count(b.unit_word(), cupcap()) == 1);
  REQUIRE(b.hom_circle_count(cupcap(), b.unit_word()) == 1);
}

TEST_CASE("identities compose to themselves") {
  TLBackend& b = b2();
  for (const std::string& w : {b.unit_word(), cupcap()}) {
    ElemPtr id = b.identity(w);
    REQUIRE(b.elem_deg(id) == 0);
    REQUIRE(elem_equal(b, b.compose(id, id), id));
    auto f = b.identity_factor(id);
    REQUIRE(f.has_value());
    REQUIRE(*f == s_one(b.ring()));
  }
  ElemPtr s = b.saddle(b.unit_word(), cupcap());
  REQUIRE(b.elem_deg(s) == 1);
  REQUIRE(elem_equal(b, b.compose(b.identity(cupcap()), s), s));
  REQUIRE(elem_equal(b, b.compose(s, b.identity(b.unit_word())), s));
}

TEST_CASE("identity of a circle word uses both circle labelings") {
  TLBackend& b = b2();
  std::string raw = b.concat(cupcap(), cupcap());
  REQUIRE(raw == cupcap() + "+o1|" + cupcap() + "|" + cupcap());
  ElemPtr id = b.identity(raw);
  // strand circles all-1, and 1(x)x + x(x)1 across the circle pair
  REQUIRE(b.elem_coords(id).size() == 4);  // degree-0 labelings of 4 circles
  REQUIRE(elem_equal(b, b.compose(id, id), id));
  auto f = b.identity_factor(id);
  REQUIRE(f.has_value());
  REQUIRE(*f == s_one(b.ring()));
  // a single branch alone is not the identity
  REQUIRE_FALSE(b.identity_factor(b.labeling(raw, raw, 0b0100)).has_value());
}

TEST_CASE("saddle construction validates adjacency") {
  TLBackend& b = b2();
  REQUIRE_THROWS_AS(b.saddle(b.unit_word(), b.unit_word()), Error);
  REQUIRE_THROWS_AS(b.saddle(cupcap(), cupcap()), Error);
  REQUIRE_NOTHROW(b.saddle(cupcap(), b.unit_word()));
}

TEST_CASE("closed surfaces evaluate to their Frobenius trace") {
  TLBackend b0(0, Ring::integers());
  std::string empty = b0.unit_word();
  std::string circ = "n0:+o1";
  ElemPtr birth = b0.labeling(empty, circ, 0);   // disk, label 1
  ElemPtr birth_x = b0.labeling(empty, circ, 1);
  ElemPtr death = b0.labeling(circ, empty, 0);
  ElemPtr death_x = b0.labeling(circ, empty, 1);
  REQUIRE(b0.elem_deg(birth) == -1);
  REQUIRE(b0.elem_deg(birth_x) == 1);
  // sphere = 0, dotted sphere = 1, doubly dotted sphere = 0
  REQUIRE(b0.is_zero(b0.compose(death, birth)));
  REQUIRE(elem_equal(b0, b0.compose(death_x, birth), b0.identity(empty)));
  REQUIRE(elem_equal(b0, b0.compose(death, birth_x), b0.identity(empty)));
  REQUIRE(b0.is_zero(b0.compose(death_x, birth_x)));
  // torus = 2: close the circle identity off on both sides
  ElemPtr around = b0.compose(death, b0.compose(b0.identity(circ), birth_x));
  REQUIRE(elem_equal(b0, around, b0.scale(s_from_int(b0.ring(), 1),
                                          b0.identity(empty))));
  ElemPtr disks = b0.compose(birth, death);  // disk then disk, not identity
  REQUIRE(elem_equal(b0, disks, b0.labeling(circ, circ, 0)));
}

TEST_CASE("delooping splits a circle into shifted copies") {
  TLBackend& b = b2();
  TensorNF nf = b.tensor_words(cupcap(), cupcap());
  REQUIRE(nf.raw == b.concat(cupcap(), cupcap()));
  REQUIRE(nf.parts.size() == 2);
  REQUIRE(nf.parts[0] == std::make_pair(cupcap(), 1));
  REQUIRE(nf.parts[1] == std::make_pair(cupcap(), -1));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l) {
      ElemPtr zz = b.compose(nf.proj[k], nf.incl[l]);
      if (k == l)
        REQUIRE(elem_equal(b, zz, b.identity(cupcap())));
      else
        REQUIRE(b.is_zero(zz));
    }
  ElemPtr sum = b.add(b.compose(nf.incl[0], nf.proj[0]),
                      b.compose(nf.incl[1], nf.proj[1]));
  REQUIRE(elem_equal(b, sum, b.identity(nf.raw)));
}

TEST_CASE("tensoring identities gives the identity of the stack") {
  TLBackend& b = b2();
  ElemPtr idid = b.tensor_elems(b.identity(cupcap()), b.identity(cupcap()));
  REQUIRE(elem_equal(b, idid, b.identity(b.concat(cupcap(), cupcap()))));
  ElemPtr idu = b.tensor_elems(b.identity(b.unit_word()),
                               b.identity(b.unit_word()));
  REQUIRE(elem_equal(b, idu, b.identity(b.unit_word())));
}

TEST_CASE("tensoring respects composition") {
  TLBackend& b = b2();
  ElemPtr s1 = b.saddle(b.unit_word(), cupcap());
  ElemPtr s2 = b.saddle(cupcap(), b.unit_word());
  ElemPtr lhs = b.tensor_elems(b.compose(s2, s1), b.identity(cupcap()));
  ElemPtr rhs = b.compose(b.tensor_elems(s2, b.identity(cupcap())),
                          b.tensor_elems(s1, b.identity(cupcap())));
  REQUIRE(elem_equal(b, lhs, rhs));
}

TEST_CASE("double saddles put a dot on either strand") {
  TLBackend& b = b2();
  ElemPtr s1 = b.saddle(b.unit_word(), cupcap());
  ElemPtr s2 = b.saddle(cupcap(), b.unit_word());
  ElemPtr through = b.compose(s2, s1);
  // one dot on either doubled strand of the identity tangle
  ElemPtr expect = b.add(b.labeling(b.unit_word(), b.unit_word(), 0b01),
                         b.labeling(b.unit_word(), b.unit_word(), 0b10));
  REQUIRE(elem_equal(b, through, expect));
  ElemPtr back = b.compose(s1, s2);
  ElemPtr expect2 = b.add(b.labeling(cupcap(), cupcap(), 0b01),
                          b.labeling(cupcap(), cupcap(), 0b10));
  REQUIRE(elem_equal(b, back, expect2));
  // squaring puts dots on both strands, once from each summand
  ElemPtr sq = b.compose(through, through);
  REQUIRE(elem_equal(b, sq, b.scale(s_from_int(b.ring(), 2),
                                    b.labeling(b.unit_word(), b.unit_word(),
                                               0b11))));
}

TEST_CASE("hom spaces have the expected graded dimensions") {
  TLBackend& b = b2();
  REQUIRE(b.hom_basis(b.unit_word(), b.unit_word(), 0).size() == 1);
  REQUIRE(b.hom_basis(b.unit_word(), b.unit_word(), 2).size() == 2);
  REQUIRE(b.hom_basis(b.unit_word(), b.unit_word(), 4).size() == 1);
  REQUIRE(b.hom_basis(b.unit_word(), b.unit_word(), 1).empty());
  REQUIRE(b.hom_basis(b.unit_word(), b.unit_word(), -2).empty());
  REQUIRE(b.hom_basis(cupcap(), b.unit_word(), 0).empty());
  REQUIRE(b.hom_basis(cupcap(), b.unit_word(), 1).size() == 1);
  REQUIRE(b.hom_basis(cupcap(), cupcap(), 0).size() == 1);
  REQUIRE(b.hom_basis(cupcap(), cupcap(), 2).size() == 2);
}

TEST_CASE("coordinates read off labeling coefficients") {
  TLBackend& b = b2();
  auto basis = b.hom_basis(b.unit_word(), b.unit_word(), 2);
  REQUIRE(basis.size() == 2);
  ElemPtr e = b.add(b.scale(s_from_int(b.ring(), 2), basis[0]),
                    b.scale(s_from_int(b.ring(), -3), basis[1]));
  auto coords = b.elem_coords(e);
  REQUIRE(coords.size() == 2);
  REQUIRE(coords[0] == s_from_int(b.ring(), 2));
  REQUIRE(coords[1] == s_from_int(b.ring(), -3));
}

TEST_CASE("cup objects satisfy both counit laws") {
  TLBackend& b = b2();
  CounitalObject cu = tl_cup_counital(b, {{0, 1}});
  REQUIRE(cu.c.summands.size() == 1);
  REQUIRE(cu.c.summands[0].word == cupcap());
  REQUIRE(cu.c.summands[0].shift == 1);
  CounitalCheck chk = verify_counital(b, cu);
  INFO(chk.detail);
  REQUIRE(chk.right_ok);
  REQUIRE(chk.left_ok);

  TLBackend b3(3, Ring::integers());
  CounitalObject cu3 = tl_cup_counital(b3, {{0, 1}});
  CounitalCheck chk3 = verify_counital(b3, cu3);
  INFO(chk3.detail);
  REQUIRE(chk3.right_ok);
  REQUIRE(chk3.left_ok);

  TLBackend b4(4, Ring::integers());
  CounitalObject cu4 = tl_cup_counital(b4, {{0, 3}, {1, 2}});
  REQUIRE(cu4.c.summands[0].shift == 2);
  CounitalCheck chk4 = verify_counital(b4, cu4);
  INFO(chk4.detail);
  REQUIRE(chk4.right_ok);
  REQUIRE(chk4.left_ok);
}

TEST_CASE("complement of the comultiplication splits off a shifted copy") {
  TLBackend& b = b2();
  CounitalObject cu = tl_cup_counital(b, {{0, 1}});
  FormalObject cc = tensor_objects(b, cu.c, cu.c);
  REQUIRE(fo_equal(b, cc, fo_direct_sum(fo_single(cupcap(), 1),
                                        fo_single(cupcap(), 3))));
  BlockMorphism id_eps =
      tensor_morphisms(b, bm_identity(b, cu.c), cu.counit);
  BlockMorphism e2 = bm_sub(b, bm_identity(b, cc),
                            bm_compose(b, cu.delta_r, id_eps));
  REQUIRE(bm_equal(b, bm_compose(b, e2, e2), e2));
  SplitResult sp = split_idempotent(b, e2);
  REQUIRE(fo_equal(b, sp.image, fo_single(cupcap(), 3)));
  REQUIRE(bm_equal(b, bm_compose(b, sp.pi, sp.sigma),
                   bm_identity(b, sp.image)));
  REQUIRE(bm_equal(b, bm_compose(b, sp.sigma, sp.pi), e2));
}
