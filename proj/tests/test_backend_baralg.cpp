#include "catidem/backend_baralg.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace catidem;

namespace {

const BarBackend& bar() {
  static BarBackend b(Ring::integers());
  return b;
}

// Columns of the underlying matrix whose basis tensor has the unit in an
// interior slot.
bool column_is_zero(const BarBackend& B, const ElemPtr& e, int col) {
  Mat m = B.elem_matrix(e);
  for (int r = 0; r < m.rows; ++r)
    if (!s_is_zero(m.at(r, col))) return false;
  return true;
}

}  // namespace

TEST_CASE("words concatenate without a normal form") {
  const BarBackend& B = bar();
  CHECK(B.word_valid("1"));
  CHECK(B.word_valid("C"));
  CHECK(B.word_valid("C.C.C"));
  CHECK_FALSE(B.word_valid("C..C"));
  CHECK(B.concat("C", "C.C") == "C.C.C");
  CHECK(B.concat("1", "C") == "C");
  CHECK(B.trivial_concat());
  CHECK_FALSE(B.supports_splitting());
  CHECK(BarBackend::space_dim("1") == 2);
  CHECK(BarBackend::space_dim("C.C") == 8);
  TensorNF nf = B.tensor_words("C", "C");
  REQUIRE(nf.parts.size() == 1);
  CHECK(nf.parts[0].first == "C.C");
  CHECK(nf.parts[0].second == 0);
}

TEST_CASE("element validation enforces the bimodule property") {
  const BarBackend& B = bar();
  // Projection onto the unit coefficient is k-linear but not a bimodule map.
  SparseMat proj;
  proj.emplace(std::make_pair(0, 0), s_one(B.ring()));
  CHECK_THROWS_WITH(B.make_elem(1, 0, 0, std::move(proj)),
                    Catch::Matchers::ContainsSubstring("linear over x"));

  SparseMat skew;
  skew.emplace(std::make_pair(1, 0), s_one(B.ring()));
  CHECK_THROWS_WITH(B.make_elem(0, 0, 0, std::move(skew)),
                    Catch::Matchers::ContainsSubstring("homogeneity"));
}

TEST_CASE("counit and comultiplication satisfy both section laws") {
  const BarBackend& B = bar();
  CounitalObject cu = bar_counital(B);
  CounitalCheck chk = verify_counital(B, cu);
  INFO(chk.detail);
  CHECK(chk.right_ok);
  CHECK(chk.left_ok);
}

TEST_CASE("tensor of elements is associative and unital") {
  const BarBackend& B = bar();
  CounitalObject cu = bar_counital(B);
  ElemPtr eps = bm_entry(B, cu.counit, 0, 0);
  ElemPtr idc = B.identity("C");
  ElemPtr left = B.tensor_elems(B.tensor_elems(idc, eps), idc);
  ElemPtr right = B.tensor_elems(idc, B.tensor_elems(eps, idc));
  CHECK(B.equal(left, right));
  CHECK(B.equal(B.tensor_elems(B.identity("1"), eps), eps));
  CHECK(B.equal(B.tensor_elems(eps, B.identity("1")), eps));
  CHECK(B.equal(B.tensor_elems(idc, idc), B.identity("C.C")));
}

TEST_CASE("subset formula matches the recursive projector for n = 2") {
  const BarBackend& B = bar();
  CounitalObject cu = bar_counital(B);
  ElemPtr eps = bm_entry(B, cu.counit, 0, 0);
  ElemPtr delta = bm_entry(B, cu.delta_r, 0, 0);
  ElemPtr idc = B.identity("C");
  // id - Delta . (id * eps)
  ElemPtr e2 = B.sub(B.identity("C.C"),
                     B.compose(delta, B.tensor_elems(idc, eps)));
  CHECK(B.equal(e2, bar_e_formula(B, 1)));
}

TEST_CASE("subset formula gives idempotents of constant rank") {
  const BarBackend& B = bar();
  for (int k = 0; k <= 4; ++k) {
    ElemPtr e = bar_e_formula(B, k);
    CHECK(B.equal(B.compose(e, e), e));
    CHECK(B.elem_trace(e) == 4);
  }
}

TEST_CASE("subset formula kills interior units and fixes the rest") {
  const BarBackend& B = bar();
  for (int k = 1; k <= 3; ++k) {
    ElemPtr e = bar_e_formula(B, k);
    Mat m = B.elem_matrix(e);
    int interior_mask = ((1 << k) - 1) << 1;
    for (int col = 0; col < m.cols; ++col) {
      if ((col & interior_mask) != interior_mask) {
        // Some interior factor is the unit: the column vanishes.
        CHECK(column_is_zero(B, e, col));
      } else {
        // Leading term: the diagonal entry is 1 and every other term has a
        // unit in some interior slot.
        CHECK(s_is_one(m.at(col, col)));
        for (int row = 0; row < m.rows; ++row) {
          if (row == col || s_is_zero(m.at(row, col))) continue;
          CHECK((row & interior_mask) != interior_mask);
        }
      }
    }
  }
}

TEST_CASE("hom space dimensions") {
  const BarBackend& B = bar();
  CHECK(B.hom_basis("C", "C", 0).size() == 1);
  CHECK(B.hom_basis("C.C", "C.C", 0).size() == 4);
  CHECK(B.hom_basis("C", "1", 0).size() == 1);
  CHECK(B.hom_basis("1", "C", 0).size() == 0);
  CHECK(B.hom_basis("1", "C", 2).size() == 1);
  CHECK(B.hom_basis("1", "1", 0).size() == 1);
  CHECK(B.hom_basis("1", "1", 2).size() == 1);
  // The sole degree-2 map out of the unit sends 1 to x(x)1 + 1(x)x.
  std::vector<ElemPtr> z = B.hom_basis("1", "C", 2);
  Mat m = B.elem_matrix(z[0]);
  CHECK_FALSE(s_is_zero(m.at(1, 0)));
  CHECK(m.at(1, 0) == m.at(2, 0));
}

TEST_CASE("coordinates invert the basis expansion") {
  const BarBackend& B = bar();
  const Ring& R = B.ring();
  for (auto [src, dst, deg] : {std::tuple<std::string, std::string, int>
                                   {"C.C", "C", 0},
                               {"C", "C.C", 2},
                               {"1", "C", 2},
                               {"1", "1", 0}}) {
    std::vector<ElemPtr> basis = B.hom_basis(src, dst, deg);
    REQUIRE_FALSE(basis.empty());
    ElemPtr combo = B.zero_elem(src, dst, deg);
    for (int i = 0; i < (int)basis.size(); ++i)
      combo = B.add(combo, B.scale(s_from_int(R, 2 * i - 3), basis[i]));
    std::vector<Scalar> co = B.elem_coords(combo);
    REQUIRE((int)co.size() == (int)basis.size());
    for (int i = 0; i < (int)basis.size(); ++i)
      CHECK(co[i] == s_from_int(R, 2 * i - 3));
  }
}

TEST_CASE("lazy images compose through projection and inclusion") {
  const BarBackend& B = bar();
  ElemPtr e = bar_e_formula(B, 2);
  FormalObject carrier = fo_single("C.C.C");
  BlockMorphism eb = bm_zero(carrier, carrier, 0);
  bm_set(B, eb, 0, 0, e);
  FormalObject im = karoubi_image(B, eb, "im_e3");
  BlockMorphism pi = karoubi_project(B, eb, im);
  BlockMorphism incl = karoubi_include(B, eb, im);
  CHECK(bm_equal(B, bm_compose(B, pi, incl), bm_identity(B, im)));
  CHECK(bm_equal(B, bm_compose(B, incl, pi), eb));
  CHECK_THROWS_WITH(split_idempotent(B, eb),
                    Catch::Matchers::ContainsSubstring("NotSupported"));
}
