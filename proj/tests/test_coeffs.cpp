// Unit tests for exact scalars, Laurent polynomials and truncated series.
// Expected expansions were computed by hand first and frozen here.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "catidem/coeffs.hpp"

using namespace catidem;

static LaurentPoly from_terms(
    const Ring& R, const std::vector<std::pair<int, std::int64_t>>& ts) {
  LaurentPoly p(R);
  for (auto [e, c] : ts) p.set_coeff(e, s_from_int(R, c));
  return p;
}

TEST_CASE("integer and rational scalar arithmetic", "[coeffs]") {
  Ring Z = Ring::integers();
  Ring Q = Ring::rationals();

  CHECK(s_add(Z, s_from_int(Z, 3), s_from_int(Z, -5)) == s_from_int(Z, -2));
  CHECK(s_mul(Z, s_from_int(Z, -4), s_from_int(Z, 6)) == s_from_int(Z, -24));
  CHECK(s_is_unit(Z, s_from_int(Z, -1)));
  CHECK_FALSE(s_is_unit(Z, s_from_int(Z, 2)));
  CHECK_THROWS_AS(s_inv(Z, s_from_int(Z, 2)), Error);

  // 2/4 reduces to 1/2 with positive denominator
  Scalar half = s_from_fraction(Q, 2, 4);
  CHECK(half == Scalar{1, 2});
  CHECK(s_from_fraction(Q, 1, -3) == Scalar{-1, 3});
  CHECK(s_add(Q, half, Scalar{1, 3}) == Scalar{5, 6});
  CHECK(s_mul(Q, Scalar{2, 3}, Scalar{3, 4}) == Scalar{1, 2});
  CHECK(s_inv(Q, Scalar{-2, 5}) == Scalar{-5, 2});
  CHECK(s_to_string(Q, Scalar{-5, 2}) == "-5/2");
}

TEST_CASE("prime field scalar arithmetic", "[coeffs]") {
  Ring F = Ring::prime_field(7);
  CHECK(s_from_int(F, -1) == s_from_int(F, 6));
  CHECK(s_add(F, s_from_int(F, 5), s_from_int(F, 4)) == s_from_int(F, 2));
  CHECK(s_mul(F, s_from_int(F, 3), s_from_int(F, 5)) == s_from_int(F, 1));
  CHECK(s_inv(F, s_from_int(F, 3)) == s_from_int(F, 5));
  CHECK_THROWS_AS(s_inv(F, s_zero(F)), Error);
  CHECK_THROWS_AS(Ring::prime_field(6), Error);
}

TEST_CASE("overflow is detected, not wrapped", "[coeffs]") {
  Ring Z = Ring::integers();
  Scalar big = s_from_int(Z, INT64_MAX);
  CHECK_THROWS_AS(s_add(Z, big, s_one(Z)), Error);
  CHECK_THROWS_AS(s_mul(Z, big, s_from_int(Z, 2)), Error);
  try {
    s_mul(Z, big, big);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == "Overflow");
  }
}

TEST_CASE("laurent polynomial arithmetic", "[coeffs]") {
  Ring Z = Ring::integers();
  LaurentPoly a = from_terms(Z, {{0, 1}, {2, 1}});            // 1 + q^2
  LaurentPoly b = from_terms(Z, {{0, 1}, {2, -1}, {4, 1}});   // 1 - q^2 + q^4

  CHECK(a.mul(b) == from_terms(Z, {{0, 1}, {6, 1}}));         // 1 + q^6
  CHECK(a.sub(a).is_zero());
  CHECK(a.shift(-3) == from_terms(Z, {{-3, 1}, {-1, 1}}));
  CHECK(a.coeff(2) == s_one(Z));
  CHECK(a.coeff(1) == s_zero(Z));
  CHECK(b.min_exp() == 0);
  CHECK(b.max_exp() == 4);
  CHECK(b.eval_at_one() == s_one(Z));

  LaurentPoly c = from_terms(Z, {{-1, -2}, {0, 1}, {3, 5}});
  CHECK(c.to_string() == "-2*q^-1 + 1 + 5*q^3");
  CHECK(from_terms(Z, {{1, 1}}).to_string() == "q");
  CHECK(from_terms(Z, {{2, -1}}).to_string() == "-q^2");
  CHECK(LaurentPoly::zero(Z).to_string() == "0");
}

TEST_CASE("series inverse of q + q^-1", "[coeffs]") {
  // Hand expansion: (q + q^-1)^-1 = q - q^3 + q^5 - ...
  Ring Z = Ring::integers();
  LaurentPoly f = from_terms(Z, {{-1, 1}, {1, 1}});
  LaurentSeries inv = series_inverse(f, 6);
  CHECK(inv.poly == from_terms(Z, {{1, 1}, {3, -1}, {5, 1}}));
  CHECK(inv.order == 7);
  CHECK_FALSE(inv.decreasing);
  CHECK(inv.to_string() == "q - q^3 + q^5 + O(q^7)");

  // The product with f is 1 on the known window.
  LaurentSeries prod = series_mul_poly(inv, f);
  CHECK(prod.poly == LaurentPoly::one(Z));
}

TEST_CASE("series inverse of 1 + q^2", "[coeffs]") {
  Ring Z = Ring::integers();
  LaurentPoly f = from_terms(Z, {{0, 1}, {2, 1}});
  LaurentSeries inv = series_inverse(f, 7);
  CHECK(inv.poly == from_terms(Z, {{0, 1}, {2, -1}, {4, 1}, {6, -1}}));
  CHECK(inv.order == 7);
}

TEST_CASE("series inverse in decreasing mode", "[coeffs]") {
  // Expanding (q + q^-1)^-1 from the top: q^-1 - q^-3 + q^-5 - ...
  Ring Z = Ring::integers();
  LaurentPoly f = from_terms(Z, {{-1, 1}, {1, 1}});
  LaurentSeries inv = series_inverse(f, 6, true);
  CHECK(inv.poly == from_terms(Z, {{-1, 1}, {-3, -1}, {-5, 1}}));
  CHECK(inv.order == -7);
  CHECK(inv.decreasing);
}

TEST_CASE("series inverse error cases", "[coeffs]") {
  Ring Z = Ring::integers();
  Ring Q = Ring::rationals();
  LaurentPoly two = from_terms(Z, {{0, 2}});
  try {
    series_inverse(two, 4);
    FAIL("expected NonUnitLeadingTerm");
  } catch (const Error& e) {
    CHECK(e.code() == "NonUnitLeadingTerm");
  }
  CHECK_THROWS_AS(series_inverse(LaurentPoly::zero(Z), 4), Error);

  // Over Q the same polynomial inverts exactly.
  LaurentPoly two_q = LaurentPoly::constant(Q, s_from_int(Q, 2));
  LaurentSeries inv = series_inverse(two_q, 3);
  CHECK(inv.poly == LaurentPoly::constant(Q, Scalar{1, 2}));
}

TEST_CASE("series arithmetic respects truncation windows", "[coeffs]") {
  Ring Z = Ring::integers();
  LaurentSeries a(from_terms(Z, {{0, 1}, {1, 1}}), 3);
  LaurentSeries b(from_terms(Z, {{0, 1}, {4, 1}}), 5);  // q^4 term dropped by a
  LaurentSeries sum = a.add(b);
  CHECK(sum.order == 3);
  CHECK(sum.poly == from_terms(Z, {{0, 2}, {1, 1}}));

  LaurentSeries prod = a.mul(b);
  CHECK(prod.order == 3);  // min(3 + 0, 5 + 0)
  CHECK(prod.poly == from_terms(Z, {{0, 1}, {1, 1}}));

  LaurentSeries sh = a.shift(2);
  CHECK(sh.order == 5);
  CHECK(sh.poly == from_terms(Z, {{2, 1}, {3, 1}}));
}

TEST_CASE("random polynomials invert consistently", "[coeffs]") {
  Ring Q = Ring::rationals();
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> shift(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    LaurentPoly f(Q);
    f.set_coeff(0, s_from_int(Q, coeff(rng) * 2 + 1));  // odd, nonzero lead
    for (int e = 1; e <= 4; ++e) f.set_coeff(e, s_from_int(Q, coeff(rng)));
    f = f.shift(shift(rng));
    LaurentSeries inv = series_inverse(f, 8);
    LaurentSeries prod = series_mul_poly(inv, f);
    CHECK(prod.poly == LaurentPoly::one(Q));
    bool dec = trial % 2 == 0;
    LaurentSeries inv2 = series_inverse(f, 8, dec);
    CHECK(series_mul_poly(inv2, f).poly == LaurentPoly::one(Q));
  }
}
