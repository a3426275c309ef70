#pragma once

// Exact scalar arithmetic over Z, Q and prime fields, plus Laurent
// polynomials and truncated Laurent series in q.  Everything is int64-based
// with overflow checks; nothing here ever rounds.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace catidem {

// Error with a stable machine-readable code ("Overflow", "NonInvertible", ...)
// in front of the human message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

[[noreturn]] void fail(const std::string& code, const std::string& msg);

enum class RingKind { Integers, Rationals, PrimeField };

struct Ring {
  RingKind kind = RingKind::Integers;
  std::int64_t p = 0;  // modulus, PrimeField only

  static Ring integers() { return {RingKind::Integers, 0}; }
  static Ring rationals() { return {RingKind::Rationals, 0}; }
  static Ring prime_field(std::int64_t p);

  bool operator==(const Ring&) const = default;
  std::string to_string() const;
};

// Plain value type; interpretation depends on the ring.  den stays 1 except
// over the rationals, where num/den is kept reduced with den > 0.
struct Scalar {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool operator==(const Scalar&) const = default;
};

Scalar s_from_int(const Ring& R, std::int64_t n);
Scalar s_from_fraction(const Ring& R, std::int64_t num, std::int64_t den);
inline Scalar s_zero(const Ring&) { return {0, 1}; }
inline Scalar s_one(const Ring&) { return {1, 1}; }

Scalar s_add(const Ring& R, const Scalar& a, const Scalar& b);
Scalar s_sub(const Ring& R, const Scalar& a, const Scalar& b);
Scalar s_mul(const Ring& R, const Scalar& a, const Scalar& b);
Scalar s_neg(const Ring& R, const Scalar& a);
bool s_is_zero(const Scalar& a);
bool s_is_one(const Scalar& a);
bool s_is_unit(const Ring& R, const Scalar& a);
Scalar s_inv(const Ring& R, const Scalar& a);  // NonInvertible if not a unit
Scalar s_div(const Ring& R, const Scalar& a, const Scalar& b);
std::string s_to_string(const Ring& R, const Scalar& a);

// Laurent polynomial in q: sorted (exponent, coefficient) pairs, ascending
// exponents, no zero coefficients.
class LaurentPoly {
public:
  explicit LaurentPoly(const Ring& R) : ring_(R) {}
  static LaurentPoly zero(const Ring& R) { return LaurentPoly(R); }
  static LaurentPoly constant(const Ring& R, const Scalar& c);
  static LaurentPoly one(const Ring& R) { return constant(R, s_one(R)); }
  // c * q^e
  static LaurentPoly monomial(const Ring& R, int e, const Scalar& c);
  static LaurentPoly q_power(const Ring& R, int e) {
    return monomial(R, e, s_one(R));
  }

  const Ring& ring() const { return ring_; }
  const std::vector<std::pair<int, Scalar>>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Scalar coeff(int e) const;
  int min_exp() const;  // errors on zero
  int max_exp() const;

  LaurentPoly add(const LaurentPoly& o) const;
  LaurentPoly sub(const LaurentPoly& o) const;
  LaurentPoly mul(const LaurentPoly& o) const;
  LaurentPoly neg() const;
  LaurentPoly scale(const Scalar& c) const;
  LaurentPoly shift(int e) const;  // multiply by q^e
  // drop all terms with exponent >= bound (increasing) or <= bound (decreasing)
  LaurentPoly truncated(int bound, bool decreasing = false) const;
  Scalar eval_at_one() const;

  bool operator==(const LaurentPoly& o) const {
    return ring_ == o.ring_ && terms_ == o.terms_;
  }
  std::string to_string() const;

  // Internal: set a coefficient (used by arithmetic); keeps invariants.
  void set_coeff(int e, const Scalar& c);

private:
  Ring ring_;
  std::vector<std::pair<int, Scalar>> terms_;
};

// Truncated Laurent series: exact up to an error term O(q^order).  In the
// default increasing mode every known exponent is < order; in decreasing
// mode the series runs toward q^-inf and known exponents are > order.
struct LaurentSeries {
  LaurentPoly poly;
  int order = 0;
  bool decreasing = false;

  LaurentSeries(LaurentPoly p, int ord, bool dec = false);

  const Ring& ring() const { return poly.ring(); }
  LaurentSeries add(const LaurentSeries& o) const;
  LaurentSeries sub(const LaurentSeries& o) const;
  LaurentSeries mul(const LaurentSeries& o) const;
  LaurentSeries neg() const;
  LaurentSeries scale(const Scalar& c) const;
  LaurentSeries shift(int e) const;

  bool operator==(const LaurentSeries& o) const = default;
  std::string to_string() const;
};

// Multiplicative inverse of f as a truncated series with n_terms known
// exponents starting from the extreme term of f.  Increasing mode expands
// from min_exp upward, decreasing mode from max_exp downward.  The extreme
// coefficient must be a unit (NonUnitLeadingTerm otherwise); f must be
// nonzero (DivisionByZero).
LaurentSeries series_inverse(const LaurentPoly& f, int n_terms,
                             bool decreasing = false);

// Exact product f * g truncated to the series' window.
LaurentSeries series_mul_poly(const LaurentSeries& s, const LaurentPoly& f);

}  // namespace catidem
