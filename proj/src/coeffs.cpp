#include "catidem/coeffs.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace catidem {

void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

namespace {

using i128 = __int128;

std::int64_t checked64(i128 v, const char* ctx) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
    fail("Overflow", std::string("int64 overflow in ") + ctx);
  return static_cast<std::int64_t>(v);
}

int checked_int(i128 v, const char* ctx) {
  if (v > i128(INT32_MAX) || v < i128(INT32_MIN))
    fail("Overflow", std::string("exponent overflow in ") + ctx);
  return static_cast<int>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Reduce num/den to lowest terms with positive denominator.
Scalar make_rational(i128 num, i128 den) {
  if (den == 0) fail("DivisionByZero", "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num == 0) return {0, 1};
  i128 g = gcd128(num, den);
  return {checked64(num / g, "rational numerator"),
          checked64(den / g, "rational denominator")};
}

std::int64_t mod_reduce(i128 v, std::int64_t p) {
  std::int64_t r = static_cast<std::int64_t>(v % p);
  if (r < 0) r += p;
  return r;
}

// Modular inverse via extended Euclid; p prime so any nonzero class works.
std::int64_t mod_inverse(std::int64_t a, std::int64_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = a % p;
  if (new_r < 0) new_r += p;
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) fail("NonInvertible", "no inverse mod p");
  if (t < 0) t += p;
  return t;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

Ring Ring::prime_field(std::int64_t p) {
  if (!is_prime(p)) fail("NotPrime", "prime field modulus must be prime");
  return {RingKind::PrimeField, p};
}

std::string Ring::to_string() const {
  switch (kind) {
    case RingKind::Integers: return "Z";
    case RingKind::Rationals: return "Q";
    case RingKind::PrimeField: return "F" + std::to_string(p);
  }
  return "?";
}

Scalar s_from_int(const Ring& R, std::int64_t n) {
  if (R.kind == RingKind::PrimeField) return {mod_reduce(n, R.p), 1};
  return {n, 1};
}

Scalar s_from_fraction(const Ring& R, std::int64_t num, std::int64_t den) {
  switch (R.kind) {
    case RingKind::Rationals: return make_rational(num, den);
    case RingKind::Integers:
      if (den == 0) fail("DivisionByZero", "fraction with zero denominator");
      if (num % den != 0)
        fail("NonInvertible", "fraction is not an integer");
      return {num / den, 1};
    case RingKind::PrimeField: {
      Scalar d = s_from_int(R, den);
      if (d.num == 0) fail("DivisionByZero", "fraction with zero denominator");
      return s_mul(R, s_from_int(R, num), s_inv(R, d));
    }
  }
  return {0, 1};
}

Scalar s_add(const Ring& R, const Scalar& a, const Scalar& b) {
  switch (R.kind) {
    case RingKind::Integers:
      return {checked64(i128(a.num) + i128(b.num), "add"), 1};
    case RingKind::Rationals:
      return make_rational(i128(a.num) * b.den + i128(b.num) * a.den,
                           i128(a.den) * b.den);
    case RingKind::PrimeField:
      return {mod_reduce(i128(a.num) + i128(b.num), R.p), 1};
  }
  return {0, 1};
}

Scalar s_sub(const Ring& R, const Scalar& a, const Scalar& b) {
  return s_add(R, a, s_neg(R, b));
}

Scalar s_mul(const Ring& R, const Scalar& a, const Scalar& b) {
  switch (R.kind) {
    case RingKind::Integers:
      return {checked64(i128(a.num) * b.num, "mul"), 1};
    case RingKind::Rationals:
      return make_rational(i128(a.num) * b.num, i128(a.den) * b.den);
    case RingKind::PrimeField:
      return {mod_reduce(i128(a.num) * b.num, R.p), 1};
  }
  return {0, 1};
}

Scalar s_neg(const Ring& R, const Scalar& a) {
  if (R.kind == RingKind::PrimeField)
    return {a.num == 0 ? 0 : R.p - a.num, 1};
  return {checked64(-i128(a.num), "neg"), a.den};
}

bool s_is_zero(const Scalar& a) { return a.num == 0; }
bool s_is_one(const Scalar& a) { return a.num == 1 && a.den == 1; }

bool s_is_unit(const Ring& R, const Scalar& a) {
  switch (R.kind) {
    case RingKind::Integers: return a.num == 1 || a.num == -1;
    case RingKind::Rationals: return a.num != 0;
    case RingKind::PrimeField: return a.num != 0;
  }
  return false;
}

Scalar s_inv(const Ring& R, const Scalar& a) {
  if (!s_is_unit(R, a)) fail("NonInvertible", "scalar is not a unit");
  switch (R.kind) {
    case RingKind::Integers: return a;  // +-1 are self-inverse
    case RingKind::Rationals: return make_rational(a.den, a.num);
    case RingKind::PrimeField: return {mod_inverse(a.num, R.p), 1};
  }
  return {0, 1};
}

Scalar s_div(const Ring& R, const Scalar& a, const Scalar& b) {
  if (R.kind == RingKind::Rationals) {
    if (s_is_zero(b)) fail("DivisionByZero", "division by zero");
    return s_mul(R, a, make_rational(b.den, b.num));
  }
  return s_mul(R, a, s_inv(R, b));
}

std::string s_to_string(const Ring& R, const Scalar& a) {
  if (R.kind == RingKind::Rationals && a.den != 1)
    return std::to_string(a.num) + "/" + std::to_string(a.den);
  return std::to_string(a.num);
}

LaurentPoly LaurentPoly::constant(const Ring& R, const Scalar& c) {
  LaurentPoly p(R);
  p.set_coeff(0, c);
  return p;
}

LaurentPoly LaurentPoly::monomial(const Ring& R, int e, const Scalar& c) {
  LaurentPoly p(R);
  p.set_coeff(e, c);
  return p;
}

Scalar LaurentPoly::coeff(int e) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), e,
      [](const std::pair<int, Scalar>& t, int x) { return t.first < x; });
  if (it != terms_.end() && it->first == e) return it->second;
  return {0, 1};
}

int LaurentPoly::min_exp() const {
  if (terms_.empty()) fail("DivisionByZero", "min_exp of zero polynomial");
  return terms_.front().first;
}

int LaurentPoly::max_exp() const {
  if (terms_.empty()) fail("DivisionByZero", "max_exp of zero polynomial");
  return terms_.back().first;
}

void LaurentPoly::set_coeff(int e, const Scalar& c) {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), e,
      [](const std::pair<int, Scalar>& t, int x) { return t.first < x; });
  if (it != terms_.end() && it->first == e) {
    if (s_is_zero(c))
      terms_.erase(it);
    else
      it->second = c;
  } else if (!s_is_zero(c)) {
    terms_.insert(it, {e, c});
  }
}

LaurentPoly LaurentPoly::add(const LaurentPoly& o) const {
  if (!(ring_ == o.ring_)) fail("RingMismatch", "adding over different rings");
  LaurentPoly out(ring_);
  auto a = terms_.begin(), b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      out.terms_.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      out.terms_.push_back(*b++);
    } else {
      Scalar c = s_add(ring_, a->second, b->second);
      if (!s_is_zero(c)) out.terms_.push_back({a->first, c});
      ++a;
      ++b;
    }
  }
  return out;
}

LaurentPoly LaurentPoly::sub(const LaurentPoly& o) const {
  return add(o.neg());
}

LaurentPoly LaurentPoly::mul(const LaurentPoly& o) const {
  if (!(ring_ == o.ring_)) fail("RingMismatch", "multiplying over different rings");
  LaurentPoly out(ring_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      int e = checked_int(i128(ea) + i128(eb), "exponent add");
      out.set_coeff(e, s_add(ring_, out.coeff(e), s_mul(ring_, ca, cb)));
    }
  return out;
}

LaurentPoly LaurentPoly::neg() const {
  LaurentPoly out(ring_);
  out.terms_.reserve(terms_.size());
  for (const auto& [e, c] : terms_) out.terms_.push_back({e, s_neg(ring_, c)});
  return out;
}

LaurentPoly LaurentPoly::scale(const Scalar& c) const {
  LaurentPoly out(ring_);
  if (s_is_zero(c)) return out;
  for (const auto& [e, a] : terms_) {
    Scalar m = s_mul(ring_, a, c);
    if (!s_is_zero(m)) out.terms_.push_back({e, m});
  }
  return out;
}

LaurentPoly LaurentPoly::shift(int e) const {
  LaurentPoly out(ring_);
  out.terms_.reserve(terms_.size());
  for (const auto& [ex, c] : terms_)
    out.terms_.push_back({checked_int(i128(ex) + i128(e), "exponent add"), c});
  return out;
}

LaurentPoly LaurentPoly::truncated(int bound, bool decreasing) const {
  LaurentPoly out(ring_);
  for (const auto& [e, c] : terms_)
    if (decreasing ? e > bound : e < bound) out.terms_.push_back({e, c});
  return out;
}

Scalar LaurentPoly::eval_at_one() const {
  Scalar acc = s_zero(ring_);
  for (const auto& [e, c] : terms_) acc = s_add(ring_, acc, c);
  return acc;
}

std::string LaurentPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Scalar a = c;
    bool negative = a.num < 0;
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    if (negative) a.num = -a.num;
    bool unit_coeff = s_is_one(a);
    if (!unit_coeff || e == 0) os << s_to_string(ring_, a);
    if (e != 0) {
      if (!unit_coeff) os << "*";
      os << "q";
      if (e != 1) os << "^" << e;
    }
    first = false;
  }
  return os.str();
}

LaurentSeries::LaurentSeries(LaurentPoly p, int ord, bool dec)
    : poly(std::move(p)), order(ord), decreasing(dec) {
  poly = poly.truncated(order, decreasing);
}

LaurentSeries LaurentSeries::add(const LaurentSeries& o) const {
  if (decreasing != o.decreasing)
    fail("WindowMismatch", "adding series with opposite expansion directions");
  int ord = decreasing ? std::max(order, o.order) : std::min(order, o.order);
  return LaurentSeries(poly.add(o.poly), ord, decreasing);
}

LaurentSeries LaurentSeries::sub(const LaurentSeries& o) const {
  return add(o.neg());
}

LaurentSeries LaurentSeries::mul(const LaurentSeries& o) const {
  if (decreasing != o.decreasing)
    fail("WindowMismatch", "multiplying series with opposite expansion directions");
  // The product is known where every contributing pair of exponents is
  // known: order = min over (my order + their lowest known exponent, ...).
  auto extreme = [&](const LaurentSeries& s) {
    if (s.poly.is_zero()) return s.order;
    return decreasing ? s.poly.max_exp() : s.poly.min_exp();
  };
  i128 c1 = i128(order) + extreme(o);
  i128 c2 = i128(o.order) + extreme(*this);
  i128 ord = decreasing ? std::max(c1, c2) : std::min(c1, c2);
  return LaurentSeries(poly.mul(o.poly), checked_int(ord, "series order"),
                       decreasing);
}

LaurentSeries LaurentSeries::neg() const {
  return LaurentSeries(poly.neg(), order, decreasing);
}

LaurentSeries LaurentSeries::scale(const Scalar& c) const {
  return LaurentSeries(poly.scale(c), order, decreasing);
}

LaurentSeries LaurentSeries::shift(int e) const {
  return LaurentSeries(poly.shift(e),
                       checked_int(i128(order) + i128(e), "series order"),
                       decreasing);
}

std::string LaurentSeries::to_string() const {
  std::string tail = "O(q^" + std::to_string(order) + ")";
  if (poly.is_zero()) return tail;
  return poly.to_string() + " + " + tail;
}

LaurentSeries series_inverse(const LaurentPoly& f, int n_terms,
                             bool decreasing) {
  if (f.is_zero()) fail("DivisionByZero", "inverting the zero polynomial");
  if (n_terms < 0) fail("WindowMismatch", "series length must be nonnegative");
  const Ring& R = f.ring();

  // Work in increasing mode; decreasing is handled by negating exponents.
  LaurentPoly g(R);
  for (const auto& [e, c] : f.terms())
    g.set_coeff(decreasing ? -e : e, c);

  int m = g.min_exp();
  Scalar lead = g.coeff(m);
  if (!s_is_unit(R, lead))
    fail("NonUnitLeadingTerm", "leading coefficient is not a unit");
  Scalar lead_inv = s_inv(R, lead);

  // g = lead * q^m * (1 + u) with u supported in positive exponents.
  LaurentPoly u = g.shift(-m).scale(lead_inv).sub(LaurentPoly::one(R));
  // inverse = lead^-1 q^-m sum_k (-u)^k, truncated to exponents < n_terms.
  LaurentPoly acc = LaurentPoly::one(R);
  LaurentPoly pow = LaurentPoly::one(R);
  LaurentPoly neg_u = u.neg();
  while (true) {
    pow = pow.mul(neg_u).truncated(n_terms);
    if (pow.is_zero()) break;
    acc = acc.add(pow);
  }
  LaurentPoly inv = acc.scale(lead_inv).shift(-m).truncated(n_terms - m);

  if (!decreasing) return LaurentSeries(inv, n_terms - m, false);
  LaurentPoly back(R);
  for (const auto& [e, c] : inv.terms()) back.set_coeff(-e, c);
  return LaurentSeries(back, -(n_terms - m), true);
}

LaurentSeries series_mul_poly(const LaurentSeries& s, const LaurentPoly& f) {
  LaurentPoly prod = s.poly.mul(f);
  if (f.is_zero()) return LaurentSeries(prod, s.order, s.decreasing);
  i128 ord = s.decreasing ? i128(s.order) + f.max_exp()
                          : i128(s.order) + f.min_exp();
  return LaurentSeries(prod, checked_int(ord, "series order"), s.decreasing);
}

}  // namespace catidem
