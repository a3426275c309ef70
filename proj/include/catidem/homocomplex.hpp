#pragma once

// Truncated cochain complexes of formal objects, with differentials of
// homological degree +1.  All sign conventions are mechanical and verified
// at construction time: X[k] scales the differential by (-1)^k, the cone of
// f : X -> Y is X[1] (+) Y with differential [[-d_X, 0], [f, d_Y]], and the
// tensor differential on X^i (x) Y^j is d_X (x) id + (-1)^i id (x) d_Y.
//
// A window [lo, hi] carries edge flags: an artificial edge means the
// complex continues beyond it but is not stored; a true edge means the
// complex really is zero past it.  Operations track which degrees of a
// result are completely determined and drop the rest.

#include <functional>
#include <map>

#include "catidem/catcore.hpp"

namespace catidem {

struct TruncatedComplex {
  const Backend* B = nullptr;
  int lo = 0, hi = 0;  // inclusive
  bool lo_artificial = false;
  bool hi_artificial = false;
  std::vector<FormalObject> obj;      // index k - lo
  std::vector<BlockMorphism> diff;    // diff[k - lo] : obj(k) -> obj(k+1)

  bool in_window(int k) const { return k >= lo && k <= hi; }
  const FormalObject& at(int k) const;
  const BlockMorphism& d(int k) const;  // k in [lo, hi-1]
};

// Validating constructor; checks endpoints, q-degree 0 and d.d = 0.
TruncatedComplex cx_make(const Backend& B, int lo,
                         std::vector<FormalObject> objs,
                         std::vector<BlockMorphism> diffs, bool lo_artificial,
                         bool hi_artificial);
// Single object placed in one homological degree (true edges).
TruncatedComplex cx_single(const Backend& B, const FormalObject& x,
                           int at = 0);
TruncatedComplex cx_unit(const Backend& B);
TruncatedComplex cx_shift(const TruncatedComplex& x, int k);
TruncatedComplex cx_tensor(const TruncatedComplex& x,
                           const TruncatedComplex& y);
TruncatedComplex cx_tensor_power(const TruncatedComplex& x, int n);
bool cx_equal(const TruncatedComplex& x, const TruncatedComplex& y);
std::string cx_to_string(const TruncatedComplex& x);

struct ChainMap {
  TruncatedComplex src, dst;
  int hdeg = 0;
  std::map<int, BlockMorphism> comp;  // comp[k] : src^k -> dst^{k+hdeg}
};
// d . f = (-1)^hdeg f . d on every degree where both sides are known.
bool chainmap_closed(const ChainMap& f, std::string* why = nullptr);
ChainMap chainmap_identity(const TruncatedComplex& x);
ChainMap chainmap_compose(const ChainMap& g, const ChainMap& f);
// Cone of a homological-degree-0 chain map (validates closedness).
TruncatedComplex cx_cone(const ChainMap& f);

// Gaussian reduction: repeatedly cancel unit-identity entries between
// identical summands in adjacent degrees.  The witness records a homotopy
// equivalence between the input and the result: f g = id exactly and
// id - g f = d h + h d on the whole window (h vanishes outside).
struct HomotopyWitness {
  std::map<int, BlockMorphism> f;  // original -> reduced
  std::map<int, BlockMorphism> g;  // reduced -> original
  std::map<int, BlockMorphism> h;  // h[k] : original^k -> original^{k-1}
};
struct ReduceResult {
  TruncatedComplex cx;
  HomotopyWitness witness;  // populated when requested
  int steps = 0;
};
ReduceResult gaussian_reduce(const TruncatedComplex& x,
                             bool with_witness = false);
// Verify every identity a reduction witness claims.
bool check_reduction_witness(const TruncatedComplex& orig,
                             const TruncatedComplex& red,
                             const HomotopyWitness& w,
                             std::string* why = nullptr);

// Verify d h + h d = id on degrees [from, to] of x.
struct NullHomotopyCheck {
  bool ok = false;
  std::string detail;
};
NullHomotopyCheck check_nullhomotopy(const TruncatedComplex& x,
                                     const std::map<int, BlockMorphism>& h,
                                     int from, int to);

// Canonical representative: summands sorted per degree, then a
// deterministic unit rescaling sweep anchored at the top of the window.
TruncatedComplex cx_canonicalize(const TruncatedComplex& x);
// Structural equality of the canonicalized complexes on [from, to].
bool cx_window_equal(const TruncatedComplex& x, const TruncatedComplex& y,
                     int from, int to);
bool cx_is_zero_on(const TruncatedComplex& x, int from, int to);

// Graded Euler characteristic, grouped by summand class (word, or image
// tag for lazy images).  When an edge is artificial the result is not a
// complete series; edge_min_shift reports the smallest q-shift seen at the
// artificial edge degrees so callers can pick an honest truncation order.
struct EulerResult {
  std::map<std::string, LaurentPoly> classes;
  bool exact = true;
  int edge_min_shift = 0;
};
EulerResult euler_series(const TruncatedComplex& x);

}  // namespace catidem
