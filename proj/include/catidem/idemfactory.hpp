#pragma once

// Construction kit for the complexes attached to a counital object C: the
// bar-type complex P with C^{*(k+1)} in degree -k, its cone A, the higher
// idempotents e_n acting on tensor powers together with their splittings,
// the normalized complexes built from the summands im e_n, stabilized
// powers of the cone of the counit, relative complements for a map of
// counital objects, the Temperley-Lieb tower of cup objects, and K0-class
// bookkeeping.  Every identity used along the way is checked exactly at
// construction time; failures throw instead of producing silent garbage.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "catidem/backend_tl.hpp"
#include "catidem/homocomplex.hpp"

namespace catidem {

// Reorder the carrier of a counital object into canonical summand order,
// conjugating the structure maps by the permutation.  Carriers produced
// by direct sums may need this before they can seed an IdemFactory.
CounitalObject counital_canonical(const Backend& B, const CounitalObject& cu);

// A direct summand of a tensor power, cut out by an idempotent e with
// incl . proj = e and proj . incl = id.
struct ImageObject {
  FormalObject x;
  BlockMorphism incl;
  BlockMorphism proj;
};

// pi . sigma = e_n and id_C * e_n - sigma . pi = e_{n+1}, exhibiting
// C * im e_n as im e_{n+1} (+) im e_n.
struct SplitRecursion {
  BlockMorphism pi;     // C^{*(n+1)} -> C^{*n}
  BlockMorphism sigma;  // C^{*n} -> C^{*(n+1)}
};

// The complex P, its cone A, and the chain maps tying them to the unit.
struct IdempotentBundle {
  CounitalObject c;
  TruncatedComplex P;  // C^{*(k+1)} in degree -k, k = 0..depth
  TruncatedComplex A;  // unit in degree 0, C^{*k} in degree -k
  ChainMap counit;     // P -> unit complex
  ChainMap unit;       // unit complex -> A
  int depth = 0;
};

// The image-summand models of P and A.
struct Normalized {
  TruncatedComplex P;  // im e_{k+1} in degree -k
  TruncatedComplex A;  // unit in degree 0, im e_k in degree -k
};

struct Stabilization {
  TruncatedComplex stable;  // reduced power at which the window froze
  int power = 0;
  int window_from = 0;  // degrees [window_from, 0] were compared
  bool matches_normalized = false;
};

class IdemFactory {
 public:
  // Requires the carrier in canonical summand order and both counit laws.
  IdemFactory(const Backend& B, const CounitalObject& cu);

  const Backend& backend() const { return *B_; }
  const CounitalObject& counital() const { return cu_; }

  // nf(C^{*n}), folded left to right; power(0) is the unit.
  const FormalObject& power(int n);

  // Counit applied in slot l of n factors: C^{*n} -> C^{*(n-1)}.
  const BlockMorphism& eps_insert(int n, int l);
  // Comultiplication in slot l of n factors: C^{*n} -> C^{*(n+1)}.
  const BlockMorphism& delta_insert(int n, int l);

  // Tensor product of maps between carrier powers, slot by slot, with
  // source and target re-expressed in the left-nested power decompositions
  // so results compose with everything else the factory builds.
  BlockMorphism tensor_slots(const std::vector<const BlockMorphism*>& fs);

  // Higher idempotent on C^{*n}; e_0 and e_1 are identities.  Checked
  // idempotent at construction.
  const BlockMorphism& en(int n);

  // The splitting maps relating e_n to e_{n+1}; all their defining
  // identities are checked at construction.
  const SplitRecursion& split_recursion(int n);

  // Direct summand im e_n of C^{*n}, split concretely when the backend
  // deloops and lazily (tagged summand) otherwise.
  const ImageObject& image(int n);

  // (eps * id_{n-1}) . e_n on tensor powers, and its restriction to the
  // image summands; im e_{n-1} absorbs it and consecutive ones compose
  // to zero, both checked.
  const BlockMorphism& delta_full(int n);
  const BlockMorphism& delta_hat(int n);  // im e_n -> im e_{n-1}

  TruncatedComplex build_P(int depth);
  TruncatedComplex build_A(int depth);
  ChainMap counit_map(int depth);  // P -> unit complex
  ChainMap unit_map(int depth);    // unit complex -> A
  IdempotentBundle build_bundle(int depth);

  Normalized build_normalized(int depth);

  // Cone of the counit: C in degree -1, unit in degree 0, true edges.
  TruncatedComplex cone_of_counit();

  // Reduce rising powers of the cone of the counit until the window
  // [-depth+1, 0] stops changing; compares the frozen window against the
  // normalized model of A when the backend splits.  Throws NoStabilization
  // when max_power (default depth+4) is exhausted.
  Stabilization stabilize_power(int depth, int max_power = 0);

  // C * C = lambda . C for a single-summand carrier whose tensor square
  // delooped to shifted copies of the same word; NotQuasiIdempotent
  // otherwise.
  LaurentPoly quasi_lambda();

 private:
  const FlatDecomp& flat(int n);
  int power_index_of(const FormalObject& x);

  const Backend* B_;
  CounitalObject cu_;
  std::vector<FormalObject> pow_;
  std::vector<FlatDecomp> flat_;
  std::map<std::pair<int, int>, BlockMorphism> eps_;
  std::map<std::pair<int, int>, BlockMorphism> del_;
  std::map<int, BlockMorphism> en_;
  std::map<int, SplitRecursion> split_;
  std::map<int, ImageObject> img_;
  std::map<int, BlockMorphism> dfull_;
  std::map<int, BlockMorphism> dhat_;
};

// [X_n] = [C]([C] - 1)^{n-1} in K0.  With quasi set, the carrier must be
// quasi-idempotent and the class is evaluated to coeff * [C] with
// coeff = (lambda - 1)^{n-1}.
struct K0Class {
  explicit K0Class(const Ring& R)
      : lambda(LaurentPoly::zero(R)), coeff(LaurentPoly::zero(R)) {}
  std::string symbolic;
  bool quasi = false;
  LaurentPoly lambda;
  LaurentPoly coeff;
};
K0Class k0_class_Xn(const Backend& B, const CounitalObject& cu, int n,
                    bool quasi);

// True when eps_2 . nu == eps_1 exactly.
bool counit_order_witness(const Backend& B, const CounitalObject& c1,
                          const CounitalObject& c2, const BlockMorphism& nu,
                          std::string* why = nullptr);

// Cone of the induced map P_1 -> P_2 for a counit-order witness
// nu : C_1 -> C_2, with the checked consequences of being the relative
// complement: it kills P_1, passes through P_2, and is idempotent.
struct RelativeIdempotent {
  ChainMap phi;        // P_1 -> P_2, component nu^{*(k+1)} in degree -k
  TruncatedComplex E;  // cone(phi)
  bool kills = false;       // E * P_1 and P_1 * E reduce to zero
  bool absorbed = false;    // E * P_2 and P_2 * E reduce back to E
  bool idempotent = false;  // E * E reduces back to E
  std::string detail;
};
// Throws WitnessInvalid unless nu intertwines the counits.  The three
// flags are only computed when verify is set; they compare reductions on
// the honest part of the truncation window.
RelativeIdempotent relative_idempotent(const Backend& B,
                                       const CounitalObject& c1,
                                       const CounitalObject& c2,
                                       const BlockMorphism& nu, int depth,
                                       bool verify);

// Through-strand count of a circle-free tangle word.
int tl_word_through_degree(const std::string& word);

// One layer of the Temperley-Lieb tower on n strands: the direct sum of
// cup objects over admissible sequences with k through strands, its
// complex P, and the cone E of the map induced by the inclusion from the
// layer below (E = P at the lowest layer).  nu removes the outermost cup
// pair of each summand of the layer below.
struct TLFamilyMember {
  int k = 0;
  CounitalObject c;
  TruncatedComplex P;
  TruncatedComplex E;
  BlockMorphism nu;  // carrier of layer k-2 -> carrier of layer k
  bool has_nu = false;
};

// All layers k = n, n-2, ..., together with the one-sided twisted complex
// assembling the E layers; the assembly reduces to the unit.
struct TLFamily {
  int strands = 0;
  int depth = 0;
  std::vector<TLFamilyMember> members;  // k descending
  TruncatedComplex assembled;
};
// With verify set, checks that every word in each E stays within the
// layer's through-strand bound and that the assembly reduces to the unit
// on the honest window.
TLFamily tl_family(const TLBackend& B, int depth, bool verify);

// Recover counital structure from a complex supported in non-positive
// degrees: C is the degree-0 object, eps0 the candidate counit, and the
// comultiplications are solved for linearly.  Throws NoRightInverse when
// no degree-0 section exists.  window_match reports whether the complex
// rebuilt from the recovered structure agrees with p after reduction on
// the shared honest window.
struct RecognizeReport {
  CounitalObject c;
  bool window_match = false;
  std::string detail;
};
RecognizeReport recognize(const Backend& B, const TruncatedComplex& p,
                          const BlockMorphism& eps0, int depth);

}  // namespace catidem
