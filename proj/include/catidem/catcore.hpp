#pragma once

// Category-level core: formal graded objects (shifted direct sums of backend
// words), block morphisms between them, tensor products with canonical
// normal forms, idempotent splitting and counital-structure checks.  The
// concrete monoidal categories plug in through the Backend interface.
//
// Grading bookkeeping used everywhere: a summand {word w, shift s} stands
// for q^s w, and a block entry (i, j) of a morphism of q-degree g is a word
// element of intrinsic degree  g + src.shift(j) - dst.shift(i).

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catidem/coeffs.hpp"
#include "catidem/linalg.hpp"

namespace catidem {

// Type-erased element of a backend hom space (a word-to-word morphism).
struct ElemBase {
  virtual ~ElemBase() = default;
};
using ElemPtr = std::shared_ptr<const ElemBase>;

// q^shift * word, optionally cut down by an idempotent endomorphism of the
// word (a lazily represented image summand).
struct Summand {
  std::string word;
  int shift = 0;
  ElemPtr idem;           // null for a plain word
  std::string idem_tag;   // stable label when idem is set
};

struct FormalObject {
  std::vector<Summand> summands;

  int size() const { return static_cast<int>(summands.size()); }
  bool is_zero_object() const { return summands.empty(); }
};

struct BlockMorphism {
  FormalObject src, dst;
  int degree = 0;  // q-degree
  std::map<std::pair<int, int>, ElemPtr> entries;  // (dst index, src index)
};

// Normal form of a two-word concatenation: the summands it decomposes into,
// with inclusion/projection elements witnessing the isomorphism with the
// raw concatenation.
struct TensorNF {
  std::string raw;  // backend key of the raw concatenation
  std::vector<std::pair<std::string, int>> parts;  // (word, shift)
  std::vector<ElemPtr> incl;  // parts[k] -> raw
  std::vector<ElemPtr> proj;  // raw -> parts[k]
};

class Backend {
public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual const Ring& ring() const = 0;

  // Words
  virtual std::string unit_word() const = 0;
  virtual bool word_valid(const std::string& w) const = 0;
  virtual std::string concat(const std::string& a,
                             const std::string& b) const = 0;
  virtual TensorNF tensor_words(const std::string& a,
                                const std::string& b) const = 0;
  // True when concat(a, b) is already the normal form of every product
  // (then image summands may be tensored lazily).
  virtual bool trivial_concat() const = 0;
  // True when idempotents on plain-word objects can be split into shifted
  // words (all words have scalar degree-0 endomorphisms).
  virtual bool supports_splitting() const = 0;

  // Elements
  virtual ElemPtr identity(const std::string& w) const = 0;
  virtual ElemPtr zero_elem(const std::string& src, const std::string& dst,
                            int deg) const = 0;
  virtual ElemPtr compose(const ElemPtr& g, const ElemPtr& f) const = 0;
  virtual ElemPtr add(const ElemPtr& a, const ElemPtr& b) const = 0;
  virtual ElemPtr scale(const Scalar& c, const ElemPtr& a) const = 0;
  virtual ElemPtr tensor_elems(const ElemPtr& a, const ElemPtr& b) const = 0;
  virtual bool is_zero(const ElemPtr& a) const = 0;
  virtual std::string elem_src(const ElemPtr& a) const = 0;
  virtual std::string elem_dst(const ElemPtr& a) const = 0;
  virtual int elem_deg(const ElemPtr& a) const = 0;
  // c when a == c * identity (plain words only), nullopt otherwise.
  virtual std::optional<Scalar> identity_factor(const ElemPtr& a) const = 0;
  virtual std::string elem_repr(const ElemPtr& a) const = 0;

  // Basis of the hom space between two words in one intrinsic degree, and
  // coordinates of an element with respect to that basis.
  virtual std::vector<ElemPtr> hom_basis(const std::string& src,
                                         const std::string& dst,
                                         int deg) const = 0;
  virtual std::vector<Scalar> elem_coords(const ElemPtr& a) const = 0;

  bool equal(const ElemPtr& a, const ElemPtr& b) const;
  ElemPtr sub(const ElemPtr& a, const ElemPtr& b) const;
};

// ---- formal objects ----

FormalObject fo_single(const std::string& word, int shift = 0);
FormalObject fo_unit(const Backend& B);
FormalObject fo_shifted(const FormalObject& x, int shift);
FormalObject fo_direct_sum(const FormalObject& a, const FormalObject& b);
bool summand_equal(const Backend& B, const Summand& a, const Summand& b);
bool fo_equal(const Backend& B, const FormalObject& a, const FormalObject& b);
std::string fo_to_string(const FormalObject& x);

// ---- block morphisms ----

BlockMorphism bm_zero(const FormalObject& src, const FormalObject& dst,
                      int degree = 0);
BlockMorphism bm_identity(const Backend& B, const FormalObject& x);
// Insert an entry, validating word endpoints and intrinsic degree.
void bm_set(const Backend& B, BlockMorphism& m, int i, int j,
            const ElemPtr& e);
ElemPtr bm_entry(const Backend& B, const BlockMorphism& m, int i, int j);
BlockMorphism bm_compose(const Backend& B, const BlockMorphism& g,
                         const BlockMorphism& f);
BlockMorphism bm_add(const Backend& B, const BlockMorphism& a,
                     const BlockMorphism& b);
BlockMorphism bm_sub(const Backend& B, const BlockMorphism& a,
                     const BlockMorphism& b);
BlockMorphism bm_scale(const Backend& B, const Scalar& c,
                       const BlockMorphism& a);
BlockMorphism bm_shift(const BlockMorphism& a, int shift);  // q^s on both ends
bool bm_is_zero(const Backend& B, const BlockMorphism& m);
bool bm_equal(const Backend& B, const BlockMorphism& a, const BlockMorphism& b);
BlockMorphism bm_direct_sum(const Backend& B, const BlockMorphism& f,
                            const BlockMorphism& g);
std::string bm_to_string(const Backend& B, const BlockMorphism& m);

// ---- tensor products ----

struct TensorResult {
  // Normal form with summands in canonical order (word, then image tag,
  // then shift).  The canonical order makes the product associative on the
  // nose at the object level.  Morphism entries are another matter: two
  // groupings of the same product decompose it along different
  // inclusion/projection families, so block morphisms built under
  // different groupings may not compose slot for slot.  FlatDecomp below
  // records the family a construction actually used and flat_transport
  // converts between families.
  FormalObject nf;
  // Index range [first, second) in pre-sort order for each summand pair,
  // row-major over (i in X) x (j in Y).
  std::vector<std::pair<int, int>> ranges;
  // Position of each pre-sort summand inside nf.
  std::vector<int> pos;
};
TensorResult tensor_objects_full(const Backend& B, const FormalObject& x,
                                 const FormalObject& y);
FormalObject tensor_objects(const Backend& B, const FormalObject& x,
                            const FormalObject& y);
BlockMorphism tensor_morphisms(const Backend& B, const BlockMorphism& f,
                               const BlockMorphism& g);
FormalObject tensor_many(const Backend& B,
                         const std::vector<FormalObject>& xs);
BlockMorphism tensor_many_morphisms(const Backend& B,
                                    const std::vector<BlockMorphism>& fs);
// x tensored with itself n times (n >= 0; n = 0 gives the unit object).
FormalObject tensor_power(const Backend& B, const FormalObject& x, int n);

// ---- tensor decompositions tracked against flat concatenations ----

// A tensor product decomposition remembered together with its witnesses.
// Each summand of `obj` records which summand of each leaf factor it came
// from and carries elements embedding it into (and projecting it off) the
// plain concatenation of those leaf summand words.
struct FlatDecomp {
  FormalObject obj;
  std::vector<FormalObject> leaves;
  // One leaf summand index per leaf, for every summand of obj.
  std::vector<std::vector<int>> choice;
  std::vector<ElemPtr> incl;  // summand word -> concatenated leaf words
  std::vector<ElemPtr> proj;  // concatenated leaf words -> summand word
};

// x viewed as a single leaf.  Plain word summands only.
FlatDecomp flat_leaf(const Backend& B, const FormalObject& x);
// The unit object with no leaves at all.
FlatDecomp flat_unit(const Backend& B);
// Decomposition of tensor_objects(x.obj, y.obj) refining x and y, with the
// leaf lists concatenated.
FlatDecomp flat_tensor(const Backend& B, const FlatDecomp& x,
                       const FlatDecomp& y);
// Degree-0 isomorphism re-expressing an object across two decompositions
// with the same leaf sequence.  Summands are matched by leaf choice and the
// entries are proj . incl through the shared concatenation.
BlockMorphism flat_transport(const Backend& B, const FlatDecomp& from,
                             const FlatDecomp& to);

// ---- hom spaces as coordinate vectors ----

// Basis of degree-`degree` block morphisms x -> y, slot by slot.
std::vector<BlockMorphism> bm_hom_basis(const Backend& B,
                                        const FormalObject& x,
                                        const FormalObject& y, int degree);
std::vector<Scalar> bm_coords(const Backend& B, const BlockMorphism& m);
BlockMorphism bm_from_coords(const Backend& B, const FormalObject& x,
                             const FormalObject& y, int degree,
                             const std::vector<Scalar>& coords);

// ---- idempotents ----

struct SplitResult {
  FormalObject image;      // shifted words
  BlockMorphism sigma;     // image -> carrier, with e = sigma . pi
  BlockMorphism pi;        // carrier -> image, with pi . sigma = id
};
// Split a degree-0 idempotent on a plain-word object into shifted words
// (delooping backends); NotSplittable when the greedy peel gets stuck,
// NotIdempotent when e*e != e.
SplitResult split_idempotent(const Backend& B, const BlockMorphism& e);

// Lazy image summand of an idempotent on a single plain summand
// (word-concatenation backends).
FormalObject karoubi_image(const Backend& B, const BlockMorphism& e,
                           const std::string& tag);
// Corestriction / inclusion structure maps for a lazy image.
BlockMorphism karoubi_project(const Backend& B, const BlockMorphism& e,
                              const FormalObject& image);
BlockMorphism karoubi_include(const Backend& B, const BlockMorphism& e,
                              const FormalObject& image);

// ---- counital structures ----

struct CounitalObject {
  FormalObject c;
  BlockMorphism counit;   // c -> unit, degree 0
  BlockMorphism delta_r;  // c -> nf(c x c), degree 0, right-sided section
  BlockMorphism delta_l;  // left-sided section
};

struct CounitalCheck {
  bool right_ok = false;  // (id x eps) . delta_r == id
  bool left_ok = false;   // (eps x id) . delta_l == id
  std::string detail;
};
CounitalCheck verify_counital(const Backend& B, const CounitalObject& c);
CounitalObject direct_sum_counital(const Backend& B, const CounitalObject& a,
                                   const CounitalObject& b);

}  // namespace catidem
