#pragma once

// Temperley-Lieb category on a fixed number of strands.  Words are
// crossingless (n, n)-tangles, possibly carrying closed circles while a
// tensor normal form is in flight; the product is vertical stacking (left
// factor on top) and the unit is the identity tangle.  A morphism from T0
// to T1 is a k-linear combination of {1, x}-labelings of the circles of
// the closed diagram W(T0, T1) = T0 glued to the mirror of T1 along both
// boundaries, evaluated in the Frobenius algebra k[x]/x^2.  Circles are
// listed boundary-first (by smallest boundary point), then the free
// circles of the source, then those of the target; bit i of a labeling
// mask is set when circle i carries x.
//
// Grading: a labeling has degree (#x - #1) + (arcs(T0) + arcs(T1)) / 2,
// so identities sit in degree 0, a saddle in degree +1, and delooping
// splits a circle into shifts +1 and -1.

#include <cstdint>

#include "catidem/catcore.hpp"

namespace catidem {

class TLBackend final : public Backend {
 public:
  TLBackend(int strands, const Ring& R);

  std::string name() const override;
  const Ring& ring() const override { return ring_; }
  int strands() const { return n_; }

  std::string unit_word() const override;
  bool word_valid(const std::string& w) const override;
  std::string concat(const std::string& a, const std::string& b) const override;
  TensorNF tensor_words(const std::string& a,
                        const std::string& b) const override;
  bool trivial_concat() const override { return false; }
  bool supports_splitting() const override { return true; }

  ElemPtr identity(const std::string& w) const override;
  ElemPtr zero_elem(const std::string& src, const std::string& dst,
                    int deg) const override;
  ElemPtr compose(const ElemPtr& g, const ElemPtr& f) const override;
  ElemPtr add(const ElemPtr& a, const ElemPtr& b) const override;
  ElemPtr scale(const Scalar& c, const ElemPtr& a) const override;
  ElemPtr tensor_elems(const ElemPtr& a, const ElemPtr& b) const override;
  bool is_zero(const ElemPtr& a) const override;
  std::string elem_src(const ElemPtr& a) const override;
  std::string elem_dst(const ElemPtr& a) const override;
  int elem_deg(const ElemPtr& a) const override;
  std::optional<Scalar> identity_factor(const ElemPtr& a) const override;
  std::string elem_repr(const ElemPtr& a) const override;
  std::vector<ElemPtr> hom_basis(const std::string& src, const std::string& dst,
                                 int deg) const override;
  std::vector<Scalar> elem_coords(const ElemPtr& a) const override;

  // Boundary points: bottom 0..n-1 left to right, top n..2n-1 left to
  // right.  partner is the matching involution; circles counts closed
  // components carried by the word.
  std::string make_word(const std::vector<int>& partner, int circles = 0) const;
  // Number of circles in W(src, dst).
  int hom_circle_count(const std::string& src, const std::string& dst) const;
  // Single labeling as an element.
  ElemPtr labeling(const std::string& src, const std::string& dst,
                   std::uint32_t mask) const;
  ElemPtr all_one(const std::string& src, const std::string& dst) const;
  // Elementary saddle between circle-free words whose matchings differ by
  // rerouting one pair of arcs (degree +1 cobordism, all-1 labeling).
  ElemPtr saddle(const std::string& src, const std::string& dst) const;

 private:
  int n_;
  Ring ring_;
};

// Cup object given by matched bottom pairs: cups at the pairs, mirrored
// caps on top, through strands elsewhere.  The object is the tangle
// shifted by q^r (r = number of pairs), the counit is the composite of
// one saddle per pair (outermost pair first, by left endpoint), and both
// comultiplications are the all-one labeling into the raw square.
CounitalObject tl_cup_counital(const TLBackend& B,
                               const std::vector<std::pair<int, int>>& cups);
// The tangle word underlying the cup object.
std::string tl_cup_word(const TLBackend& B,
                        const std::vector<std::pair<int, int>>& cups);

}  // namespace catidem
