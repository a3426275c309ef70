#pragma once

// Graded bimodule backend over R = k[alpha], deg alpha = 2.  The one
// interesting word is C = k[alpha] (x)_{k[alpha^2]} k[alpha], the bimodule
// that splits multiplication by two in the graded sense; words are tensor
// powers C^n over R.  The backend keeps every element exact: a morphism
// C^a -> C^b is stored by the images of the bimodule generators
// G_w = 1 (x) alpha^{w_1} (x) ... (x) alpha^{w_{a-1}} (x) 1, w in {0,1}^{a-1}.
//
// Basis bookkeeping: C^m has k-basis alpha^{e_0} (x) ... (x) alpha^{e_m}
// with e_t in {0,1} for t < m and e_m >= 0 (alpha^2 slides right across
// every junction).  The total degree of a basis element is 2 * sum(e).
//
// The key normal form C (x) C ~ C (+) q^2 C is witnessed by explicit
// inclusion/projection elements, so longer words only ever appear
// transiently inside a single tensor step.

#include "catidem/catcore.hpp"

namespace catidem {

class PolyBackend final : public Backend {
public:
  explicit PolyBackend(const Ring& R, int degree_bound = 64);

  std::string name() const override { return "poly"; }
  const Ring& ring() const override { return ring_; }
  int degree_bound() const { return degree_bound_; }

  std::string unit_word() const override { return "1"; }
  bool word_valid(const std::string& w) const override;
  std::string concat(const std::string& a,
                     const std::string& b) const override;
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
  std::vector<ElemPtr> hom_basis(const std::string& src,
                                 const std::string& dst,
                                 int deg) const override;
  std::vector<Scalar> elem_coords(const ElemPtr& a) const override;

  // Element from explicit generator images: img[w] maps exponent tuples
  // (length dst_len + 1) to coefficients; w indexes {0,1}^{src_len-1} with
  // bit t of w giving the interior exponent at junction t.
  ElemPtr make_elem(int src_len, int dst_len, int deg,
                    std::vector<std::map<std::vector<int>, Scalar>> img) const;
  static int word_len(const std::string& w);
  static std::string word_of_len(int n);

private:
  Ring ring_;
  int degree_bound_;
};

// The counital structure on C: counit = multiplication, both
// comultiplications = the section a (x) b -> a (x) 1 (x) b written in the
// normal form of C (x) C.
CounitalObject poly_counital(const PolyBackend& B);

// Degree-2 endomorphisms of C: multiplication by alpha (x) 1 and 1 (x) alpha.
ElemPtr poly_alpha_left(const PolyBackend& B);
ElemPtr poly_alpha_right(const PolyBackend& B);

}  // namespace catidem
