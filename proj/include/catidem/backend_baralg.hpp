#pragma once

// Bimodule category over A = k[x]/x^2 with deg x = 2.  The unit object is
// A itself and C = A (x)_k A, so the n-fold product C^{*n} has underlying
// space A^{(x) n+1} and words multiply by plain concatenation (no normal
// form; images of idempotents stay lazy).  Elements are homogeneous
// bimodule maps stored as sparse matrices over the tensor basis: factor j
// of a word with n factors contributes bit j, set when that factor is x.

#include <map>

#include "catidem/catcore.hpp"
#include "catidem/linalg.hpp"

namespace catidem {

using SparseMat = std::map<std::pair<int, int>, Scalar>;  // (row, col)

class BarBackend final : public Backend {
 public:
  explicit BarBackend(const Ring& R);

  std::string name() const override { return "baralg"; }
  const Ring& ring() const override { return ring_; }

  std::string unit_word() const override { return "1"; }
  bool word_valid(const std::string& w) const override;
  std::string concat(const std::string& a, const std::string& b) const override;
  TensorNF tensor_words(const std::string& a,
                        const std::string& b) const override;
  bool trivial_concat() const override { return true; }
  bool supports_splitting() const override { return false; }

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

  // Number of C factors in a word ("1" has none).
  static int word_len(const std::string& w);
  static std::string word_of_len(int n);
  // Dimension of the underlying vector space of a word.
  static int space_dim(const std::string& w) {
    return 1 << (word_len(w) + 1);
  }

  // Validating constructor: checks index ranges, homogeneity and the
  // bimodule property (commutation with x acting on either side).
  ElemPtr make_elem(int src_len, int dst_len, int deg, SparseMat mat) const;
  // Dense matrix of the underlying k-linear map (rows = target basis).
  Mat elem_matrix(const ElemPtr& a) const;
  int elem_trace(const ElemPtr& a) const;

 private:
  Ring ring_;
};

// Counit = multiplication A (x) A -> A; both comultiplications insert the
// unit in the middle: a (x) b -> a (x) 1 (x) b.
CounitalObject bar_counital(const BarBackend& B);

// e_{k+1} on C^{*(k+1)} as the alternating sum over subsets S of {1..k} of
// the maps that shift the factors in positions S one step to the right,
// multiplying displaced factors into their new neighbours.
ElemPtr bar_e_formula(const BarBackend& B, int k);

}  // namespace catidem
