#pragma once

// Small dense exact matrices over the coefficient rings, with the solvers
// the rest of the engine needs: Smith normal form with unimodular
// transforms over Z, rank over a field, fraction-free elimination, and
// exact linear solves.  Matrices here stay small (hom spaces, pairing
// matrices, truncated differentials), so simplicity beats asymptotics.

#include <optional>
#include <vector>

#include "catidem/coeffs.hpp"

namespace catidem {

struct Mat {
  Ring ring;
  int rows = 0;
  int cols = 0;
  std::vector<Scalar> a;  // row-major

  explicit Mat(const Ring& R, int r = 0, int c = 0)
      : ring(R), rows(r), cols(c),
        a(static_cast<std::size_t>(r) * c, Scalar{0, 1}) {}
  static Mat identity(const Ring& R, int n);

  Scalar& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const Scalar& at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * cols + j];
  }

  Mat mul(const Mat& o) const;
  Mat add(const Mat& o) const;
  Mat sub(const Mat& o) const;
  Mat transpose() const;
  bool is_zero() const;
  bool is_identity() const;
  Scalar trace() const;
  std::string to_string() const;
};

// Smith normal form over the integers: S * A * T = D with S, T unimodular
// and D diagonal (d_1 | d_2 | ...).  Requires ring == Z.
struct SmithForm {
  Mat S, D, T;
};
SmithForm smith_normal_form(const Mat& A);

// Rank of a matrix over a field (ring must be Rationals or PrimeField).
int rank_over_field(Mat A);

// Rank over F_p of a matrix with integer entries (ring Z); used as a lower
// bound for the rational rank.
int rank_mod_prime(const Mat& A, std::int64_t p);

// Solve A x = b exactly over the matrix ring; returns nullopt when no
// solution exists over that ring (for Z this includes divisibility
// obstructions).
std::optional<std::vector<Scalar>> solve_linear(const Mat& A,
                                                const std::vector<Scalar>& b);

// Basis of {x : A x = 0}.  Over Z this is a basis of the kernel lattice
// (computed from the Smith form), over a field an ordinary kernel basis.
std::vector<std::vector<Scalar>> nullspace(const Mat& A);

}  // namespace catidem
