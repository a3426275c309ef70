#include "catidem/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace catidem {

Mat Mat::identity(const Ring& R, int n) {
  Mat m(R, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = s_one(R);
  return m;
}

Mat Mat::mul(const Mat& o) const {
  if (cols != o.rows) fail("ShapeMismatch", "matrix product shape");
  Mat out(ring, rows, o.cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const Scalar& aik = at(i, k);
      if (s_is_zero(aik)) continue;
      for (int j = 0; j < o.cols; ++j) {
        if (s_is_zero(o.at(k, j))) continue;
        out.at(i, j) = s_add(ring, out.at(i, j), s_mul(ring, aik, o.at(k, j)));
      }
    }
  return out;
}

Mat Mat::add(const Mat& o) const {
  if (rows != o.rows || cols != o.cols) fail("ShapeMismatch", "matrix sum shape");
  Mat out(ring, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i)
    out.a[i] = s_add(ring, a[i], o.a[i]);
  return out;
}

Mat Mat::sub(const Mat& o) const {
  if (rows != o.rows || cols != o.cols) fail("ShapeMismatch", "matrix diff shape");
  Mat out(ring, rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i)
    out.a[i] = s_sub(ring, a[i], o.a[i]);
  return out;
}

Mat Mat::transpose() const {
  Mat out(ring, cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out.at(j, i) = at(i, j);
  return out;
}

bool Mat::is_zero() const {
  return std::all_of(a.begin(), a.end(),
                     [](const Scalar& s) { return s_is_zero(s); });
}

bool Mat::is_identity() const {
  if (rows != cols) return false;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      if (i == j ? !s_is_one(at(i, j)) : !s_is_zero(at(i, j))) return false;
    }
  return true;
}

Scalar Mat::trace() const {
  if (rows != cols) fail("ShapeMismatch", "trace of non-square matrix");
  Scalar t = s_zero(ring);
  for (int i = 0; i < rows; ++i) t = s_add(ring, t, at(i, i));
  return t;
}

std::string Mat::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < rows; ++i) {
    os << (i == 0 ? "[" : " ");
    for (int j = 0; j < cols; ++j)
      os << s_to_string(ring, at(i, j)) << (j + 1 < cols ? " " : "");
    os << (i + 1 < rows ? ";\n" : "]");
  }
  return os.str();
}

namespace {

// Row/column operations tracked in the transform matrices.
void swap_rows(Mat& m, int i, int j) {
  for (int c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
}
void swap_cols(Mat& m, int i, int j) {
  for (int r = 0; r < m.rows; ++r) std::swap(m.at(r, i), m.at(r, j));
}
// row i += c * row j
void add_row(Mat& m, int i, int j, const Scalar& c) {
  for (int col = 0; col < m.cols; ++col)
    m.at(i, col) =
        s_add(m.ring, m.at(i, col), s_mul(m.ring, c, m.at(j, col)));
}
void add_col(Mat& m, int i, int j, const Scalar& c) {
  for (int row = 0; row < m.rows; ++row)
    m.at(row, i) =
        s_add(m.ring, m.at(row, i), s_mul(m.ring, c, m.at(row, j)));
}
void negate_row(Mat& m, int i) {
  for (int c = 0; c < m.cols; ++c) m.at(i, c) = s_neg(m.ring, m.at(i, c));
}

}  // namespace

SmithForm smith_normal_form(const Mat& A) {
  if (A.ring.kind != RingKind::Integers)
    fail("RingMismatch", "Smith form requires integer entries");
  const Ring& Z = A.ring;
  SmithForm f{Mat::identity(Z, A.rows), A, Mat::identity(Z, A.cols)};
  Mat& D = f.D;
  Mat& S = f.S;
  Mat& T = f.T;

  int t = 0;  // current pivot position
  while (t < D.rows && t < D.cols) {
    // Find the entry of smallest absolute value in the remaining block.
    int pi = -1, pj = -1;
    std::int64_t best = 0;
    for (int i = t; i < D.rows; ++i)
      for (int j = t; j < D.cols; ++j) {
        std::int64_t v = std::llabs(D.at(i, j).num);
        if (v != 0 && (pi < 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // remaining block is zero
    if (pi != t) {
      swap_rows(D, t, pi);
      swap_rows(S, t, pi);
    }
    if (pj != t) {
      swap_cols(D, t, pj);
      swap_cols(T, t, pj);
    }

    bool reduced = true;
    // Reduce column t below the pivot and row t right of the pivot.
    for (int i = t + 1; i < D.rows; ++i) {
      if (s_is_zero(D.at(i, t))) continue;
      std::int64_t q = D.at(i, t).num / D.at(t, t).num;
      add_row(D, i, t, s_from_int(Z, -q));
      add_row(S, i, t, s_from_int(Z, -q));
      if (!s_is_zero(D.at(i, t))) reduced = false;
    }
    for (int j = t + 1; j < D.cols; ++j) {
      if (s_is_zero(D.at(t, j))) continue;
      std::int64_t q = D.at(t, j).num / D.at(t, t).num;
      add_col(D, j, t, s_from_int(Z, -q));
      add_col(T, j, t, s_from_int(Z, -q));
      if (!s_is_zero(D.at(t, j))) reduced = false;
    }
    if (!reduced) continue;  // smaller remainders appeared; pick a new pivot

    // Pivot now divides... check divisibility of the rest of the block; if
    // some entry is not divisible, mix its row in and restart this pivot.
    bool divides_all = true;
    for (int i = t + 1; i < D.rows && divides_all; ++i)
      for (int j = t + 1; j < D.cols && divides_all; ++j)
        if (D.at(i, j).num % D.at(t, t).num != 0) {
          add_row(D, t, i, s_one(Z));
          add_row(S, t, i, s_one(Z));
          divides_all = false;
        }
    if (!divides_all) continue;

    if (D.at(t, t).num < 0) {
      negate_row(D, t);
      negate_row(S, t);
    }
    ++t;
  }
  return f;
}

int rank_over_field(Mat A) {
  if (A.ring.kind == RingKind::Integers)
    fail("RingMismatch", "rank_over_field requires a field");
  const Ring& R = A.ring;
  int rank = 0;
  for (int col = 0; col < A.cols && rank < A.rows; ++col) {
    int pivot = -1;
    for (int i = rank; i < A.rows; ++i)
      if (!s_is_zero(A.at(i, col))) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    swap_rows(A, rank, pivot);
    Scalar inv = s_inv(R, A.at(rank, col));
    for (int j = col; j < A.cols; ++j)
      A.at(rank, j) = s_mul(R, A.at(rank, j), inv);
    for (int i = 0; i < A.rows; ++i) {
      if (i == rank || s_is_zero(A.at(i, col))) continue;
      Scalar c = s_neg(R, A.at(i, col));
      add_row(A, i, rank, c);
    }
    ++rank;
  }
  return rank;
}

int rank_mod_prime(const Mat& A, std::int64_t p) {
  if (A.ring.kind != RingKind::Integers)
    fail("RingMismatch", "rank_mod_prime expects integer entries");
  Ring F = Ring::prime_field(p);
  Mat B(F, A.rows, A.cols);
  for (std::size_t i = 0; i < A.a.size(); ++i)
    B.a[i] = s_from_int(F, A.a[i].num);
  return rank_over_field(B);
}

std::vector<std::vector<Scalar>> nullspace(const Mat& A) {
  const Ring& R = A.ring;
  std::vector<std::vector<Scalar>> out;
  if (R.kind == RingKind::Integers) {
    SmithForm f = smith_normal_form(A);
    int d = std::min(A.rows, A.cols);
    for (int j = 0; j < A.cols; ++j) {
      bool free_col = j >= d || s_is_zero(f.D.at(j, j));
      if (!free_col) continue;
      std::vector<Scalar> v(A.cols);
      for (int i = 0; i < A.cols; ++i) v[i] = f.T.at(i, j);
      out.push_back(std::move(v));
    }
    return out;
  }
  // Field case: reduce and read off free columns.
  Mat M = A;
  std::vector<int> pivot_of_col(A.cols, -1);
  int rank = 0;
  for (int col = 0; col < A.cols && rank < A.rows; ++col) {
    int pivot = -1;
    for (int i = rank; i < A.rows; ++i)
      if (!s_is_zero(M.at(i, col))) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    swap_rows(M, rank, pivot);
    Scalar inv = s_inv(R, M.at(rank, col));
    for (int j = col; j < A.cols; ++j)
      M.at(rank, j) = s_mul(R, M.at(rank, j), inv);
    for (int i = 0; i < A.rows; ++i) {
      if (i == rank || s_is_zero(M.at(i, col))) continue;
      add_row(M, i, rank, s_neg(R, M.at(i, col)));
    }
    pivot_of_col[col] = rank;
    ++rank;
  }
  for (int col = 0; col < A.cols; ++col) {
    if (pivot_of_col[col] >= 0) continue;
    std::vector<Scalar> v(A.cols, s_zero(R));
    v[col] = s_one(R);
    for (int c = 0; c < A.cols; ++c)
      if (pivot_of_col[c] >= 0)
        v[c] = s_neg(R, M.at(pivot_of_col[c], col));
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<std::vector<Scalar>> solve_linear(const Mat& A,
                                                const std::vector<Scalar>& b) {
  if (static_cast<int>(b.size()) != A.rows)
    fail("ShapeMismatch", "solve_linear rhs length");
  const Ring& R = A.ring;

  if (R.kind == RingKind::Integers) {
    // S A T = D, so A x = b  <=>  D y = S b with x = T y.
    SmithForm f = smith_normal_form(A);
    std::vector<Scalar> sb(A.rows, s_zero(R));
    for (int i = 0; i < A.rows; ++i)
      for (int j = 0; j < A.rows; ++j)
        sb[i] = s_add(R, sb[i], s_mul(R, f.S.at(i, j), b[j]));
    std::vector<Scalar> y(A.cols, s_zero(R));
    int d = std::min(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i) {
      Scalar di = i < d ? f.D.at(i, i) : s_zero(R);
      if (s_is_zero(di)) {
        if (!s_is_zero(sb[i])) return std::nullopt;
      } else {
        if (sb[i].num % di.num != 0) return std::nullopt;
        y[i] = s_from_int(R, sb[i].num / di.num);
      }
    }
    std::vector<Scalar> x(A.cols, s_zero(R));
    for (int i = 0; i < A.cols; ++i)
      for (int j = 0; j < A.cols; ++j)
        x[i] = s_add(R, x[i], s_mul(R, f.T.at(i, j), y[j]));
    return x;
  }

  // Field case: Gaussian elimination on the augmented matrix.
  Mat M(R, A.rows, A.cols + 1);
  for (int i = 0; i < A.rows; ++i) {
    for (int j = 0; j < A.cols; ++j) M.at(i, j) = A.at(i, j);
    M.at(i, A.cols) = b[i];
  }
  std::vector<int> pivot_col(A.rows, -1);
  int rank = 0;
  for (int col = 0; col < A.cols && rank < A.rows; ++col) {
    int pivot = -1;
    for (int i = rank; i < A.rows; ++i)
      if (!s_is_zero(M.at(i, col))) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    swap_rows(M, rank, pivot);
    Scalar inv = s_inv(R, M.at(rank, col));
    for (int j = col; j <= A.cols; ++j)
      M.at(rank, j) = s_mul(R, M.at(rank, j), inv);
    for (int i = 0; i < A.rows; ++i) {
      if (i == rank || s_is_zero(M.at(i, col))) continue;
      add_row(M, i, rank, s_neg(R, M.at(i, col)));
    }
    pivot_col[rank] = col;
    ++rank;
  }
  for (int i = rank; i < A.rows; ++i)
    if (!s_is_zero(M.at(i, A.cols))) return std::nullopt;
  std::vector<Scalar> x(A.cols, s_zero(R));
  for (int i = 0; i < rank; ++i) x[pivot_col[i]] = M.at(i, A.cols);
  return x;
}

}  // namespace catidem
