#include "dilog/intlin.hpp"

#include <cassert>
#include <cstdlib>
#include <stdexcept>

namespace dilog {

namespace {

using i64 = std::int64_t;

IMat identity(int n) {
  IMat I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

void swap_rows(IMat& M, int i, int j) {
  if (i == j) return;
  for (int c = 0; c < M.cols; ++c) std::swap(M(i, c), M(j, c));
}
void swap_cols(IMat& M, int i, int j) {
  if (i == j) return;
  for (int r = 0; r < M.rows; ++r) std::swap(M(r, i), M(r, j));
}
// row i -= q * row j
void row_axpy(IMat& M, int i, int j, i64 q) {
  for (int c = 0; c < M.cols; ++c) M(i, c) -= q * M(j, c);
}
void col_axpy(IMat& M, int i, int j, i64 q) {
  for (int r = 0; r < M.rows; ++r) M(r, i) -= q * M(r, j);
}
void negate_row(IMat& M, int i) {
  for (int c = 0; c < M.cols; ++c) M(i, c) = -M(i, c);
}

}  // namespace

Smith smith_normal_form(const IMat& A) {
  Smith s;
  s.D = A;
  s.U = identity(A.rows);
  s.V = identity(A.cols);
  IMat& D = s.D;
  int t = 0;
  const int tmax = std::min(A.rows, A.cols);
  while (t < tmax) {
    // locate the smallest nonzero entry in the remaining block
    int pi = -1, pj = -1;
    i64 best = 0;
    for (int i = t; i < D.rows; ++i)
      for (int j = t; j < D.cols; ++j) {
        i64 v = std::llabs(D(i, j));
        if (v != 0 && (pi < 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // zero block
    swap_rows(D, t, pi);
    swap_rows(s.U, t, pi);
    swap_cols(D, t, pj);
    swap_cols(s.V, t, pj);

    bool clean = true;
    for (int i = t + 1; i < D.rows; ++i) {
      if (D(i, t) != 0) {
        i64 q = D(i, t) / D(t, t);
        row_axpy(D, i, t, q);
        row_axpy(s.U, i, t, q);
        if (D(i, t) != 0) clean = false;
      }
    }
    for (int j = t + 1; j < D.cols; ++j) {
      if (D(t, j) != 0) {
        i64 q = D(t, j) / D(t, t);
        col_axpy(D, j, t, q);
        col_axpy(s.V, j, t, q);
        if (D(t, j) != 0) clean = false;
      }
    }
    if (!clean) continue;  // smaller remainders appeared; redo the pivot
    if (D(t, t) < 0) {
      negate_row(D, t);
      negate_row(s.U, t);
    }
    ++t;
  }
  s.rank = t;
  return s;
}

std::optional<IntSolution> solve_integer(const IMat& A,
                                         const std::vector<i64>& b) {
  assert(int(b.size()) == A.rows);
  Smith s = smith_normal_form(A);
  const int n = A.cols;
  // U*A*V = D  =>  with x = V y :  D y = U b
  std::vector<i64> ub(A.rows, 0);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.rows; ++j) ub[i] += s.U(i, j) * b[j];

  std::vector<i64> y(n, 0);
  for (int i = 0; i < s.rank; ++i) {
    i64 d = s.D(i, i);
    if (ub[i] % d != 0) return std::nullopt;
    y[i] = ub[i] / d;
  }
  for (int i = s.rank; i < A.rows; ++i)
    if (ub[i] != 0) return std::nullopt;

  IntSolution sol;
  sol.particular.assign(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sol.particular[i] += s.V(i, j) * y[j];
  for (int k = s.rank; k < n; ++k) {
    std::vector<i64> v(n, 0);
    for (int i = 0; i < n; ++i) v[i] = s.V(i, k);
    // canonical sign: first nonzero entry positive
    for (int i = 0; i < n; ++i) {
      if (v[i] != 0) {
        if (v[i] < 0)
          for (auto& e : v) e = -e;
        break;
      }
    }
    sol.kernel.push_back(std::move(v));
  }
  return sol;
}

std::optional<std::vector<i64>> lattice_coordinates(
    const std::vector<std::vector<i64>>& basis, const std::vector<i64>& v) {
  if (basis.empty())
    return v == std::vector<i64>(v.size(), 0)
               ? std::optional<std::vector<i64>>(std::vector<i64>{})
               : std::nullopt;
  const int n = int(v.size());
  const int k = int(basis.size());
  IMat A(n, k);
  for (int j = 0; j < k; ++j) {
    if (int(basis[j].size()) != n)
      throw std::invalid_argument("lattice_coordinates: basis size mismatch");
    for (int i = 0; i < n; ++i) A(i, j) = basis[j][i];
  }
  auto sol = solve_integer(A, v);
  if (!sol) return std::nullopt;
  return sol->particular;
}

}  // namespace dilog
