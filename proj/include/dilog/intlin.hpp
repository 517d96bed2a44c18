#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace dilog {

// Dense integer matrix, row-major.
struct IMat {
  int rows = 0, cols = 0;
  std::vector<std::int64_t> a;

  IMat() = default;
  IMat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0) {}
  std::int64_t& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
  std::int64_t operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }
};

// Smith normal form U*A*V = D with U, V unimodular and D diagonal
// (nonzero entries first). Tracks the transforms.
struct Smith {
  IMat U, V, D;
  int rank = 0;
};

Smith smith_normal_form(const IMat& A);

// General solution of A x = b over the integers: a particular solution and a
// basis of the integer kernel. Empty optional when no integer solution exists.
struct IntSolution {
  std::vector<std::int64_t> particular;
  std::vector<std::vector<std::int64_t>> kernel;
};

std::optional<IntSolution> solve_integer(const IMat& A,
                                         const std::vector<std::int64_t>& b);

// Expresses v as an integer combination of the given lattice basis vectors,
// if possible.
std::optional<std::vector<std::int64_t>> lattice_coordinates(
    const std::vector<std::vector<std::int64_t>>& basis,
    const std::vector<std::int64_t>& v);

}  // namespace dilog
