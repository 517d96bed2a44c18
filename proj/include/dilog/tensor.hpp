#pragma once

#include <Eigen/Dense>

#include "dilog/tetra.hpp"

namespace dilog {

using CMat = Eigen::MatrixXcd;

// Rank-4 tensor of a decorated tetrahedron, stored as the N^2 x N^2 matrix
// M[(i,j),(k,l)] with (i,j) the output pair and (k,l) the input pair, plus
// the assignment of the four faces to the slots. Faces are named by the rank
// of their opposite vertex (0..3); `slot_face[s]` gives that rank for slots
// s = out1,out2,in1,in2. For N = 1 the matrix is 1x1.
struct DilogTensor {
  int N = 1;
  CMat M;
  std::array<int, 4> slot_face{2, 0, 3, 1};

  int dim() const { return N * N; }
  cplx entry(int i, int j, int k, int l) const { return M(i * N + j, k * N + l); }
};

// Face-to-slot assignment for a given branching index: the input slots carry
// the two faces whose boundary orientation agrees with the branching one.
std::array<int, 4> face_slots(int b_sign);

// Basic rank-N tensor at u (principal roots, trivial branch exponents).
CMat ln_basic(cplx u, const RootContext& ctx);

// The same tensor at explicit points (u', v') of the curve (u')^N+(v')^N=1.
CMat ln_pair(cplx uP, cplx vP, const RootContext& ctx);

// Lift over the branched covering: ln_pair at the roots u'_p, v'_{-q}.
CMat ln_lifted(const LogPoint& pt, const RootContext& ctx);

// Closed-form inverse of ln_pair (no numeric inversion involved).
CMat ln_inverse_pair(cplx uP, cplx vP, const RootContext& ctx);

// Scalar dilogarithm of a flattened tetrahedron, canonical representative.
cplx R1(const DecoratedTetra& t);

// Symmetrized tensor of a flat/charged tetrahedron, with face slots.
DilogTensor RN(const DecoratedTetra& t, const RootContext& ctx);

// Inverse tensor built from the closed-form inverse.
CMat RN_inverse_matrix(const DecoratedTetra& t, const RootContext& ctx);

// Projective SL(2,Z)-generator matrices: T antidiagonal of zeta-phases and
// the discrete Fourier matrix S.
CMat sym_T(const RootContext& ctx);
CMat sym_S(const RootContext& ctx);

// Outcome of comparing two tensors up to an N-th root of unity (and an
// optional sign): A ~ lambda B.
struct PhaseReport {
  bool ok = false;
  cplx lambda = 1.0;
  int k = 0;        // realized power of zeta
  int sign = +1;    // realized sign
  double residual = 0.0;
  double phase_dist = 0.0;
};

PhaseReport phase_equal(const CMat& A, const CMat& B, const RootContext& ctx,
                        bool allow_sign, double tol = kTolIdentity);

// Symmetry relation for one of the transpositions (01), (12), (23); the
// tetrahedron must have branching index +1.
enum class Transposition { t01, t12, t23 };
PhaseReport check_symmetry(const DecoratedTetra& t, Transposition p,
                           const RootContext& ctx, double tol = kTolIdentity);

// As check_symmetry but with the supplied branch exponents in place of
// f - b_sign*c (negative-control hook).
PhaseReport check_symmetry_with_exponents(const DecoratedTetra& t,
                                          const EdgeInts& a, Transposition p,
                                          const RootContext& ctx,
                                          double tol = kTolIdentity);

// Weyl-pair matrices: Z diagonal of zeta-powers, X the cyclic shift,
// Y = zeta^{m+1} X Z.
CMat weyl_Z(const RootContext& ctx);
CMat weyl_X(const RootContext& ctx);
CMat weyl_Y(const RootContext& ctx);
CMat kron(const CMat& A, const CMat& B);

// Gauss-sum operator (1/N) sum_{i,j} zeta^{ij} Z^{-i} (x) Y^{j}.
CMat upsilon(const RootContext& ctx);
// Linear functional part Psi(A) for the tetra roots (w0', w1').
CMat psi_series(cplx w0P, cplx w1P, const CMat& A, const RootContext& ctx);

struct SplitReport {
  double split_residual = 0.0;       // factorization of the tensor
  double functional_residual = 0.0;  // difference equation for Psi
  cplx phase = 1.0;                  // realized phase of the factorization
};

// Checks the factorization ln = upsilon * psi(-Y^{-1} (x) Z^{-1}Y) at the
// principal roots of u, together with the Psi difference equation.
SplitReport splitting_check(cplx u, const RootContext& ctx);

// Entry of RN computed through the equivalent single-product closed form
// (independent route used for cross-checking); branching index must be +1.
cplx rn_entry_alternative(const DecoratedTetra& t, int i, int j, int k, int l,
                          const RootContext& ctx);

}  // namespace dilog
