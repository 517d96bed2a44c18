#pragma once

#include <array>
#include <optional>

#include "dilog/scalars.hpp"

namespace dilog {

// Total order on the four corners of an abstract tetrahedron. order[r] is the
// corner sitting at rank r; the induced edge orientations run from the lower
// rank to the higher one.
struct Branching {
  std::array<int, 4> order{0, 1, 2, 3};

  int rank_of(int vertex) const;
  int parity() const;  // +1 even, -1 odd, as a permutation of (0,1,2,3)
  bool valid() const;
};

// Cross-ratio moduli (w0, w1, w2) with w_{j+1} = 1/(1 - w_j) and product -1.
struct ModularTriple {
  std::array<cplx, 3> w{};

  cplx operator[](int j) const { return w[j]; }
  bool nondegenerate(double tol = 1e-12) const;
  // +1 / -1 for nondegenerate triples, 0 for degenerate (real) ones.
  int w_sign(double tol = 1e-12) const;
  // residual of the defining relations, for validation
  double relation_residual() const;
};

ModularTriple complete_triple(cplx w0);

using EdgeInts = std::array<int, 3>;  // values on the edge pairs e0,e1,e2

// Branched tetrahedron with moduli and optional flattening/charge. The
// `orientation` field is the ambient orientation relative to the corner
// labels (0,1,2,3); the branching may disagree with it.
struct DecoratedTetra {
  Branching b;
  ModularTriple w;
  std::optional<EdgeInts> f;
  std::optional<EdgeInts> c;
  int orientation = +1;

  bool has_flattening() const { return f.has_value(); }
  bool has_charge() const { return c.has_value(); }
};

// Branching index: +1 when the frame of edges leaving the lowest-rank vertex
// agrees with the ambient orientation.
int b_sign(const DecoratedTetra& t);

// Log-branches (l0, l1, l2), lj = log(wj) + i*pi*fj.
std::array<cplx, 3> log_branch(const DecoratedTetra& t);

// True when the log-branches sum to zero (integer-exact given the moduli).
bool is_flattening(const ModularTriple& w, const EdgeInts& f,
                   double tol = kTolConstruct);

// The odd integer sum f0+f1+f2 forced on any flattening of w.
int flattening_level(const ModularTriple& w);

// True when c0+c1+c2 == 1.
bool is_charge(const EdgeInts& c);

// Rank pair {r, s} of edge j (e0={0,1}, e1={1,2}, e2={0,2}) and of its
// opposite edge.
std::array<std::array<int, 2>, 3> const& edge_rank_pairs();
std::array<std::array<int, 2>, 3> const& opposite_edge_rank_pairs();

// Edge index (0,1,2) owning the unordered rank pair {a,b}, for all 6 pairs.
int edge_index_of_rank_pair(int a, int b);

// Acts on the branching by the rank permutation p (new rank = p[old rank]),
// inverting the moduli and negating the flattening when p is odd; charges are
// carried along unchanged. Data is renamed to the new edge positions.
DecoratedTetra apply_permutation(const DecoratedTetra& t,
                                 const std::array<int, 4>& p);

// Ambient-orientation reversal (same decoration, opposite orientation).
DecoratedTetra mirror(const DecoratedTetra& t);

// N-th branch exponents a_j = f_j - b_sign * c_j.
EdgeInts enrichment_exponents(const DecoratedTetra& t);

// N-th root moduli w'_j for the exponents a; their product is -tau with
// tau = zeta^{-b_sign*(m+1)} when a comes from a flat/charge.
std::array<cplx, 3> nth_branch_moduli(const DecoratedTetra& t,
                                      const RootContext& ctx);
std::array<cplx, 3> nth_branch_moduli(const ModularTriple& w,
                                      const EdgeInts& a,
                                      const RootContext& ctx);

}  // namespace dilog
