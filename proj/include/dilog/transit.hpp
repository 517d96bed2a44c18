#pragma once

#include "dilog/statesum.hpp"

namespace dilog {

struct blocked_move : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecoratedComplex {
  Triangulation T;
  GlobalDecoration d;
};

enum class MoveKind { M23, M32, M02, M20, BubblePlus, BubbleMinus };

struct TransitRecord {
  MoveKind kind;
  DecoratedComplex before;
  DecoratedComplex after;
  // free faces matched across the move, for local (non-closed) supports
  std::vector<std::pair<FaceRef, FaceRef>> boundary_match;
  long f_choice = 0;
  long c_choice = 0;
  // kernel generators of the flattening / charge transit solution sets
  std::vector<std::vector<std::int64_t>> f_kernel, c_kernel;
};

// ---- local standard support ----

// The two-tetra side of the bipyramid on the standard order; moduli are the
// triples of y and y(1-x)/(x(1-y)); flattenings/charges may be supplied per
// tetra. Tet 0 carries y (apex at the higher rank), tet 1 the other modulus.
DecoratedComplex standard_two_side(cplx x, cplx y,
                                   const std::vector<EdgeInts>& f,
                                   const std::vector<EdgeInts>& c);

// Act on a bipyramid-side complex by a permutation of the five model
// vertices: every tetra is re-decorated accordingly and the gluings are
// rebuilt. Works for both local sides (2 or 3 tetrahedra).
DecoratedComplex act_on_bipyramid(const DecoratedComplex& side,
                                  const std::array<int, 5>& sigma);

// ---- transits ----

// Decorated 2->3 move on the two tetrahedra adjacent to the shared face.
// `new_edge_up` orients the fresh edge when the branching leaves it free
// (ignored otherwise); f_choice / c_choice pick lattice representatives.
TransitRecord transit_2_3(const DecoratedComplex& in, FaceRef shared_face,
                          long f_choice = 0, long c_choice = 0,
                          bool new_edge_up = true);

// Decorated 3->2 move around an interior three-valent edge class.
TransitRecord transit_3_2(const DecoratedComplex& in, int edge_class);

// Lune insertion: the two faces (each interior) share the oriented edge
// given by corner pairs (x1,y1) of face1 and (x2,y2) of face2 with x1 ~ x2.
// The inserted mirror pair carries modulus w0 and flattening f; charges are
// solved against the current targets when possible.
struct LuneSpec {
  FaceRef face1, face2;
  std::array<int, 2> edge1, edge2;
};
TransitRecord transit_0_2(const DecoratedComplex& in, const LuneSpec& lune,
                          cplx w0, EdgeInts f, bool new_edge_up = true,
                          long c_choice = 0);

// Remove a mirror pair inserted by a lune move (tets must form the pattern).
TransitRecord transit_2_0(const DecoratedComplex& in, int tetP, int tetQ);

// Distinguished bubble on a face containing the Hamiltonian edge given by
// the corner pair (u,v) of that face; H is rerouted through the new vertex.
TransitRecord transit_bubble(const DecoratedComplex& in, FaceRef face,
                             std::array<int, 2> h_edge, cplx w0, EdgeInts f,
                             int new_vertex_rank = 3, long c_choice = 0);

TransitRecord transit_bubble_minus(const DecoratedComplex& in, int tetP,
                                   int tetQ);

// ---- verification ----

enum class FiveTermMode { SymmetrizedRN, BasicLN };

// Contract both sides of a 2<->3 record over their interior faces and
// compare on the matched free faces, up to sign and N-th roots of unity.
// In BasicLN mode the plain tensors at the moduli are used instead (the
// branching must then be the standard one) and an exact match is required.
PhaseReport verify_five_term(const TransitRecord& rec, const RootContext& ctx,
                             FiveTermMode mode = FiveTermMode::SymmetrizedRN,
                             double tol = kTolIdentity);

// Signed sums of lifted Rogers values on both sides, compared mod pi^2.
struct RSumReport {
  cplx before, after;
  double class_distance;
  bool ok;
};
RSumReport verify_five_term_rsum(const TransitRecord& rec,
                                 double tol = kTolConstruct);

// Two-term relations of a mirror pair: the product against the identity and
// the partial trace against N times the identity.
struct TwoTermReport {
  PhaseReport product;
  PhaseReport traced;
};
TwoTermReport verify_two_term(const DecoratedTetra& t, const RootContext& ctx,
                              double tol = kTolIdentity);

}  // namespace dilog
