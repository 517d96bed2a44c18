#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dilog/intlin.hpp"
#include "dilog/tetra.hpp"

namespace dilog {

struct FaceRef {
  int tet = -1;
  int face = -1;  // opposite local vertex
  auto operator<=>(const FaceRef&) const = default;
};

// Identification of two faces through a corner bijection. `perm[v]` is the
// corner of tet `b.tet` matched with corner v of tet `a.tet`; it maps the
// face's corners onto the partner face's corners and a.face to b.face.
struct Pairing {
  FaceRef a, b;
  std::array<int, 4> perm{0, 1, 2, 3};
};

struct structure_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Abstract oriented triangulation: tetrahedra with ambient orientations
// relative to their corner labels, plus orientation-reversing face pairings.
// Edge, vertex and face classes are derived on construction.
class Triangulation {
 public:
  Triangulation(int ntet, std::vector<Pairing> pairings,
                std::vector<int> orientations = {});

  int ntet() const { return ntet_; }
  int orientation(int tet) const { return orient_[tet]; }
  const std::vector<Pairing>& pairings() const { return pairings_; }

  // face classes: interior faces have two sides, boundary faces one
  int face_class(int tet, int face) const;
  int num_faces() const { return nface_; }
  bool face_paired(int tet, int face) const;
  std::optional<Pairing> pairing_of(int tet, int face) const;
  std::vector<FaceRef> face_class_members(int cls) const;

  // edge classes over abstract edges (tet, unordered corner pair)
  int num_edges() const { return nedge_; }
  int edge_class(int tet, int u, int v) const;
  // all abstract edges in a class, as (tet, u, v) with u < v
  std::vector<std::array<int, 3>> edge_class_members(int cls) const;

  // vertex classes
  int num_vertices() const { return nvert_; }
  int vertex_class(int tet, int v) const;

  // Euler characteristic of the link surface of a vertex class (requires all
  // faces containing the vertex to be paired); 2 = interior point, 0 = cusp.
  int link_euler_characteristic(int vertex_cls) const;
  // number of interior (sphere-link) vertex classes
  int interior_vertex_count() const;

  bool closed() const;  // every face paired

 private:
  int ntet_ = 0;
  int nface_ = 0, nedge_ = 0, nvert_ = 0;
  std::vector<int> orient_;
  std::vector<Pairing> pairings_;
  std::vector<int> face_class_of_;    // [tet*4+face]
  std::vector<int> pairing_index_;    // [tet*4+face] -> index or -1
  std::vector<int> edge_class_of_;    // [tet*6+edge_slot]
  std::vector<int> vertex_class_of_;  // [tet*4+v]
};

int edge_slot_of(int u, int v);
std::array<int, 2> edge_slot_pair(int slot);

// Positive orderings of a face and the orientation-reversal test used when
// validating pairings.
bool face_ordering_positive(int a, int b, int c, int opposite, int tet_orient);

// Per-tetra decoration bundle for a triangulation.
struct GlobalDecoration {
  std::vector<Branching> orders;
  std::vector<ModularTriple> moduli;
  std::vector<EdgeInts> flattening;  // may be empty
  std::vector<EdgeInts> charge;      // may be empty
  std::set<int> hamiltonian;         // edge classes of H (empty for cusped)

  bool has_flattening() const { return !flattening.empty(); }
  bool has_charge() const { return !charge.empty(); }
};

// View of one tetra of a decoration as a standalone decorated tetrahedron.
DecoratedTetra tetra_view(const Triangulation& T, const GlobalDecoration& d,
                          int tet);

// The modulus / flattening / charge sitting on the abstract edge {u,v} of a
// tetra (corner labels), resolved through the branching.
cplx edge_modulus(const GlobalDecoration& d, int tet, int u, int v);
int edge_weight(const std::vector<EdgeInts>& w, const GlobalDecoration& d,
                int tet, int u, int v);

// ---- checks ----

struct BranchingCheck {
  bool ok = true;
  std::vector<int> offending_edges;  // edge classes with inconsistent arrows
};
BranchingCheck check_global_branching(const Triangulation& T,
                                      const std::vector<Branching>& orders);

// per-edge |prod w^{*_b} - 1| plus the additive log defect (should be in
// 2 pi i Z when the multiplicative condition holds)
struct EdgeCompat {
  std::vector<double> residual;       // per edge class
  std::vector<cplx> log_sum;          // signed log sums
  double max_residual = 0.0;
};
EdgeCompat check_edge_compatibility(const Triangulation& T,
                                    const GlobalDecoration& d);

// per-edge signed log-branch sums; defect reported as the integer s in
// (sum = i*pi*s); flattened iff all defects vanish
struct FlatteningCheck {
  std::vector<int> defect;
  bool flattened = true;
  double max_deviation = 0.0;  // distance of each sum from i*pi*integer
};
FlatteningCheck check_global_flattening(const Triangulation& T,
                                        const GlobalDecoration& d);

// per-edge charge sums minus targets (2 off H, 0 on H by default; explicit
// target maps supported for marked variants)
struct ChargeCheck {
  std::vector<int> defect;
  bool charged = true;
};
ChargeCheck check_global_charge(const Triangulation& T,
                                const GlobalDecoration& d);
ChargeCheck check_global_charge(const Triangulation& T,
                                const GlobalDecoration& d,
                                const std::map<int, int>& edge_targets);

// ---- normalization classes ----

// A closed dual path: each step crosses one tetra entering and leaving by
// two distinct faces; consecutive steps must be connected by pairings.
struct DualStep {
  int tet, face_in, face_out;
};
int mod2_class_on_path(const Triangulation& T, const GlobalDecoration& d,
                       bool use_charge, const std::vector<DualStep>& path);

// ---- integer solvers ----

// Constraint system for global flattenings (per-tet level + per-edge-class
// signed sums) or charges (per-tet sum 1 + per-edge-class target sums).
struct IntegerDecorationSystem {
  IMat A;
  std::vector<std::int64_t> rhs;
  // unknown layout: 3 per tetra (edge indices 0,1,2)
};
IntegerDecorationSystem flattening_system(const Triangulation& T,
                                          const GlobalDecoration& d);
IntegerDecorationSystem charge_system(const Triangulation& T,
                                      const GlobalDecoration& d,
                                      const std::map<int, int>& edge_targets);

std::optional<IntSolution> solve_flattening(const Triangulation& T,
                                            const GlobalDecoration& d);
std::optional<IntSolution> solve_charge(const Triangulation& T,
                                        const GlobalDecoration& d);

std::vector<EdgeInts> unpack_edge_ints(const std::vector<std::int64_t>& flat);
std::vector<std::int64_t> pack_edge_ints(const std::vector<EdgeInts>& v);

// ---- branching search ----

// Exhaustive search with pruning; returns up to `max_results` global
// branchings (vectors of per-tet orders).
std::vector<std::vector<Branching>> search_branchings(const Triangulation& T,
                                                      int max_results);

// ---- cocycles and idealization ----

using Mat2 = std::array<cplx, 4>;  // row major 2x2

cplx mobius_apply_zero(const Mat2& M);  // M(0) = b/d
Mat2 mat2_mul(const Mat2& A, const Mat2& B);
Mat2 mat2_inverse(const Mat2& M);
cplx mat2_det(const Mat2& M);
// canonical representative of {M, -M}
Mat2 psl2_canonical(const Mat2& M);

// Cocycle on a triangulation: one matrix per oriented abstract edge,
// stored for the 6 corner pairs (u < v) of each tetra.
struct CocycleDecoration {
  // z[tet][edge_slot_of(u,v)] for u < v; reverse orientation is the inverse
  std::vector<std::array<Mat2, 6>> z;
};

// coboundary of a vertex-class assignment: z([u -> v]) = g(cls u)^{-1} g(cls v)
CocycleDecoration coboundary_cocycle(const Triangulation& T,
                                     const std::vector<Mat2>& vertex_values);

// residuals of the face relations and the pairing consistency, up to sign
double cocycle_residual(const Triangulation& T, const CocycleDecoration& z);

// Idealization of one tetra: cross-ratio of the four orbit points of 0.
// Throws when points collide or leave the finite plane.
ModularTriple idealize(const Triangulation& T, const CocycleDecoration& z,
                       const std::vector<Branching>& orders, int tet);

// Idealize every tetra (global decoration without flattening/charge).
GlobalDecoration idealize_all(const Triangulation& T,
                              const CocycleDecoration& z,
                              const std::vector<Branching>& orders);

}  // namespace dilog
