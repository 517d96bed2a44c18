#pragma once

#include "dilog/tensor.hpp"
#include "dilog/triangulation.hpp"

namespace dilog {

// Dense tensor over face-class states. Each slot names a face class and a
// polarity (up = output side); all slot dimensions equal N. Entries are
// addressed row-major in slot order.
struct NDTensor {
  int N = 1;
  struct Slot {
    int face_cls;
    bool up;
  };
  std::vector<Slot> slots;
  std::vector<cplx> data;

  std::size_t size() const { return data.size(); }
  static NDTensor scalar(int N, cplx v);
};

// Tensor of one tetra placed into the complex: slots = its four face classes.
NDTensor place_tetra(const Triangulation& T, const GlobalDecoration& d,
                     int tet, const RootContext& ctx);

// Contract all face classes shared between A and B (which must occur with
// opposite polarity); repeated classes inside one operand are not supported.
NDTensor contract_pair(const NDTensor& A, const NDTensor& B);

// Reorder slots to the given face-class order (polarities kept).
NDTensor align_slots(const NDTensor& A, const std::vector<int>& face_order);

enum class PlanMode { BruteForce, PairwiseGreedy };

// Contraction of a set of tetra over every interior face class; free faces
// remain as slots. Brute force enumerates all states; the greedy plan
// eliminates pairwise, smallest intermediate first.
NDTensor contract(const Triangulation& T, const GlobalDecoration& d,
                  const RootContext& ctx, PlanMode mode);

// ---- invariants ----

struct H1Result {
  cplx value;        // canonical sign representative
  cplx r_sum;        // signed sum of lifted Rogers values (full complex)
  double volume;     // Im of r_sum
  double cs;         // Re of r_sum reduced mod pi^2 to (-pi^2/2, pi^2/2]
};

// Classical invariant of a flattened decoration (all faces paired).
H1Result H1(const Triangulation& T, const GlobalDecoration& d,
            bool check_decoration = true);

struct HNResult {
  int N = 1;
  cplx value;  // N^{-v} * state sum
  int interior_vertices = 0;
  double edge_residual = 0.0;
  int flattening_defect = 0;
  int charge_defect = 0;
};

HNResult HN(const Triangulation& T, const GlobalDecoration& d,
            const RootContext& ctx, PlanMode mode = PlanMode::PairwiseGreedy,
            bool check_decoration = true);

// canonical sign representative: Re >= 0, ties broken by Im >= 0
cplx canonical_sign(cplx v);

struct ProbeRow {
  int N;
  cplx value;
  double abs_value;
  double log_abs_scaled;  // (pi/N) * log|value|
};

// Volume-experiment table: one row per requested N over a shared (T,b,w,f)
// with fixed charges. No acceptance claim is attached to these numbers.
std::vector<ProbeRow> asymptotics_probe(const Triangulation& T,
                                        const GlobalDecoration& d,
                                        const std::vector<int>& Ns);

}  // namespace dilog
