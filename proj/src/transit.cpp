#include "dilog/transit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace dilog {

namespace {

int perm_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 == 0 ? +1 : -1;
}

// Re-express a decorated tetra whose branching ranks move by q (new rank of
// the old rank-r vertex is q[r]) as an identity-branched tetra on corners
// renamed accordingly.
DecoratedTetra reframe_identity(const DecoratedTetra& t,
                                const std::array<int, 4>& q) {
  DecoratedTetra s = apply_permutation(t, q);
  DecoratedTetra out;
  out.b.order = {0, 1, 2, 3};
  out.w = s.w;
  out.f = s.f;
  out.c = s.c;
  std::vector<int> qv(q.begin(), q.end());
  out.orientation = t.orientation * perm_sign(qv);
  return out;
}

// A bipyramid-side tetra: its corners (sorted by the model order) and its
// identity-branched decoration.
struct ModelTetra {
  std::array<int, 4> model;  // corner -> model vertex
  DecoratedTetra dec;        // identity branching
};

// All tetra pairs sharing three model vertices are glued; the corner map is
// induced by the model labels.
DecoratedComplex build_model_complex(const std::vector<ModelTetra>& tets) {
  std::vector<Pairing> pairings;
  for (int i = 0; i < int(tets.size()); ++i)
    for (int j = i + 1; j < int(tets.size()); ++j) {
      std::set<int> si(tets[i].model.begin(), tets[i].model.end());
      std::set<int> sj(tets[j].model.begin(), tets[j].model.end());
      std::vector<int> common;
      std::set_intersection(si.begin(), si.end(), sj.begin(), sj.end(),
                            std::back_inserter(common));
      if (common.size() != 3) continue;
      auto corner_of = [](const ModelTetra& t, int m) {
        for (int c = 0; c < 4; ++c)
          if (t.model[c] == m) return c;
        throw structure_error("build_model_complex: model vertex missing");
      };
      int apex_i = -1, apex_j = -1;
      for (int c = 0; c < 4; ++c) {
        if (!std::count(common.begin(), common.end(), tets[i].model[c]))
          apex_i = c;
        if (!std::count(common.begin(), common.end(), tets[j].model[c]))
          apex_j = c;
      }
      Pairing P;
      P.a = {i, apex_i};
      P.b = {j, apex_j};
      for (int c = 0; c < 4; ++c)
        P.perm[c] = (c == apex_i) ? apex_j : corner_of(tets[j], tets[i].model[c]);
      pairings.push_back(P);
    }
  std::vector<int> orients;
  GlobalDecoration d;
  for (const auto& mt : tets) {
    orients.push_back(mt.dec.orientation);
    d.orders.push_back(mt.dec.b);
    d.moduli.push_back(mt.dec.w);
  }
  bool all_f = std::all_of(tets.begin(), tets.end(),
                           [](const ModelTetra& t) { return t.dec.f.has_value(); });
  bool all_c = std::all_of(tets.begin(), tets.end(),
                           [](const ModelTetra& t) { return t.dec.c.has_value(); });
  for (const auto& mt : tets) {
    if (all_f) d.flattening.push_back(*mt.dec.f);
    if (all_c) d.charge.push_back(*mt.dec.c);
  }
  Triangulation T(int(tets.size()), pairings, orients);
  return DecoratedComplex{std::move(T), std::move(d)};
}

// model vertex sets of the two bipyramid sides (standard positions)
const std::array<std::array<int, 4>, 2> kTwoSide{{{0, 2, 3, 4}, {0, 1, 2, 4}}};
const std::array<std::array<int, 4>, 3> kThreeSide{
    {{1, 2, 3, 4}, {0, 1, 3, 4}, {0, 1, 2, 3}}};

std::vector<ModelTetra> model_tets_of(const DecoratedComplex& side,
                                      const std::vector<std::array<int, 4>>& model) {
  std::vector<ModelTetra> out;
  for (int t = 0; t < side.T.ntet(); ++t) {
    ModelTetra mt;
    mt.model = model[t];
    mt.dec = tetra_view(side.T, side.d, t);
    out.push_back(mt);
  }
  return out;
}

// The moduli of the three-side in the standard frame, given x and y.
std::array<cplx, 3> three_side_moduli(cplx x, cplx y) {
  return {x, y / x, (1.0 - x) / (1.0 - y)};
}

void guard_modulus(cplx w, const char* what) {
  if (std::abs(w) < 1e-10 || std::abs(w - 1.0) < 1e-10)
    throw blocked_move(std::string("degenerate modulus in ") + what);
}

// signed log-branch sum of a complex over the abstract edges at a model pair
cplx model_edge_log_sum(const std::vector<ModelTetra>& tets, int mu, int mv,
                        bool with_flattening) {
  cplx sum = 0.0;
  for (const auto& mt : tets) {
    int cu = -1, cv = -1;
    for (int c = 0; c < 4; ++c) {
      if (mt.model[c] == mu) cu = c;
      if (mt.model[c] == mv) cv = c;
    }
    if (cu < 0 || cv < 0) continue;
    const int s = b_sign(mt.dec);
    int j = edge_index_of_rank_pair(mt.dec.b.rank_of(cu), mt.dec.b.rank_of(cv));
    cplx l = std_log(mt.dec.w[j]);
    if (with_flattening) l += cplx(0.0, kPi) * double((*mt.dec.f)[j]);
    sum += double(s) * l;
  }
  return sum;
}

int model_edge_charge_sum(const std::vector<ModelTetra>& tets, int mu, int mv) {
  int sum = 0;
  for (const auto& mt : tets) {
    int cu = -1, cv = -1;
    for (int c = 0; c < 4; ++c) {
      if (mt.model[c] == mu) cu = c;
      if (mt.model[c] == mv) cv = c;
    }
    if (cu < 0 || cv < 0) continue;
    int j = edge_index_of_rank_pair(mt.dec.b.rank_of(cu), mt.dec.b.rank_of(cv));
    sum += (*mt.dec.c)[j];
  }
  return sum;
}

// Solve the flattening (or charge) transit on a bipyramid side against the
// log-branch (or charge) sums of the other side. Unknowns: 3 ints per tetra.
struct SideSolve {
  std::vector<EdgeInts> values;
  std::vector<std::vector<std::int64_t>> kernel;
};

SideSolve solve_side_flattening(std::vector<ModelTetra>& side,
                                const std::vector<ModelTetra>& other,
                                const std::vector<std::array<int, 2>>& edges,
                                long choice) {
  const int ntet = int(side.size());
  IMat A(ntet + int(edges.size()), 3 * ntet);
  std::vector<std::int64_t> rhs(A.rows, 0);
  for (int t = 0; t < ntet; ++t) {
    for (int j = 0; j < 3; ++j) A(t, 3 * t + j) = 1;
    rhs[t] = flattening_level(side[t].dec.w);
  }
  for (int e = 0; e < int(edges.size()); ++e) {
    auto [mu, mv] = edges[e];
    const int row = ntet + e;
    cplx target = model_edge_log_sum(other, mu, mv, true);
    cplx logs = 0.0;
    for (int t = 0; t < ntet; ++t) {
      const auto& mt = side[t];
      int cu = -1, cv = -1;
      for (int c = 0; c < 4; ++c) {
        if (mt.model[c] == mu) cu = c;
        if (mt.model[c] == mv) cv = c;
      }
      if (cu < 0 || cv < 0) continue;
      const int s = b_sign(mt.dec);
      int j = edge_index_of_rank_pair(mt.dec.b.rank_of(cu), mt.dec.b.rank_of(cv));
      A(row, 3 * t + j) += s;
      logs += double(s) * std_log(mt.dec.w[j]);
    }
    double r = (target - logs).imag() / kPi;
    long ri = std::lround(r);
    if (std::abs(r - ri) > 1e-6 || std::abs((target - logs).real()) > 1e-6)
      throw blocked_move("flattening transit: non-integral edge matching");
    rhs[row] = ri;
  }
  auto sol = solve_integer(A, rhs);
  if (!sol) throw blocked_move("flattening transit: no integer solution");
  std::vector<std::int64_t> flat = sol->particular;
  if (!sol->kernel.empty())
    for (std::size_t i = 0; i < flat.size(); ++i)
      flat[i] += choice * sol->kernel[0][i];
  SideSolve out;
  out.values = unpack_edge_ints(flat);
  out.kernel = sol->kernel;
  return out;
}

SideSolve solve_side_charge(std::vector<ModelTetra>& side,
                            const std::vector<ModelTetra>& other,
                            const std::vector<std::array<int, 2>>& edges,
                            long choice) {
  const int ntet = int(side.size());
  IMat A(ntet + int(edges.size()), 3 * ntet);
  std::vector<std::int64_t> rhs(A.rows, 0);
  for (int t = 0; t < ntet; ++t) {
    for (int j = 0; j < 3; ++j) A(t, 3 * t + j) = 1;
    rhs[t] = 1;
  }
  for (int e = 0; e < int(edges.size()); ++e) {
    auto [mu, mv] = edges[e];
    const int row = ntet + e;
    rhs[row] = model_edge_charge_sum(other, mu, mv);
    for (int t = 0; t < ntet; ++t) {
      const auto& mt = side[t];
      int cu = -1, cv = -1;
      for (int c = 0; c < 4; ++c) {
        if (mt.model[c] == mu) cu = c;
        if (mt.model[c] == mv) cv = c;
      }
      if (cu < 0 || cv < 0) continue;
      int j = edge_index_of_rank_pair(mt.dec.b.rank_of(cu), mt.dec.b.rank_of(cv));
      A(row, 3 * t + j) += 1;
    }
  }
  auto sol = solve_integer(A, rhs);
  if (!sol) throw blocked_move("charge transit: no integer solution");
  std::vector<std::int64_t> flat = sol->particular;
  if (!sol->kernel.empty())
    for (std::size_t i = 0; i < flat.size(); ++i)
      flat[i] += choice * sol->kernel[0][i];
  SideSolve out;
  out.values = unpack_edge_ints(flat);
  out.kernel = sol->kernel;
  return out;
}

// the nine model pairs shared by both sides (all pairs but the apex edge)
std::vector<std::array<int, 2>> common_model_edges() {
  std::vector<std::array<int, 2>> out;
  for (int u = 0; u < 5; ++u)
    for (int v = u + 1; v < 5; ++v)
      if (!(u == 1 && v == 3)) out.push_back({u, v});
  return out;
}

std::array<int, 3> model_face_triple(const ModelTetra& mt, int face_corner) {
  std::array<int, 3> tri{};
  int k = 0;
  for (int c = 0; c < 4; ++c)
    if (c != face_corner) tri[k++] = mt.model[c];
  std::sort(tri.begin(), tri.end());
  return tri;
}

std::vector<std::pair<FaceRef, FaceRef>> match_boundary(
    const std::vector<ModelTetra>& before, const std::vector<ModelTetra>& after,
    const DecoratedComplex& beforeC, const DecoratedComplex& afterC) {
  std::vector<std::pair<FaceRef, FaceRef>> match;
  for (int tb = 0; tb < int(before.size()); ++tb)
    for (int fb = 0; fb < 4; ++fb) {
      if (beforeC.T.face_paired(tb, fb)) continue;
      auto tri = model_face_triple(before[tb], fb);
      bool found = false;
      for (int ta = 0; ta < int(after.size()) && !found; ++ta)
        for (int fa = 0; fa < 4 && !found; ++fa) {
          if (afterC.T.face_paired(ta, fa)) continue;
          if (model_face_triple(after[ta], fa) == tri) {
            match.push_back({FaceRef{tb, fb}, FaceRef{ta, fa}});
            found = true;
          }
        }
      if (!found) throw structure_error("match_boundary: unmatched free face");
    }
  return match;
}

}  // namespace

DecoratedComplex standard_two_side(cplx x, cplx y,
                                   const std::vector<EdgeInts>& f,
                                   const std::vector<EdgeInts>& c) {
  guard_modulus(x, "standard_two_side");
  guard_modulus(y, "standard_two_side");
  cplx z = y * (1.0 - x) / (x * (1.0 - y));
  guard_modulus(z, "standard_two_side");
  std::vector<ModelTetra> tets(2);
  tets[0].model = kTwoSide[0];
  tets[0].dec.w = complete_triple(y);
  tets[1].model = kTwoSide[1];
  tets[1].dec.w = complete_triple(z);
  for (int t = 0; t < 2; ++t) {
    tets[t].dec.b.order = {0, 1, 2, 3};
    tets[t].dec.orientation = +1;
    if (!f.empty()) tets[t].dec.f = f[t];
    if (!c.empty()) tets[t].dec.c = c[t];
  }
  return build_model_complex(tets);
}

DecoratedComplex act_on_bipyramid(const DecoratedComplex& side,
                                  const std::array<int, 5>& sigma) {
  // recover the model sets from the side's shape
  const std::vector<std::array<int, 4>> model =
      side.T.ntet() == 2
          ? std::vector<std::array<int, 4>>(kTwoSide.begin(), kTwoSide.end())
          : std::vector<std::array<int, 4>>(kThreeSide.begin(), kThreeSide.end());
  std::vector<ModelTetra> tets;
  for (int t = 0; t < side.T.ntet(); ++t) {
    DecoratedTetra dec = tetra_view(side.T, side.d, t);
    // vertices of the tetra in the new model labels
    std::array<int, 4> img{};
    for (int cmod = 0; cmod < 4; ++cmod) img[cmod] = sigma[model[t][cmod]];
    // new rank of old rank r: position of img[old corner at rank r]
    std::array<int, 4> sorted = img;
    std::sort(sorted.begin(), sorted.end());
    std::array<int, 4> q{};
    for (int r = 0; r < 4; ++r) {
      int corner = dec.b.order[r];
      int pos = int(std::find(sorted.begin(), sorted.end(), img[corner]) -
                    sorted.begin());
      q[r] = pos;
    }
    ModelTetra mt;
    mt.model = sorted;
    mt.dec = reframe_identity(dec, q);
    tets.push_back(mt);
  }
  return build_model_complex(tets);
}

namespace {

// ---- generic 2<->3 machinery over an explicit model embedding ----

struct Support23 {
  // model vertices 0..4 in the caller's numbering; per tetra: which model
  // vertex each corner carries; order: rank of each model vertex
  std::vector<int> tets;                       // tet indices in the host
  std::vector<std::array<int, 4>> corner_model;  // per support tet
  std::array<int, 5> pos{};                    // model vertex -> rank 0..4
};

// builds a standard-frame view (sigma maps standard positions to ranks)
struct FrameMap {
  std::array<int, 5> sigma{};   // std position -> rank (my position)
  std::array<int, 5> vertex_at_pos{};  // rank -> model vertex
};

}  // namespace

TransitRecord transit_2_3(const DecoratedComplex& in, FaceRef shared_face,
                          long f_choice, long c_choice, bool new_edge_up) {
  auto pr = in.T.pairing_of(shared_face.tet, shared_face.face);
  if (!pr) throw blocked_move("transit_2_3: shared face is free");
  const int tA = pr->a.tet, fA = pr->a.face;
  const int tB = pr->b.tet, fB = pr->b.face;
  if (tA == tB) throw blocked_move("transit_2_3: self-glued tetrahedron");
  std::array<int, 4> phi = pr->perm;
  std::array<int, 4> phi_inv{};
  for (int i = 0; i < 4; ++i) phi_inv[phi[i]] = i;

  // model ids: tA corners are 0..3 on themselves, apex of tB is 4
  auto model_of_B = [&](int corner) { return corner == fB ? 4 : phi_inv[corner]; };

  const auto& ordA = in.d.orders[tA];
  const auto& ordB = in.d.orders[tB];

  // total order on the five model vertices: tA orders {0..3}; tB places 4
  // relative to the three face vertices; the position against fA may be free.
  std::vector<int> chain;  // model vertices of tA by rank
  for (int r = 0; r < 4; ++r) chain.push_back(ordA.order[r]);
  // constraints for 4 relative to face vertices (model = tA corner labels)
  auto before4 = [&](int mv) {
    // is model vertex mv ranked before 4 according to tB?
    int cb = phi[mv];
    return ordB.rank_of(cb) < ordB.rank_of(fB);
  };
  int lo = 0, hi = int(chain.size());  // insertion window for 4
  for (int i = 0; i < int(chain.size()); ++i) {
    int mv = chain[i];
    if (mv == fA) continue;
    if (before4(mv)) lo = std::max(lo, i + 1);
    else hi = std::min(hi, i);
  }
  if (lo > hi) throw blocked_move("transit_2_3: branching admits no extension");
  int posA = int(std::find(chain.begin(), chain.end(), fA) - chain.begin());
  std::vector<int> candidates;
  for (int p = lo; p <= hi; ++p) candidates.push_back(p);
  int insert_at = -1;
  if (candidates.size() == 1) insert_at = candidates[0];
  else {
    // the free choice is only the position against fA
    int below = -1, above = -1;
    for (int p : candidates) {
      if (p <= posA) below = p;
      if (p > posA && above < 0) above = p;
    }
    insert_at = new_edge_up ? (above >= 0 ? above : below)
                            : (below >= 0 ? below : above);
  }
  std::vector<int> full = chain;
  full.insert(full.begin() + insert_at, 4);

  std::array<int, 5> pos{};
  for (int p = 0; p < 5; ++p) pos[full[p]] = p;

  // apexes: model fA (tA's vertex opposite the shared face) and 4
  int pa = pos[fA], pb = pos[4];
  std::array<int, 5> sigma{};  // std position -> my position
  sigma[1] = std::min(pa, pb);
  sigma[3] = std::max(pa, pb);
  {
    std::vector<int> facepos;
    for (int p = 0; p < 5; ++p)
      if (p != pa && p != pb) facepos.push_back(p);
    sigma[0] = facepos[0];
    sigma[2] = facepos[1];
    sigma[4] = facepos[2];
  }

  // which input tetra plays the role with modulus y (its apex at sigma(3))
  const bool A_is_y = (pos[fA] == sigma[3]);
  auto std_view = [&](int tet, const std::array<int, 4>& corner_model) {
    DecoratedTetra dec = tetra_view(in.T, in.d, tet);
    // std rank of the vertex at input rank r
    std::vector<int> stdpos;
    for (int c = 0; c < 4; ++c) {
      int my = pos[corner_model[c]];
      int sp = -1;
      for (int q = 0; q < 5; ++q)
        if (sigma[q] == my) sp = q;
      stdpos.push_back(sp);
    }
    std::array<int, 4> p{};
    for (int r = 0; r < 4; ++r) {
      int corner = dec.b.order[r];
      int sp = stdpos[corner];
      int rank = 0;
      for (int c = 0; c < 4; ++c)
        if (stdpos[c] < sp) ++rank;
      p[r] = rank;
    }
    return apply_permutation(dec, p);
  };
  std::array<int, 4> cmA{0, 1, 2, 3};
  std::array<int, 4> cmB{};
  for (int c = 0; c < 4; ++c) cmB[c] = model_of_B(c);

  DecoratedTetra y_std = A_is_y ? std_view(tA, cmA) : std_view(tB, cmB);
  DecoratedTetra z_std = A_is_y ? std_view(tB, cmB) : std_view(tA, cmA);
  const int s = b_sign(y_std);
  if (b_sign(z_std) != s)
    throw structure_error("transit_2_3: inconsistent branching indices");

  const cplx y = y_std.w[0];
  const cplx z = z_std.w[0];
  const cplx den = z * (1.0 - y) + y;
  if (std::abs(den) < 1e-10) throw blocked_move("transit_2_3: modulus at infinity");
  const cplx x = y / den;
  guard_modulus(x, "transit_2_3");
  guard_modulus(y / x, "transit_2_3");
  guard_modulus((1.0 - x) / (1.0 - y), "transit_2_3");

  const auto wnew = three_side_moduli(x, y);

  // before side as model tetra (for sums and the local record)
  std::vector<ModelTetra> before_tets(2);
  {
    const std::array<std::array<int, 4>, 2> cm{cmA, cmB};
    const std::array<int, 2> tid{tA, tB};
    for (int t = 0; t < 2; ++t) {
      DecoratedTetra dec = tetra_view(in.T, in.d, tid[t]);
      // corners sorted by model position
      std::array<int, 4> corners{0, 1, 2, 3};
      std::sort(corners.begin(), corners.end(), [&](int a, int b) {
        return pos[cm[t][a]] < pos[cm[t][b]];
      });
      std::array<int, 4> q{};
      for (int r = 0; r < 4; ++r) {
        int corner = dec.b.order[r];
        int rank = int(std::find(corners.begin(), corners.end(), corner) -
                       corners.begin());
        q[r] = rank;
      }
      ModelTetra mt;
      for (int i = 0; i < 4; ++i) mt.model[i] = pos[cm[t][corners[i]]];
      mt.dec = reframe_identity(dec, q);
      before_tets[t] = mt;
    }
  }

  // after side in my-position model labels (0..4 by rank)
  std::vector<ModelTetra> after_tets(3);
  {
    const std::array<int, 3> which{0, 2, 4};
    for (int i = 0; i < 3; ++i) {
      int miss = which[i];
      std::vector<int> stdpos;
      for (int q = 0; q < 5; ++q)
        if (q != miss) stdpos.push_back(q);
      DecoratedTetra stddec;
      stddec.b.order = {0, 1, 2, 3};
      stddec.w = complete_triple(wnew[i]);
      stddec.orientation = s;
      // new rank of std rank k among my positions
      std::array<int, 4> q{};
      std::vector<int> mypos;
      for (int k = 0; k < 4; ++k) mypos.push_back(sigma[stdpos[k]]);
      for (int k = 0; k < 4; ++k) {
        int rank = 0;
        for (int k2 = 0; k2 < 4; ++k2)
          if (mypos[k2] < mypos[k]) ++rank;
        q[k] = rank;
      }
      ModelTetra mt;
      std::vector<int> sorted = mypos;
      std::sort(sorted.begin(), sorted.end());
      for (int k = 0; k < 4; ++k) mt.model[k] = sorted[k];
      mt.dec = reframe_identity(stddec, q);
      after_tets[i] = mt;
    }
  }

  // integer transits over the nine common model edges (model = my positions)
  std::vector<std::array<int, 2>> edges;
  for (int u = 0; u < 5; ++u)
    for (int v = u + 1; v < 5; ++v)
      if (!(u == std::min(pa, pb) && v == std::max(pa, pb)))
        edges.push_back({u, v});

  TransitRecord rec{MoveKind::M23,
                    DecoratedComplex{in.T, in.d},
                    DecoratedComplex{in.T, in.d},
                    {},
                    f_choice,
                    c_choice,
                    {},
                    {}};

  const bool with_f = in.d.has_flattening();
  const bool with_c = in.d.has_charge();
  if (with_f) {
    auto sol = solve_side_flattening(after_tets, before_tets, edges, f_choice);
    for (int i = 0; i < 3; ++i) after_tets[i].dec.f = sol.values[i];
    rec.f_kernel = sol.kernel;
    // admissibility of the fresh edge: its log-branch sum vanishes
    cplx newsum = model_edge_log_sum(after_tets, std::min(pa, pb),
                                     std::max(pa, pb), true);
    if (std::abs(newsum) > 1e-6)
      throw structure_error("transit_2_3: fresh edge log-branch sum nonzero");
  }
  if (with_c) {
    auto sol = solve_side_charge(after_tets, before_tets, edges, c_choice);
    for (int i = 0; i < 3; ++i) after_tets[i].dec.c = sol.values[i];
    rec.c_kernel = sol.kernel;
    if (model_edge_charge_sum(after_tets, std::min(pa, pb), std::max(pa, pb)) != 2)
      throw structure_error("transit_2_3: fresh edge charge sum != 2");
  }

  DecoratedComplex before_local = build_model_complex(before_tets);
  DecoratedComplex after_local = build_model_complex(after_tets);

  if (in.T.ntet() == 2) {
    rec.before = before_local;
    rec.after = after_local;
    rec.boundary_match =
        match_boundary(before_tets, after_tets, before_local, after_local);
    return rec;
  }

  // ---- graft into the host complex ----
  std::vector<int> newidx(in.T.ntet(), -1);
  int nkeep = 0;
  for (int t = 0; t < in.T.ntet(); ++t)
    if (t != tA && t != tB) newidx[t] = nkeep++;
  const int baseNew = nkeep;  // after tets occupy baseNew..baseNew+2

  // model face triple -> (after tet, face corner)
  std::map<std::array<int, 3>, FaceRef> after_face_of;
  for (int t = 0; t < 3; ++t)
    for (int fc = 0; fc < 4; ++fc) {
      if (after_local.T.face_paired(t, fc)) continue;
      after_face_of[model_face_triple(after_tets[t], fc)] =
          FaceRef{baseNew + t, fc};
    }
  // old support face -> (model triple, old corner -> model vertex)
  auto old_face_model = [&](int tet, int face) {
    std::array<int, 3> tri{};
    int k = 0;
    const auto& cm = (tet == tA) ? cmA : cmB;
    for (int c = 0; c < 4; ++c)
      if (c != face) tri[k++] = pos[cm[c]];
    std::sort(tri.begin(), tri.end());
    return tri;
  };
  auto model_corner_map = [&](int tet) {
    // old corner -> corner in the owning after tetra (via model vertices);
    // only meaningful for face corners
    const auto& cm = (tet == tA) ? cmA : cmB;
    return [&, cm](int corner, const ModelTetra& owner) {
      int mv = pos[cm[corner]];
      for (int c = 0; c < 4; ++c)
        if (owner.model[c] == mv) return c;
      return -1;
    };
  };

  std::vector<Pairing> pairings;
  for (const Pairing& P : in.T.pairings()) {
    const bool a_in = (P.a.tet == tA || P.a.tet == tB);
    const bool b_in = (P.b.tet == tA || P.b.tet == tB);
    if (a_in && b_in && ((P.a == pr->a && P.b == pr->b) || (P.a == pr->b && P.b == pr->a)))
      continue;  // the consumed shared face
    Pairing Q = P;
    auto rewire = [&](FaceRef& fr, std::array<int, 4>& perm, bool first_side) {
      if (fr.tet != tA && fr.tet != tB) {
        fr.tet = newidx[fr.tet];
        return;
      }
      auto tri = old_face_model(fr.tet, fr.face);
      FaceRef nf = after_face_of.at(tri);
      const ModelTetra& owner = after_tets[nf.tet - baseNew];
      auto cmap = model_corner_map(fr.tet);
      std::array<int, 4> newperm{};
      if (first_side) {
        // perm maps corners of side a to side b: precompose with new->old
        // corner map on side a
        for (int c = 0; c < 4; ++c) newperm[c] = -1;
        for (int c = 0; c < 4; ++c) {
          if (c == fr.face) continue;
          int nc = cmap(c, owner);
          newperm[nc] = perm[c];
        }
        newperm[nf.face] = perm[fr.face];
        perm = newperm;
      } else {
        // postcompose with old->new corner map on side b
        for (int c = 0; c < 4; ++c) {
          if (perm[c] == fr.face) {
            newperm[c] = nf.face;
          } else {
            newperm[c] = cmap(perm[c], owner);
          }
        }
        perm = newperm;
      }
      fr = nf;
    };
    rewire(Q.a, Q.perm, true);
    rewire(Q.b, Q.perm, false);
    pairings.push_back(Q);
  }
  // internal pairings of the after side
  for (const Pairing& P : after_local.T.pairings()) {
    Pairing Q = P;
    Q.a.tet += baseNew;
    Q.b.tet += baseNew;
    pairings.push_back(Q);
  }

  std::vector<int> orients(nkeep + 3);
  GlobalDecoration nd;
  nd.orders.resize(nkeep + 3);
  nd.moduli.resize(nkeep + 3);
  if (with_f) nd.flattening.resize(nkeep + 3);
  if (with_c) nd.charge.resize(nkeep + 3);
  for (int t = 0; t < in.T.ntet(); ++t) {
    if (newidx[t] < 0) continue;
    orients[newidx[t]] = in.T.orientation(t);
    nd.orders[newidx[t]] = in.d.orders[t];
    nd.moduli[newidx[t]] = in.d.moduli[t];
    if (with_f) nd.flattening[newidx[t]] = in.d.flattening[t];
    if (with_c) nd.charge[newidx[t]] = in.d.charge[t];
  }
  for (int i = 0; i < 3; ++i) {
    orients[baseNew + i] = after_tets[i].dec.orientation;
    nd.orders[baseNew + i] = after_tets[i].dec.b;
    nd.moduli[baseNew + i] = after_tets[i].dec.w;
    if (with_f) nd.flattening[baseNew + i] = *after_tets[i].dec.f;
    if (with_c) nd.charge[baseNew + i] = *after_tets[i].dec.c;
  }
  Triangulation TN(nkeep + 3, pairings, orients);
  // hamiltonian edges carry over by class representatives
  for (int e : in.d.hamiltonian) {
    auto members = in.T.edge_class_members(e);
    for (auto [t, u, v] : members) {
      if (t == tA || t == tB) continue;
      nd.hamiltonian.insert(TN.edge_class(newidx[t], u, v));
      break;
    }
  }
  rec.after = DecoratedComplex{std::move(TN), std::move(nd)};
  return rec;
}

TransitRecord transit_3_2(const DecoratedComplex& in, int edge_class) {
  auto members = in.T.edge_class_members(edge_class);
  if (members.size() != 3)
    throw blocked_move("transit_3_2: edge class is not three-valent");
  std::set<int> tetset;
  for (auto [t, u, v] : members) tetset.insert(t);
  if (tetset.size() != 3)
    throw blocked_move("transit_3_2: edge not shared by three distinct tetrahedra");

  // Build the model: five vertices; the central edge ends are the apexes.
  // Work in the corner labels of the first member tetra, extending over the
  // pairings around the edge.
  std::vector<int> tets(tetset.begin(), tetset.end());

  // map (tet, corner) -> model id on the support
  std::map<std::pair<int, int>, int> model;
  int next_id = 0;
  auto get_id = [&](int t, int c) {
    auto it = model.find({t, c});
    if (it != model.end()) return it->second;
    model[{t, c}] = next_id;
    return next_id++;
  };
  // seed with the first tetra
  for (int c = 0; c < 4; ++c) get_id(tets[0], c);
  // propagate through internal pairings until stable
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Pairing& P : in.T.pairings()) {
      if (!tetset.count(P.a.tet) || !tetset.count(P.b.tet)) continue;
      for (int c = 0; c < 4; ++c) {
        if (c == P.a.face) continue;
        auto ita = model.find({P.a.tet, c});
        auto itb = model.find({P.b.tet, P.perm[c]});
        if (ita != model.end() && itb == model.end()) {
          model[{P.b.tet, P.perm[c]}] = ita->second;
          changed = true;
        } else if (itb != model.end() && ita == model.end()) {
          model[{P.a.tet, c}] = itb->second;
          changed = true;
        } else if (ita != model.end() && itb != model.end() &&
                   ita->second != itb->second) {
          throw blocked_move("transit_3_2: support is not a bipyramid");
        }
      }
    }
  }
  if (next_id != 5) throw blocked_move("transit_3_2: support is not a bipyramid");
  for (int t : tets)
    for (int c = 0; c < 4; ++c)
      if (!model.count({t, c}))
        throw blocked_move("transit_3_2: support is not a bipyramid");

  // total order: all ten model pairs are branched edges here
  std::array<std::array<int, 2>, 5> dummy{};
  (void)dummy;
  std::vector<int> order_ids(5);
  {
    // rank by counting how many are below via any containing tetra order
    std::array<std::array<bool, 5>, 5> less{};
    for (int t : tets) {
      const auto& ord = in.d.orders[t];
      for (int c1 = 0; c1 < 4; ++c1)
        for (int c2 = 0; c2 < 4; ++c2) {
          if (c1 == c2) continue;
          if (ord.rank_of(c1) < ord.rank_of(c2))
            less[model.at({t, c1})][model.at({t, c2})] = true;
        }
    }
    std::vector<int> below(5, 0);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b)
        if (less[a][b]) ++below[b];
    for (int m = 0; m < 5; ++m) order_ids[below[m]] = m;
    // sanity: consistency
    std::set<int> ranks(below.begin(), below.end());
    if (ranks.size() != 5)
      throw structure_error("transit_3_2: branching is not a total order");
  }
  std::array<int, 5> pos{};
  for (int p = 0; p < 5; ++p) pos[order_ids[p]] = p;

  // apexes = ends of the central edge
  auto [t0, u0, v0] = members[0];
  int apex1 = model.at({t0, u0});
  int apex2 = model.at({t0, v0});
  int pa = pos[apex1], pb = pos[apex2];
  std::array<int, 5> sigma{};
  sigma[1] = std::min(pa, pb);
  sigma[3] = std::max(pa, pb);
  {
    std::vector<int> facepos;
    for (int p = 0; p < 5; ++p)
      if (p != pa && p != pb) facepos.push_back(p);
    sigma[0] = facepos[0];
    sigma[2] = facepos[1];
    sigma[4] = facepos[2];
  }

  // classify: the tetra missing std position i is Delta^i
  auto tet_missing = [&](int stdpos) {
    int myp = sigma[stdpos];
    int mv = order_ids[myp];
    for (int t : tets) {
      bool has = false;
      for (int c = 0; c < 4; ++c)
        if (model.at({t, c}) == mv) has = true;
      if (!has) return t;
    }
    throw structure_error("transit_3_2: support classification failed");
  };
  const int tP = tet_missing(0);  // carries x
  const int tQ = tet_missing(2);  // carries y/x
  const int tR = tet_missing(4);

  auto std_view = [&](int tet) {
    DecoratedTetra dec = tetra_view(in.T, in.d, tet);
    std::array<int, 4> stdpos_of_corner{};
    for (int c = 0; c < 4; ++c) {
      int myp = pos[model.at({tet, c})];
      for (int q = 0; q < 5; ++q)
        if (sigma[q] == myp) stdpos_of_corner[c] = q;
    }
    std::array<int, 4> p{};
    for (int r = 0; r < 4; ++r) {
      int corner = dec.b.order[r];
      int rank = 0;
      for (int c = 0; c < 4; ++c)
        if (stdpos_of_corner[c] < stdpos_of_corner[corner]) ++rank;
      p[r] = rank;
    }
    return apply_permutation(dec, p);
  };

  DecoratedTetra P_std = std_view(tP), Q_std = std_view(tQ), R_std = std_view(tR);
  const int s = b_sign(P_std);
  if (b_sign(Q_std) != s || b_sign(R_std) != s)
    throw structure_error("transit_3_2: inconsistent branching indices");

  const cplx x = P_std.w[0];
  const cplx y = x * Q_std.w[0];
  guard_modulus(y, "transit_3_2");
  const cplx z = y * (1.0 - x) / (x * (1.0 - y));
  guard_modulus(z, "transit_3_2");
  if (std::abs(R_std.w[0] - (1.0 - x) / (1.0 - y)) > 1e-8)
    throw blocked_move("transit_3_2: central edge moduli product != 1");

  // admissibility at the central edge
  std::vector<ModelTetra> after_tets(3);
  {
    const std::array<int, 3> tid{tP, tQ, tR};
    for (int i = 0; i < 3; ++i) {
      DecoratedTetra dec = tetra_view(in.T, in.d, tid[i]);
      std::array<int, 4> corners{0, 1, 2, 3};
      std::sort(corners.begin(), corners.end(), [&](int a, int b) {
        return pos[model.at({tid[i], a})] < pos[model.at({tid[i], b})];
      });
      std::array<int, 4> q{};
      for (int r = 0; r < 4; ++r) {
        int corner = dec.b.order[r];
        int rank = int(std::find(corners.begin(), corners.end(), corner) -
                       corners.begin());
        q[r] = rank;
      }
      ModelTetra mt;
      for (int k = 0; k < 4; ++k) mt.model[k] = pos[model.at({tid[i], corners[k]})];
      mt.dec = reframe_identity(dec, q);
      after_tets[i] = mt;
    }
  }
  {
    cplx prod = 1.0;
    for (const auto& mt : after_tets) {
      int cu = -1, cv = -1;
      for (int c = 0; c < 4; ++c) {
        if (mt.model[c] == std::min(pa, pb)) cu = c;
        if (mt.model[c] == std::max(pa, pb)) cv = c;
      }
      int j = edge_index_of_rank_pair(mt.dec.b.rank_of(cu), mt.dec.b.rank_of(cv));
      prod *= (b_sign(mt.dec) == 1) ? mt.dec.w[j] : 1.0 / mt.dec.w[j];
    }
    if (std::abs(prod - 1.0) > kTolConstruct)
      throw blocked_move("transit_3_2: central edge moduli product != 1");
    if (in.d.has_flattening()) {
      cplx lsum = model_edge_log_sum(after_tets, std::min(pa, pb),
                                     std::max(pa, pb), true);
      if (std::abs(lsum) > 1e-6)
        throw blocked_move("transit_3_2: central edge log-branch sum != 0");
    }
    if (in.d.has_charge()) {
      if (model_edge_charge_sum(after_tets, std::min(pa, pb), std::max(pa, pb)) != 2)
        throw blocked_move("transit_3_2: central edge charge sum != 2");
    }
  }

  // before side: two tetra in the standard frame mapped to my positions
  std::vector<ModelTetra> before_tets(2);
  {
    const std::array<int, 2> which{1, 3};
    const std::array<cplx, 2> w0{y, z};
    for (int i = 0; i < 2; ++i) {
      int miss = which[i];
      std::vector<int> stdpos;
      for (int q = 0; q < 5; ++q)
        if (q != miss) stdpos.push_back(q);
      DecoratedTetra stddec;
      stddec.b.order = {0, 1, 2, 3};
      stddec.w = complete_triple(w0[i]);
      stddec.orientation = s;
      std::array<int, 4> q{};
      std::vector<int> mypos;
      for (int k = 0; k < 4; ++k) mypos.push_back(sigma[stdpos[k]]);
      for (int k = 0; k < 4; ++k) {
        int rank = 0;
        for (int k2 = 0; k2 < 4; ++k2)
          if (mypos[k2] < mypos[k]) ++rank;
        q[k] = rank;
      }
      ModelTetra mt;
      std::vector<int> sorted = mypos;
      std::sort(sorted.begin(), sorted.end());
      for (int k = 0; k < 4; ++k) mt.model[k] = sorted[k];
      mt.dec = reframe_identity(stddec, q);
      before_tets[i] = mt;
    }
  }

  std::vector<std::array<int, 2>> edges;
  for (int u = 0; u < 5; ++u)
    for (int v = u + 1; v < 5; ++v)
      if (!(u == std::min(pa, pb) && v == std::max(pa, pb)))
        edges.push_back({u, v});

  TransitRecord rec{MoveKind::M32,
                    DecoratedComplex{in.T, in.d},
                    DecoratedComplex{in.T, in.d},
                    {},
                    0,
                    0,
                    {},
                    {}};

  const bool with_f = in.d.has_flattening();
  const bool with_c = in.d.has_charge();
  if (with_f) {
    auto sol = solve_side_flattening(before_tets, after_tets, edges, 0);
    if (!sol.kernel.empty())
      throw structure_error("transit_3_2: flattening solution not unique");
    for (int i = 0; i < 2; ++i) before_tets[i].dec.f = sol.values[i];
  }
  if (with_c) {
    auto sol = solve_side_charge(before_tets, after_tets, edges, 0);
    if (!sol.kernel.empty())
      throw structure_error("transit_3_2: charge solution not unique");
    for (int i = 0; i < 2; ++i) before_tets[i].dec.c = sol.values[i];
  }

  DecoratedComplex after_local = build_model_complex(after_tets);
  DecoratedComplex before_local = build_model_complex(before_tets);

  if (in.T.ntet() == 3) {
    rec.before = after_local;  // the given three-side configuration
    rec.after = before_local;  // the produced two-side configuration
    rec.boundary_match =
        match_boundary(after_tets, before_tets, after_local, before_local);
    return rec;
  }

  // graft: replace the three support tets by the two new ones
  std::vector<int> newidx(in.T.ntet(), -1);
  int nkeep = 0;
  for (int t = 0; t < in.T.ntet(); ++t)
    if (!tetset.count(t)) newidx[t] = nkeep++;
  const int baseNew = nkeep;

  std::map<std::array<int, 3>, FaceRef> new_face_of;
  for (int t = 0; t < 2; ++t)
    for (int fc = 0; fc < 4; ++fc) {
      if (before_local.T.face_paired(t, fc)) continue;
      new_face_of[model_face_triple(before_tets[t], fc)] =
          FaceRef{baseNew + t, fc};
    }
  auto old_face_model = [&](int tet, int face) {
    std::array<int, 3> tri{};
    int k = 0;
    for (int c = 0; c < 4; ++c)
      if (c != face) tri[k++] = pos[model.at({tet, c})];
    std::sort(tri.begin(), tri.end());
    return tri;
  };

  std::vector<Pairing> pairings;
  for (const Pairing& P : in.T.pairings()) {
    const bool a_in = tetset.count(P.a.tet) > 0;
    const bool b_in = tetset.count(P.b.tet) > 0;
    if (a_in && b_in) continue;  // internal faces of the support disappear
    Pairing Q = P;
    auto rewire = [&](FaceRef& fr, std::array<int, 4>& perm, bool first_side) {
      if (!tetset.count(fr.tet)) {
        fr.tet = newidx[fr.tet];
        return;
      }
      auto tri = old_face_model(fr.tet, fr.face);
      FaceRef nf = new_face_of.at(tri);
      const ModelTetra& owner = before_tets[nf.tet - baseNew];
      auto cmap = [&](int corner) {
        int mv = pos[model.at({fr.tet, corner})];
        for (int c = 0; c < 4; ++c)
          if (owner.model[c] == mv) return c;
        return -1;
      };
      std::array<int, 4> newperm{};
      if (first_side) {
        for (int c = 0; c < 4; ++c) {
          if (c == fr.face) continue;
          newperm[cmap(c)] = perm[c];
        }
        newperm[nf.face] = perm[fr.face];
      } else {
        for (int c = 0; c < 4; ++c)
          newperm[c] = (perm[c] == fr.face) ? nf.face : cmap(perm[c]);
      }
      perm = newperm;
      fr = nf;
    };
    rewire(Q.a, Q.perm, true);
    rewire(Q.b, Q.perm, false);
    pairings.push_back(Q);
  }
  for (const Pairing& P : before_local.T.pairings()) {
    Pairing Q = P;
    Q.a.tet += baseNew;
    Q.b.tet += baseNew;
    pairings.push_back(Q);
  }

  std::vector<int> orients(nkeep + 2);
  GlobalDecoration nd;
  nd.orders.resize(nkeep + 2);
  nd.moduli.resize(nkeep + 2);
  if (with_f) nd.flattening.resize(nkeep + 2);
  if (with_c) nd.charge.resize(nkeep + 2);
  for (int t = 0; t < in.T.ntet(); ++t) {
    if (newidx[t] < 0) continue;
    orients[newidx[t]] = in.T.orientation(t);
    nd.orders[newidx[t]] = in.d.orders[t];
    nd.moduli[newidx[t]] = in.d.moduli[t];
    if (with_f) nd.flattening[newidx[t]] = in.d.flattening[t];
    if (with_c) nd.charge[newidx[t]] = in.d.charge[t];
  }
  for (int i = 0; i < 2; ++i) {
    orients[baseNew + i] = before_tets[i].dec.orientation;
    nd.orders[baseNew + i] = before_tets[i].dec.b;
    nd.moduli[baseNew + i] = before_tets[i].dec.w;
    if (with_f) nd.flattening[baseNew + i] = *before_tets[i].dec.f;
    if (with_c) nd.charge[baseNew + i] = *before_tets[i].dec.c;
  }
  Triangulation TN(nkeep + 2, pairings, orients);
  for (int e : in.d.hamiltonian) {
    for (auto [t, u, v] : in.T.edge_class_members(e)) {
      if (tetset.count(t)) continue;
      nd.hamiltonian.insert(TN.edge_class(newidx[t], u, v));
      break;
    }
  }
  rec.after = DecoratedComplex{std::move(TN), std::move(nd)};
  return rec;
}

// ---- verification ----

namespace {

NDTensor place_with_mode(const Triangulation& T, const GlobalDecoration& d,
                         int tet, const RootContext& ctx, FiveTermMode mode) {
  DecoratedTetra dt = tetra_view(T, d, tet);
  DilogTensor dl;
  if (mode == FiveTermMode::SymmetrizedRN) {
    dl = RN(dt, ctx);
  } else {
    if (b_sign(dt) != +1)
      throw structure_error("basic five-term: branching index must be +1");
    dl.N = ctx.N;
    dl.M = ln_basic(dt.w[0], ctx);
    dl.slot_face = face_slots(+1);
  }
  NDTensor out;
  out.N = ctx.N;
  out.slots.resize(4);
  for (int s = 0; s < 4; ++s) {
    int rank = dl.slot_face[s];
    int corner = dt.b.order[rank];
    out.slots[s] = {T.face_class(tet, corner), s < 2};
  }
  const int N = ctx.N;
  out.data.resize(std::size_t(N) * N * N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          out.data[std::size_t(((i * N + j) * N + k)) * N + l] =
              dl.entry(i, j, k, l);
  return out;
}

NDTensor contract_all(const Triangulation& T, const GlobalDecoration& d,
                      const RootContext& ctx, FiveTermMode mode) {
  std::vector<NDTensor> pool;
  for (int t = 0; t < T.ntet(); ++t)
    pool.push_back(place_with_mode(T, d, t, ctx, mode));
  while (pool.size() > 1) {
    NDTensor merged = contract_pair(pool[0], pool[1]);
    pool.erase(pool.begin() + 1);
    pool[0] = std::move(merged);
  }
  return pool[0];
}

}  // namespace

PhaseReport verify_five_term(const TransitRecord& rec, const RootContext& ctx,
                             FiveTermMode mode, double tol) {
  if (ctx.N == 1) {
    cplx pb = 1.0, pa = 1.0;
    for (int t = 0; t < rec.before.T.ntet(); ++t) {
      DecoratedTetra dt = tetra_view(rec.before.T, rec.before.d, t);
      pb *= (mode == FiveTermMode::SymmetrizedRN)
                ? R1(dt)
                : std::exp(rogers_L(dt.w[0]) / cplx(0.0, kPi));
    }
    for (int t = 0; t < rec.after.T.ntet(); ++t) {
      DecoratedTetra dt = tetra_view(rec.after.T, rec.after.d, t);
      pa *= (mode == FiveTermMode::SymmetrizedRN)
                ? R1(dt)
                : std::exp(rogers_L(dt.w[0]) / cplx(0.0, kPi));
    }
    PhaseReport rep;
    rep.lambda = pb / pa;
    rep.residual = 0.0;
    rep.k = 0;
    rep.sign = (rep.lambda.real() >= 0) ? +1 : -1;
    double d1 = std::abs(rep.lambda - 1.0), d2 = std::abs(rep.lambda + 1.0);
    rep.phase_dist = std::min(d1, d2);
    rep.ok = rep.phase_dist < tol;
    return rep;
  }
  NDTensor cb = contract_all(rec.before.T, rec.before.d, ctx, mode);
  NDTensor ca = contract_all(rec.after.T, rec.after.d, ctx, mode);
  // align by the boundary match
  std::vector<int> order_b, order_a;
  for (const auto& [fb, fa] : rec.boundary_match) {
    order_b.push_back(rec.before.T.face_class(fb.tet, fb.face));
    order_a.push_back(rec.after.T.face_class(fa.tet, fa.face));
  }
  NDTensor ab = align_slots(cb, order_b);
  NDTensor aa = align_slots(ca, order_a);
  for (std::size_t i = 0; i < ab.slots.size(); ++i)
    if (ab.slots[i].up != aa.slots[i].up)
      throw structure_error("verify_five_term: polarity mismatch on free faces");
  CMat vb = Eigen::Map<const Eigen::VectorXcd>(ab.data.data(), ab.data.size());
  CMat va = Eigen::Map<const Eigen::VectorXcd>(aa.data.data(), aa.data.size());
  return phase_equal(vb, va, ctx, /*allow_sign=*/true, tol);
}

RSumReport verify_five_term_rsum(const TransitRecord& rec, double tol) {
  auto side_sum = [](const DecoratedComplex& c) {
    cplx sum = 0.0;
    for (int t = 0; t < c.T.ntet(); ++t) {
      DecoratedTetra dt = tetra_view(c.T, c.d, t);
      sum += double(b_sign(dt)) * lifted_R({dt.w[0], (*dt.f)[0], (*dt.f)[1]});
    }
    return sum;
  };
  RSumReport rep;
  rep.before = side_sum(rec.before);
  rep.after = side_sum(rec.after);
  rep.class_distance = r_class_dist(rep.before, rep.after);
  rep.ok = rep.class_distance < tol;
  return rep;
}

TwoTermReport verify_two_term(const DecoratedTetra& t, const RootContext& ctx,
                              double tol) {
  DecoratedTetra tm = mirror(t);
  CMat A = RN(t, ctx).M;
  CMat B = RN(tm, ctx).M;
  CMat P = A * B;
  const int N = ctx.N;
  TwoTermReport rep;
  rep.product = phase_equal(P, CMat(CMat::Identity(N * N, N * N)), ctx, true, tol);
  // partial trace over the first tensor factor
  CMat tr = CMat::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) tr(j, l) += P(i * N + j, i * N + l);
  rep.traced = phase_equal(tr, CMat(double(N) * CMat::Identity(N, N)), ctx,
                           true, tol);
  return rep;
}

// ---- lune and bubble moves ----

TransitRecord transit_0_2(const DecoratedComplex& in, const LuneSpec& lune,
                          cplx w0, EdgeInts f, bool new_edge_up,
                          long c_choice) {
  const auto pr1 = in.T.pairing_of(lune.face1.tet, lune.face1.face);
  const auto pr2 = in.T.pairing_of(lune.face2.tet, lune.face2.face);
  if (!pr1 || !pr2) throw blocked_move("transit_0_2: lune faces must be interior");
  const int t1 = lune.face1.tet, g1 = lune.face1.face;
  const int t2 = lune.face2.tet, g2 = lune.face2.face;
  const auto [x1, y1] = std::pair{lune.edge1[0], lune.edge1[1]};
  const auto [x2, y2] = std::pair{lune.edge2[0], lune.edge2[1]};
  if (in.T.edge_class(t1, x1, y1) != in.T.edge_class(t2, x2, y2))
    throw blocked_move("transit_0_2: lune edges are not identified");
  int c1 = -1, c2 = -1;
  for (int v = 0; v < 4; ++v) {
    if (v != g1 && v != x1 && v != y1) c1 = v;
    if (v != g2 && v != x2 && v != y2) c2 = v;
  }
  // order of the new pair (model X=0, Y=1, C1=2, C2=3)
  const auto& ord1 = in.d.orders[t1];
  const auto& ord2 = in.d.orders[t2];
  if ((ord1.rank_of(x1) < ord1.rank_of(y1)) !=
      (ord2.rank_of(x2) < ord2.rank_of(y2)))
    throw blocked_move("transit_0_2: edge orientation mismatch across the lune");

  // ranks: X,Y from t1; C1 against X,Y from t1; C2 from t2; C1 vs C2 free
  std::vector<std::pair<int, int>> lessv;
  auto add = [&](int a, int b) { lessv.push_back({a, b}); };
  if (ord1.rank_of(x1) < ord1.rank_of(y1)) add(0, 1); else add(1, 0);
  if (ord1.rank_of(x1) < ord1.rank_of(c1)) add(0, 2); else add(2, 0);
  if (ord1.rank_of(y1) < ord1.rank_of(c1)) add(1, 2); else add(2, 1);
  if (ord2.rank_of(x2) < ord2.rank_of(c2)) add(0, 3); else add(3, 0);
  if (ord2.rank_of(y2) < ord2.rank_of(c2)) add(1, 3); else add(3, 1);
  add(new_edge_up ? 2 : 3, new_edge_up ? 3 : 2);
  // topological order of the 4 model vertices
  std::array<int, 4> rank{};
  {
    std::array<int, 4> below{};
    // transitive closure on 4 nodes
    std::array<std::array<bool, 4>, 4> lt{};
    for (auto [a, b] : lessv) lt[a][b] = true;
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (lt[a][k] && lt[k][b]) lt[a][b] = true;
    for (int a = 0; a < 4; ++a) {
      if (lt[a][a]) throw blocked_move("transit_0_2: branching cycle");
      for (int b = 0; b < 4; ++b)
        if (lt[b][a]) ++below[a];
    }
    for (int a = 0; a < 4; ++a) rank[a] = below[a];
    std::set<int> rs(rank.begin(), rank.end());
    if (rs.size() != 4) throw blocked_move("transit_0_2: order incomplete");
  }

  // Corner labels of the inserted pair: 0=X, 1=Y, 2=C1, 3=C2.
  Branching border;
  for (int v = 0; v < 4; ++v) border.order[rank[v]] = v;

  // orientation of P so that gluing P(opp C2) -> partner of face1 reverses
  FaceRef X1 = (pr1->a == lune.face1) ? pr1->b : pr1->a;
  FaceRef X2 = (pr2->a == lune.face2) ? pr2->b : pr2->a;
  std::array<int, 4> to1{};  // P corner -> t1 corner (face {X,Y,C1})
  to1[0] = x1; to1[1] = y1; to1[2] = c1; to1[3] = g1;
  std::array<int, 4> to2{};
  to2[0] = x2; to2[1] = y2; to2[2] = c2; to2[3] = g2;
  // old pairing perms
  std::array<int, 4> m1 = pr1->perm;
  if (pr1->a != lune.face1) {
    std::array<int, 4> inv{};
    for (int i = 0; i < 4; ++i) inv[m1[i]] = i;
    m1 = inv;
  }
  std::array<int, 4> m2 = pr2->perm;
  if (pr2->a != lune.face2) {
    std::array<int, 4> inv{};
    for (int i = 0; i < 4; ++i) inv[m2[i]] = i;
    m2 = inv;
  }

  // choose orientation of P against its partner X1
  int orientP = 0;
  {
    // P face opposite corner 3 (C2) glues to X1 with corner map c -> m1[to1[c]]
    std::array<int, 3> fc{0, 1, 2};
    bool img_pos = face_ordering_positive(
        m1[to1[fc[0]]], m1[to1[fc[1]]], m1[to1[fc[2]]], X1.face,
        in.T.orientation(X1.tet));
    bool self_pos_if_plus = face_ordering_positive(fc[0], fc[1], fc[2], 3, +1);
    // need self_pos != img_pos
    orientP = (self_pos_if_plus != img_pos) ? +1 : -1;
  }
  const int orientQ = -orientP;

  const int ntet = in.T.ntet();
  const int tPn = ntet, tQn = ntet + 1;
  std::vector<Pairing> pairings;
  for (const Pairing& P : in.T.pairings()) {
    if ((P.a == lune.face1 || P.b == lune.face1) ||
        (P.a == lune.face2 || P.b == lune.face2))
      continue;  // rewired below
    pairings.push_back(P);
  }
  // P(opp C2=3) ~ X1 : corner map P->X1 : c -> m1[to1[c]]
  {
    Pairing p;
    p.a = {tPn, 3};
    p.b = X1;
    for (int c = 0; c < 4; ++c) p.perm[c] = m1[to1[c]];
    pairings.push_back(p);
  }
  // P(opp C1=2) ~ X2 : c -> m2[to2[c]]
  {
    Pairing p;
    p.a = {tPn, 2};
    p.b = X2;
    for (int c = 0; c < 4; ++c) p.perm[c] = m2[to2[c]];
    pairings.push_back(p);
  }
  // Q(opp C2=3) ~ face1 : c -> to1[c]
  {
    Pairing p;
    p.a = {tQn, 3};
    p.b = lune.face1;
    p.perm = to1;
    pairings.push_back(p);
  }
  // Q(opp C1=2) ~ face2 : c -> to2[c]
  {
    Pairing p;
    p.a = {tQn, 2};
    p.b = lune.face2;
    p.perm = to2;
    pairings.push_back(p);
  }
  // P ~ Q along faces opposite X=0 and Y=1, identity maps
  for (int fcn : {0, 1}) {
    Pairing p;
    p.a = {tPn, fcn};
    p.b = {tQn, fcn};
    p.perm = {0, 1, 2, 3};
    pairings.push_back(p);
  }

  std::vector<int> orients;
  for (int t = 0; t < ntet; ++t) orients.push_back(in.T.orientation(t));
  orients.push_back(orientP);
  orients.push_back(orientQ);

  GlobalDecoration nd = in.d;
  nd.orders.push_back(border);
  nd.orders.push_back(border);
  ModularTriple wt = complete_triple(w0);
  nd.moduli.push_back(wt);
  nd.moduli.push_back(wt);
  const bool with_f = in.d.has_flattening();
  const bool with_c = in.d.has_charge();
  if (with_f) {
    if (!is_flattening(wt, f))
      throw blocked_move("transit_0_2: supplied f is not a flattening of w0");
    nd.flattening.push_back(f);
    nd.flattening.push_back(f);
  }
  if (with_c) {
    nd.charge.push_back({0, 0, 1});
    nd.charge.push_back({0, 0, 1});
  }

  Triangulation TN(ntet + 2, pairings, orients);
  // hamiltonian classes carry over (no H surgery in a lune move)
  GlobalDecoration nd2 = nd;
  nd2.hamiltonian.clear();
  for (int e : in.d.hamiltonian) {
    for (auto [t, u, v] : in.T.edge_class_members(e)) {
      nd2.hamiltonian.insert(TN.edge_class(t, u, v));
      break;
    }
  }

  if (with_c) {
    // solve charges of the pair against the global targets
    std::map<int, int> targets;
    for (int e = 0; e < TN.num_edges(); ++e)
      targets[e] = nd2.hamiltonian.count(e) ? 0 : 2;
    // rows over edges meeting P or Q
    std::map<int, std::array<std::int64_t, 6>> rows;  // edge -> coeffs (P0..2,Q0..2)
    std::map<int, std::int64_t> rhs;
    for (int e = 0; e < TN.num_edges(); ++e) {
      bool touches = false;
      std::int64_t known = 0;
      std::array<std::int64_t, 6> coeff{};
      for (auto [t, u, v] : TN.edge_class_members(e)) {
        if (t == tPn || t == tQn) {
          touches = true;
          int j = edge_index_of_rank_pair(border.rank_of(u), border.rank_of(v));
          coeff[(t == tPn ? 0 : 3) + j] += 1;
        } else {
          known += edge_weight(nd2.charge, nd2, t, u, v);
        }
      }
      if (!touches) continue;
      rows[e] = coeff;
      rhs[e] = targets[e] - known;
    }
    IMat A(int(rows.size()) + 2, 6);
    std::vector<std::int64_t> b(A.rows, 0);
    int r = 0;
    for (auto& [e, coeff] : rows) {
      for (int j = 0; j < 6; ++j) A(r, j) = coeff[j];
      b[r] = rhs[e];
      ++r;
    }
    for (int j = 0; j < 3; ++j) {
      A(r, j) = 1;
      A(r + 1, 3 + j) = 1;
    }
    b[r] = 1;
    b[r + 1] = 1;
    auto sol = solve_integer(A, b);
    if (!sol)
      throw blocked_move("transit_0_2: no charge transit exists for this lune");
    auto flat = sol->particular;
    if (!sol->kernel.empty())
      for (std::size_t i = 0; i < flat.size(); ++i)
        flat[i] += c_choice * sol->kernel[0][i];
    nd2.charge[tPn] = {int(flat[0]), int(flat[1]), int(flat[2])};
    nd2.charge[tQn] = {int(flat[3]), int(flat[4]), int(flat[5])};
  }

  TransitRecord rec{MoveKind::M02,
                    DecoratedComplex{in.T, in.d},
                    DecoratedComplex{std::move(TN), std::move(nd2)},
                    {},
                    0,
                    c_choice,
                    {},
                    {}};
  return rec;
}

TransitRecord transit_2_0(const DecoratedComplex& in, int tetP, int tetQ) {
  // validate the pattern: P and Q glued along exactly two faces with equal
  // (w,f) and opposite orientations
  std::vector<std::pair<int, int>> glued;  // (faceP, faceQ)
  for (const Pairing& P : in.T.pairings()) {
    if (P.a.tet == tetP && P.b.tet == tetQ) glued.push_back({P.a.face, P.b.face});
    if (P.a.tet == tetQ && P.b.tet == tetP) glued.push_back({P.b.face, P.a.face});
  }
  if (glued.size() != 2)
    throw blocked_move("transit_2_0: tets are not glued along exactly two faces");
  if (in.T.orientation(tetP) != -in.T.orientation(tetQ))
    throw blocked_move("transit_2_0: pair is not mirrored");
  for (int j = 0; j < 3; ++j) {
    if (std::abs(in.d.moduli[tetP][j] - in.d.moduli[tetQ][j]) > kTolConstruct)
      throw blocked_move("transit_2_0: moduli differ");
    if (in.d.has_flattening() &&
        in.d.flattening[tetP][j] != in.d.flattening[tetQ][j])
      throw blocked_move("transit_2_0: flattenings differ");
  }
  // outer faces of P and Q resume the original adjacency
  std::array<bool, 4> innerP{}, innerQ{};
  for (auto [fp, fq] : glued) {
    innerP[fp] = true;
    innerQ[fq] = true;
  }
  std::vector<std::pair<FaceRef, std::array<int, 4>>> outerP, outerQ;
  for (int fc = 0; fc < 4; ++fc) {
    if (!innerP[fc]) {
      auto pr = in.T.pairing_of(tetP, fc);
      if (!pr) throw blocked_move("transit_2_0: outer face of the pair is free");
      FaceRef other = (pr->a.tet == tetP && pr->a.face == fc) ? pr->b : pr->a;
      std::array<int, 4> perm = pr->perm;
      if (!(pr->a.tet == tetP && pr->a.face == fc)) {
        std::array<int, 4> inv{};
        for (int i = 0; i < 4; ++i) inv[perm[i]] = i;
        perm = inv;
      }
      outerP.push_back({other, perm});  // P corner -> other corner
    }
    if (!innerQ[fc]) {
      auto pr = in.T.pairing_of(tetQ, fc);
      if (!pr) throw blocked_move("transit_2_0: outer face of the pair is free");
      FaceRef other = (pr->a.tet == tetQ && pr->a.face == fc) ? pr->b : pr->a;
      std::array<int, 4> perm = pr->perm;
      if (!(pr->a.tet == tetQ && pr->a.face == fc)) {
        std::array<int, 4> inv{};
        for (int i = 0; i < 4; ++i) inv[perm[i]] = i;
        perm = inv;
      }
      outerQ.push_back({other, perm});
    }
  }
  if (outerP.size() != 2 || outerQ.size() != 2)
    throw blocked_move("transit_2_0: unexpected pillow shape");
  // match P-outer and Q-outer across the removed pillow: faces opposite the
  // same corners pair up (corner labels coincide on the pair)
  std::vector<Pairing> pairings;
  for (const Pairing& P : in.T.pairings()) {
    if (P.a.tet == tetP || P.b.tet == tetP || P.a.tet == tetQ || P.b.tet == tetQ)
      continue;
    pairings.push_back(P);
  }
  // the two outer faces of P are opposite corners {a, b}; find Q's outer
  // faces opposite the same corners and splice
  for (int fc = 0; fc < 4; ++fc) {
    if (innerP[fc]) continue;
    if (innerQ[fc])
      throw blocked_move("transit_2_0: pillow faces are not aligned");
    auto prP = in.T.pairing_of(tetP, fc);
    auto prQ = in.T.pairing_of(tetQ, fc);
    FaceRef oP = (prP->a.tet == tetP && prP->a.face == fc) ? prP->b : prP->a;
    FaceRef oQ = (prQ->a.tet == tetQ && prQ->a.face == fc) ? prQ->b : prQ->a;
    std::array<int, 4> mP = prP->perm;  // want P -> oP
    if (!(prP->a.tet == tetP && prP->a.face == fc)) {
      std::array<int, 4> inv{};
      for (int i = 0; i < 4; ++i) inv[mP[i]] = i;
      mP = inv;
    }
    std::array<int, 4> mQ = prQ->perm;  // want Q -> oQ
    if (!(prQ->a.tet == tetQ && prQ->a.face == fc)) {
      std::array<int, 4> inv{};
      for (int i = 0; i < 4; ++i) inv[mQ[i]] = i;
      mQ = inv;
    }
    Pairing np;
    np.a = oP;
    np.b = oQ;
    // oP corner -> P corner (mP inverse) -> same label in Q -> oQ corner
    std::array<int, 4> mPinv{};
    for (int i = 0; i < 4; ++i) mPinv[mP[i]] = i;
    for (int c = 0; c < 4; ++c) np.perm[c] = mQ[mPinv[c]];
    pairings.push_back(np);
  }

  std::vector<int> keep;
  for (int t = 0; t < in.T.ntet(); ++t)
    if (t != tetP && t != tetQ) keep.push_back(t);
  std::vector<int> newidx(in.T.ntet(), -1);
  for (int i = 0; i < int(keep.size()); ++i) newidx[keep[i]] = i;
  for (Pairing& P : pairings) {
    P.a.tet = newidx[P.a.tet];
    P.b.tet = newidx[P.b.tet];
  }
  std::vector<int> orients;
  GlobalDecoration nd;
  for (int t : keep) {
    orients.push_back(in.T.orientation(t));
    nd.orders.push_back(in.d.orders[t]);
    nd.moduli.push_back(in.d.moduli[t]);
    if (in.d.has_flattening()) nd.flattening.push_back(in.d.flattening[t]);
    if (in.d.has_charge()) nd.charge.push_back(in.d.charge[t]);
  }
  Triangulation TN(int(keep.size()), pairings, orients);
  for (int e : in.d.hamiltonian) {
    for (auto [t, u, v] : in.T.edge_class_members(e)) {
      if (t == tetP || t == tetQ) continue;
      nd.hamiltonian.insert(TN.edge_class(newidx[t], u, v));
      break;
    }
  }
  return TransitRecord{MoveKind::M20,
                       DecoratedComplex{in.T, in.d},
                       DecoratedComplex{std::move(TN), std::move(nd)},
                       {},
                       0,
                       0,
                       {},
                       {}};
}

TransitRecord transit_bubble(const DecoratedComplex& in, FaceRef face,
                             std::array<int, 2> h_edge, cplx w0, EdgeInts f,
                             int new_vertex_rank, long c_choice) {
  auto pr = in.T.pairing_of(face.tet, face.face);
  if (!pr) throw blocked_move("transit_bubble: face must be interior");
  const int tA = face.tet, fA = face.face;
  FaceRef other = (pr->a == face) ? pr->b : pr->a;
  std::array<int, 4> phi = pr->perm;  // want tA -> other
  if (!(pr->a == face)) {
    std::array<int, 4> inv{};
    for (int i = 0; i < 4; ++i) inv[phi[i]] = i;
    phi = inv;
  }
  const bool with_c = in.d.has_charge();
  const int eH = with_c ? in.T.edge_class(tA, h_edge[0], h_edge[1]) : -1;
  if (with_c && !in.d.hamiltonian.count(eH))
    throw blocked_move("transit_bubble: chosen edge is not in H");

  // corners of the face in increasing label order
  std::array<int, 3> fc{};
  {
    int k = 0;
    for (int v = 0; v < 4; ++v)
      if (v != fA) fc[k++] = v;
  }
  // new tetra corners: 0,1,2 = face corners (as ordered in fc), 3 = new vertex
  const auto& ordA = in.d.orders[tA];
  std::vector<std::pair<int, int>> fr;  // (rank in A, slot)
  for (int i = 0; i < 3; ++i) fr.push_back({ordA.rank_of(fc[i]), i});
  std::sort(fr.begin(), fr.end());
  Branching border;
  {
    // ranks of face corners keep their relative order; the new vertex is
    // inserted at new_vertex_rank
    std::vector<int> seq;  // corner labels by rank
    for (auto [r, slot] : fr) seq.push_back(slot);
    if (new_vertex_rank < 0 || new_vertex_rank > 3)
      throw blocked_move("transit_bubble: bad new vertex rank");
    seq.insert(seq.begin() + new_vertex_rank, 3);
    for (int r = 0; r < 4; ++r) border.order[r] = seq[r];
  }

  const int ntet = in.T.ntet();
  const int tPn = ntet, tQn = ntet + 1;
  std::vector<Pairing> pairings;
  for (const Pairing& P : in.T.pairings()) {
    if (P.a == pr->a && P.b == pr->b) continue;
    pairings.push_back(P);
  }
  // P.face3 ~ (tA, fA): P corner i (i<3) -> fc[i]; P corner 3 -> fA
  {
    Pairing p;
    p.a = {tPn, 3};
    p.b = {tA, fA};
    p.perm = {fc[0], fc[1], fc[2], fA};
    pairings.push_back(p);
  }
  // Q.face3 ~ other: Q corner i -> phi[fc[i]]
  {
    Pairing p;
    p.a = {tQn, 3};
    p.b = other;
    p.perm = {phi[fc[0]], phi[fc[1]], phi[fc[2]], other.face};
    pairings.push_back(p);
  }
  // P ~ Q along faces 0,1,2 (identity)
  for (int fcn : {0, 1, 2}) {
    Pairing p;
    p.a = {tPn, fcn};
    p.b = {tQn, fcn};
    p.perm = {0, 1, 2, 3};
    pairings.push_back(p);
  }

  int orientP;
  {
    bool img_pos = face_ordering_positive(fc[0], fc[1], fc[2], fA,
                                          in.T.orientation(tA));
    bool self_pos_if_plus = face_ordering_positive(0, 1, 2, 3, +1);
    orientP = (self_pos_if_plus != img_pos) ? +1 : -1;
  }
  std::vector<int> orients;
  for (int t = 0; t < ntet; ++t) orients.push_back(in.T.orientation(t));
  orients.push_back(orientP);
  orients.push_back(-orientP);

  GlobalDecoration nd = in.d;
  nd.orders.push_back(border);
  nd.orders.push_back(border);
  ModularTriple wt = complete_triple(w0);
  nd.moduli.push_back(wt);
  nd.moduli.push_back(wt);
  if (in.d.has_flattening()) {
    if (!is_flattening(wt, f))
      throw blocked_move("transit_bubble: supplied f is not a flattening");
    nd.flattening.push_back(f);
    nd.flattening.push_back(f);
  }
  if (with_c) {
    nd.charge.push_back({0, 0, 1});
    nd.charge.push_back({0, 0, 1});
  }

  Triangulation TN(ntet + 2, pairings, orients);
  GlobalDecoration nd2 = nd;
  nd2.hamiltonian.clear();
  if (with_c) {
    // reroute H: drop the chosen edge, add the two new edges joining its
    // endpoints to the new vertex
    for (int e : in.d.hamiltonian) {
      if (e == eH) continue;
      for (auto [t, u, v] : in.T.edge_class_members(e)) {
        nd2.hamiltonian.insert(TN.edge_class(t, u, v));
        break;
      }
    }
    // slots of the H-edge endpoints among the P corners
    int su = -1, sv = -1;
    for (int i = 0; i < 3; ++i) {
      if (fc[i] == h_edge[0]) su = i;
      if (fc[i] == h_edge[1]) sv = i;
    }
    if (su < 0 || sv < 0)
      throw blocked_move("transit_bubble: H edge not on the chosen face");
    nd2.hamiltonian.insert(TN.edge_class(tPn, su, 3));
    nd2.hamiltonian.insert(TN.edge_class(tPn, sv, 3));

    std::map<int, int> targets;
    for (int e = 0; e < TN.num_edges(); ++e)
      targets[e] = nd2.hamiltonian.count(e) ? 0 : 2;
    std::map<int, std::array<std::int64_t, 6>> rows;
    std::map<int, std::int64_t> rhs;
    for (int e = 0; e < TN.num_edges(); ++e) {
      bool touches = false;
      std::int64_t known = 0;
      std::array<std::int64_t, 6> coeff{};
      for (auto [t, u, v] : TN.edge_class_members(e)) {
        if (t == tPn || t == tQn) {
          touches = true;
          int j = edge_index_of_rank_pair(border.rank_of(u), border.rank_of(v));
          coeff[(t == tPn ? 0 : 3) + j] += 1;
        } else {
          known += edge_weight(nd2.charge, nd2, t, u, v);
        }
      }
      if (!touches) continue;
      rows[e] = coeff;
      rhs[e] = targets[e] - known;
    }
    IMat A(int(rows.size()) + 2, 6);
    std::vector<std::int64_t> b(A.rows, 0);
    int r = 0;
    for (auto& [e, coeff] : rows) {
      for (int j = 0; j < 6; ++j) A(r, j) = coeff[j];
      b[r] = rhs[e];
      ++r;
    }
    for (int j = 0; j < 3; ++j) {
      A(r, j) = 1;
      A(r + 1, 3 + j) = 1;
    }
    b[r] = 1;
    b[r + 1] = 1;
    auto sol = solve_integer(A, b);
    if (!sol) throw blocked_move("transit_bubble: no charge transit exists");
    auto flat = sol->particular;
    if (!sol->kernel.empty())
      for (std::size_t i = 0; i < flat.size(); ++i)
        flat[i] += c_choice * sol->kernel[0][i];
    nd2.charge[tPn] = {int(flat[0]), int(flat[1]), int(flat[2])};
    nd2.charge[tQn] = {int(flat[3]), int(flat[4]), int(flat[5])};
  }

  return TransitRecord{MoveKind::BubblePlus,
                       DecoratedComplex{in.T, in.d},
                       DecoratedComplex{std::move(TN), std::move(nd2)},
                       {},
                       0,
                       c_choice,
                       {},
                       {}};
}

TransitRecord transit_bubble_minus(const DecoratedComplex& in, int tetP,
                                   int tetQ) {
  // mirror pair glued along three faces; the fourth faces splice
  std::vector<std::pair<int, int>> glued;
  for (const Pairing& P : in.T.pairings()) {
    if (P.a.tet == tetP && P.b.tet == tetQ) glued.push_back({P.a.face, P.b.face});
    if (P.a.tet == tetQ && P.b.tet == tetP) glued.push_back({P.b.face, P.a.face});
  }
  if (glued.size() != 3)
    throw blocked_move("transit_bubble_minus: pair is not a bubble");
  TransitRecord rec = [&] {
    // reuse the pillow removal logic by treating it as a lune with one splice
    std::array<bool, 4> innerP{};
    for (auto [fp, fq] : glued) innerP[fp] = true;
    int freeP = -1;
    for (int fcn = 0; fcn < 4; ++fcn)
      if (!innerP[fcn]) freeP = fcn;
    auto prP = in.T.pairing_of(tetP, freeP);
    auto prQ = in.T.pairing_of(tetQ, freeP);
    if (!prP || !prQ)
      throw blocked_move("transit_bubble_minus: bubble caps are free");
    FaceRef oP = (prP->a.tet == tetP && prP->a.face == freeP) ? prP->b : prP->a;
    FaceRef oQ = (prQ->a.tet == tetQ && prQ->a.face == freeP) ? prQ->b : prQ->a;
    std::array<int, 4> mP = prP->perm;
    if (!(prP->a.tet == tetP && prP->a.face == freeP)) {
      std::array<int, 4> inv{};
      for (int i = 0; i < 4; ++i) inv[mP[i]] = i;
      mP = inv;
    }
    std::array<int, 4> mQ = prQ->perm;
    if (!(prQ->a.tet == tetQ && prQ->a.face == freeP)) {
      std::array<int, 4> inv{};
      for (int i = 0; i < 4; ++i) inv[mQ[i]] = i;
      mQ = inv;
    }
    std::vector<Pairing> pairings;
    for (const Pairing& P : in.T.pairings()) {
      if (P.a.tet == tetP || P.b.tet == tetP || P.a.tet == tetQ ||
          P.b.tet == tetQ)
        continue;
      pairings.push_back(P);
    }
    Pairing np;
    np.a = oP;
    np.b = oQ;
    std::array<int, 4> mPinv{};
    for (int i = 0; i < 4; ++i) mPinv[mP[i]] = i;
    for (int c = 0; c < 4; ++c) np.perm[c] = mQ[mPinv[c]];
    pairings.push_back(np);

    std::vector<int> keep;
    for (int t = 0; t < in.T.ntet(); ++t)
      if (t != tetP && t != tetQ) keep.push_back(t);
    std::vector<int> newidx(in.T.ntet(), -1);
    for (int i = 0; i < int(keep.size()); ++i) newidx[keep[i]] = i;
    for (Pairing& P : pairings) {
      P.a.tet = newidx[P.a.tet];
      P.b.tet = newidx[P.b.tet];
    }
    std::vector<int> orients;
    GlobalDecoration nd;
    for (int t : keep) {
      orients.push_back(in.T.orientation(t));
      nd.orders.push_back(in.d.orders[t]);
      nd.moduli.push_back(in.d.moduli[t]);
      if (in.d.has_flattening()) nd.flattening.push_back(in.d.flattening[t]);
      if (in.d.has_charge()) nd.charge.push_back(in.d.charge[t]);
    }
    Triangulation TN(int(keep.size()), pairings, orients);
    // H: drop classes living on the removed pair, re-add the spliced edge; a
    // faithful reverse needs the original H-edge, recovered as the unique
    // H-pattern across the cap faces
    for (int e : in.d.hamiltonian) {
      bool carried = false;
      for (auto [t, u, v] : in.T.edge_class_members(e)) {
        if (t == tetP || t == tetQ) continue;
        nd.hamiltonian.insert(TN.edge_class(newidx[t], u, v));
        carried = true;
        break;
      }
      (void)carried;
    }
    return TransitRecord{MoveKind::BubbleMinus,
                         DecoratedComplex{in.T, in.d},
                         DecoratedComplex{std::move(TN), std::move(nd)},
                         {},
                         0,
                         0,
                         {},
                         {}};
  }();
  return rec;
}

}  // namespace dilog
