#include "dilog/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace dilog {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  // compress into consecutive class ids; returns count
  int compress(std::vector<int>& cls) {
    std::map<int, int> remap;
    cls.resize(parent.size());
    for (int i = 0; i < int(parent.size()); ++i) {
      int r = find(i);
      auto it = remap.find(r);
      if (it == remap.end()) it = remap.emplace(r, int(remap.size())).first;
      cls[i] = it->second;
    }
    return int(remap.size());
  }
};

int perm_parity4(const std::array<int, 4>& p) {
  int inv = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 == 0 ? +1 : -1;
}

// the three corners of face `f` in increasing label order
std::array<int, 3> face_corners(int f) {
  std::array<int, 3> c{};
  int k = 0;
  for (int v = 0; v < 4; ++v)
    if (v != f) c[k++] = v;
  return c;
}

}  // namespace

int edge_slot_of(int u, int v) {
  if (u > v) std::swap(u, v);
  if (u == 0 && v == 1) return 0;
  if (u == 0 && v == 2) return 1;
  if (u == 0 && v == 3) return 2;
  if (u == 1 && v == 2) return 3;
  if (u == 1 && v == 3) return 4;
  if (u == 2 && v == 3) return 5;
  throw structure_error("edge_slot_of: bad corner pair");
}

std::array<int, 2> edge_slot_pair(int slot) {
  static const std::array<std::array<int, 2>, 6> p{
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  return p[slot];
}

bool face_ordering_positive(int a, int b, int c, int opposite, int tet_orient) {
  std::array<int, 4> perm{a, b, c, opposite};
  return perm_parity4(perm) * tet_orient == +1;
}

Triangulation::Triangulation(int ntet, std::vector<Pairing> pairings,
                             std::vector<int> orientations)
    : ntet_(ntet), pairings_(std::move(pairings)) {
  if (ntet <= 0) throw structure_error("Triangulation: no tetrahedra");
  orient_ = orientations.empty() ? std::vector<int>(ntet, +1)
                                 : std::move(orientations);
  if (int(orient_.size()) != ntet)
    throw structure_error("Triangulation: orientation count mismatch");

  pairing_index_.assign(ntet * 4, -1);
  for (int pi = 0; pi < int(pairings_.size()); ++pi) {
    const Pairing& P = pairings_[pi];
    for (const FaceRef& fr : {P.a, P.b}) {
      if (fr.tet < 0 || fr.tet >= ntet || fr.face < 0 || fr.face > 3)
        throw structure_error("Triangulation: bad face reference");
    }
    if (P.a == P.b) throw structure_error("Triangulation: face glued to itself");
    if (P.perm[P.a.face] != P.b.face)
      throw structure_error("Triangulation: pairing permutation does not map face to face");
    {
      std::array<int, 4> q = P.perm;
      std::sort(q.begin(), q.end());
      if (q != std::array<int, 4>{0, 1, 2, 3})
        throw structure_error("Triangulation: pairing permutation invalid");
    }
    for (const FaceRef& fr : {P.a, P.b}) {
      int idx = fr.tet * 4 + fr.face;
      if (pairing_index_[idx] != -1)
        throw structure_error("Triangulation: face paired twice");
      pairing_index_[idx] = pi;
    }
    // orientation reversal: a positively ordered triple of the first face
    // must map to a negatively ordered triple of the second
    auto fc = face_corners(P.a.face);
    std::array<int, 3> img{P.perm[fc[0]], P.perm[fc[1]], P.perm[fc[2]]};
    bool pos_a = face_ordering_positive(fc[0], fc[1], fc[2], P.a.face,
                                        orient_[P.a.tet]);
    bool pos_b = face_ordering_positive(img[0], img[1], img[2], P.b.face,
                                        orient_[P.b.tet]);
    if (pos_a == pos_b)
      throw structure_error("Triangulation: orientation-preserving gluing");
  }

  // face classes
  {
    UnionFind uf(ntet * 4);
    for (const Pairing& P : pairings_)
      uf.unite(P.a.tet * 4 + P.a.face, P.b.tet * 4 + P.b.face);
    nface_ = uf.compress(face_class_of_);
  }
  // edge classes
  {
    UnionFind uf(ntet * 6);
    for (const Pairing& P : pairings_) {
      auto fc = face_corners(P.a.face);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          int s0 = edge_slot_of(fc[i], fc[j]);
          int s1 = edge_slot_of(P.perm[fc[i]], P.perm[fc[j]]);
          uf.unite(P.a.tet * 6 + s0, P.b.tet * 6 + s1);
        }
    }
    nedge_ = uf.compress(edge_class_of_);
  }
  // vertex classes
  {
    UnionFind uf(ntet * 4);
    for (const Pairing& P : pairings_) {
      for (int v : face_corners(P.a.face))
        uf.unite(P.a.tet * 4 + v, P.b.tet * 4 + P.perm[v]);
    }
    nvert_ = uf.compress(vertex_class_of_);
  }
}

int Triangulation::face_class(int tet, int face) const {
  return face_class_of_[tet * 4 + face];
}

bool Triangulation::face_paired(int tet, int face) const {
  return pairing_index_[tet * 4 + face] != -1;
}

std::optional<Pairing> Triangulation::pairing_of(int tet, int face) const {
  int pi = pairing_index_[tet * 4 + face];
  if (pi < 0) return std::nullopt;
  return pairings_[pi];
}

std::vector<FaceRef> Triangulation::face_class_members(int cls) const {
  std::vector<FaceRef> out;
  for (int t = 0; t < ntet_; ++t)
    for (int f = 0; f < 4; ++f)
      if (face_class_of_[t * 4 + f] == cls) out.push_back({t, f});
  return out;
}

int Triangulation::edge_class(int tet, int u, int v) const {
  return edge_class_of_[tet * 6 + edge_slot_of(u, v)];
}

std::vector<std::array<int, 3>> Triangulation::edge_class_members(int cls) const {
  std::vector<std::array<int, 3>> out;
  for (int t = 0; t < ntet_; ++t)
    for (int s = 0; s < 6; ++s)
      if (edge_class_of_[t * 6 + s] == cls) {
        auto [u, v] = edge_slot_pair(s);
        out.push_back({t, u, v});
      }
  return out;
}

int Triangulation::vertex_class(int tet, int v) const {
  return vertex_class_of_[tet * 4 + v];
}

bool Triangulation::closed() const {
  for (int i = 0; i < ntet_ * 4; ++i)
    if (pairing_index_[i] == -1) return false;
  return true;
}

int Triangulation::link_euler_characteristic(int vertex_cls) const {
  // Corner triangles: (tet, v); corner-triangle sides live on faces of the
  // tetra containing v; corner-triangle vertices live on edges at v.
  // Sides are glued through the face pairings, likewise the vertices.
  std::vector<std::array<int, 2>> corners;  // (tet, v)
  std::map<std::array<int, 2>, int> corner_id;
  for (int t = 0; t < ntet_; ++t)
    for (int v = 0; v < 4; ++v)
      if (vertex_class_of_[t * 4 + v] == vertex_cls) {
        corner_id[{t, v}] = int(corners.size());
        corners.push_back({t, v});
      }
  const int F = int(corners.size());

  // side = (tet, v, face) with v not on face... v in face, side lies on face
  std::map<std::array<int, 3>, int> side_idx;
  int nside = 0;
  for (auto [t, v] : corners)
    for (int f = 0; f < 4; ++f)
      if (f != v) {
        if (!face_paired(t, f))
          throw structure_error("link_euler_characteristic: open star");
        side_idx[{t, v, f}] = nside++;
      }
  UnionFind ufs(nside);
  // corner vertex = (tet, v, other endpoint u) on edge {v,u}
  std::map<std::array<int, 3>, int> vert_idx;
  int nvert = 0;
  for (auto [t, v] : corners)
    for (int u = 0; u < 4; ++u)
      if (u != v) vert_idx[{t, v, u}] = nvert++;
  UnionFind ufv(nvert);

  for (const Pairing& P : pairings_) {
    for (int v : face_corners(P.a.face)) {
      if (vertex_class_of_[P.a.tet * 4 + v] != vertex_cls) continue;
      int w = P.perm[v];
      ufs.unite(side_idx.at({P.a.tet, v, P.a.face}),
                side_idx.at({P.b.tet, w, P.b.face}));
      for (int u : face_corners(P.a.face))
        if (u != v)
          ufv.unite(vert_idx.at({P.a.tet, v, u}),
                    vert_idx.at({P.b.tet, w, P.perm[u]}));
    }
  }
  std::vector<int> cls;
  int E = ufs.compress(cls);
  int V = ufv.compress(cls);
  return V - E + F;
}

int Triangulation::interior_vertex_count() const {
  int count = 0;
  for (int c = 0; c < nvert_; ++c)
    if (link_euler_characteristic(c) == 2) ++count;
  return count;
}

DecoratedTetra tetra_view(const Triangulation& T, const GlobalDecoration& d,
                          int tet) {
  DecoratedTetra t;
  t.b = d.orders[tet];
  t.w = d.moduli[tet];
  if (d.has_flattening()) t.f = d.flattening[tet];
  if (d.has_charge()) t.c = d.charge[tet];
  t.orientation = T.orientation(tet);
  return t;
}

cplx edge_modulus(const GlobalDecoration& d, int tet, int u, int v) {
  int j = edge_index_of_rank_pair(d.orders[tet].rank_of(u),
                                  d.orders[tet].rank_of(v));
  return d.moduli[tet][j];
}

int edge_weight(const std::vector<EdgeInts>& w, const GlobalDecoration& d,
                int tet, int u, int v) {
  int j = edge_index_of_rank_pair(d.orders[tet].rank_of(u),
                                  d.orders[tet].rank_of(v));
  return w[tet][j];
}

BranchingCheck check_global_branching(const Triangulation& T,
                                      const std::vector<Branching>& orders) {
  BranchingCheck out;
  std::set<int> bad;
  for (const Pairing& P : T.pairings()) {
    auto fc = face_corners(P.a.face);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        int u = fc[i], v = fc[j];
        bool dir_a = orders[P.a.tet].rank_of(u) < orders[P.a.tet].rank_of(v);
        bool dir_b = orders[P.b.tet].rank_of(P.perm[u]) <
                     orders[P.b.tet].rank_of(P.perm[v]);
        if (dir_a != dir_b) bad.insert(T.edge_class(P.a.tet, u, v));
      }
  }
  out.offending_edges.assign(bad.begin(), bad.end());
  out.ok = bad.empty();
  return out;
}

EdgeCompat check_edge_compatibility(const Triangulation& T,
                                    const GlobalDecoration& d) {
  EdgeCompat out;
  out.residual.assign(T.num_edges(), 0.0);
  out.log_sum.assign(T.num_edges(), 0.0);
  for (int e = 0; e < T.num_edges(); ++e) {
    cplx prod = 1.0, lsum = 0.0;
    for (auto [t, u, v] : T.edge_class_members(e)) {
      DecoratedTetra dt = tetra_view(T, d, t);
      int s = b_sign(dt);
      cplx w = edge_modulus(d, t, u, v);
      prod *= (s == 1) ? w : 1.0 / w;
      lsum += double(s) * std_log(w);
    }
    out.residual[e] = std::abs(prod - 1.0);
    out.log_sum[e] = lsum;
    out.max_residual = std::max(out.max_residual, out.residual[e]);
  }
  return out;
}

FlatteningCheck check_global_flattening(const Triangulation& T,
                                        const GlobalDecoration& d) {
  if (!d.has_flattening())
    throw structure_error("check_global_flattening: no flattening present");
  FlatteningCheck out;
  out.defect.assign(T.num_edges(), 0);
  for (int e = 0; e < T.num_edges(); ++e) {
    cplx sum = 0.0;
    for (auto [t, u, v] : T.edge_class_members(e)) {
      DecoratedTetra dt = tetra_view(T, d, t);
      int s = b_sign(dt);
      cplx w = edge_modulus(d, t, u, v);
      int f = edge_weight(d.flattening, d, t, u, v);
      sum += double(s) * (std_log(w) + cplx(0.0, kPi) * double(f));
    }
    double k = sum.imag() / kPi;
    int ki = int(std::lround(k));
    out.defect[e] = ki;
    out.max_deviation = std::max(
        out.max_deviation, std::hypot(sum.real(), (k - ki) * kPi));
    if (ki != 0) out.flattened = false;
  }
  if (out.max_deviation > kTolConstruct) out.flattened = false;
  return out;
}

ChargeCheck check_global_charge(const Triangulation& T,
                                const GlobalDecoration& d) {
  std::map<int, int> targets;
  for (int e = 0; e < T.num_edges(); ++e)
    targets[e] = d.hamiltonian.count(e) ? 0 : 2;
  return check_global_charge(T, d, targets);
}

ChargeCheck check_global_charge(const Triangulation& T,
                                const GlobalDecoration& d,
                                const std::map<int, int>& edge_targets) {
  if (!d.has_charge())
    throw structure_error("check_global_charge: no charge present");
  for (int t = 0; t < T.ntet(); ++t)
    if (!is_charge(d.charge[t]))
      throw structure_error("check_global_charge: tetra charge sum != 1");
  ChargeCheck out;
  out.defect.assign(T.num_edges(), 0);
  for (int e = 0; e < T.num_edges(); ++e) {
    int sum = 0;
    for (auto [t, u, v] : T.edge_class_members(e))
      sum += edge_weight(d.charge, d, t, u, v);
    out.defect[e] = sum - edge_targets.at(e);
    if (out.defect[e] != 0) out.charged = false;
  }
  return out;
}

int mod2_class_on_path(const Triangulation& T, const GlobalDecoration& d,
                       bool use_charge, const std::vector<DualStep>& path) {
  if (path.empty()) return 0;
  const auto& weights = use_charge ? d.charge : d.flattening;
  if (weights.empty()) throw structure_error("mod2_class_on_path: no weights");
  int total = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const DualStep& st = path[i];
    if (st.face_in == st.face_out)
      throw structure_error("mod2_class_on_path: back-tracking step");
    // the edge met inside the tetra is the one shared by the two faces
    std::array<int, 2> shared{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
      if (v != st.face_in && v != st.face_out) shared[k++] = v;
    total += edge_weight(weights, d, st.tet, shared[0], shared[1]);
    // connectivity with the next step
    const DualStep& nx = path[(i + 1) % path.size()];
    auto pr = T.pairing_of(st.tet, st.face_out);
    if (!pr) throw structure_error("mod2_class_on_path: exits a free face");
    FaceRef other = (pr->a == FaceRef{st.tet, st.face_out}) ? pr->b : pr->a;
    if (other.tet != nx.tet || other.face != nx.face_in)
      throw structure_error("mod2_class_on_path: path not connected");
  }
  return ((total % 2) + 2) % 2;
}

IntegerDecorationSystem flattening_system(const Triangulation& T,
                                          const GlobalDecoration& d) {
  // unknowns: 3 per tetra; rows: one per tetra (level) + one per edge class
  IntegerDecorationSystem sys;
  const int n = T.ntet() * 3;
  sys.A = IMat(T.ntet() + T.num_edges(), n);
  sys.rhs.assign(T.ntet() + T.num_edges(), 0);
  for (int t = 0; t < T.ntet(); ++t) {
    for (int j = 0; j < 3; ++j) sys.A(t, 3 * t + j) = 1;
    sys.rhs[t] = flattening_level(d.moduli[t]);
  }
  for (int e = 0; e < T.num_edges(); ++e) {
    const int row = T.ntet() + e;
    cplx logsum = 0.0;
    for (auto [t, u, v] : T.edge_class_members(e)) {
      DecoratedTetra dt = tetra_view(T, d, t);
      int s = b_sign(dt);
      int j = edge_index_of_rank_pair(d.orders[t].rank_of(u),
                                      d.orders[t].rank_of(v));
      sys.A(row, 3 * t + j) += s;
      logsum += double(s) * std_log(d.moduli[t][j]);
    }
    double k = -logsum.imag() / kPi;
    int ki = int(std::lround(k));
    if (std::abs(k - ki) > 1e-6 || std::abs(logsum.real()) > 1e-6)
      throw structure_error("flattening_system: edge log sum not in i*pi*Z");
    sys.rhs[row] = ki;
  }
  return sys;
}

IntegerDecorationSystem charge_system(const Triangulation& T,
                                      const GlobalDecoration& d,
                                      const std::map<int, int>& edge_targets) {
  IntegerDecorationSystem sys;
  const int n = T.ntet() * 3;
  sys.A = IMat(T.ntet() + T.num_edges(), n);
  sys.rhs.assign(T.ntet() + T.num_edges(), 0);
  for (int t = 0; t < T.ntet(); ++t) {
    for (int j = 0; j < 3; ++j) sys.A(t, 3 * t + j) = 1;
    sys.rhs[t] = 1;
  }
  for (int e = 0; e < T.num_edges(); ++e) {
    const int row = T.ntet() + e;
    for (auto [t, u, v] : T.edge_class_members(e)) {
      int j = edge_index_of_rank_pair(d.orders[t].rank_of(u),
                                      d.orders[t].rank_of(v));
      sys.A(row, 3 * t + j) += 1;
    }
    sys.rhs[row] = edge_targets.at(e);
  }
  return sys;
}

std::optional<IntSolution> solve_flattening(const Triangulation& T,
                                            const GlobalDecoration& d) {
  auto sys = flattening_system(T, d);
  return solve_integer(sys.A, sys.rhs);
}

std::optional<IntSolution> solve_charge(const Triangulation& T,
                                        const GlobalDecoration& d) {
  std::map<int, int> targets;
  for (int e = 0; e < T.num_edges(); ++e)
    targets[e] = d.hamiltonian.count(e) ? 0 : 2;
  auto sys = charge_system(T, d, targets);
  return solve_integer(sys.A, sys.rhs);
}

std::vector<EdgeInts> unpack_edge_ints(const std::vector<std::int64_t>& flat) {
  std::vector<EdgeInts> out(flat.size() / 3);
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = EdgeInts{int(flat[3 * t]), int(flat[3 * t + 1]), int(flat[3 * t + 2])};
  return out;
}

std::vector<std::int64_t> pack_edge_ints(const std::vector<EdgeInts>& v) {
  std::vector<std::int64_t> out;
  out.reserve(v.size() * 3);
  for (const auto& e : v) {
    out.push_back(e[0]);
    out.push_back(e[1]);
    out.push_back(e[2]);
  }
  return out;
}

std::vector<std::vector<Branching>> search_branchings(const Triangulation& T,
                                                      int max_results) {
  std::vector<std::vector<Branching>> results;
  std::vector<std::array<int, 4>> perms;
  {
    std::array<int, 4> p{0, 1, 2, 3};
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  std::vector<Branching> orders(T.ntet());
  // check edge-orientation agreement between tet `t` (assigned) and all
  // previously assigned neighbours
  auto consistent_up_to = [&](int t) {
    for (const Pairing& P : T.pairings()) {
      int ta = P.a.tet, tb = P.b.tet;
      if ((ta != t && tb != t) || ta > t || tb > t) continue;
      auto fc = face_corners(P.a.face);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          int u = fc[i], v = fc[j];
          bool da = orders[ta].rank_of(u) < orders[ta].rank_of(v);
          bool db = orders[tb].rank_of(P.perm[u]) < orders[tb].rank_of(P.perm[v]);
          if (da != db) return false;
        }
    }
    return true;
  };
  std::function<void(int)> rec = [&](int t) {
    if (int(results.size()) >= max_results) return;
    if (t == T.ntet()) {
      results.push_back(orders);
      return;
    }
    for (const auto& p : perms) {
      orders[t].order = p;
      if (consistent_up_to(t)) rec(t + 1);
      if (int(results.size()) >= max_results) return;
    }
  };
  rec(0);
  return results;
}

cplx mobius_apply_zero(const Mat2& M) {
  if (std::abs(M[3]) < 1e-14)
    throw domain_error("mobius_apply_zero: image of 0 is infinite");
  return M[1] / M[3];
}

Mat2 mat2_mul(const Mat2& A, const Mat2& B) {
  return Mat2{A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
              A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
}

cplx mat2_det(const Mat2& M) { return M[0] * M[3] - M[1] * M[2]; }

Mat2 mat2_inverse(const Mat2& M) {
  cplx det = mat2_det(M);
  if (std::abs(det) < 1e-14) throw domain_error("mat2_inverse: singular");
  return Mat2{M[3] / det, -M[1] / det, -M[2] / det, M[0] / det};
}

Mat2 psl2_canonical(const Mat2& M) {
  for (const cplx& e : M) {
    if (std::abs(e) > 1e-14) {
      double a = std::arg(e);
      if (a > kPi / 2 || a <= -kPi / 2) {
        return Mat2{-M[0], -M[1], -M[2], -M[3]};
      }
      return M;
    }
  }
  throw domain_error("psl2_canonical: zero matrix");
}

CocycleDecoration coboundary_cocycle(const Triangulation& T,
                                     const std::vector<Mat2>& vertex_values) {
  if (int(vertex_values.size()) != T.num_vertices())
    throw structure_error("coboundary_cocycle: vertex value count mismatch");
  CocycleDecoration z;
  z.z.resize(T.ntet());
  for (int t = 0; t < T.ntet(); ++t)
    for (int s = 0; s < 6; ++s) {
      auto [u, v] = edge_slot_pair(s);
      const Mat2& gu = vertex_values[T.vertex_class(t, u)];
      const Mat2& gv = vertex_values[T.vertex_class(t, v)];
      z.z[t][s] = mat2_mul(mat2_inverse(gu), gv);
    }
  return z;
}

namespace {

// value on the oriented edge u -> v of tet t
Mat2 cocycle_value(const CocycleDecoration& z, int t, int u, int v) {
  const Mat2& m = z.z[t][edge_slot_of(u, v)];
  return (u < v) ? m : mat2_inverse(m);
}

double psl2_dist(const Mat2& A, const Mat2& B) {
  double dp = 0.0, dm = 0.0;
  for (int i = 0; i < 4; ++i) {
    dp = std::max(dp, std::abs(A[i] - B[i]));
    dm = std::max(dm, std::abs(A[i] + B[i]));
  }
  return std::min(dp, dm);
}

}  // namespace

double cocycle_residual(const Triangulation& T, const CocycleDecoration& z) {
  double worst = 0.0;
  // face relations: for each face (t, f) with corners a < b < c:
  // z(a->b) z(b->c) = z(a->c)
  for (int t = 0; t < T.ntet(); ++t)
    for (int f = 0; f < 4; ++f) {
      auto fc = face_corners(f);
      Mat2 lhs = mat2_mul(cocycle_value(z, t, fc[0], fc[1]),
                          cocycle_value(z, t, fc[1], fc[2]));
      worst = std::max(worst, psl2_dist(lhs, cocycle_value(z, t, fc[0], fc[2])));
    }
  // pairing consistency
  for (const Pairing& P : T.pairings()) {
    auto fc = face_corners(P.a.face);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        Mat2 a = cocycle_value(z, P.a.tet, fc[i], fc[j]);
        Mat2 b = cocycle_value(z, P.b.tet, P.perm[fc[i]], P.perm[fc[j]]);
        worst = std::max(worst, psl2_dist(a, b));
      }
  }
  return worst;
}

ModularTriple idealize(const Triangulation& T, const CocycleDecoration& z,
                       const std::vector<Branching>& orders, int tet) {
  const Branching& b = orders[tet];
  // corners at ranks 0..3
  std::array<int, 4> v{b.order[0], b.order[1], b.order[2], b.order[3]};
  Mat2 z0 = cocycle_value(z, tet, v[0], v[1]);
  Mat2 z1 = cocycle_value(z, tet, v[1], v[2]);
  Mat2 z0p = cocycle_value(z, tet, v[2], v[3]);
  cplx u0 = 0.0;
  cplx u1 = mobius_apply_zero(z0);
  cplx u2 = mobius_apply_zero(mat2_mul(z0, z1));
  cplx u3 = mobius_apply_zero(mat2_mul(mat2_mul(z0, z1), z0p));
  const double tol = 1e-12;
  std::array<cplx, 4> u{u0, u1, u2, u3};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::abs(u[i] - u[j]) < tol)
        throw domain_error("idealize: coincident ideal points");
  cplx w0 = (u2 - u1) * (u3 - u0) / ((u2 - u0) * (u3 - u1));
  return complete_triple(w0);
}

GlobalDecoration idealize_all(const Triangulation& T,
                              const CocycleDecoration& z,
                              const std::vector<Branching>& orders) {
  GlobalDecoration d;
  d.orders = orders;
  d.moduli.resize(T.ntet());
  for (int t = 0; t < T.ntet(); ++t) d.moduli[t] = idealize(T, z, orders, t);
  return d;
}

}  // namespace dilog
