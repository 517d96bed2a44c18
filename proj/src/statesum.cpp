#include "dilog/statesum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dilog {

NDTensor NDTensor::scalar(int N, cplx v) {
  NDTensor t;
  t.N = N;
  t.data = {v};
  return t;
}

NDTensor place_tetra(const Triangulation& T, const GlobalDecoration& d,
                     int tet, const RootContext& ctx) {
  DecoratedTetra dt = tetra_view(T, d, tet);
  DilogTensor dl = RN(dt, ctx);
  NDTensor out;
  out.N = ctx.N;
  if (ctx.N == 1) {
    out.data = {dl.M(0, 0)};
    return out;
  }
  out.slots.resize(4);
  for (int s = 0; s < 4; ++s) {
    int rank = dl.slot_face[s];
    int corner = dt.b.order[rank];  // face named by its opposite corner
    out.slots[s] = {T.face_class(tet, corner), s < 2};
  }
  // repeated face classes inside one tetra (self-gluings through other
  // tetra are fine; a face class can appear twice on one tetra only if two
  // of its faces are identified with each other, which pairings forbid for
  // a single face but may happen for distinct faces of the same tet)
  out.data.resize(std::size_t(ctx.N) * ctx.N * ctx.N * ctx.N);
  const int N = ctx.N;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
          out.data[std::size_t(((i * N + j) * N + k)) * N + l] =
              dl.entry(i, j, k, l);
  return out;
}

namespace {

std::size_t pow_size(int N, std::size_t k) {
  std::size_t s = 1;
  while (k--) s *= std::size_t(N);
  return s;
}

}  // namespace

// Contract face classes appearing twice inside one tensor (a tetra or an
// intermediate whose two sides of a face both ended up in the operand).
static NDTensor self_trace(const NDTensor& A) {
  const int N = A.N;
  int sa = -1, sb = -1;
  for (int i = 0; i < int(A.slots.size()) && sa < 0; ++i)
    for (int j = i + 1; j < int(A.slots.size()); ++j)
      if (A.slots[i].face_cls == A.slots[j].face_cls) {
        if (A.slots[i].up == A.slots[j].up)
          throw structure_error("self_trace: polarity clash on a shared face");
        sa = i;
        sb = j;
        break;
      }
  if (sa < 0) return A;
  NDTensor out;
  out.N = N;
  std::vector<int> keep;
  for (int i = 0; i < int(A.slots.size()); ++i)
    if (i != sa && i != sb) {
      keep.push_back(i);
      out.slots.push_back(A.slots[i]);
    }
  const std::size_t n = A.slots.size();
  std::vector<std::size_t> str(n, 1);
  for (int i = int(n) - 2; i >= 0; --i) str[i] = str[i + 1] * N;
  out.data.assign(pow_size(N, keep.size()), cplx(0.0));
  std::vector<int> st(keep.size(), 0);
  std::size_t out_idx = 0;
  while (true) {
    std::vector<cplx> terms;
    terms.reserve(N);
    for (int q = 0; q < N; ++q) {
      std::size_t idx = (str[sa] + str[sb]) * std::size_t(q);
      for (std::size_t r = 0; r < keep.size(); ++r)
        idx += str[keep[r]] * st[r];
      terms.push_back(A.data[idx]);
    }
    out.data[out_idx] = pairwise_sum(std::move(terms));
    if (keep.empty()) break;
    int s = int(keep.size()) - 1;
    for (; s >= 0; --s) {
      if (++st[s] < N) break;
      st[s] = 0;
    }
    if (s < 0) break;
    out_idx = 0;
    for (std::size_t q = 0; q < keep.size(); ++q)
      out_idx = out_idx * N + st[q];
  }
  return self_trace(out);
}

NDTensor contract_pair(const NDTensor& A, const NDTensor& B) {
  if (A.N != B.N) throw structure_error("contract_pair: rank mismatch");
  const int N = A.N;
  // find shared classes
  std::vector<int> sharedA, sharedB;
  for (int ia = 0; ia < int(A.slots.size()); ++ia)
    for (int ib = 0; ib < int(B.slots.size()); ++ib)
      if (A.slots[ia].face_cls == B.slots[ib].face_cls) {
        if (A.slots[ia].up == B.slots[ib].up)
          throw structure_error("contract_pair: polarity clash on a shared face");
        sharedA.push_back(ia);
        sharedB.push_back(ib);
      }
  std::vector<int> freeA, freeB;
  for (int ia = 0; ia < int(A.slots.size()); ++ia)
    if (std::find(sharedA.begin(), sharedA.end(), ia) == sharedA.end())
      freeA.push_back(ia);
  for (int ib = 0; ib < int(B.slots.size()); ++ib)
    if (std::find(sharedB.begin(), sharedB.end(), ib) == sharedB.end())
      freeB.push_back(ib);

  NDTensor out;
  out.N = N;
  for (int ia : freeA) out.slots.push_back(A.slots[ia]);
  for (int ib : freeB) out.slots.push_back(B.slots[ib]);
  out.data.assign(pow_size(N, out.slots.size()), cplx(0.0));

  const std::size_t nA = A.slots.size(), nB = B.slots.size();
  std::vector<int> stA(nA), stB(nB);
  // strides (row-major)
  std::vector<std::size_t> strA(nA, 1), strB(nB, 1);
  for (int i = int(nA) - 2; i >= 0; --i) strA[i] = strA[i + 1] * N;
  for (int i = int(nB) - 2; i >= 0; --i) strB[i] = strB[i + 1] * N;

  const std::size_t nshared = sharedA.size();
  const std::size_t nfreeA = freeA.size(), nfreeB = freeB.size();
  std::vector<int> st_free(nfreeA + nfreeB, 0), st_shared(nshared, 0);
  std::size_t out_idx = 0;
  while (true) {
    // accumulate over shared states with a pairwise tree for determinism
    std::vector<cplx> terms;
    terms.reserve(pow_size(N, nshared));
    std::fill(st_shared.begin(), st_shared.end(), 0);
    while (true) {
      std::size_t ia = 0, ib = 0;
      for (std::size_t s = 0; s < nfreeA; ++s)
        ia += strA[freeA[s]] * st_free[s];
      for (std::size_t s = 0; s < nfreeB; ++s)
        ib += strB[freeB[s]] * st_free[nfreeA + s];
      for (std::size_t s = 0; s < nshared; ++s) {
        ia += strA[sharedA[s]] * st_shared[s];
        ib += strB[sharedB[s]] * st_shared[s];
      }
      terms.push_back(A.data[ia] * B.data[ib]);
      // increment shared state
      std::size_t s = 0;
      for (; s < nshared; ++s) {
        if (++st_shared[s] < N) break;
        st_shared[s] = 0;
      }
      if (s == nshared) break;
    }
    out.data[out_idx] = pairwise_sum(std::move(terms));
    // increment free state (row-major: last slot fastest)
    if (out.slots.empty()) break;
    int s = int(out.slots.size()) - 1;
    for (; s >= 0; --s) {
      if (++st_free[s] < N) break;
      st_free[s] = 0;
    }
    if (s < 0) break;
    // recompute out_idx
    out_idx = 0;
    for (std::size_t q = 0; q < out.slots.size(); ++q)
      out_idx = out_idx * N + st_free[q];
    continue;
  }
  return out;
}

NDTensor align_slots(const NDTensor& A, const std::vector<int>& face_order) {
  if (face_order.size() != A.slots.size())
    throw structure_error("align_slots: slot count mismatch");
  std::vector<int> perm;  // perm[new] = old
  for (int cls : face_order) {
    int found = -1;
    for (int i = 0; i < int(A.slots.size()); ++i)
      if (A.slots[i].face_cls == cls) found = i;
    if (found < 0) throw structure_error("align_slots: class not present");
    perm.push_back(found);
  }
  NDTensor out;
  out.N = A.N;
  for (int p : perm) out.slots.push_back(A.slots[p]);
  out.data.assign(A.data.size(), cplx(0.0));
  const int N = A.N;
  const std::size_t n = A.slots.size();
  std::vector<std::size_t> str(n, 1);
  for (int i = int(n) - 2; i >= 0; --i) str[i] = str[i + 1] * N;
  std::vector<int> st(n, 0);
  std::size_t idx_new = 0;
  while (true) {
    std::size_t idx_old = 0;
    for (std::size_t q = 0; q < n; ++q) idx_old += str[perm[q]] * st[q];
    out.data[idx_new] = A.data[idx_old];
    int s = int(n) - 1;
    for (; s >= 0; --s) {
      if (++st[s] < N) break;
      st[s] = 0;
    }
    if (s < 0) break;
    idx_new = 0;
    for (std::size_t q = 0; q < n; ++q) idx_new = idx_new * N + st[q];
  }
  return out;
}

namespace {

NDTensor contract_brute(const Triangulation& T, const GlobalDecoration& d,
                        const RootContext& ctx) {
  const int N = ctx.N;
  // face classes: interior iff paired
  std::vector<bool> interior(T.num_faces(), false);
  for (const Pairing& P : T.pairings())
    interior[T.face_class(P.a.tet, P.a.face)] = true;
  std::vector<int> free_cls;
  for (int c = 0; c < T.num_faces(); ++c)
    if (!interior[c]) free_cls.push_back(c);

  std::vector<NDTensor> tens;
  for (int t = 0; t < T.ntet(); ++t) tens.push_back(place_tetra(T, d, t, ctx));

  NDTensor out;
  out.N = N;
  for (int c : free_cls) {
    // polarity of a free class comes from its unique side
    bool up = true;
    for (const auto& tn : tens)
      for (const auto& sl : tn.slots)
        if (sl.face_cls == c) up = sl.up;
    out.slots.push_back({c, up});
  }
  out.data.assign(pow_size(N, out.slots.size()), cplx(0.0));

  std::vector<int> state(T.num_faces(), 0);
  std::vector<int> free_state(free_cls.size(), 0);
  std::size_t out_idx = 0;
  while (true) {
    // iterate interior states for this free assignment
    for (std::size_t q = 0; q < free_cls.size(); ++q)
      state[free_cls[q]] = free_state[q];
    std::vector<int> int_cls;
    for (int c = 0; c < T.num_faces(); ++c)
      if (interior[c]) int_cls.push_back(c);
    std::vector<int> ist(int_cls.size(), 0);
    std::vector<cplx> terms;
    while (true) {
      for (std::size_t q = 0; q < int_cls.size(); ++q)
        state[int_cls[q]] = ist[q];
      cplx prod = 1.0;
      for (const auto& tn : tens) {
        if (tn.slots.empty()) {
          prod *= tn.data[0];
          continue;
        }
        std::size_t idx = 0;
        for (const auto& sl : tn.slots) idx = idx * N + state[sl.face_cls];
        prod *= tn.data[idx];
      }
      terms.push_back(prod);
      std::size_t s = 0;
      for (; s < int_cls.size(); ++s) {
        if (++ist[s] < N) break;
        ist[s] = 0;
      }
      if (s == int_cls.size()) break;
    }
    out.data[out_idx] = pairwise_sum(std::move(terms));
    if (out.slots.empty()) break;
    int s = int(out.slots.size()) - 1;
    for (; s >= 0; --s) {
      if (++free_state[s] < N) break;
      free_state[s] = 0;
    }
    if (s < 0) break;
    out_idx = 0;
    for (std::size_t q = 0; q < free_cls.size(); ++q)
      out_idx = out_idx * N + free_state[q];
  }
  return out;
}

NDTensor contract_greedy(const Triangulation& T, const GlobalDecoration& d,
                         const RootContext& ctx) {
  std::vector<NDTensor> pool;
  for (int t = 0; t < T.ntet(); ++t)
    pool.push_back(self_trace(place_tetra(T, d, t, ctx)));
  if (pool.size() == 1) return pool[0];
  while (pool.size() > 1) {
    // choose the pair minimizing the resulting slot count (then first)
    int bi = -1, bj = -1;
    std::size_t best = SIZE_MAX;
    for (int i = 0; i < int(pool.size()); ++i)
      for (int j = i + 1; j < int(pool.size()); ++j) {
        int shared = 0;
        for (const auto& sa : pool[i].slots)
          for (const auto& sb : pool[j].slots)
            if (sa.face_cls == sb.face_cls) ++shared;
        if (shared == 0) continue;
        std::size_t result =
            pool[i].slots.size() + pool[j].slots.size() - 2 * std::size_t(shared);
        if (result < best) {
          best = result;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) {
      // disconnected: multiply scalar-wise through an empty contraction
      bi = 0;
      bj = 1;
    }
    NDTensor merged = self_trace(contract_pair(pool[bi], pool[bj]));
    pool.erase(pool.begin() + bj);
    pool[bi] = std::move(merged);
  }
  return pool[0];
}

}  // namespace

NDTensor contract(const Triangulation& T, const GlobalDecoration& d,
                  const RootContext& ctx, PlanMode mode) {
  if (ctx.N == 1) {
    // product of scalars
    cplx prod = 1.0;
    for (int t = 0; t < T.ntet(); ++t) {
      DecoratedTetra dt = tetra_view(T, d, t);
      prod *= R1(dt);
    }
    return NDTensor::scalar(1, prod);
  }
  return mode == PlanMode::BruteForce ? contract_brute(T, d, ctx)
                                      : contract_greedy(T, d, ctx);
}

cplx canonical_sign(cplx v) {
  if (v.real() < 0.0) return -v;
  if (v.real() == 0.0 && v.imag() < 0.0) return -v;
  return v;
}

H1Result H1(const Triangulation& T, const GlobalDecoration& d,
            bool check_decoration) {
  if (!d.has_flattening()) throw structure_error("H1: flattening required");
  if (check_decoration) {
    auto ec = check_edge_compatibility(T, d);
    if (ec.max_residual > kTolConstruct)
      throw structure_error("H1: edge compatibility fails");
    auto fc = check_global_flattening(T, d);
    if (!fc.flattened) throw structure_error("H1: not a global flattening");
  }
  H1Result out;
  cplx rsum = 0.0;
  cplx prod = 1.0;
  for (int t = 0; t < T.ntet(); ++t) {
    DecoratedTetra dt = tetra_view(T, d, t);
    const int s = b_sign(dt);
    rsum += double(s) * lifted_R({dt.w[0], (*dt.f)[0], (*dt.f)[1]});
    prod *= R1(dt);
  }
  out.r_sum = rsum;
  out.volume = rsum.imag();
  double cs = std::remainder(rsum.real(), kPiSq);
  out.cs = cs;
  out.value = canonical_sign(prod);
  return out;
}

HNResult HN(const Triangulation& T, const GlobalDecoration& d,
            const RootContext& ctx, PlanMode mode, bool check_decoration) {
  if (!T.closed()) throw structure_error("HN: free faces remain");
  HNResult out;
  out.N = ctx.N;
  auto ec = check_edge_compatibility(T, d);
  out.edge_residual = ec.max_residual;
  if (d.has_flattening()) {
    auto fc = check_global_flattening(T, d);
    for (int v : fc.defect) out.flattening_defect = std::max(out.flattening_defect, std::abs(v));
    if (check_decoration && !fc.flattened)
      throw structure_error("HN: not a global flattening");
  } else {
    throw structure_error("HN: flattening required");
  }
  if (ctx.N > 1) {
    if (!d.has_charge()) throw structure_error("HN: charge required for N>1");
    auto cc = check_global_charge(T, d);
    for (int v : cc.defect) out.charge_defect = std::max(out.charge_defect, std::abs(v));
    if (check_decoration && !cc.charged)
      throw structure_error("HN: not a global charge");
  }
  if (check_decoration && out.edge_residual > kTolConstruct)
    throw structure_error("HN: edge compatibility fails");

  NDTensor res = contract(T, d, ctx, mode);
  if (!res.slots.empty()) throw structure_error("HN: contraction left free slots");
  out.interior_vertices = T.interior_vertex_count();
  double scale = std::pow(double(ctx.N), -double(out.interior_vertices));
  out.value = scale * res.data[0];
  return out;
}

std::vector<ProbeRow> asymptotics_probe(const Triangulation& T,
                                        const GlobalDecoration& d,
                                        const std::vector<int>& Ns) {
  std::vector<ProbeRow> rows;
  for (int n : Ns) {
    RootContext ctx(n);
    ProbeRow row;
    row.N = n;
    if (n == 1) {
      row.value = H1(T, d, false).value;
    } else {
      row.value = HN(T, d, ctx, PlanMode::PairwiseGreedy, false).value;
    }
    row.abs_value = std::abs(row.value);
    row.log_abs_scaled = row.abs_value > 0 ? kPi / double(n) * std::log(row.abs_value)
                                           : -std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dilog
