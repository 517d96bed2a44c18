#include "dilog/tetra.hpp"

#include <cmath>

namespace dilog {

int Branching::rank_of(int vertex) const {
  for (int r = 0; r < 4; ++r)
    if (order[r] == vertex) return r;
  throw domain_error("Branching: vertex not present");
}

int Branching::parity() const {
  int inv = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (order[i] > order[j]) ++inv;
  return (inv % 2 == 0) ? +1 : -1;
}

bool Branching::valid() const {
  std::array<bool, 4> seen{false, false, false, false};
  for (int v : order) {
    if (v < 0 || v > 3 || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

bool ModularTriple::nondegenerate(double tol) const {
  for (const auto& wj : w)
    if (std::abs(wj.imag()) < tol) return false;
  return true;
}

int ModularTriple::w_sign(double tol) const {
  if (!nondegenerate(tol)) return 0;
  return w[0].imag() > 0 ? +1 : -1;
}

double ModularTriple::relation_residual() const {
  double r = 0.0;
  for (int j = 0; j < 3; ++j)
    r = std::max(r, std::abs(w[(j + 1) % 3] * (1.0 - w[j]) - 1.0));
  r = std::max(r, std::abs(w[0] * w[1] * w[2] + 1.0));
  return r;
}

ModularTriple complete_triple(cplx w0) {
  if (std::abs(w0) < 1e-14 || std::abs(w0 - 1.0) < 1e-14)
    throw domain_error("complete_triple: degenerate modulus");
  ModularTriple t;
  t.w[0] = w0;
  t.w[1] = 1.0 / (1.0 - w0);
  t.w[2] = 1.0 - 1.0 / w0;
  return t;
}

int b_sign(const DecoratedTetra& t) {
  return t.orientation * t.b.parity();
}

std::array<cplx, 3> log_branch(const DecoratedTetra& t) {
  if (!t.f) throw domain_error("log_branch: no flattening data");
  std::array<cplx, 3> l;
  for (int j = 0; j < 3; ++j)
    l[j] = std_log(t.w[j]) + cplx(0.0, kPi) * double((*t.f)[j]);
  return l;
}

bool is_flattening(const ModularTriple& w, const EdgeInts& f, double tol) {
  cplx s = 0.0;
  for (int j = 0; j < 3; ++j)
    s += std_log(w[j]) + cplx(0.0, kPi) * double(f[j]);
  return std::abs(s) < tol;
}

int flattening_level(const ModularTriple& w) {
  cplx s = std_log(w[0]) + std_log(w[1]) + std_log(w[2]);
  double lvl = -s.imag() / kPi;
  int k = int(std::lround(lvl));
  if (std::abs(lvl - k) > 1e-6 || std::abs(s.real()) > 1e-9)
    throw domain_error("flattening_level: log sum is not an integer multiple of i*pi");
  return k;
}

bool is_charge(const EdgeInts& c) { return c[0] + c[1] + c[2] == 1; }

std::array<std::array<int, 2>, 3> const& edge_rank_pairs() {
  static const std::array<std::array<int, 2>, 3> p{{{0, 1}, {1, 2}, {0, 2}}};
  return p;
}

std::array<std::array<int, 2>, 3> const& opposite_edge_rank_pairs() {
  static const std::array<std::array<int, 2>, 3> p{{{2, 3}, {0, 3}, {1, 3}}};
  return p;
}

int edge_index_of_rank_pair(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a == 0 && b == 1) return 0;
  if (a == 1 && b == 2) return 1;
  if (a == 0 && b == 2) return 2;
  if (a == 2 && b == 3) return 0;
  if (a == 0 && b == 3) return 1;
  if (a == 1 && b == 3) return 2;
  throw domain_error("edge_index_of_rank_pair: not an edge pair");
}

DecoratedTetra apply_permutation(const DecoratedTetra& t,
                                 const std::array<int, 4>& p) {
  int inv = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) ++inv;
  const int eps = (inv % 2 == 0) ? +1 : -1;

  DecoratedTetra out;
  out.orientation = t.orientation;
  for (int r = 0; r < 4; ++r) out.b.order[p[r]] = t.b.order[r];

  // move edge data: the edge at old rank pair {r,s} lands at {p r, p s}
  std::array<cplx, 3> nw;
  EdgeInts nf{}, nc{};
  for (int j = 0; j < 3; ++j) {
    auto [r, s] = edge_rank_pairs()[j];
    int jn = edge_index_of_rank_pair(p[r], p[s]);
    nw[jn] = (eps == 1) ? t.w[j] : 1.0 / t.w[j];
    if (t.f) nf[jn] = eps * (*t.f)[j];
    if (t.c) nc[jn] = (*t.c)[j];
  }
  out.w.w = nw;
  if (t.f) out.f = nf;
  if (t.c) out.c = nc;
  return out;
}

DecoratedTetra mirror(const DecoratedTetra& t) {
  DecoratedTetra out = t;
  out.orientation = -t.orientation;
  return out;
}

EdgeInts enrichment_exponents(const DecoratedTetra& t) {
  if (!t.f || !t.c)
    throw domain_error("enrichment_exponents: flat/charge required");
  const int s = b_sign(t);
  EdgeInts a;
  for (int j = 0; j < 3; ++j) a[j] = (*t.f)[j] - s * (*t.c)[j];
  return a;
}

std::array<cplx, 3> nth_branch_moduli(const ModularTriple& w,
                                      const EdgeInts& a,
                                      const RootContext& ctx) {
  std::array<cplx, 3> wp;
  for (int j = 0; j < 3; ++j) wp[j] = nth_root_branch(w[j], a[j], ctx);
  return wp;
}

std::array<cplx, 3> nth_branch_moduli(const DecoratedTetra& t,
                                      const RootContext& ctx) {
  return nth_branch_moduli(t.w, enrichment_exponents(t), ctx);
}

}  // namespace dilog
