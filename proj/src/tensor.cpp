#include "dilog/tensor.hpp"

#include <cmath>

namespace dilog {

namespace {

inline int dmod(int n, int N) {
  int r = n % N;
  return r < 0 ? r + N : r;
}

// N-periodic Kronecker delta
inline bool delta(int n, int N) { return dmod(n, N) == 0; }

}  // namespace

std::array<int, 4> face_slots(int bs) {
  // slots are (out1, out2, in1, in2); face r is the one opposite the vertex
  // of rank r. The inputs sit on the faces where boundary and branching
  // orientations agree.
  if (bs == +1) return {2, 0, 3, 1};
  return {3, 1, 2, 0};
}

CMat ln_pair(cplx uP, cplx vP, const RootContext& ctx) {
  const int N = ctx.N;
  const int m = ctx.m;
  CMat M = CMat::Zero(N * N, N * N);
  const cplx hu = h_function(uP, ctx);
  // rows (i,j), cols (k,l); nonzero only when i + j == l (mod N)
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const int l = dmod(i + j, N);
      for (int k = 0; k < N; ++k) {
        cplx val = hu * ctx.zeta_pow(long(k) * j + long(m + 1) * k * k) *
                   omega_unchecked(uP, vP, i - k, ctx);
        M(i * N + j, k * N + l) = val;
      }
    }
  return M;
}

CMat ln_basic(cplx u, const RootContext& ctx) {
  if (std::abs(u) < 1e-14 || std::abs(u - 1.0) < 1e-14)
    throw domain_error("ln_basic: modulus must avoid 0 and 1");
  cplx uP = nth_root_branch(u, 0, ctx);
  cplx vP = nth_root_branch(1.0 - u, 0, ctx);
  return ln_pair(uP, vP, ctx);
}

CMat ln_lifted(const LogPoint& pt, const RootContext& ctx) {
  cplx uP = nth_root_branch(pt.x, pt.p, ctx);
  cplx vP = nth_root_branch(1.0 - pt.x, -pt.q, ctx);
  return ln_pair(uP, vP, ctx);
}

CMat ln_inverse_pair(cplx uP, cplx vP, const RootContext& ctx) {
  const int N = ctx.N;
  const int m = ctx.m;
  CMat M = CMat::Zero(N * N, N * N);
  const cplx braket =
      (1.0 - cpow_int(uP, N)) / (1.0 - uP) / double(N);  // [u']
  const cplx pre = braket * g_one(ctx) / g_function(uP, ctx);
  const cplx uPz = uP / ctx.zeta;
  // rows (i,j), cols (k,l); nonzero only when k + l == j (mod N)
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) {
        const int j = dmod(k + l, N);
        cplx val = pre * ctx.zeta_pow(-long(i) * l - long(m + 1) * i * i) /
                   omega_unchecked(uPz, vP, k - i, ctx);
        M(i * N + j, k * N + l) = val;
      }
  return M;
}

cplx R1(const DecoratedTetra& t) {
  if (!t.f) throw domain_error("R1: flattening required");
  LogPoint pt{t.w[0], (*t.f)[0], (*t.f)[1]};
  cplx r = r_reduce(lifted_R(pt));
  const int s = b_sign(t);
  return std::exp(double(s) / cplx(0.0, kPi) * r);
}

DilogTensor RN(const DecoratedTetra& t, const RootContext& ctx) {
  if (ctx.N == 1) {
    DilogTensor out;
    out.N = 1;
    out.M = CMat::Constant(1, 1, R1(t));
    out.slot_face = face_slots(b_sign(t));
    return out;
  }
  if (!t.f || !t.c) throw domain_error("RN: flat/charge required");
  const int s = b_sign(t);
  const auto wp = nth_branch_moduli(t, ctx);
  const long half = (ctx.N - 1) / 2;
  const cplx pre = cpow_int(wp[0], -long((*t.c)[1]) * half) *
                   cpow_int(wp[1], long((*t.c)[0]) * half);
  DilogTensor out;
  out.N = ctx.N;
  out.slot_face = face_slots(s);
  if (s == +1)
    out.M = pre * ln_pair(wp[0], 1.0 / wp[1], ctx);
  else
    out.M = pre * ln_inverse_pair(wp[0], 1.0 / wp[1], ctx);
  return out;
}

CMat RN_inverse_matrix(const DecoratedTetra& t, const RootContext& ctx) {
  if (ctx.N == 1) return CMat::Constant(1, 1, 1.0 / R1(t));
  const int s = b_sign(t);
  const auto wp = nth_branch_moduli(t, ctx);
  const long half = (ctx.N - 1) / 2;
  const cplx pre = cpow_int(wp[0], -long((*t.c)[1]) * half) *
                   cpow_int(wp[1], long((*t.c)[0]) * half);
  if (s == +1) return (1.0 / pre) * ln_inverse_pair(wp[0], 1.0 / wp[1], ctx);
  return (1.0 / pre) * ln_pair(wp[0], 1.0 / wp[1], ctx);
}

CMat sym_T(const RootContext& ctx) {
  const int N = ctx.N;
  CMat T = CMat::Zero(N, N);
  for (int i = 0; i < N; ++i)
    T(i, dmod(-i, N)) = ctx.zeta_pow(long(i) * i * (ctx.m + 1));
  return T;
}

CMat sym_S(const RootContext& ctx) {
  const int N = ctx.N;
  CMat S(N, N);
  const double scale = 1.0 / std::sqrt(double(N));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) S(i, j) = scale * ctx.zeta_pow(long(i) * j);
  return S;
}

PhaseReport phase_equal(const CMat& A, const CMat& B, const RootContext& ctx,
                        bool allow_sign, double tol) {
  PhaseReport rep;
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw domain_error("phase_equal: shape mismatch");
  const double nb = B.norm();
  if (nb == 0.0) throw domain_error("phase_equal: zero reference tensor");
  const cplx lam = (B.conjugate().cwiseProduct(A)).sum() / (nb * nb);
  rep.lambda = lam;
  rep.residual = (A - lam * B).norm() / nb;
  // classify lam against {sign * zeta^k}
  double best = 1e300;
  for (int k = 0; k < ctx.N; ++k) {
    for (int s : {+1, -1}) {
      if (s == -1 && !allow_sign) continue;
      double d = std::abs(lam - double(s) * ctx.zeta_pow(k));
      if (d < best) {
        best = d;
        rep.k = k;
        rep.sign = s;
      }
    }
  }
  rep.phase_dist = best;
  rep.ok = rep.residual < tol && best < tol;
  return rep;
}

namespace {

std::array<int, 4> transposition_perm(Transposition p) {
  switch (p) {
    case Transposition::t01: return {1, 0, 2, 3};
    case Transposition::t12: return {0, 2, 1, 3};
    case Transposition::t23: return {0, 1, 3, 2};
  }
  throw domain_error("transposition_perm: bad transposition");
}

PhaseReport symmetry_core(const DecoratedTetra& t, const EdgeInts& a,
                          Transposition p, const RootContext& ctx,
                          double tol) {
  if (b_sign(t) != +1)
    throw domain_error("check_symmetry: branching index must be +1");
  if (!t.f || !t.c) throw domain_error("check_symmetry: flat/charge required");
  const int N = ctx.N;
  const long half = (N - 1) / 2;

  auto rn_with = [&](const DecoratedTetra& tt, const EdgeInts& aa) {
    const auto wp = nth_branch_moduli(tt.w, aa, ctx);
    const cplx pre = cpow_int(wp[0], -long((*tt.c)[1]) * half) *
                     cpow_int(wp[1], long((*tt.c)[0]) * half);
    if (b_sign(tt) == +1) return CMat(pre * ln_pair(wp[0], 1.0 / wp[1], ctx));
    return CMat(pre * ln_inverse_pair(wp[0], 1.0 / wp[1], ctx));
  };

  const auto perm = transposition_perm(p);
  DecoratedTetra tp = apply_permutation(t, perm);
  // The exponents carry over as a = f - (*_b)c with f -> -f (renamed),
  // c -> c and *_b flipping sign, so a' = -f + c at the renamed edge.
  EdgeInts ap{};
  for (int j = 0; j < 3; ++j) {
    auto [r, s] = edge_rank_pairs()[j];
    int jn = edge_index_of_rank_pair(perm[r], perm[s]);
    int fj = a[j] + b_sign(t) * (*t.c)[j];
    ap[jn] = -fj + (*t.c)[j];
  }

  CMat lhs = rn_with(tp, ap);
  CMat rhs;
  const CMat I = CMat::Identity(N, N);
  const CMat T = sym_T(ctx);
  const CMat S = sym_S(ctx);
  const CMat M = rn_with(t, a);
  switch (p) {
    case Transposition::t01:
      rhs = kron(T, I).inverse() * M * kron(T, I);
      break;
    case Transposition::t12:
      rhs = kron(S, I).inverse() * M * kron(I, T);
      break;
    case Transposition::t23:
      rhs = kron(I, S).inverse() * M * kron(I, S);
      break;
  }
  return phase_equal(lhs, rhs, ctx, /*allow_sign=*/true, tol);
}

}  // namespace

PhaseReport check_symmetry(const DecoratedTetra& t, Transposition p,
                           const RootContext& ctx, double tol) {
  return symmetry_core(t, enrichment_exponents(t), p, ctx, tol);
}

PhaseReport check_symmetry_with_exponents(const DecoratedTetra& t,
                                          const EdgeInts& a, Transposition p,
                                          const RootContext& ctx, double tol) {
  return symmetry_core(t, a, p, ctx, tol);
}

CMat weyl_Z(const RootContext& ctx) {
  CMat Z = CMat::Zero(ctx.N, ctx.N);
  for (int i = 0; i < ctx.N; ++i) Z(i, i) = ctx.zeta_pow(i);
  return Z;
}

CMat weyl_X(const RootContext& ctx) {
  CMat X = CMat::Zero(ctx.N, ctx.N);
  for (int j = 0; j < ctx.N; ++j) X(dmod(j + 1, ctx.N), j) = 1.0;
  return X;
}

CMat weyl_Y(const RootContext& ctx) {
  return cplx(ctx.zeta_pow(ctx.m + 1)) * weyl_X(ctx) * weyl_Z(ctx);
}

CMat kron(const CMat& A, const CMat& B) {
  CMat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

CMat upsilon(const RootContext& ctx) {
  const int N = ctx.N;
  const CMat Z = weyl_Z(ctx), Y = weyl_Y(ctx);
  CMat U = CMat::Zero(N * N, N * N);
  CMat Zi = CMat::Identity(N, N);
  for (int i = 0; i < N; ++i) {
    CMat Yj = CMat::Identity(N, N);
    for (int j = 0; j < N; ++j) {
      U += ctx.zeta_pow(long(i) * j) * kron(Zi, Yj);
      Yj = CMat(Yj * Y);
    }
    Zi = CMat(Zi * Z.inverse());
  }
  return U / double(N);
}

CMat psi_series(cplx w0P, cplx w1P, const CMat& A, const RootContext& ctx) {
  const int N = ctx.N;
  CMat out = CMat::Zero(A.rows(), A.cols());
  CMat Apow = CMat::Identity(A.rows(), A.cols());
  cplx coeff = 1.0;
  for (int t = 0; t < N; ++t) {
    out += coeff * Apow;
    coeff *= (1.0 / (w0P * w1P)) / (1.0 - ctx.zeta_pow(-(t + 1)) / w0P);
    Apow = CMat(Apow * A);
  }
  return h_function(w0P, ctx) * out;
}

SplitReport splitting_check(cplx u, const RootContext& ctx) {
  SplitReport rep;
  ModularTriple w = complete_triple(u);
  cplx w0P = nth_root_branch(w[0], 0, ctx);
  cplx w1P = nth_root_branch(w[1], 0, ctx);
  const CMat Z = weyl_Z(ctx), Y = weyl_Y(ctx);
  const CMat A = -kron(Y.inverse(), CMat(Z.inverse() * Y));
  const CMat lhs = ln_pair(w0P, 1.0 / w1P, ctx);
  const CMat rhs = upsilon(ctx) * psi_series(w0P, w1P, A, ctx);
  auto pr = phase_equal(lhs, rhs, ctx, /*allow_sign=*/true);
  rep.split_residual = (lhs - rhs).norm() / lhs.norm();
  rep.phase = pr.lambda;
  // difference equation: Psi(zeta^{-1} A) = Psi(A) (w0' - (w1')^{-1} A)
  const CMat l2 = psi_series(w0P, w1P, CMat(A / ctx.zeta), ctx);
  const CMat r2 = psi_series(w0P, w1P, A, ctx) *
                  (w0P * CMat::Identity(A.rows(), A.cols()) - A / w1P);
  rep.functional_residual = (l2 - r2).norm() / l2.norm();
  return rep;
}

cplx rn_entry_alternative(const DecoratedTetra& t, int i, int j, int k, int l,
                          const RootContext& ctx) {
  if (b_sign(t) != +1)
    throw domain_error("rn_entry_alternative: branching index must be +1");
  const int N = ctx.N, m = ctx.m;
  if (!delta(i + j - l, N)) return 0.0;
  const auto& f = *t.f;
  const auto& c = *t.c;
  const auto wp = nth_branch_moduli(t, ctx);
  EdgeInts bare{f[0], f[1], f[2]};
  const auto wb = nth_branch_moduli(t.w, bare, ctx);
  const long half = (N - 1) / 2;
  cplx pre = cpow_int(wp[0], -long(c[1]) * half) *
             cpow_int(wp[1], long(c[0]) * half);
  cplx phase = ctx.zeta_pow(long(m + 1) * c[1] * (i - k) -
                            long(m + 1) * (m + 1) * f[1] * c[0]);
  cplx prod = omega_unchecked(wb[0], 1.0 / wb[1],
                              long(i - k) - long(m + 1) * c[0], ctx);
  return pre * phase * h_function(wb[0], ctx) *
         ctx.zeta_pow(long(k) * j + long(m + 1) * k * k) * prod;
}

}  // namespace dilog
