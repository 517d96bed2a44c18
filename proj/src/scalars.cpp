#include "dilog/scalars.hpp"

#include <cmath>

namespace dilog {

namespace {

// Canonicalize purely real inputs to the +i0 fold so that downstream branch
// choices are deterministic on the cuts.
inline cplx plus_i0(cplx z) {
  if (z.imag() == 0.0) return cplx(z.real(), +0.0);
  return z;
}

// log on C\{0} following the sign of the imaginary zero of its argument.
inline cplx slog(cplx z) { return std::log(z); }

// Li2 power series, |x| <= 1/2.
cplx li2_series(cplx x) {
  cplx sum = 0.0, term = x;
  for (int n = 1; n < 80; ++n) {
    sum += term / double(n * n);
    term *= x;
    if (std::abs(term) < 1e-19) break;
  }
  return sum;
}

// Li2 via the expansion in w = -log(1-x); effective when |1-x| is moderate.
cplx li2_log_series(cplx x) {
  // Li2(x) = sum_k B_k w^{k+1}/(k+1)!   with B_1 = -1/2.
  static const double bern[] = {
      1.0, -0.5, 1.0 / 6, 0.0, -1.0 / 30, 0.0, 1.0 / 42, 0.0, -1.0 / 30,
      0.0, 5.0 / 66, 0.0, -691.0 / 2730, 0.0, 7.0 / 6, 0.0, -3617.0 / 510,
      0.0, 43867.0 / 798, 0.0, -174611.0 / 330, 0.0, 854513.0 / 138};
  cplx w = -slog(1.0 - x);
  cplx sum = 0.0, pw = w;
  double fact = 1.0;
  for (int k = 0; k < int(sizeof(bern) / sizeof(bern[0])); ++k) {
    fact *= (k + 1);
    if (bern[k] != 0.0) {
      cplx t = bern[k] * pw / fact;
      sum += t;
      if (std::abs(t) < 1e-19 && k > 4) break;
    }
    pw *= w;
  }
  return sum;
}

}  // namespace

cplx cpow_int(cplx z, long n) {
  if (n < 0) return 1.0 / cpow_int(z, -n);
  cplx r = 1.0, b = z;
  unsigned long e = static_cast<unsigned long>(n);
  while (e) {
    if (e & 1UL) r *= b;
    b *= b;
    e >>= 1UL;
  }
  return r;
}

cplx std_log(cplx z) {
  if (z == cplx(0.0, 0.0)) throw domain_error("std_log: argument is zero");
  return slog(plus_i0(z));
}

bool on_log_cut(cplx z) { return z.imag() == 0.0 && z.real() < 0.0; }

bool on_li2_cut(cplx x) { return x.imag() == 0.0 && x.real() > 1.0; }

cplx euler_li2(cplx x) {
  x = plus_i0(x);
  double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  if (ax <= 0.5) return li2_series(x);
  if (ax >= 2.0) {
    // Inversion: Li2(x) = -Li2(1/x) - pi^2/6 - log(-x)^2 / 2.
    cplx lg = slog(-x);
    return -euler_li2(1.0 / x) - kPiSq / 6.0 - 0.5 * lg * lg;
  }
  if (x.real() > 0.5) {
    // Reflection: Li2(x) = pi^2/6 - log(x) log(1-x) - Li2(1-x).
    if (x == cplx(1.0, 0.0)) return kPiSq / 6.0;
    return kPiSq / 6.0 - slog(x) * slog(1.0 - x) - euler_li2(1.0 - x);
  }
  return li2_log_series(x);
}

bool on_rogers_cut(cplx x) {
  return x.imag() == 0.0 && (x.real() < 0.0 || x.real() > 1.0);
}

cplx rogers_L(cplx x) {
  x = plus_i0(x);
  if (x == cplx(0.0, 0.0)) return -kPiSq / 6.0;
  if (x == cplx(1.0, 0.0)) return 0.0;
  return -kPiSq / 6.0 + 0.5 * slog(x) * slog(1.0 - x) + euler_li2(x);
}

double bloch_wigner_D2(cplx x) {
  if (x.imag() == 0.0) return 0.0;
  return std::imag(euler_li2(x)) + std::arg(1.0 - x) * std::log(std::abs(x));
}

std::pair<cplx, cplx> log_pair(const LogPoint& pt) {
  cplx x = plus_i0(pt.x);
  cplx iPi(0.0, kPi);
  return {slog(x) + double(pt.p) * iPi, -slog(1.0 - x) + double(pt.q) * iPi};
}

cplx lifted_R(const LogPoint& pt) {
  cplx x = plus_i0(pt.x);
  cplx iPiHalf(0.0, kPi / 2.0);
  return rogers_L(x) +
         iPiHalf * (double(pt.p) * slog(1.0 - x) + double(pt.q) * slog(x));
}

cplx r_reduce(cplx v) {
  double re = std::fmod(v.real(), kPiSq);
  if (re < 0.0) re += kPiSq;
  return cplx(re, v.imag());
}

double r_class_dist(cplx a, cplx b) {
  double dre = std::remainder(a.real() - b.real(), kPiSq);
  return std::hypot(dre, a.imag() - b.imag());
}

RootContext::RootContext(int n) : N(n), m((n - 1) / 2) {
  if (n < 1 || n % 2 == 0) throw domain_error("RootContext: N must be odd and positive");
  zeta = std::polar(1.0, 2.0 * kPi / n);
}

int RootContext::mod(long k) const {
  long r = k % N;
  if (r < 0) r += N;
  return int(r);
}

cplx RootContext::zeta_pow(long k) const {
  int r = mod(k);
  if (r == 0) return 1.0;
  return std::polar(1.0, 2.0 * kPi * r / N);
}

cplx nth_root_branch(cplx u, long a, const RootContext& ctx) {
  if (u == cplx(0.0, 0.0)) {
    if (a == 0) return 0.0;
    throw domain_error("nth_root_branch: zero base with nonzero branch index");
  }
  cplx root0 = std::exp(std_log(u) / double(ctx.N));
  return root0 * ctx.zeta_pow(long(ctx.m + 1) * a);
}

cplx g_function(cplx x, const RootContext& ctx) {
  cplx prod = 1.0;
  for (int j = 1; j < ctx.N; ++j) {
    cplx base = 1.0 - x * ctx.zeta_pow(-j);
    if (base == cplx(0.0, 0.0))
      throw singularity_error("g_function: argument at a branch point");
    prod *= std::exp(double(j) / double(ctx.N) * std_log(base));
  }
  return prod;
}

bool on_g_cut(cplx x, const RootContext& ctx) {
  for (int j = 1; j < ctx.N; ++j) {
    cplx b = 1.0 - x * ctx.zeta_pow(-j);
    if (b.imag() == 0.0 && b.real() <= 0.0) return true;
  }
  return false;
}

cplx g_one(const RootContext& ctx) {
  double ang = -kPi * double(ctx.N - 1) * double(ctx.N - 2) / (12.0 * ctx.N);
  return std::sqrt(double(ctx.N)) * std::polar(1.0, ang);
}

cplx h_function(cplx x, const RootContext& ctx) {
  return g_function(x, ctx) / g_one(ctx);
}

cplx omega_unchecked(cplx uP, cplx vP, long n, const RootContext& ctx) {
  int k = ctx.mod(n);
  cplx prod = 1.0;
  for (int j = 1; j <= k; ++j) {
    cplx den = 1.0 - uP * ctx.zeta_pow(j);
    if (std::abs(den) < 1e-14)
      throw singularity_error("omega: pole 1 - u' zeta^j = 0");
    prod *= vP / den;
  }
  return prod;
}

cplx omega(cplx uP, cplx vP, long n, const RootContext& ctx) {
  cplx curve = cpow_int(uP, ctx.N) + cpow_int(vP, ctx.N);
  if (std::abs(curve - 1.0) > kTolCurve)
    throw domain_error("omega: (u')^N + (v')^N != 1");
  return omega_unchecked(uP, vP, n, ctx);
}

cplx s_curve_sum(cplx x, cplx z, const RootContext& ctx) {
  cplx curve = cpow_int(x, ctx.N) + cpow_int(z, ctx.N);
  if (std::abs(curve - 1.0) > kTolCurve)
    throw domain_error("s_curve_sum: x^N + z^N != 1");
  cplx sum = 0.0, prod = 1.0;
  for (int k = 1; k <= ctx.N; ++k) {
    cplx den = 1.0 - x * ctx.zeta_pow(k);
    if (std::abs(den) < 1e-14)
      throw singularity_error("s_curve_sum: pole 1 - x zeta^k = 0");
    prod *= z / den;
    sum += prod;
  }
  return sum;
}

cplx pairwise_sum(std::vector<cplx> terms) {
  if (terms.empty()) return 0.0;
  while (terms.size() > 1) {
    std::size_t half = (terms.size() + 1) / 2;
    for (std::size_t i = 0; i + half < terms.size(); ++i)
      terms[i] += terms[i + half];
    terms.resize(half);
  }
  return terms[0];
}

}  // namespace dilog
