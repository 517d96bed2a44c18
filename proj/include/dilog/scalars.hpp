#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace dilog {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kPiSq = kPi * kPi;

// Default tolerance ladder: construction checks vs identity checks.
inline constexpr double kTolConstruct = 1e-9;
inline constexpr double kTolIdentity = 1e-8;
inline constexpr double kTolCurve = 1e-9;

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct singularity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer power of a complex number by repeated squaring (n may be negative).
cplx cpow_int(cplx z, long n);

// Branch of log with imaginary part in (-pi, pi]; the cut value on the
// negative real axis is the +i0 side (+i*pi). Throws on z == 0.
cplx std_log(cplx z);
bool on_log_cut(cplx z);

// Euler dilogarithm, analytic on C minus (1,+inf); on the cut the
// returned value is the x+i0 side.
cplx euler_li2(cplx x);
bool on_li2_cut(cplx x);

// Rogers dilogarithm, analytic on C minus ((-inf,0) u (1,+inf)),
// normalized so rogers_L(1) == 0.
cplx rogers_L(cplx x);
bool on_rogers_cut(cplx x);

// Bloch-Wigner function: real-analytic on C minus {0,1}, continuous at 0, 1.
double bloch_wigner_D2(cplx x);

// A point (x;p,q) of the branched covering surface carrying the lifted
// Rogers map: a modulus together with two branch integers.
struct LogPoint {
  cplx x;
  long p = 0;
  long q = 0;
};

// The log pair (log x + p*i*pi, log 1/(1-x) + q*i*pi).
std::pair<cplx, cplx> log_pair(const LogPoint& pt);

// Lifted Rogers map, valued in C modulo pi^2 (the real part carries the
// ambiguity; the imaginary part is exact).
cplx lifted_R(const LogPoint& pt);

// Canonical representative of a class in C/pi^2 Z: real part in [0, pi^2).
cplx r_reduce(cplx v);
// Distance between two values as classes mod pi^2 (real-part distance to the
// nearest multiple of pi^2 plus the imaginary-part distance).
double r_class_dist(cplx a, cplx b);

// Odd root order N = 2m+1 with zeta = exp(2*pi*i/N).
struct RootContext {
  int N;
  int m;
  cplx zeta;

  explicit RootContext(int n);
  // zeta^k for any integer k (reduced mod N).
  cplx zeta_pow(long k) const;
  // reduce an integer to {0,...,N-1}
  int mod(long k) const;
};

// The N-th root branch u'_a = exp((1/N)(log u + a(N+1) i pi)).
// For u == 0 the value is 0 when a == 0, otherwise a domain error.
cplx nth_root_branch(cplx u, long a, const RootContext& ctx);

// g(x) = prod_{j=1..N-1} (1 - x zeta^{-j})^{j/N}, principal branch powers.
cplx g_function(cplx x, const RootContext& ctx);
bool on_g_cut(cplx x, const RootContext& ctx);
// Closed form of g(1): sqrt(N) * exp(-i pi (N-1)(N-2) / (12 N)).
cplx g_one(const RootContext& ctx);
// h(x) = g(x)/g(1)
cplx h_function(cplx x, const RootContext& ctx);

// omega(u',v'|n) = prod_{j=1..n} v'/(1 - u' zeta^j) for (u')^N + (v')^N = 1,
// N-periodic in n (negative n reduced mod N).
cplx omega(cplx uP, cplx vP, long n, const RootContext& ctx);
// Same product without the curve-constraint check (used internally where the
// constraint is known to hold by construction).
cplx omega_unchecked(cplx uP, cplx vP, long n, const RootContext& ctx);

// S(x|z) = sum_{k=1..N} prod_{j=1..k} z/(1 - x zeta^j) on the curve
// x^N + z^N = 1.
cplx s_curve_sum(cplx x, cplx z, const RootContext& ctx);

// Deterministic pairwise-tree summation of a vector of complex terms.
cplx pairwise_sum(std::vector<cplx> terms);

}  // namespace dilog
