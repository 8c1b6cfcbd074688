#pragma once

#include <vector>

#include "cmv/boundary.hpp"
#include "cmv/circle_measure.hpp"
#include "cmv/cmv_matrix.hpp"
#include "cmv/common.hpp"
#include "cmv/ergodic.hpp"
#include "cmv/parallel.hpp"

namespace cmv {

// Density of states: eigenvalue counting measures pooled over the plan's
// samples (and optionally over decoupling boundary values), the geometric
// mean rho_inf, the logarithmic potential Gamma, its Caratheodory function K,
// and the a.c. density k_ac.

struct DosApproximation {
  AtomicCircleMeasure measure;
  int volume = 0;        // window half-width n (dimension 2n+1)
  int sample_count = 0;  // omega samples pooled
  int boundary_pool = 1; // boundary values pooled per sample
  double kolmogorov_self = -1.0;  // distance to the half-volume run; -1 if unset
};

namespace detail {

/// Boundary value b of B for pooling: the right cut takes beta e^{2pi i b/B},
/// the left cut keeps beta.  Varying one cut only: moving both in lockstep
/// produces exactly coincident eigenvalues across the pool for symmetric
/// families, which defeats the pooling.
inline Complex pool_beta(Complex beta, int b, int pool) {
  return pool <= 1 ? beta : beta * unit_circle(kTwoPi * b / pool);
}

inline AtomicCircleMeasure pooled_counting(const ErgodicFamily& family,
                                           const std::vector<OmegaState>& states, int n,
                                           Complex beta, int pool, int threads) {
  const int total = static_cast<int>(states.size()) * pool;
  std::vector<AtomicCircleMeasure> parts(static_cast<std::size_t>(total));
  parallel_for(total, threads, [&](int i) {
    const int si = i / pool, b = i % pool;
    const FiniteCmv fc =
        finite_cmv(family, states[static_cast<std::size_t>(si)], n, beta,
                   pool_beta(beta, b, pool));
    parts[static_cast<std::size_t>(i)] = counting_measure(fc);
  });
  return pooled(parts);
}

}  // namespace detail

inline DosApproximation density_of_states(const ErgodicFamily& family, const SamplingPlan& plan,
                                          int n, Complex beta = {-1.0, 0.0},
                                          int boundary_pool = 1, bool with_diagnostic = false,
                                          int threads = 1) {
  if (n < 1) throw ConfigError("density_of_states: n must be >= 1");
  if (boundary_pool < 1) throw ConfigError("density_of_states: boundary pool must be >= 1");
  const std::vector<OmegaState> states = plan_states(family, plan);
  DosApproximation dos;
  dos.volume = n;
  dos.sample_count = static_cast<int>(states.size());
  dos.boundary_pool = boundary_pool;
  dos.measure = detail::pooled_counting(family, states, n, beta, boundary_pool, threads);
  if (with_diagnostic && n >= 2) {
    const AtomicCircleMeasure half =
        detail::pooled_counting(family, states, n / 2, beta, boundary_pool, threads);
    dos.kolmogorov_self = kolmogorov_distance(dos.measure, half);
  }
  return dos;
}

struct GreenAveragePair {
  Complex lhs{};               // E(truncated Green at site 0)
  Complex rhs{};               // Stieltjes transform of the volume-n counting pool
  Complex rhs_extrapolated{};  // volumes n and n/2 combined; cancels the exact
                               // 1/(2n+1) boundary term of the trace
};

/// Both sides of the averaged-Green identity.  The raw rhs carries a
/// boundary-layer defect D(z)/(2n+1) with D independent of n, so the
/// (2n+1, n+1)-weighted combination of the n and n/2 transforms removes it;
/// both are returned.
inline GreenAveragePair dos_average_check(const ErgodicFamily& family, const SamplingPlan& plan,
                                          int n, Complex z, Complex beta = {-1.0, 0.0},
                                          int threads = 1) {
  if (std::abs(z) >= 1.0) throw ConfigError("dos_average_check: |z| must be < 1");
  const std::vector<OmegaState> states = plan_states(family, plan);
  const int count = static_cast<int>(states.size());
  std::vector<Complex> greens(static_cast<std::size_t>(count));
  std::vector<AtomicCircleMeasure> full(static_cast<std::size_t>(count));
  std::vector<AtomicCircleMeasure> half(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](int i) {
    const OmegaState& s = states[static_cast<std::size_t>(i)];
    const FiniteCmv fc = finite_cmv(family, s, n, beta, beta);
    const EigenSystem sys = eigen_system(fc);
    greens[static_cast<std::size_t>(i)] = truncated_green(sys, fc, z);
    full[static_cast<std::size_t>(i)] = counting_measure(sys);
    half[static_cast<std::size_t>(i)] = counting_measure(finite_cmv(family, s, n / 2, beta, beta));
  });
  auto stieltjes = [z](const AtomicCircleMeasure& m) {
    Complex s{};
    for (const CircleAtom& a : m.atoms()) s += a.weight / (unit_circle(a.theta) - z);
    return s;
  };
  GreenAveragePair pair;
  for (int i = 0; i < count; ++i) pair.lhs += greens[static_cast<std::size_t>(i)];
  pair.lhs /= static_cast<double>(count);
  pair.rhs = stieltjes(pooled(full));
  const Complex rhs_half = stieltjes(pooled(half));
  const double n1 = 2.0 * n + 1.0, n2 = 2.0 * (n / 2) + 1.0;
  pair.rhs_extrapolated = (n1 * pair.rhs - n2 * rhs_half) / (n1 - n2);
  return pair;
}

/// exp of the plan-averaged (1/2N) sum_{j<N} log(1 - |alpha_j|^2).
inline double rho_infinity(const ErgodicFamily& family, const SamplingPlan& plan, int steps) {
  if (steps < 1) throw ConfigError("rho_infinity: N must be >= 1");
  const Expectation e = expectation(family, plan, [&](const OmegaState& s) {
    double acc = 0.0;
    for (int j = 0; j < steps; ++j) acc += std::log1p(-std::norm(alpha_at(family, s, j)));
    return Complex{acc / (2.0 * steps), 0.0};
  });
  return std::exp(std::real(e.mean));
}

/// The DOS with its rho_inf normalization: Gamma(z) = integral of
/// log((1 - z conj(tau))/rho_inf) dk(tau).
struct ThoulessPotential {
  DosApproximation dos;
  double rho_inf = 1.0;
};

struct PotentialValue {
  double value = 0.0;
  int excluded_atoms = 0;  // atoms with tau = z skipped (log singularity)
};

/// Re Gamma(z) = sum_k w_k log|1 - z conj(tau_k)| - log rho_inf.  Atoms at
/// tau = z are excluded and reported, never silently regularized.  At z = 0
/// every log term vanishes and the value is exactly -log rho_inf.
inline PotentialValue thouless_gamma(const ThoulessPotential& pot, Complex z) {
  PotentialValue out;
  double s = 0.0;
  for (const CircleAtom& a : pot.dos.measure.atoms()) {
    const double mod = std::abs(1.0 - z * std::conj(unit_circle(a.theta)));
    if (mod < 1e-13) {
      ++out.excluded_atoms;
      continue;
    }
    s += a.weight * std::log(mod);  // exactly 0 at z = 0
  }
  out.value = s - std::log(pot.rho_inf);
  return out;
}

struct KRoutes {
  Complex value{};      // Herglotz sum of the DOS measure
  Complex alternate{};  // 1 - 2z Gamma'(z), via the analytic derivative
  bool routes_agree = false;
  double route_gap = 0.0;
};

/// K(z) computed both ways and cross-checked: (a) the Herglotz sum; (b)
/// 1 + sum_k w_k 2z conj(tau_k)/(1 - z conj(tau_k)), the term-by-term
/// derivative of Gamma's integrand (no finite differences).
inline KRoutes dos_caratheodory(const ThoulessPotential& pot, Complex z) {
  if (std::abs(z) >= 1.0) throw ConfigError("dos_caratheodory: |z| must be < 1");
  KRoutes k;
  k.value = herglotz_eval(pot.dos.measure, z);
  Complex s{};
  for (const CircleAtom& a : pot.dos.measure.atoms()) {
    const Complex ct = std::conj(unit_circle(a.theta));
    s += a.weight * ct / (1.0 - z * ct);
  }
  k.alternate = 1.0 + 2.0 * z * s;
  k.route_gap = std::abs(k.value - k.alternate);
  k.routes_agree = k.route_gap <= 1e-10;
  return k;
}

inline CaratheodoryEvaluator dos_evaluator(const ThoulessPotential& pot) {
  return CaratheodoryEvaluator::from_measure(pot.dos.measure);
}

/// a.c. density of the DOS via capped radial limits of Re K.
inline BoundaryValue k_ac(const ThoulessPotential& pot, double theta, const RadialLadder& ladder,
                          double cap_multiplier = 8.0) {
  return ac_density(dos_evaluator(pot), theta, ladder, cap_multiplier);
}

}  // namespace cmv
