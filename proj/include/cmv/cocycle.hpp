#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cmv/common.hpp"
#include "cmv/ergodic.hpp"

namespace cmv {

// Szego transfer matrices and Lyapunov exponents.
//
// The raw one-step matrix at coefficient alpha and spectral parameter z is
//
//   A(alpha, z) = [  z            -conj(alpha) ]     det = z (1 - |alpha|^2),
//                 [ -alpha z       1           ]
//
// the normalized step divides by rho = sqrt(1-|alpha|^2), so det = z.  All
// exponent/potential comparisons use the normalized cocycle: at z = 0 its
// growth rate is -log(rho_inf), matching the potential's value there, which
// the raw cocycle misses.  Raw steps stay available behind the flag.

inline Eigen::Matrix2cd szego_step(Complex alpha, Complex z, bool normalized = true) {
  if (std::abs(alpha) >= 1.0) throw ConfigError("szego_step: |alpha| must be < 1");
  Eigen::Matrix2cd a;
  a << z, -std::conj(alpha), -alpha * z, Complex{1.0, 0.0};
  if (normalized) a /= std::sqrt(1.0 - std::norm(alpha));
  return a;
}

/// Operator 2-norm (largest singular value) of a 2x2 complex matrix.
inline double matrix_two_norm(const Eigen::Matrix2cd& m) {
  // Singular values from the 2x2 Gram matrix eigenvalues, in closed form.
  const double a = m.col(0).squaredNorm();
  const double c = m.col(1).squaredNorm();
  const Complex b = m.col(0).adjoint() * m.col(1);
  const double tr = a + c;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + std::norm(b)));
  return std::sqrt(std::max(0.0, 0.5 * tr + disc));
}

/// Renormalized product: true N-step cocycle = exp(log_scale) * factor.
struct CocycleProduct {
  Eigen::Matrix2cd factor = Eigen::Matrix2cd::Identity();
  double log_scale = 0.0;

  double log_norm() const { return log_scale + std::log(matrix_two_norm(factor)); }
  /// log det(product) as (log modulus, accumulated argument).
  Complex log_det() const {
    const Complex d = factor.determinant();
    return Complex{std::log(std::abs(d)) + 2.0 * log_scale, std::arg(d)};
  }
};

/// A_z^N(omega) (leftmost factor uses alpha_{N-1}), renormalized every
/// rescale_period steps to avoid overflow; the factored norms accumulate in
/// log_scale.  Throws NumericalError on overflow despite rescaling.
inline CocycleProduct cocycle_product(const ErgodicFamily& family, const OmegaState& state,
                                      Complex z, int steps, bool normalized = true,
                                      int rescale_period = 32) {
  if (steps < 0) throw ConfigError("cocycle_product: steps must be >= 0");
  if (rescale_period < 1) throw ConfigError("cocycle_product: rescale period must be >= 1");
  CocycleProduct p;
  for (int j = 0; j < steps; ++j) {
    p.factor = szego_step(alpha_at(family, state, j), z, normalized) * p.factor;
    if ((j + 1) % rescale_period == 0) {
      const double s = matrix_two_norm(p.factor);
      if (!std::isfinite(s) || s == 0.0)
        throw NumericalError("cocycle_product: overflow; reduce the rescale period");
      p.factor /= s;
      p.log_scale += std::log(s);
    }
  }
  if (!p.factor.allFinite())
    throw NumericalError("cocycle_product: overflow; reduce the rescale period");
  return p;
}

struct LyapunovEstimate {
  Complex z{};
  double value = 0.0;      // nats per step
  int length = 0;          // N
  int samples = 0;
  double std_error = 0.0;
};

/// (1/N) E(log ||T_z^N||) over the plan's samples, normalized cocycle.
inline LyapunovEstimate lyapunov(const ErgodicFamily& family, const SamplingPlan& plan,
                                 Complex z, int steps, int rescale_period = 32) {
  if (steps < 1) throw ConfigError("lyapunov: N must be >= 1");
  const std::vector<OmegaState> states = plan_states(family, plan);
  std::vector<double> vals;
  vals.reserve(states.size());
  double sum = 0.0;
  for (const OmegaState& s : states) {
    const double v = cocycle_product(family, s, z, steps, true, rescale_period).log_norm() / steps;
    vals.push_back(v);
    sum += v;
  }
  LyapunovEstimate e;
  e.z = z;
  e.length = steps;
  e.samples = static_cast<int>(states.size());
  e.value = sum / e.samples;
  if (e.samples > 1) {
    double var = 0.0;
    for (double v : vals) var += (v - e.value) * (v - e.value);
    e.std_error = std::sqrt(var / (static_cast<double>(e.samples) *
                                   static_cast<double>(e.samples - 1)));
  }
  return e;
}

/// Exact exponent for constant/periodic families: log of the spectral radius
/// of the one-period normalized transfer product, divided by the period.
inline double floquet_gamma(const ErgodicFamily& family, Complex z) {
  const int p = family.period();
  if (p == 0) throw ConfigError("floquet_gamma: family is not periodic");
  const OmegaState s = initial_state(family);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (int j = 0; j < p; ++j) m = szego_step(alpha_at(family, s, j), z, true) * m;
  const Complex tr = m.trace();
  const Complex disc = std::sqrt(tr * tr - 4.0 * m.determinant());
  const double r = std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
  return std::log(std::max(r, 1e-300)) / p;
}

/// Circle arc [lo, hi) with lo in [0, 2pi) and hi in (lo, lo + 2pi]; a full
/// circle is (0, 2pi).
struct Arc {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double theta) const {
    double t = wrap_angle(theta);
    if (t < lo) t += kTwoPi;
    return t >= lo && t < hi;
  }
};

struct ZeroSetArcs {
  std::vector<Arc> arcs;  // disjoint, sorted by lo
  double eps_gamma = 0.0;
  int grid_size = 0;
  int margin_cells = 0;
  int cocycle_steps = 0;
  std::vector<double> grid_gamma;  // estimate at theta_i = 2pi i / grid_size

  bool empty() const { return arcs.empty(); }
  double total_length() const {
    double s = 0.0;
    for (const Arc& a : arcs) s += a.length();
    return s;
  }
  bool contains(double theta) const {
    for (const Arc& a : arcs)
      if (a.contains(theta)) return true;
    return false;
  }
  double min_gamma() const {
    double m = grid_gamma.empty() ? 0.0 : grid_gamma.front();
    for (double g : grid_gamma) m = std::min(m, g);
    return m;
  }
};

namespace detail {

/// Merge a cyclic mark vector into arcs; each detected run is shrunk by
/// margin cells at both ends (band-edge guard) and dropped if nothing is
/// left.  Cell i covers [ (i - 1/2) h, (i + 1/2) h ), h = 2pi/grid.
inline std::vector<Arc> marks_to_arcs(const std::vector<char>& mark, int margin_cells) {
  const int g = static_cast<int>(mark.size());
  const double h = kTwoPi / g;
  std::vector<Arc> arcs;
  bool all = true;
  for (char m : mark) all = all && m;
  if (all) {
    arcs.push_back({0.0, kTwoPi});
    return arcs;
  }
  int start = 0;
  while (start < g && mark[static_cast<std::size_t>(start)]) ++start;
  if (start == g) return arcs;  // unreachable; guarded by the all-marked case
  // walk the circle once beginning just after an unmarked cell
  int i = start;
  for (int step = 0; step < g;) {
    // advance to the next marked cell
    while (step < g && !mark[static_cast<std::size_t>((start + step) % g)]) ++step;
    if (step >= g) break;
    const int run_begin = (start + step) % g;
    int run_len = 0;
    while (step < g && mark[static_cast<std::size_t>((start + step) % g)]) {
      ++step;
      ++run_len;
    }
    if (run_len > 2 * margin_cells) {
      const int b = run_begin + margin_cells;
      const int len = run_len - 2 * margin_cells;
      double lo = wrap_angle((b - 0.5) * h);
      double hi = lo + len * h;
      arcs.push_back({lo, hi});
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  (void)i;
  return arcs;
}

}  // namespace detail

/// Detect the set where the Lyapunov exponent vanishes: estimate gamma on a
/// theta grid, mark estimates below eps_gamma, merge cyclic runs into arcs,
/// shrink by the margin.  An empty arc list is a valid result.
inline ZeroSetArcs zero_set(const ErgodicFamily& family, const SamplingPlan& plan,
                            int grid_size, int steps, double eps_gamma, int margin_cells) {
  if (grid_size < 16) throw ConfigError("zero_set: grid size must be >= 16");
  if (eps_gamma <= 0.0) throw ConfigError("zero_set: eps_gamma must be positive");
  if (margin_cells < 0) throw ConfigError("zero_set: margin must be >= 0");
  ZeroSetArcs zs;
  zs.eps_gamma = eps_gamma;
  zs.grid_size = grid_size;
  zs.margin_cells = margin_cells;
  zs.cocycle_steps = steps;
  zs.grid_gamma.resize(static_cast<std::size_t>(grid_size));
  std::vector<char> mark(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) {
    const double theta = kTwoPi * i / grid_size;
    const double g = lyapunov(family, plan, unit_circle(theta), steps).value;
    zs.grid_gamma[static_cast<std::size_t>(i)] = g;
    mark[static_cast<std::size_t>(i)] = g < eps_gamma ? 1 : 0;
  }
  zs.arcs = detail::marks_to_arcs(mark, margin_cells);
  return zs;
}

}  // namespace cmv
