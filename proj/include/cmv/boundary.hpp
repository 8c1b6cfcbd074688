#pragma once

#include <functional>
#include <memory>

#include "cmv/circle_measure.hpp"
#include "cmv/common.hpp"

namespace cmv {

// Boundary-value machinery shared by the DOS and Schur routes: Poisson
// kernel, Herglotz integrals of atomic measures, and radial-limit extraction
// of a.c. densities and atom masses.

/// P_R(tau) = Re((1 + R tau)/(1 - R tau)), R in [0,1).
inline double poisson_kernel(double big_r, Complex tau) {
  if (!(big_r >= 0.0 && big_r < 1.0)) throw ConfigError("poisson_kernel: R must lie in [0,1)");
  return std::real((1.0 + big_r * tau) / (1.0 - big_r * tau));
}

/// K(z) = total + sum_k w_k 2z/(tau_k - z); the leading term keeps K(0)
/// exactly equal to the stored total mass.
inline Complex herglotz_eval(const AtomicCircleMeasure& m, Complex z) {
  if (std::abs(z) >= 1.0) throw ConfigError("herglotz_eval: |z| must be < 1");
  Complex s{};
  for (const CircleAtom& a : m.atoms()) s += a.weight / (unit_circle(a.theta) - z);
  return m.total_mass() + 2.0 * z * s;
}

/// Radii r_m = 1 - 2^{-m}, m = m_lo..m_hi, used to realize radial limits.
struct RadialLadder {
  int m_lo = 4;
  int m_hi = 14;
  double tol = 1e-3;  // relative convergence tolerance (floor 1)

  double radius(int m) const { return 1.0 - std::pow(2.0, -m); }
};

/// Analytic map of the disk with nonnegative real part, backed either by an
/// atomic measure (Herglotz sum) or by an arbitrary closure (Schur route).
/// A nonzero atom count marks the backend as finitely resolved, which caps
/// radial ladders (see ac_density).
class CaratheodoryEvaluator {
 public:
  CaratheodoryEvaluator() = default;

  static CaratheodoryEvaluator from_measure(AtomicCircleMeasure measure) {
    auto backing = std::make_shared<AtomicCircleMeasure>(std::move(measure));
    CaratheodoryEvaluator ev;
    ev.atom_count_ = backing->size();
    ev.fn_ = [backing = std::move(backing)](Complex z) { return herglotz_eval(*backing, z); };
    return ev;
  }

  static CaratheodoryEvaluator analytic(std::function<Complex(Complex)> fn) {
    CaratheodoryEvaluator ev;
    ev.fn_ = std::move(fn);
    return ev;
  }

  Complex operator()(Complex z) const { return fn_(z); }
  std::size_t atom_count() const { return atom_count_; }

 private:
  std::function<Complex(Complex)> fn_;
  std::size_t atom_count_ = 0;
};

struct BoundaryValue {
  double value = 0.0;
  bool converged = false;
  double last_delta = 0.0;
  int last_rung = 0;
};

/// Largest usable rung for an atomic backend: pushing 1-r below a few atom
/// spacings reconstructs the atoms instead of the a.c. density, so the ladder
/// stops while 1-r >= cap_multiplier * (mean spacing).
inline int capped_rung(const RadialLadder& ladder, std::size_t atom_count,
                       double cap_multiplier) {
  if (atom_count == 0) return ladder.m_hi;
  const double spacing = kTwoPi / static_cast<double>(atom_count);
  const int cap = static_cast<int>(std::floor(-std::log2(cap_multiplier * spacing)));
  return std::min(ladder.m_hi, std::max(1, cap));
}

namespace detail {

template <class F>
BoundaryValue climb_ladder(F&& value_at_rung, int m_lo, int m_hi, double tol) {
  BoundaryValue out;
  if (m_hi < m_lo) m_lo = std::max(1, m_hi - 1);  // capped below the ladder: keep two rungs
  double prev = 0.0;
  bool have_prev = false;
  for (int m = m_lo; m <= m_hi; ++m) {
    out.value = value_at_rung(m);
    out.last_rung = m;
    if (have_prev) {
      out.last_delta = std::abs(out.value - prev);
      out.converged = out.last_delta <= tol * std::max(1.0, std::abs(out.value));
    }
    prev = out.value;
    have_prev = true;
  }
  return out;
}

}  // namespace detail

/// a.c. density at angle theta: (1/2pi) Re F(r e^{i theta}) climbed along the
/// ladder; converged when the last two rungs agree within the tolerance.
/// Non-convergence is a flagged result, never an error.
inline BoundaryValue ac_density(const CaratheodoryEvaluator& ev, double theta,
                                const RadialLadder& ladder, double cap_multiplier = 8.0) {
  const int hi = capped_rung(ladder, ev.atom_count(), cap_multiplier);
  return detail::climb_ladder(
      [&](int m) {
        return std::real(ev(ladder.radius(m) * unit_circle(theta))) / kTwoPi;
      },
      ladder.m_lo, hi, ladder.tol);
}

/// Mass of a possible atom at e^{i theta}: (1-r)/(1+r) Re F(r e^{i theta})
/// along the ladder (no atomic cap; atom probes deliberately pass the
/// resolution scale).  Returns the deepest rung's value.
inline double atom_mass(const CaratheodoryEvaluator& ev, double theta,
                        const RadialLadder& ladder) {
  double v = 0.0;
  for (int m = ladder.m_lo; m <= ladder.m_hi; ++m) {
    const double r = ladder.radius(m);
    v = (1.0 - r) / (1.0 + r) * std::real(ev(r * unit_circle(theta)));
  }
  return v;
}

}  // namespace cmv
