#pragma once

#include "cmv/boundary.hpp"
#include "cmv/common.hpp"
#include "cmv/ergodic.hpp"

namespace cmv {

// Schur functions of the two half-line restrictions, computed by the Schur
// algorithm's continued fraction with Schur parameters equal to the
// Verblunsky coefficients:
//
//   f_j(z) = (gamma_j + z f_{j+1}(z)) / (1 + conj(gamma_j) z f_{j+1}(z)),
//   f_N == 0,
//
// plus direction: gamma_j = alpha_j; minus direction: gamma_j =
// -conj(alpha_{-1-j}).  Two disk self-maps agreeing to order N at 0 differ by
// at most 2|z|^N, so the zero tail is certified once |z|^N falls below the
// tail tolerance; the adaptive mode doubles the depth until two successive
// depths agree or the geometric bound takes over.

enum class SchurDirection { Plus, Minus };

struct SchurEvaluator {
  ErgodicFamily family;
  OmegaState state;
  SchurDirection direction = SchurDirection::Plus;
  int fixed_depth = 0;       // > 0: evaluate at exactly this depth
  double step_tol = 1e-10;   // successive-depth agreement target
  double tail_tol = 1e-14;   // geometric tail bound on |z|^N
  int max_depth = 1 << 22;

  Complex parameter(std::int64_t j) const {
    if (direction == SchurDirection::Plus) return alpha_at(family, state, j);
    return -std::conj(alpha_at(family, state, -1 - j));
  }
};

inline Complex schur_eval_depth(const SchurEvaluator& ev, Complex z, int depth) {
  if (std::abs(z) >= 1.0) throw ConfigError("schur_eval: |z| must be < 1");
  if (depth < 1) throw ConfigError("schur_eval: depth must be >= 1");
  Complex f{};
  for (int j = depth - 1; j >= 0; --j) {
    const Complex g = ev.parameter(j);
    f = (g + z * f) / (1.0 + std::conj(g) * z * f);
  }
  return f;
}

inline Complex schur_eval(const SchurEvaluator& ev, Complex z) {
  if (ev.fixed_depth > 0) return schur_eval_depth(ev, z, ev.fixed_depth);
  if (std::abs(z) >= 1.0) throw ConfigError("schur_eval: |z| must be < 1");
  const double logz = std::log(std::abs(z) + 1e-300);
  int depth = 64;
  Complex prev = schur_eval_depth(ev, z, depth);
  while (true) {
    if (depth * logz < std::log(ev.tail_tol)) return prev;  // |z|^depth < tail_tol
    const Complex cur = schur_eval_depth(ev, z, 2 * depth);
    if (std::abs(cur - prev) < ev.step_tol) return cur;
    prev = cur;
    depth *= 2;
    if (depth >= ev.max_depth) return prev;
  }
}

inline SchurEvaluator schur_plus(const ErgodicFamily& family, const OmegaState& state) {
  return SchurEvaluator{family, state, SchurDirection::Plus};
}
inline SchurEvaluator schur_minus(const ErgodicFamily& family, const OmegaState& state) {
  return SchurEvaluator{family, state, SchurDirection::Minus};
}

/// F(z) = (1 + z f_+ f_-) / (1 - z f_+ f_-); maps the disk to the right
/// half-plane.
inline Complex caratheodory_F(const ErgodicFamily& family, const OmegaState& state, Complex z) {
  const Complex w = z * schur_eval(schur_plus(family, state), z) *
                    schur_eval(schur_minus(family, state), z);
  return (1.0 + w) / (1.0 - w);
}

/// G(z) = f_+ f_- / (1 - z f_+ f_-).
inline Complex green_from_schur(const ErgodicFamily& family, const OmegaState& state, Complex z) {
  const Complex fp = schur_eval(schur_plus(family, state), z);
  const Complex fm = schur_eval(schur_minus(family, state), z);
  return fp * fm / (1.0 - z * fp * fm);
}

/// Whole-line Caratheodory function as an analytic evaluator (no atomic
/// ladder cap: this backend is a true analytic function).
inline CaratheodoryEvaluator schur_caratheodory_evaluator(const ErgodicFamily& family,
                                                          const OmegaState& state) {
  return CaratheodoryEvaluator::analytic(
      [family, state](Complex z) { return caratheodory_F(family, state, z); });
}

/// a.c. density of the site-0 spectral measure via radial boundary values of
/// the Schur-composed F.
inline BoundaryValue nu_ac(const ErgodicFamily& family, const OmegaState& state, double theta,
                           const RadialLadder& ladder) {
  return ac_density(schur_caratheodory_evaluator(family, state), theta, ladder);
}

/// |f_+(re^{i theta}) - conj(re^{i theta} f_-(re^{i theta}))|; tends to 0 as
/// r -> 1 exactly where the operator is reflectionless.
inline double reflectionless_defect(const ErgodicFamily& family, const OmegaState& state,
                                    double theta, double r) {
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("reflectionless_defect: r must lie in (0,1)");
  const Complex z = r * unit_circle(theta);
  const Complex fp = schur_eval(schur_plus(family, state), z);
  const Complex fm = schur_eval(schur_minus(family, state), z);
  return std::abs(fp - std::conj(z * fm));
}

}  // namespace cmv
