#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cmv/common.hpp"
#include "cmv/rng.hpp"

namespace cmv {

// Ergodic families of Verblunsky coefficients alpha_n = f(S^n omega).
// Four concrete kinds; each carries its natural ergodic measure through the
// sampling plan: uniform on shift offsets (periodic), Lebesgue on the phase
// circle (quasiperiodic), product of uniform-in-disk laws (iid).

enum class FamilyKind { Constant, Periodic, Quasiperiodic, RandomIid };

struct ErgodicFamily {
  FamilyKind kind = FamilyKind::Constant;
  std::vector<Complex> alphas;  // Constant: 1 entry; Periodic: p entries
  double coupling = 0.0;        // Quasiperiodic amplitude
  double frequency = 0.0;       // Quasiperiodic rotation number, in (0,1)
  double base_phase = 0.0;      // Quasiperiodic base point, in [0,1)
  double radius = 0.0;          // RandomIid disk radius, in [0,1)
  std::uint64_t seed = 0;       // RandomIid master seed

  /// Uniform bound C with |alpha_n| <= C < 1.
  double cap() const {
    switch (kind) {
      case FamilyKind::Constant:
      case FamilyKind::Periodic: {
        double c = 0.0;
        for (const Complex& a : alphas) c = std::max(c, std::abs(a));
        return c;
      }
      case FamilyKind::Quasiperiodic:
        return std::abs(coupling);
      case FamilyKind::RandomIid:
        return radius;
    }
    return 0.0;
  }

  /// Shift period: 1 for Constant, p for Periodic, 0 for aperiodic kinds.
  int period() const {
    if (kind == FamilyKind::Constant) return 1;
    if (kind == FamilyKind::Periodic) return static_cast<int>(alphas.size());
    return 0;
  }

  static ErgodicFamily constant(Complex alpha) {
    if (std::abs(alpha) >= 1.0) throw ConfigError("constant family: |alpha| must be < 1");
    ErgodicFamily f;
    f.kind = FamilyKind::Constant;
    f.alphas = {alpha};
    return f;
  }

  static ErgodicFamily periodic(std::vector<Complex> alphas) {
    if (alphas.empty()) throw ConfigError("periodic family: empty coefficient list");
    for (const Complex& a : alphas)
      if (std::abs(a) >= 1.0) throw ConfigError("periodic family: |alpha| must be < 1");
    ErgodicFamily f;
    f.kind = FamilyKind::Periodic;
    f.alphas = std::move(alphas);
    return f;
  }

  static ErgodicFamily quasiperiodic(double coupling, double frequency, double phase) {
    if (std::abs(coupling) >= 1.0) throw ConfigError("quasiperiodic family: |coupling| must be < 1");
    if (!(frequency > 0.0 && frequency < 1.0))
      throw ConfigError("quasiperiodic family: frequency must lie in (0,1)");
    ErgodicFamily f;
    f.kind = FamilyKind::Quasiperiodic;
    f.coupling = coupling;
    f.frequency = frequency;
    f.base_phase = phase - std::floor(phase);
    return f;
  }

  static ErgodicFamily random_iid(double radius, std::uint64_t seed) {
    if (!(radius >= 0.0 && radius < 1.0))
      throw ConfigError("random_iid family: radius must lie in [0,1)");
    ErgodicFamily f;
    f.kind = FamilyKind::RandomIid;
    f.radius = radius;
    f.seed = seed;
    return f;
  }
};

/// Point of the underlying dynamical system; only the fields relevant to the
/// family's kind are meaningful.
struct OmegaState {
  int offset = 0;              // Periodic: shift offset in {0..p-1}
  double phase = 0.0;          // Quasiperiodic: phase in [0,1)
  std::uint64_t stream = 0;    // RandomIid: sample stream
  std::int64_t position = 0;   // RandomIid: lattice position of site 0
};

inline OmegaState initial_state(const ErgodicFamily& family) {
  OmegaState s;
  if (family.kind == FamilyKind::Quasiperiodic) s.phase = family.base_phase;
  return s;
}

/// Apply the shift S^steps (steps may be negative).
inline OmegaState shifted(const ErgodicFamily& family, OmegaState s, std::int64_t steps = 1) {
  switch (family.kind) {
    case FamilyKind::Constant:
      break;
    case FamilyKind::Periodic: {
      const int p = family.period();
      s.offset = static_cast<int>((((s.offset + steps) % p) + p) % p);
      break;
    }
    case FamilyKind::Quasiperiodic: {
      double ph = s.phase + static_cast<double>(steps) * family.frequency;
      s.phase = ph - std::floor(ph);
      break;
    }
    case FamilyKind::RandomIid:
      s.position += steps;
      break;
  }
  return s;
}

/// alpha_n(omega); total on any integer n (two-sided sequence).
inline Complex alpha_at(const ErgodicFamily& family, const OmegaState& s, std::int64_t n) {
  switch (family.kind) {
    case FamilyKind::Constant:
      return family.alphas[0];
    case FamilyKind::Periodic: {
      const int p = family.period();
      const std::int64_t k = ((s.offset + n) % p + p) % p;
      return family.alphas[static_cast<std::size_t>(k)];
    }
    case FamilyKind::Quasiperiodic: {
      const double arg = kTwoPi * (static_cast<double>(n) * family.frequency + s.phase);
      return family.coupling * unit_circle(arg);
    }
    case FamilyKind::RandomIid:
      return disk_point(family.seed, s.stream, s.position + n, family.radius);
  }
  return {};
}

enum class PlanMode { ExactPeriodic, MonteCarlo };

struct SamplingPlan {
  PlanMode mode = PlanMode::ExactPeriodic;
  int samples = 1;          // MonteCarlo sample count
  std::uint64_t seed = 0;   // MonteCarlo seed

  static SamplingPlan exact_periodic() { return {}; }
  static SamplingPlan monte_carlo(int samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("monte_carlo plan: samples must be >= 1");
    return {PlanMode::MonteCarlo, samples, seed};
  }
};

/// The omega samples a plan draws.  ExactPeriodic enumerates the p shift
/// states; MonteCarlo draws states with counter-based seeding (phase for
/// quasiperiodic, offset for periodic, stream = seed + j for iid).
inline std::vector<OmegaState> plan_states(const ErgodicFamily& family,
                                           const SamplingPlan& plan) {
  std::vector<OmegaState> states;
  if (plan.mode == PlanMode::ExactPeriodic) {
    const int p = family.period();
    if (p == 0)
      throw ConfigError("exact_periodic plan requires a constant or periodic family");
    states.reserve(static_cast<std::size_t>(p));
    for (int off = 0; off < p; ++off) {
      OmegaState s = initial_state(family);
      s.offset = off;
      states.push_back(s);
    }
    return states;
  }
  if (plan.samples < 1) throw ConfigError("monte_carlo plan: samples must be >= 1");
  states.reserve(static_cast<std::size_t>(plan.samples));
  for (int j = 0; j < plan.samples; ++j) {
    OmegaState s = initial_state(family);
    switch (family.kind) {
      case FamilyKind::Constant:
        break;
      case FamilyKind::Periodic:
        s.offset = static_cast<int>(hash_counter(plan.seed, 1, j) %
                                    static_cast<std::uint64_t>(family.period()));
        break;
      case FamilyKind::Quasiperiodic:
        s.phase = unit_double(hash_counter(plan.seed, 2, j));
        break;
      case FamilyKind::RandomIid:
        s.stream = plan.seed + static_cast<std::uint64_t>(j);
        break;
    }
    states.push_back(s);
  }
  return states;
}

struct Expectation {
  Complex mean{};
  double std_error = 0.0;
  int count = 0;
};

/// E(observable) under the plan.  ExactPeriodic averages the p shift states
/// exactly; MonteCarlo reports the sample mean and a standard-error estimate.
/// Accumulation runs in sample order, so results are independent of any
/// parallel evaluation of the observable.
template <class F>
Expectation expectation(const ErgodicFamily& family, const SamplingPlan& plan,
                        F&& observable) {
  const std::vector<OmegaState> states = plan_states(family, plan);
  Complex sum{};
  std::vector<Complex> values;
  values.reserve(states.size());
  for (const OmegaState& s : states) {
    values.push_back(observable(s));
    sum += values.back();
  }
  Expectation e;
  e.count = static_cast<int>(states.size());
  e.mean = sum / static_cast<double>(e.count);
  if (plan.mode == PlanMode::MonteCarlo && e.count > 1) {
    double var = 0.0;
    for (const Complex& v : values) var += std::norm(v - e.mean);
    e.std_error = std::sqrt(var / (static_cast<double>(e.count) *
                                   static_cast<double>(e.count - 1)));
  }
  return e;
}

}  // namespace cmv
