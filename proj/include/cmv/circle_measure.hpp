#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "cmv/common.hpp"

namespace cmv {

struct CircleAtom {
  double theta = 0.0;   // in [0, 2pi)
  double weight = 0.0;  // >= 0
};

/// Finitely supported measure on the unit circle.  Atoms are kept sorted by
/// angle; atoms closer than the merge tolerance are combined (multiplicity
/// accounting for eigenvalue clusters).
class AtomicCircleMeasure {
 public:
  AtomicCircleMeasure() = default;

  static AtomicCircleMeasure from_atoms(std::vector<CircleAtom> atoms,
                                        double total_mass,
                                        double merge_tol = 1e-10) {
    for (CircleAtom& a : atoms) a.theta = wrap_angle(a.theta);
    std::sort(atoms.begin(), atoms.end(), [](const CircleAtom& a, const CircleAtom& b) {
      return a.theta < b.theta || (a.theta == b.theta && a.weight < b.weight);
    });
    std::vector<CircleAtom> merged;
    merged.reserve(atoms.size());
    for (const CircleAtom& a : atoms) {
      if (a.weight < 0.0) throw ConfigError("circle measure: negative atom weight");
      if (!merged.empty() && a.theta - merged.back().theta < merge_tol) {
        CircleAtom& m = merged.back();
        const double w = m.weight + a.weight;
        if (w > 0.0) m.theta = (m.theta * m.weight + a.theta * a.weight) / w;
        m.weight = w;
      } else {
        merged.push_back(a);
      }
    }
    // wrap-around pair
    if (merged.size() >= 2) {
      const double gap = kTwoPi - (merged.back().theta - merged.front().theta);
      if (gap < merge_tol) {
        CircleAtom last = merged.back();
        merged.pop_back();
        CircleAtom& first = merged.front();
        const double w = first.weight + last.weight;
        if (w > 0.0)
          first.theta = wrap_angle((first.theta + kTwoPi) * first.weight / w +
                                   last.theta * last.weight / w);
        first.weight = w;
      }
    }
    AtomicCircleMeasure m;
    m.atoms_ = std::move(merged);
    m.total_mass_ = total_mass;
    return m;
  }

  static AtomicCircleMeasure probability(std::vector<CircleAtom> atoms,
                                         double merge_tol = 1e-10) {
    return from_atoms(std::move(atoms), 1.0, merge_tol);
  }

  /// Equispaced probability atoms (discretized Lebesgue).
  static AtomicCircleMeasure uniform(int count) {
    if (count < 1) throw ConfigError("uniform measure: count must be >= 1");
    std::vector<CircleAtom> atoms(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
      atoms[static_cast<std::size_t>(k)] = {kTwoPi * k / count, 1.0 / count};
    return from_atoms(std::move(atoms), 1.0);
  }

  const std::vector<CircleAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const { return total_mass_; }

  double weight_sum() const {
    double s = 0.0;
    for (const CircleAtom& a : atoms_) s += a.weight;
    return s;
  }

  /// Mass of [0, theta].
  double cdf(double theta) const {
    double s = 0.0;
    for (const CircleAtom& a : atoms_) {
      if (a.theta > theta) break;
      s += a.weight;
    }
    return s;
  }

  /// k-th moment, integral of tau^k.
  Complex moment(int k) const {
    Complex s{};
    for (const CircleAtom& a : atoms_) s += a.weight * unit_circle(k * a.theta);
    return s;
  }

  /// Mass of the arc [lo, hi); wraps when hi > 2pi.
  double mass_in(double lo, double hi) const {
    double s = 0.0;
    for (const CircleAtom& a : atoms_) {
      const double t = a.theta >= lo ? a.theta : a.theta + kTwoPi;
      if (t >= lo && t < hi) s += a.weight;
    }
    return s;
  }

  double max_weight() const {
    double m = 0.0;
    for (const CircleAtom& a : atoms_) m = std::max(m, a.weight);
    return m;
  }

 private:
  std::vector<CircleAtom> atoms_;
  double total_mass_ = 0.0;
};

/// Mix measures with equal weights; the result is normalized to the mean of
/// the inputs' total masses.
inline AtomicCircleMeasure pooled(std::span<const AtomicCircleMeasure> parts,
                                  double merge_tol = 1e-10) {
  if (parts.empty()) throw ConfigError("pooled: no measures");
  std::vector<CircleAtom> atoms;
  double total = 0.0;
  const double scale = 1.0 / static_cast<double>(parts.size());
  for (const AtomicCircleMeasure& m : parts) {
    total += scale * m.total_mass();
    for (const CircleAtom& a : m.atoms()) atoms.push_back({a.theta, a.weight * scale});
  }
  return AtomicCircleMeasure::from_atoms(std::move(atoms), total, merge_tol);
}

/// sup_theta |A([0,theta]) - B([0,theta])| over the union of supports,
/// evaluated from both sides of each jump.
inline double kolmogorov_distance(const AtomicCircleMeasure& a,
                                  const AtomicCircleMeasure& b) {
  std::vector<double> support;
  support.reserve(a.size() + b.size());
  for (const CircleAtom& x : a.atoms()) support.push_back(x.theta);
  for (const CircleAtom& x : b.atoms()) support.push_back(x.theta);
  std::sort(support.begin(), support.end());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  double ca = 0.0, cb = 0.0;
  for (double t : support) {
    // left limit at t
    while (ia < a.size() && a.atoms()[ia].theta < t) ca += a.atoms()[ia++].weight;
    while (ib < b.size() && b.atoms()[ib].theta < t) cb += b.atoms()[ib++].weight;
    d = std::max(d, std::abs(ca - cb));
    // right value at t
    double ca2 = ca, cb2 = cb;
    std::size_t ja = ia, jb = ib;
    while (ja < a.size() && a.atoms()[ja].theta == t) ca2 += a.atoms()[ja++].weight;
    while (jb < b.size() && b.atoms()[jb].theta == t) cb2 += b.atoms()[jb++].weight;
    d = std::max(d, std::abs(ca2 - cb2));
  }
  return d;
}

/// Kolmogorov distance to the uniform (Lebesgue) probability measure.
inline double kolmogorov_to_uniform(const AtomicCircleMeasure& m) {
  double d = 0.0, c = 0.0;
  for (const CircleAtom& a : m.atoms()) {
    const double u = a.theta / kTwoPi;
    d = std::max(d, std::abs(c - u));
    c += a.weight;
    d = std::max(d, std::abs(c - u));
  }
  return d;
}

}  // namespace cmv
