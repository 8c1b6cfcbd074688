#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

#include "cmv/circle_measure.hpp"
#include "cmv/common.hpp"
#include "cmv/ergodic.hpp"

namespace cmv {

// Finite unitary truncation of an extended CMV matrix.  The window covers
// lattice sites lo..hi; the cut coefficients alpha_{lo-1} and alpha_{hi} are
// replaced by unimodular boundary values, which makes the window an exact
// invariant subspace (rho = 0 at both cuts).  The matrix is the product L*M
// of the alternating direct sums of Theta blocks
//
//   Theta_j = [ conj(alpha_j)  rho_j     ]   acting on sites (j, j+1),
//             [ rho_j         -alpha_j   ]
//
// even j in L, odd j in M; cut blocks degenerate to unimodular scalars.
struct FiniteCmv {
  int lo = 0;
  int hi = 0;
  Complex beta_left{-1.0, 0.0};
  Complex beta_right{-1.0, 0.0};
  std::vector<Complex> alphas;  // alpha_{lo-1} .. alpha_{hi}
  Eigen::MatrixXcd matrix;

  int size() const { return hi - lo + 1; }
  bool site_in_window(int site) const { return site >= lo && site <= hi; }
  int row_of_site(int site) const { return site - lo; }

  Complex alpha(int j) const {  // j in [lo-1, hi]
    return alphas[static_cast<std::size_t>(j - (lo - 1))];
  }
  double rho(int j) const {
    const double a2 = std::norm(alpha(j));
    return a2 >= 1.0 ? 0.0 : std::sqrt(1.0 - a2);
  }
};

/// Assemble the window operator from an explicit coefficient list
/// alpha_{lo-1}..alpha_{hi} (both end entries unimodular).
inline FiniteCmv finite_cmv_from_coeffs(int lo, int hi, std::vector<Complex> alphas) {
  if (hi < lo) throw ConfigError("finite_cmv: empty window");
  if (alphas.size() != static_cast<std::size_t>(hi - lo + 2))
    throw ConfigError("finite_cmv: coefficient list must cover lo-1..hi");
  if (!is_unimodular(alphas.front()) || !is_unimodular(alphas.back()))
    throw ConfigError("finite_cmv: cut coefficients must be unimodular");
  for (std::size_t k = 1; k + 1 < alphas.size(); ++k)
    if (std::abs(alphas[k]) >= 1.0)
      throw ConfigError("finite_cmv: interior |alpha| must be < 1");

  FiniteCmv fc;
  fc.lo = lo;
  fc.hi = hi;
  fc.beta_left = alphas.front();
  fc.beta_right = alphas.back();
  fc.alphas = std::move(alphas);

  const int n = fc.size();
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (int j = lo - 1; j <= hi; ++j) {
    Eigen::MatrixXcd& target = (((j % 2) + 2) % 2 == 0) ? L : M;
    const Complex a = fc.alpha(j);
    const double r = fc.rho(j);
    const int i0 = j - lo, i1 = j + 1 - lo;
    if (i0 >= 0 && i1 < n) {
      target(i0, i0) = std::conj(a);
      target(i0, i1) = r;
      target(i1, i0) = r;
      target(i1, i1) = -a;
    } else if (i1 == 0) {          // left cut: only site j+1 in window
      target(i1, i1) = -a;
    } else if (i0 == n - 1) {      // right cut: only site j in window
      target(i0, i0) = std::conj(a);
    }
  }
  fc.matrix = L * M;
  return fc;
}

inline FiniteCmv finite_cmv_window(const ErgodicFamily& family, const OmegaState& state,
                                   int lo, int hi,
                                   Complex beta_left = {-1.0, 0.0},
                                   Complex beta_right = {-1.0, 0.0}) {
  if (!is_unimodular(beta_left) || !is_unimodular(beta_right))
    throw ConfigError("finite_cmv: boundary values must be unimodular");
  std::vector<Complex> alphas(static_cast<std::size_t>(hi - lo + 2));
  alphas.front() = beta_left;
  for (int j = lo; j < hi; ++j)
    alphas[static_cast<std::size_t>(j - (lo - 1))] = alpha_at(family, state, j);
  alphas.back() = beta_right;
  return finite_cmv_from_coeffs(lo, hi, std::move(alphas));
}

/// Symmetric window [-n, n] (dimension 2n+1).
inline FiniteCmv finite_cmv(const ErgodicFamily& family, const OmegaState& state, int n,
                            Complex beta_left = {-1.0, 0.0},
                            Complex beta_right = {-1.0, 0.0}) {
  if (n <= 0) throw ConfigError("finite_cmv: n must be positive");
  return finite_cmv_window(family, state, -n, n, beta_left, beta_right);
}

/// max-norm of U*U - I.
inline double unitarity_defect(const FiniteCmv& fc) {
  Eigen::MatrixXcd d = fc.matrix.adjoint() * fc.matrix;
  d.diagonal().array() -= 1.0;
  return d.cwiseAbs().maxCoeff();
}

struct EigenSystem {
  Eigen::VectorXcd values;   // sorted by phase in [0, 2pi)
  Eigen::MatrixXcd vectors;  // orthonormal columns, values(k) <-> col(k)
};

/// Complete eigendecomposition via complex Schur form.  For a unitary matrix
/// the Schur factor is numerically diagonal, so the (orthonormal) Schur basis
/// is an eigenbasis; eigenvalues within 1e-10 of the circle are snapped onto
/// it.  Throws NumericalError if the QR iteration fails to converge.
inline EigenSystem eigen_system(const FiniteCmv& fc) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(fc.matrix, true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("eigen_system: complex Schur iteration did not converge");
  const int n = fc.size();
  Eigen::VectorXcd values = schur.matrixT().diagonal();
  for (int k = 0; k < n; ++k) {
    const double m = std::abs(values(k));
    if (m > 0.0 && std::abs(m - 1.0) <= 1e-10) values(k) /= m;
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phase(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) phase[static_cast<std::size_t>(k)] = wrap_angle(std::arg(values(k)));
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return phase[static_cast<std::size_t>(a)] < phase[static_cast<std::size_t>(b)];
  });
  EigenSystem sys;
  sys.values.resize(n);
  sys.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    sys.values(k) = values(order[static_cast<std::size_t>(k)]);
    sys.vectors.col(k) = schur.matrixU().col(order[static_cast<std::size_t>(k)]);
  }
  return sys;
}

/// Normalized eigenvalue counting measure: a weight-m/(2n+1) atom at each
/// eigenvalue phase of multiplicity m (phases within 1e-10 are merged).
inline AtomicCircleMeasure counting_measure(const EigenSystem& sys) {
  const int n = static_cast<int>(sys.values.size());
  std::vector<CircleAtom> atoms(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    atoms[static_cast<std::size_t>(k)] = {wrap_angle(std::arg(sys.values(k))), 1.0 / n};
  return AtomicCircleMeasure::probability(std::move(atoms));
}

inline AtomicCircleMeasure counting_measure(const FiniteCmv& fc) {
  return counting_measure(eigen_system(fc));
}

/// Spectral measure of the delta vector at the given matrix row:
/// atoms (phase of zeta_k, |v_k(row)|^2).
inline AtomicCircleMeasure site_spectral_measure(const EigenSystem& sys, int row) {
  const int n = static_cast<int>(sys.values.size());
  if (row < 0 || row >= n) throw ConfigError("site_spectral_measure: site outside window");
  std::vector<CircleAtom> atoms(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    atoms[static_cast<std::size_t>(k)] = {wrap_angle(std::arg(sys.values(k))),
                                          std::norm(sys.vectors(row, k))};
  return AtomicCircleMeasure::probability(std::move(atoms));
}

inline AtomicCircleMeasure site_spectral_measure(const FiniteCmv& fc, int site) {
  if (!fc.site_in_window(site)) throw ConfigError("site_spectral_measure: site outside window");
  return site_spectral_measure(eigen_system(fc), fc.row_of_site(site));
}

/// Diagonal resolvent entry <delta_row, (U - z)^{-1} delta_row> from the
/// eigendecomposition.  Throws NumericalError when z sits within 1e-8 of an
/// eigenvalue (resolvent blow-up).
inline Complex resolvent_diagonal(const EigenSystem& sys, int row, Complex z) {
  const int n = static_cast<int>(sys.values.size());
  Complex g{};
  for (int k = 0; k < n; ++k) {
    const Complex d = sys.values(k) - z;
    if (std::abs(d) < 1e-8)
      throw NumericalError("truncated_green: z within 1e-8 of an eigenvalue");
    g += std::norm(sys.vectors(row, k)) / d;
  }
  return g;
}

/// Green function entry at site 0.
inline Complex truncated_green(const EigenSystem& sys, const FiniteCmv& fc, Complex z) {
  return resolvent_diagonal(sys, fc.row_of_site(0), z);
}

inline Complex truncated_green(const FiniteCmv& fc, Complex z) {
  return truncated_green(eigen_system(fc), fc, z);
}

}  // namespace cmv
