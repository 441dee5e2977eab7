#pragma once

// Dual-rail qubits, the Yurke-Stoler interferometer and CHSH evaluation.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "fockopt/circuit.hpp"
#include "fockopt/fock_state.hpp"

namespace fockopt {

/// Two dual-rail qubits, party A first, on the basis
/// {up-up, up-down, down-up, down-down}; up = particle in the pair's first
/// mode, down = particle in its second mode.
struct TwoQubitState {
  Complex e, f, g, h;

  Eigen::Vector4cd vector() const { return {e, f, g, h}; }
  double norm() const { return vector().norm(); }
};

/// Projective qubit measurement. Column 0 is the +1 outcome, column 1 the -1
/// outcome, both in (up, down) coordinates.
struct QubitBasis {
  Eigen::Matrix2cd vectors;

  /// Eigenbasis of n . sigma, each vector with its first nonzero component
  /// real and positive. n need not be normalized but must be nonzero.
  static QubitBasis from_bloch(const Eigen::Vector3d& n);

  /// Bloch vector of the +1 outcome.
  Eigen::Vector3d bloch() const;
};

inline constexpr double kViolationMargin = 1e-6;

struct BellTestResult {
  double chsh = 0.0;
  std::array<QubitBasis, 2> party_a;  ///< settings a, a'
  std::array<QubitBasis, 2> party_b;  ///< settings b, b'
  double success_probability = 1.0;
  bool violated = false;  ///< chsh > 2 + kViolationMargin
};

struct PostSelection {
  TwoQubitState chi;   ///< normalized
  double probability;  ///< weight of the one-particle-per-pair sector
};

/// Keeps the runs with exactly one particle in each of the pairs
/// (a_up, a_down) and (b_up, b_down). The qubit amplitudes are the
/// coefficients of a_A^dag a_B^dag with A's operator on the left. Requires
/// N = 2; throws ZeroOutcome when no coincidence can occur.
PostSelection postselect_dual_rail(const FockState& state, std::array<int, 2> pair_a,
                                   std::array<int, 2> pair_b);

/// Runs the Yurke-Stoler interferometer on a two-particle two-mode state.
/// Party A holds (1, 1'), party B holds (2', 2) in the [1, 2, 1', 2'] layout.
/// Throws ShapeMismatch unless N = M = 2.
PostSelection yurke_stoler_postselect(const FockState& phi);

/// |e h - f g| < tol.
bool product_condition(const TwoQubitState& chi, double tol = 1e-9);

/// Correlation matrix T_ij = <sigma_i (x) sigma_j>, i, j in {x, y, z}.
Eigen::Matrix3d correlation_matrix(const TwoQubitState& chi);

/// E(a,b) + E(a,b') + E(a',b) - E(a',b') evaluated by Born-rule projection.
double chsh_value(const TwoQubitState& chi, const std::array<QubitBasis, 2>& party_a,
                  const std::array<QubitBasis, 2>& party_b);

/// Maximal CHSH value 2 sqrt(l1 + l2) from the two largest eigenvalues of
/// T^T T, with settings that attain it. The settings are checked against
/// chsh_value; a mismatch above 1e-9 throws Error.
BellTestResult chsh_max(const TwoQubitState& chi);

/// Passive circuit on (up, down) = (s, s2) after which a particle in s
/// means outcome +1 and a particle in s2 means -1. Empty for the
/// computational basis, phase shifters for a diagonal change of basis,
/// otherwise a single beam splitter.
Circuit dual_rail_measurement_circuit(const QubitBasis& basis, int s, int s2, int n_modes);

struct FilterConditions {
  std::vector<double> residuals;  ///< r_s for s = 0 .. N-2
  bool middle_vanish = false;     ///< beta_1 .. beta_{N-1} all zero
  bool noon = false;              ///< middle_vanish with beta_0, beta_N both nonzero
};

/// With beta_n the coefficient of n particles in mode 1,
///   r_s = |beta_{s+1}^2 - beta_s beta_{s+2} sqrt((s+2)/(s+1)) sqrt((N-s)/(N-s-1))|.
/// Throws ShapeMismatch unless the state is a two-mode boson state.
FilterConditions filter_condition_residuals(const FockState& phi, double tol = 1e-9);

/// Two-particle filter heralding (s, N-s-2), then Yurke-Stoler and CHSH.
/// The success probability includes the herald and the coincidence.
BellTestResult run_filtered_ys(const FockState& phi, int s);

/// The state the filter heralds, on modes (1, 2).
CircuitRun filtered_state(const FockState& phi, int s);

/// Quantum erasure heralding (N-2, 0), then Yurke-Stoler and CHSH. Throws
/// InvalidParameter unless beta_1 .. beta_{N-1} vanish.
BellTestResult run_erasure_ys(const FockState& phi);

CircuitRun erased_state(const FockState& phi);

}  // namespace fockopt
