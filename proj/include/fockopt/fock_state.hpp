#pragma once

// Definite-particle-number states of identical particles in the occupation
// number representation, and their evolution under passive linear optics.
//
// Mode indices are 0-based throughout the C++ API. File formats and the CLI
// use 1-based indices and convert at the boundary.

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fockopt/error.hpp"

namespace fockopt {

using Complex = std::complex<double>;

/// Particle counts per mode, n_1 ... n_M.
using Occupation = std::vector<int>;

/// Sparse amplitude table. Ordered so that iteration (and therefore every
/// printed report) is deterministic.
using Amplitudes = std::map<Occupation, Complex>;

enum class Statistics { Boson, Fermion };

const char* to_string(Statistics s);

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kHeraldCutoff = 1e-14;

/// Amplitudes with modulus below this are dropped from sparse storage.
inline constexpr double kPruneThreshold = 1e-15;

/// State of a fixed number N of bosons or fermions distributed over M modes.
///
/// The amplitude psi_n multiplies the number state
///   prod_i (a_i^dag)^{n_i} / sqrt(n_i!) |0>
/// with the creation operators written in increasing mode order, a_1^dag
/// leftmost. For fermions this fixes the sign of every amplitude; no
/// observable depends on the choice.
///
/// Instances are immutable. Normalization is not enforced by the
/// constructor so that intermediate projected vectors can be represented;
/// every public operation that produces a physical state returns a
/// normalized one.
class FockState {
 public:
  /// Validates every key against (statistics, n_modes, n_particles).
  /// Throws InvalidOccupation or ShapeMismatch.
  FockState(Statistics statistics, int n_modes, int n_particles,
            Amplitudes amplitudes);

  /// The N = 0 state on n_modes modes.
  static FockState vacuum(Statistics statistics, int n_modes);

  Statistics statistics() const { return statistics_; }
  int n_modes() const { return n_modes_; }
  int n_particles() const { return n_particles_; }
  const Amplitudes& amplitudes() const { return amplitudes_; }

  /// Zero for occupations absent from the table.
  Complex amplitude(const Occupation& occ) const;

  double norm() const;
  bool is_normalized(double tol = kNormTolerance) const;

  /// Throws ZeroState when the norm is below 1e-12.
  FockState normalized() const;

 private:
  Statistics statistics_;
  int n_modes_;
  int n_particles_;
  Amplitudes amplitudes_;
};

/// Checks one occupation vector; throws InvalidOccupation or ShapeMismatch.
void validate_occupation(const Occupation& occ, Statistics statistics,
                         int n_modes, int n_particles);

/// M x M unitary acting on creation operators,
///   a_i^dag -> sum_j U_ij a_j^dag.
/// Applying U and then V to a state is the same as applying the single
/// matrix U * V, so a sequence of elements composes left to right in
/// application order.
class ModeUnitary {
 public:
  /// Throws ShapeMismatch for a non-square matrix and NotUnitary when
  /// U^dag U deviates from the identity by more than tol entrywise.
  explicit ModeUnitary(Eigen::MatrixXcd matrix, double tol = kUnitaryTolerance);

  static ModeUnitary identity(int dim);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Complex operator()(int i, int j) const { return matrix_(i, j); }

  ModeUnitary adjoint() const;

  /// this followed by next, i.e. the matrix product this * next.
  ModeUnitary then(const ModeUnitary& next) const;

 private:
  Eigen::MatrixXcd matrix_;
};

/// Largest entrywise deviation of m^dag m from the identity.
double unitarity_defect(const Eigen::MatrixXcd& m);

FockState make_number_state(const Occupation& counts, Statistics statistics);

/// Amplitude-wise sum of weighted states, renormalized.
/// Throws ShapeMismatch on mixed shapes or statistics and ZeroState when the
/// sum vanishes (norm < 1e-12).
FockState superpose(const std::vector<std::pair<Complex, FockState>>& terms);

/// Expands every basis monomial with a_i^dag -> sum_j U_ij a_j^dag and
/// normal-orders the result; fermion anticommutation contributes the signs.
FockState apply_mode_unitary(const FockState& state, const ModeUnitary& u);

/// Born-rule probabilities |psi_n|^2 of a full number-resolving readout.
std::map<Occupation, double> detection_distribution(const FockState& state);

struct HeraldResult {
  FockState state;     ///< normalized, on the unmeasured modes in original order
  double probability;  ///< squared norm of the projected component
};

/// Projects onto `required` (mode -> count) in the measured modes, removes
/// those modes and renormalizes. Throws ShapeMismatch for out-of-range modes
/// and ZeroOutcome when the probability is below kHeraldCutoff.
///
/// For fermions the measured creation operators are anticommuted to the
/// right end of each string before they are dropped, so relative signs of
/// the surviving terms are physical.
HeraldResult herald(const FockState& state, const std::map<int, int>& required);

/// Appends vacuum modes so that the state lives on n_modes modes.
FockState embed_modes(const FockState& state, int n_modes);

/// <a|b>. Throws ShapeMismatch on different shapes or statistics.
Complex inner_product(const FockState& a, const FockState& b);

/// Phase-insensitive overlap |<a|b>| / (|a| |b|).
double fidelity(const FockState& a, const FockState& b);

/// sqrt(n_1! ... n_M!).
double sqrt_factorial_product(const Occupation& occ);

/// All occupation vectors of n particles in m modes (lexicographic order),
/// restricted to counts <= 1 for fermions.
std::vector<Occupation> enumerate_occupations(int n_particles, int n_modes,
                                              Statistics statistics);

}  // namespace fockopt
