#pragma once

// States reducible to all particles in one mode by passive linear optics,
// i.e. those whose coefficients factor as
//   psi_n = sqrt(N! / (n_1! ... n_M!)) * prod_i U_i^{n_i}
// for a unit vector alpha = (U_1, ..., U_M).

#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "fockopt/fock_state.hpp"

namespace fockopt {

/// Unit vector, meaningful up to a global phase.
using AlphaVector = Eigen::VectorXcd;

inline constexpr double kDefaultClassifyTolerance = 1e-8;

/// Product-form state of N particles with mode weights alpha. Throws
/// PauliForbidden for fermions with N >= 2 and InvalidParameter unless
/// alpha has unit norm within 1e-9.
FockState single_mode_state(const AlphaVector& alpha, int n_particles,
                            Statistics statistics = Statistics::Boson);

/// Why extraction failed, with the coefficient that disagrees most with the
/// best candidate (absent when no candidate could be formed).
struct NotSingleMode {
  std::string reason;
  std::optional<Occupation> violated;
  double residual = 0.0;
};

/// Inverts the product form. Candidate alphas are built from the mode with
/// the largest |psi_{N e_j}| for each of the N complex roots and accepted
/// when every coefficient matches within tol relative to the largest
/// |psi_n|. The returned alpha is normalized with its largest entry real
/// and positive. Throws InvalidParameter for N = 0, where alpha is undefined.
std::variant<AlphaVector, NotSingleMode> extract_alpha(
    const FockState& state, double tol = kDefaultClassifyTolerance);

struct Classification {
  bool single_mode = false;
  std::optional<AlphaVector> alpha;  ///< empty for the vacuum and on failure
  double residual = 0.0;             ///< worst relative coefficient mismatch
  std::optional<Occupation> violated;
  std::string reason;
};

/// Fermions with N >= 2 are rejected outright; the vacuum counts as single
/// mode with no alpha.
Classification is_single_mode_type(const FockState& state,
                                   double tol = kDefaultClassifyTolerance);

/// alpha * U as a row vector. Throws ShapeMismatch.
AlphaVector transform_alpha(const AlphaVector& alpha, const ModeUnitary& u);

/// min over phases theta of max_i |a_i - e^{i theta} b_i|, evaluated at the
/// phase aligning the inner product.
double phase_insensitive_distance(const AlphaVector& a, const AlphaVector& b);

}  // namespace fockopt
