#pragma once

#include <cmath>
#include <complex>

#include "doctest.h"
#include "fockopt/fock_state.hpp"

namespace testing {

using fockopt::Complex;

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline bool close(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// Amplitude-wise comparison over the union of both supports.
inline double max_difference(const fockopt::FockState& a, const fockopt::FockState& b) {
  double worst = 0.0;
  for (const auto& [occ, x] : a.amplitudes()) worst = std::max(worst, std::abs(x - b.amplitude(occ)));
  for (const auto& [occ, y] : b.amplitudes()) worst = std::max(worst, std::abs(y - a.amplitude(occ)));
  return worst;
}

inline Eigen::Matrix2cd hadamard2() {
  Eigen::Matrix2cd h;
  h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return h;
}

}  // namespace testing
