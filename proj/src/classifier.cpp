#include "fockopt/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fockopt {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

Complex product_coefficient(const AlphaVector& alpha, const Occupation& occ, int n) {
  double log_multinomial = log_factorial(n);
  Complex prod{1.0, 0.0};
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i] == 0) continue;
    log_multinomial -= log_factorial(occ[i]);
    prod *= std::pow(alpha(static_cast<Eigen::Index>(i)), occ[i]);
  }
  return std::exp(0.5 * log_multinomial) * prod;
}

AlphaVector canonical_phase(AlphaVector alpha) {
  Eigen::Index k = 0;
  alpha.cwiseAbs().maxCoeff(&k);
  if (std::abs(alpha(k)) > 0.0) alpha *= std::conj(alpha(k)) / std::abs(alpha(k));
  return alpha;
}

struct Check {
  double residual = 0.0;
  std::optional<Occupation> worst;
};

// Relative mismatch between the state and the product form of alpha over
// the union of both supports, after the best global phase.
Check verify(const FockState& state, const AlphaVector& alpha, double scale) {
  const int n = state.n_particles();
  const auto basis = enumerate_occupations(n, state.n_modes(), state.statistics());
  Complex overlap{};
  for (const auto& occ : basis) overlap += std::conj(product_coefficient(alpha, occ, n)) * state.amplitude(occ);
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  Check c;
  auto consider = [&](const Occupation& occ) {
    const double r = std::abs(state.amplitude(occ) - phase * product_coefficient(alpha, occ, n)) / scale;
    if (!c.worst || r > c.residual) {
      c.residual = r;
      c.worst = occ;
    }
  };
  for (const auto& [occ, a] : state.amplitudes()) consider(occ);
  for (const auto& occ : basis) {
    if (state.amplitudes().contains(occ)) continue;
    consider(occ);
  }
  return c;
}

}  // namespace

FockState single_mode_state(const AlphaVector& alpha, int n_particles,
                            Statistics statistics) {
  if (statistics == Statistics::Fermion && n_particles >= 2) {
    throw PauliForbidden("no single-mode state of two or more fermions");
  }
  if (n_particles < 0) throw InvalidParameter("negative particle number");
  if (alpha.size() < 1 || std::abs(alpha.norm() - 1.0) > 1e-9) {
    throw InvalidParameter("alpha must be a unit vector");
  }
  const int m = static_cast<int>(alpha.size());
  Amplitudes amps;
  for (const auto& occ : enumerate_occupations(n_particles, m, statistics)) {
    amps.emplace(occ, product_coefficient(alpha, occ, n_particles));
  }
  return FockState(statistics, m, n_particles, std::move(amps));
}

std::variant<AlphaVector, NotSingleMode> extract_alpha(const FockState& state, double tol) {
  const int n = state.n_particles();
  const int m = state.n_modes();
  if (n == 0) throw InvalidParameter("alpha is undefined for the vacuum");
  if (state.statistics() == Statistics::Fermion && n >= 2) {
    return NotSingleMode{"Pauli exclusion: no two fermions share a mode", std::nullopt, 0.0};
  }

  double scale = 0.0;
  for (const auto& [occ, a] : state.amplitudes()) scale = std::max(scale, std::abs(a));
  if (scale == 0.0) throw ZeroState("state vector vanishes");

  // Reference mode: largest all-in-one-mode coefficient.
  int ref = 0;
  double ref_abs = -1.0;
  for (int j = 0; j < m; ++j) {
    Occupation e(m, 0);
    e[j] = n;
    const double v = std::abs(state.amplitude(e));
    if (v > ref_abs) {
      ref_abs = v;
      ref = j;
    }
  }
  if (ref_abs < tol * scale) {
    // Every mode fails the support test; any stored coefficient witnesses it.
    const auto& [occ, a] = *std::max_element(
        state.amplitudes().begin(), state.amplitudes().end(),
        [](const auto& x, const auto& y) { return std::abs(x.second) < std::abs(y.second); });
    return NotSingleMode{"no mode holds all particles with nonzero amplitude", occ,
                         std::abs(a) / scale};
  }
  Occupation all_ref(m, 0);
  all_ref[ref] = n;
  const Complex c_ref = state.amplitude(all_ref);

  NotSingleMode best{"coefficients do not factor into product form", std::nullopt, 0.0};
  bool have_best = false;
  for (int k = 0; k < n; ++k) {
    const double theta = (std::arg(c_ref) + 2.0 * std::numbers::pi * k) / n;
    const Complex u_ref = std::polar(std::pow(std::abs(c_ref), 1.0 / n), theta);
    AlphaVector alpha(m);
    for (int i = 0; i < m; ++i) {
      if (i == ref) {
        alpha(i) = u_ref;
        continue;
      }
      Occupation occ = all_ref;
      --occ[ref];
      ++occ[i];
      alpha(i) = state.amplitude(occ) / (std::sqrt(static_cast<double>(n)) *
                                         std::pow(u_ref, n - 1));
    }
    const Check c = verify(state, alpha, scale);
    if (c.residual <= tol) return canonical_phase(alpha / alpha.norm());
    if (!have_best || c.residual < best.residual) {
      best.residual = c.residual;
      best.violated = c.worst;
      have_best = true;
    }
  }
  return best;
}

Classification is_single_mode_type(const FockState& state, double tol) {
  Classification out;
  if (state.statistics() == Statistics::Fermion && state.n_particles() >= 2) {
    out.reason = "Pauli exclusion: no two fermions share a mode";
    return out;
  }
  if (state.n_particles() == 0) {
    out.single_mode = true;
    out.reason = "vacuum";
    return out;
  }
  auto r = extract_alpha(state, tol);
  if (auto* alpha = std::get_if<AlphaVector>(&r)) {
    out.single_mode = true;
    out.alpha = *alpha;
    double scale = 0.0;
    for (const auto& [occ, a] : state.amplitudes()) scale = std::max(scale, std::abs(a));
    out.residual = verify(state, *alpha, scale).residual;
    return out;
  }
  const auto& failure = std::get<NotSingleMode>(r);
  out.reason = failure.reason;
  out.violated = failure.violated;
  out.residual = failure.residual;
  return out;
}

AlphaVector transform_alpha(const AlphaVector& alpha, const ModeUnitary& u) {
  if (alpha.size() != u.dim()) throw ShapeMismatch("alpha and unitary differ in dimension");
  return (alpha.transpose() * u.matrix()).transpose();
}

double phase_insensitive_distance(const AlphaVector& a, const AlphaVector& b) {
  if (a.size() != b.size()) throw ShapeMismatch("alpha vectors differ in length");
  const Complex overlap = b.dot(a);  // conj(b) . a
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0};
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace fockopt
