#include "fockopt/nonlocality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fockopt {

namespace {

const std::array<Eigen::Matrix2cd, 3>& paulis() {
  static const std::array<Eigen::Matrix2cd, 3> s = [] {
    const Complex i{0.0, 1.0};
    Eigen::Matrix2cd x, y, z;
    x << 0.0, 1.0, 1.0, 0.0;
    y << 0.0, -i, i, 0.0;
    z << 1.0, 0.0, 0.0, -1.0;
    return std::array<Eigen::Matrix2cd, 3>{x, y, z};
  }();
  return s;
}

Eigen::Vector2cd canonical_column(Eigen::Vector2cd v) {
  for (int k = 0; k < 2; ++k) {
    if (std::abs(v(k)) > 1e-15) {
      v *= std::conj(v(k)) / std::abs(v(k));
      break;
    }
  }
  return v;
}

void require_two_modes(const FockState& phi, const char* what) {
  if (phi.n_modes() != 2) {
    throw ShapeMismatch(std::string(what) + " needs a two-mode state");
  }
}

bool middle_coefficients_vanish(const FockState& phi, double tol) {
  const int n = phi.n_particles();
  for (int k = 1; k < n; ++k) {
    if (std::abs(phi.amplitude({k, n - k})) >= tol) return false;
  }
  return true;
}

BellTestResult bell_test_after(const CircuitRun& prepared) {
  const PostSelection ys = yurke_stoler_postselect(prepared.state);
  BellTestResult r = chsh_max(ys.chi);
  r.success_probability = prepared.probability * ys.probability;
  return r;
}

}  // namespace

QubitBasis QubitBasis::from_bloch(const Eigen::Vector3d& n) {
  const double len = n.norm();
  if (len == 0.0) throw InvalidParameter("measurement direction must be nonzero");
  const Eigen::Vector3d u = n / len;
  const double theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
  const double phi = std::atan2(u.y(), u.x());
  const Complex e = std::polar(1.0, phi);
  Eigen::Vector2cd plus(std::cos(theta / 2), e * std::sin(theta / 2));
  Eigen::Vector2cd minus(std::sin(theta / 2), -e * std::cos(theta / 2));
  QubitBasis b;
  b.vectors.col(0) = canonical_column(plus);
  b.vectors.col(1) = canonical_column(minus);
  return b;
}

Eigen::Vector3d QubitBasis::bloch() const {
  const Complex v0 = vectors(0, 0);
  const Complex v1 = vectors(1, 0);
  const Complex c = std::conj(v0) * v1;
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(v0) - std::norm(v1)};
}

PostSelection postselect_dual_rail(const FockState& state, std::array<int, 2> pair_a,
                                   std::array<int, 2> pair_b) {
  if (state.n_particles() != 2) {
    throw ShapeMismatch("dual-rail post-selection needs exactly two particles");
  }
  const int m = state.n_modes();
  for (int mode : {pair_a[0], pair_a[1], pair_b[0], pair_b[1]}) {
    if (mode < 0 || mode >= m) throw ShapeMismatch("dual-rail mode out of range");
  }
  const bool fermion = state.statistics() == Statistics::Fermion;
  std::array<Complex, 4> c{};
  double probability = 0.0;
  for (int ia = 0; ia < 2; ++ia) {
    for (int ib = 0; ib < 2; ++ib) {
      const int x = pair_a[ia];
      const int y = pair_b[ib];
      Occupation occ(m, 0);
      occ[x] = 1;
      occ[y] = 1;
      Complex a = state.amplitude(occ);
      if (fermion && x > y) a = -a;
      c[2 * ia + ib] = a;
      probability += std::norm(a);
    }
  }
  if (probability < kHeraldCutoff) throw ZeroOutcome("no coincidence between the two pairs");
  const double s = std::sqrt(probability);
  return {{c[0] / s, c[1] / s, c[2] / s, c[3] / s}, probability};
}

PostSelection yurke_stoler_postselect(const FockState& phi) {
  if (phi.n_particles() != 2 || phi.n_modes() != 2) {
    throw ShapeMismatch("Yurke-Stoler test needs two particles in two modes");
  }
  const CircuitRun run = run_circuit(embed_modes(phi, 4), yurke_stoler_circuit());
  return postselect_dual_rail(run.state, {0, 2}, {3, 1});
}

bool product_condition(const TwoQubitState& chi, double tol) {
  return std::abs(chi.e * chi.h - chi.f * chi.g) < tol;
}

Eigen::Matrix3d correlation_matrix(const TwoQubitState& chi) {
  const Eigen::Vector4cd v = chi.vector();
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::Matrix4cd op;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int a2 = 0; a2 < 2; ++a2)
            for (int b2 = 0; b2 < 2; ++b2)
              op(2 * a + b, 2 * a2 + b2) = paulis()[i](a, a2) * paulis()[j](b, b2);
      t(i, j) = v.dot(op * v).real();
    }
  }
  return t;
}

namespace {

double correlation(const Eigen::Vector4cd& v, const QubitBasis& a, const QubitBasis& b) {
  double e = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      Complex amp{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          amp += std::conj(a.vectors(i, x)) * std::conj(b.vectors(j, y)) * v(2 * i + j);
      e += (x == y ? 1.0 : -1.0) * std::norm(amp);
    }
  }
  return e;
}

Eigen::Vector3d unit_or(const Eigen::Vector3d& v, const Eigen::Vector3d& fallback) {
  const double n = v.norm();
  return n > 1e-12 ? Eigen::Vector3d(v / n) : fallback;
}

}  // namespace

double chsh_value(const TwoQubitState& chi, const std::array<QubitBasis, 2>& party_a,
                  const std::array<QubitBasis, 2>& party_b) {
  const Eigen::Vector4cd v = chi.vector();
  return correlation(v, party_a[0], party_b[0]) + correlation(v, party_a[0], party_b[1]) +
         correlation(v, party_a[1], party_b[0]) - correlation(v, party_a[1], party_b[1]);
}

BellTestResult chsh_max(const TwoQubitState& chi) {
  const Eigen::Matrix3d t = correlation_matrix(chi);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(t.transpose() * t);
  const double l1 = std::max(eig.eigenvalues()(2), 0.0);
  const double l2 = std::max(eig.eigenvalues()(1), 0.0);
  const Eigen::Vector3d c1 = eig.eigenvectors().col(2);
  const Eigen::Vector3d c2 = eig.eigenvectors().col(1);

  const double angle = std::atan2(std::sqrt(l2), std::sqrt(l1));
  const Eigen::Vector3d b = std::cos(angle) * c1 + std::sin(angle) * c2;
  const Eigen::Vector3d b2 = std::cos(angle) * c1 - std::sin(angle) * c2;
  const Eigen::Vector3d a = unit_or(t * (b + b2), Eigen::Vector3d::UnitZ());
  const Eigen::Vector3d a2 = unit_or(t * (b - b2), Eigen::Vector3d::UnitX());

  BellTestResult r;
  r.chsh = 2.0 * std::sqrt(l1 + l2);
  r.party_a = {QubitBasis::from_bloch(a), QubitBasis::from_bloch(a2)};
  r.party_b = {QubitBasis::from_bloch(b), QubitBasis::from_bloch(b2)};
  const double direct = chsh_value(chi, r.party_a, r.party_b);
  if (std::abs(direct - r.chsh) > 1e-9) {
    throw Error("optimal CHSH settings reach " + std::to_string(direct) + " instead of " +
                std::to_string(r.chsh));
  }
  r.violated = r.chsh > 2.0 + kViolationMargin;
  return r;
}

Circuit dual_rail_measurement_circuit(const QubitBasis& basis, int s, int s2, int n_modes) {
  if (unitarity_defect(basis.vectors) > kUnitaryTolerance) {
    throw NotUnitary("measurement basis is not orthonormal");
  }
  const Eigen::Matrix2cd w = basis.vectors.conjugate();
  constexpr double eps = 1e-12;
  if ((w - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < eps) return Circuit(n_modes);
  if (std::abs(w(0, 1)) < eps && std::abs(w(1, 0)) < eps) {
    std::vector<GateElement> phases;
    if (std::abs(w(0, 0) - 1.0) >= eps) phases.push_back(PhaseShifter{s, std::arg(w(0, 0))});
    if (std::abs(w(1, 1) - 1.0) >= eps) phases.push_back(PhaseShifter{s2, std::arg(w(1, 1))});
    return Circuit(n_modes, std::move(phases));
  }
  return Circuit(n_modes, {BeamSplitter{s, s2, w}});
}

FilterConditions filter_condition_residuals(const FockState& phi, double tol) {
  require_two_modes(phi, "filter conditions");
  if (phi.statistics() != Statistics::Boson) {
    throw ShapeMismatch("filter conditions apply to bosons");
  }
  const int n = phi.n_particles();
  auto beta = [&](int k) { return phi.amplitude({k, n - k}); };
  FilterConditions out;
  for (int s = 0; s + 2 <= n; ++s) {
    const double w = std::sqrt((s + 2.0) / (s + 1.0)) * std::sqrt((n - s) / (n - s - 1.0));
    out.residuals.push_back(std::abs(beta(s + 1) * beta(s + 1) - beta(s) * beta(s + 2) * w));
  }
  out.middle_vanish = n >= 2 && middle_coefficients_vanish(phi, tol);
  out.noon = out.middle_vanish && std::abs(beta(0)) >= tol && std::abs(beta(n)) >= tol;
  return out;
}

CircuitRun filtered_state(const FockState& phi, int s) {
  require_two_modes(phi, "two-particle filter");
  return run_circuit(embed_modes(phi, 4), two_particle_filter_circuit(s, phi.n_particles()));
}

BellTestResult run_filtered_ys(const FockState& phi, int s) {
  return bell_test_after(filtered_state(phi, s));
}

CircuitRun erased_state(const FockState& phi) {
  require_two_modes(phi, "quantum erasure");
  if (phi.n_particles() < 2 || !middle_coefficients_vanish(phi, 1e-9)) {
    throw InvalidParameter("quantum erasure needs a NOON-type state");
  }
  return run_circuit(embed_modes(phi, 4), quantum_erasure_circuit(phi.n_particles()));
}

BellTestResult run_erasure_ys(const FockState& phi) {
  return bell_test_after(erased_state(phi));
}

}  // namespace fockopt
