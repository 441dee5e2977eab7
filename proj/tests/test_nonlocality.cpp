#include <random>

#include "doctest.h"
#include "fockopt/classifier.hpp"
#include "fockopt/nonlocality.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fockopt;
using testing::kInvSqrt2;

namespace {

const Statistics B = Statistics::Boson;
const Statistics F = Statistics::Fermion;
const double kTsirelson = 2.0 * std::sqrt(2.0);

FockState two_mode(Complex alpha, Complex beta, Complex gamma, Statistics s = B) {
  Amplitudes a;
  if (s == B) {
    a[{2, 0}] = alpha;
    a[{0, 2}] = gamma;
  }
  a[{1, 1}] = beta;
  return FockState(s, 2, 2, a).normalized();
}

TwoQubitState random_chi(std::mt19937_64& rng) {
  const Eigen::VectorXcd v = oracle::random_unit_vector(4, rng);
  return {v(0), v(1), v(2), v(3)};
}

}  // namespace

TEST_CASE("Yurke-Stoler on |11>") {
  const PostSelection b = yurke_stoler_postselect(make_number_state({1, 1}, B));
  CHECK(b.probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(b.chi.e) < 1e-15);
  CHECK(std::abs(b.chi.h) < 1e-15);
  CHECK(testing::close(b.chi.f, kInvSqrt2));
  CHECK(testing::close(b.chi.g, kInvSqrt2));

  const PostSelection f = yurke_stoler_postselect(make_number_state({1, 1}, F));
  CHECK(f.probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(testing::close(f.chi.f, kInvSqrt2));
  CHECK(testing::close(f.chi.g, -kInvSqrt2));

  CHECK_THROWS_AS(yurke_stoler_postselect(make_number_state({1, 1, 0}, B)), ShapeMismatch);
  CHECK_THROWS_AS(yurke_stoler_postselect(make_number_state({2, 1}, B)), ShapeMismatch);
}

TEST_CASE("Yurke-Stoler amplitudes") {
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    const FockState phi = oracle::random_state(2, 2, B, rng);
    const Complex al = phi.amplitude({2, 0}), be = phi.amplitude({1, 1}), ga = phi.amplitude({0, 2});
    const PostSelection ys = yurke_stoler_postselect(phi);
    CHECK(ys.probability == doctest::Approx(0.5).epsilon(1e-12));
    const double s = std::sqrt(ys.probability);
    CHECK(testing::close(ys.chi.e * s, al / std::sqrt(2.0)));
    CHECK(testing::close(ys.chi.f * s, be / 2.0));
    CHECK(testing::close(ys.chi.g * s, be / 2.0));
    CHECK(testing::close(ys.chi.h * s, ga / std::sqrt(2.0)));
    CHECK(product_condition(ys.chi) == (std::abs(be * be - 2.0 * al * ga) < 1e-9));
  }
}

TEST_CASE("single-mode input gives a product state") {
  const FockState phi = two_mode(0.5, kInvSqrt2, 0.5);
  const PostSelection ys = yurke_stoler_postselect(phi);
  CHECK(product_condition(ys.chi));
  CHECK(chsh_max(ys.chi).chsh == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("product condition") {
  CHECK_FALSE(product_condition({0.0, kInvSqrt2, kInvSqrt2, 0.0}));
  CHECK(product_condition({1.0, 0.0, 0.0, 0.0}));
}

TEST_CASE("CHSH maximum") {
  const BellTestResult singlet = chsh_max({0.0, kInvSqrt2, -kInvSqrt2, 0.0});
  CHECK(singlet.chsh == doctest::Approx(kTsirelson).epsilon(1e-12));
  CHECK(singlet.violated);
  const BellTestResult triplet = chsh_max({0.0, kInvSqrt2, kInvSqrt2, 0.0});
  CHECK(triplet.chsh == doctest::Approx(kTsirelson).epsilon(1e-12));
  const BellTestResult product = chsh_max({1.0, 0.0, 0.0, 0.0});
  CHECK(product.chsh == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(product.violated);
  const BellTestResult tilted = chsh_max({0.6, 0.0, 0.0, 0.8});
  CHECK(tilted.chsh == doctest::Approx(2.0 * std::sqrt(1.0 + 4 * 0.36 * 0.64)).epsilon(1e-12));
}

TEST_CASE("CHSH settings attain the maximum and entangled pure states violate") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const TwoQubitState chi = random_chi(rng);
    const BellTestResult r = chsh_max(chi);
    CHECK(chsh_value(chi, r.party_a, r.party_b) == doctest::Approx(r.chsh).epsilon(1e-9));
    CHECK(r.chsh <= kTsirelson + 1e-9);
    CHECK(r.chsh >= 2.0 - 1e-9);
    CHECK(product_condition(chi) == (r.chsh <= 2.0 + 1e-9));
  }
  // Product states built explicitly.
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXcd a = oracle::random_unit_vector(2, rng);
    const Eigen::VectorXcd b = oracle::random_unit_vector(2, rng);
    const TwoQubitState chi{a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1)};
    CHECK(product_condition(chi));
    CHECK(chsh_max(chi).chsh <= 2.0 + 1e-9);
  }
}

TEST_CASE("qubit bases") {
  const QubitBasis z = QubitBasis::from_bloch({0.0, 0.0, 1.0});
  CHECK(z.vectors.isApprox(Eigen::Matrix2cd::Identity()));
  const QubitBasis x = QubitBasis::from_bloch({2.0, 0.0, 0.0});
  CHECK(x.vectors.isApprox(testing::hadamard2()));
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector3d n = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
    const QubitBasis b = QubitBasis::from_bloch(n);
    CHECK((b.bloch() - n).norm() < 1e-12);
    CHECK(unitarity_defect(b.vectors) < 1e-12);
  }
  CHECK_THROWS_AS(QubitBasis::from_bloch(Eigen::Vector3d::Zero()), InvalidParameter);
}

TEST_CASE("dual-rail measurement circuits") {
  CHECK(dual_rail_measurement_circuit(QubitBasis::from_bloch({0, 0, 1}), 0, 1, 2).elements().empty());
  const Circuit x = dual_rail_measurement_circuit(QubitBasis::from_bloch({1, 0, 0}), 0, 1, 2);
  REQUIRE(x.elements().size() == 1);
  CHECK(std::get<BeamSplitter>(x.elements()[0]).matrix.isApprox(testing::hadamard2()));

  QubitBasis phased;
  phased.vectors << Complex(0.0, 1.0), 0.0, 0.0, -1.0;
  const Circuit p = dual_rail_measurement_circuit(phased, 0, 1, 2);
  CHECK(p.elements().size() == 2);
  for (const auto& e : p.elements()) CHECK(std::holds_alternative<PhaseShifter>(e));

  QubitBasis skew;
  skew.vectors << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(dual_rail_measurement_circuit(skew, 0, 1, 2), NotUnitary);

  // Detector statistics after the circuit follow the Born rule.
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const QubitBasis b = QubitBasis::from_bloch({g(rng), g(rng), g(rng)});
    const FockState q = oracle::random_state(1, 2, B, rng);
    const Eigen::Vector2cd v(q.amplitude({1, 0}), q.amplitude({0, 1}));
    const CircuitRun run = run_circuit(q, dual_rail_measurement_circuit(b, 0, 1, 2));
    const double born = std::norm(b.vectors.col(0).dot(v));
    CHECK(std::abs(detection_distribution(run.state)[{1, 0}] - born) < 1e-9);
  }
}

TEST_CASE("filter condition residuals") {
  std::mt19937_64 rng(34);
  for (int n = 2; n <= 5; ++n) {
    const FilterConditions c = filter_condition_residuals(single_mode_state(oracle::random_unit_vector(2, rng), n));
    CHECK(c.residuals.size() == static_cast<std::size_t>(n - 1));
    for (double r : c.residuals) CHECK(r < 1e-10);
    CHECK_FALSE(c.noon);
  }
  const FockState noon3(B, 2, 3, {{{3, 0}, kInvSqrt2}, {{0, 3}, kInvSqrt2}});
  const FilterConditions nc = filter_condition_residuals(noon3);
  CHECK(nc.middle_vanish);
  CHECK(nc.noon);
  for (double r : nc.residuals) CHECK(r < 1e-15);

  const FilterConditions one = filter_condition_residuals(make_number_state({1, 1}, B));
  REQUIRE(one.residuals.size() == 1);
  CHECK(one.residuals[0] == doctest::Approx(1.0));

  CHECK(filter_condition_residuals(make_number_state({1, 0}, B)).residuals.empty());
  CHECK_THROWS_AS(filter_condition_residuals(make_number_state({1, 1, 0}, B)), ShapeMismatch);
  CHECK_THROWS_AS(filter_condition_residuals(make_number_state({1, 1}, F)), ShapeMismatch);
}

TEST_CASE("filtered Yurke-Stoler") {
  const AlphaVector balanced = Eigen::Vector2cd(kInvSqrt2, kInvSqrt2);
  CHECK(run_filtered_ys(single_mode_state(balanced, 3), 0).chsh == doctest::Approx(2.0).epsilon(1e-9));

  // beta_n multiplies n particles in mode 1, so |21> has beta_2 = 1. It
  // reaches the a1^dag a2^dag slot of the filter at s = 1; at s = 0 it lands
  // on (a1^dag)^2.
  const CircuitRun heralded = filtered_state(make_number_state({2, 1}, B), 1);
  CHECK(heralded.state.amplitudes().size() == 1);
  CHECK(std::abs(heralded.state.amplitude({1, 1})) == doctest::Approx(1.0));
  const BellTestResult r21 = run_filtered_ys(make_number_state({2, 1}, B), 1);
  CHECK(r21.chsh == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
  CHECK(r21.success_probability > 0.0);
  CHECK(std::abs(filtered_state(make_number_state({2, 1}, B), 0).state.amplitude({2, 0})) ==
        doctest::Approx(1.0));
  CHECK(run_filtered_ys(make_number_state({2, 1}, B), 0).chsh == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(run_filtered_ys(make_number_state({1, 2}, B), 0).chsh ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

  const FockState noon3(B, 2, 3, {{{3, 0}, kInvSqrt2}, {{0, 3}, kInvSqrt2}});
  const CircuitRun noon_heralded = filtered_state(noon3, 0);
  CHECK(std::abs(noon_heralded.state.amplitude({0, 2})) == doctest::Approx(1.0));
  CHECK(run_filtered_ys(noon3, 0).chsh == doctest::Approx(2.0).epsilon(1e-9));

  CHECK_THROWS_AS(run_filtered_ys(make_number_state({3, 0}, B), 0), ZeroOutcome);
}

TEST_CASE("filter heralds the binomially weighted neighbours") {
  // Heralding (s, N-s-2) keeps beta_s, beta_{s+1}, beta_{s+2} with weights
  // from expanding (a1 + a1'')^n (a2 + a2'')^(N-n).
  std::mt19937_64 rng(35);
  const int n = 5;
  const FockState phi = oracle::random_state(n, 2, B, rng);
  for (int s = 0; s + 2 <= n; ++s) {
    const CircuitRun run = filtered_state(phi, s);
    auto expected = [&](int in_mode1) {
      const int k = s + in_mode1;  // particles of mode 1 before the filter
      const int r = n - k;
      const double binom1 = oracle::factorial(k) / (oracle::factorial(s) * oracle::factorial(in_mode1));
      const double binom2 = oracle::factorial(r) / (oracle::factorial(n - s - 2) * oracle::factorial(2 - in_mode1));
      const double norm_in = std::sqrt(oracle::factorial(k) * oracle::factorial(r));
      const double norm_out = std::sqrt(oracle::factorial(s) * oracle::factorial(n - s - 2) *
                                        oracle::factorial(in_mode1) * oracle::factorial(2 - in_mode1));
      return phi.amplitude({k, r}) * binom1 * binom2 * norm_out / norm_in / std::pow(2.0, n / 2.0);
    };
    const double p = std::sqrt(run.probability);
    for (int j = 0; j <= 2; ++j) {
      CHECK(std::abs(run.state.amplitude({j, 2 - j}) * p - expected(j)) < 1e-9);
    }
  }
}

TEST_CASE("quantum erasure") {
  const FockState noon3(B, 2, 3, {{{3, 0}, kInvSqrt2}, {{0, 3}, kInvSqrt2}});
  CHECK(run_erasure_ys(noon3).chsh == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

  CHECK(run_erasure_ys(make_number_state({0, 4}, B)).chsh == doctest::Approx(2.0).epsilon(1e-9));

  const FockState noon4(B, 2, 4, {{{0, 4}, 0.6}, {{4, 0}, 0.8}});
  const BellTestResult r = run_erasure_ys(noon4);
  CHECK(r.chsh > 2.0 + 1e-6);
  // The heralded pair is proportional to beta_N (a1^dag)^2 + beta_0 (a2^dag)^2 up to a relative phase.
  const CircuitRun erased = erased_state(noon4);
  CHECK(std::abs(erased.state.amplitude({2, 0})) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(std::abs(erased.state.amplitude({0, 2})) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(std::abs(erased.state.amplitude({1, 1})) < 1e-12);

  CHECK_THROWS_AS(run_erasure_ys(make_number_state({2, 1}, B)), InvalidParameter);
}
