#include <random>

#include "doctest.h"
#include "fockopt/classifier.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fockopt;
using testing::kInvSqrt2;

namespace {

const Statistics B = Statistics::Boson;
const Statistics F = Statistics::Fermion;

AlphaVector vec(std::initializer_list<Complex> xs) {
  AlphaVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (Complex x : xs) v(i++) = x;
  return v;
}

AlphaVector expect_alpha(const FockState& s) {
  auto r = extract_alpha(s);
  REQUIRE(std::holds_alternative<AlphaVector>(r));
  return std::get<AlphaVector>(r);
}

}  // namespace

TEST_CASE("product-form states") {
  const FockState all = single_mode_state(vec({1.0, 0.0}), 3);
  CHECK(all.amplitudes().size() == 1);
  CHECK(testing::close(all.amplitude({3, 0}), 1.0));

  const FockState h = single_mode_state(vec({kInvSqrt2, kInvSqrt2}), 2);
  CHECK(testing::close(h.amplitude({2, 0}), 0.5));
  CHECK(testing::close(h.amplitude({1, 1}), kInvSqrt2));
  CHECK(testing::close(h.amplitude({0, 2}), 0.5));

  const FockState one = single_mode_state(vec({kInvSqrt2, Complex(0.0, kInvSqrt2)}), 1);
  CHECK(testing::close(one.amplitude({1, 0}), kInvSqrt2));
  CHECK(testing::close(one.amplitude({0, 1}), Complex(0.0, kInvSqrt2)));

  CHECK_NOTHROW(single_mode_state(vec({0.6, 0.8}), 1, F));
  CHECK_THROWS_AS(single_mode_state(vec({0.6, 0.8}), 2, F), PauliForbidden);
  CHECK_THROWS_AS(single_mode_state(vec({1.0, 1.0}), 2), InvalidParameter);
}

TEST_CASE("extract alpha examples") {
  const AlphaVector a = expect_alpha(make_number_state({0, 3, 0}, B));
  CHECK(phase_insensitive_distance(a, vec({0.0, 1.0, 0.0})) < 1e-12);

  const FockState noon(B, 2, 2, {{{2, 0}, kInvSqrt2}, {{0, 2}, kInvSqrt2}});
  CHECK(std::holds_alternative<NotSingleMode>(extract_alpha(noon)));

  const FockState bell(B, 4, 2, {{{1, 0, 1, 0}, kInvSqrt2}, {{0, 1, 0, 1}, kInvSqrt2}});
  CHECK(std::holds_alternative<NotSingleMode>(extract_alpha(bell)));

  const FockState h(B, 2, 2, {{{2, 0}, 0.5}, {{1, 1}, kInvSqrt2}, {{0, 2}, 0.5}});
  CHECK(phase_insensitive_distance(expect_alpha(h), vec({kInvSqrt2, kInvSqrt2})) < 1e-12);

  CHECK_THROWS_AS(extract_alpha(FockState::vacuum(B, 2)), InvalidParameter);
}

TEST_CASE("classification") {
  const auto f = is_single_mode_type(make_number_state({1, 1}, F));
  CHECK_FALSE(f.single_mode);
  CHECK(f.reason.find("Pauli") != std::string::npos);

  const auto b = is_single_mode_type(make_number_state({1, 1}, B));
  CHECK_FALSE(b.single_mode);
  REQUIRE(b.violated.has_value());

  std::mt19937_64 rng(20);
  for (auto stats : {B, F}) {
    for (int m = 1; m <= 4; ++m) {
      const auto c = is_single_mode_type(oracle::random_state(1, m, stats, rng));
      CHECK(c.single_mode);
      CHECK(c.alpha.has_value());
    }
  }

  const auto vac = is_single_mode_type(FockState::vacuum(B, 3));
  CHECK(vac.single_mode);
  CHECK_FALSE(vac.alpha.has_value());

  // Off-diagonal coefficients may be far above the tolerance while the
  // all-in-one-mode coefficient of a weak mode is far below it.
  AlphaVector weak = vec({1.0, 1e-5});
  weak /= weak.norm();
  CHECK(is_single_mode_type(single_mode_state(weak, 3)).single_mode);
  // A state that differs only in a tiny coefficient is still rejected.
  FockState almost(B, 2, 2, {{{2, 0}, 1.0}, {{1, 1}, 1e-3}});
  CHECK_FALSE(is_single_mode_type(almost.normalized()).single_mode);
}

TEST_CASE("transform alpha") {
  const ModeUnitary h(testing::hadamard2());
  CHECK(phase_insensitive_distance(transform_alpha(vec({1.0, 0.0}), h), vec({kInvSqrt2, kInvSqrt2})) < 1e-15);
  std::mt19937_64 rng(21);
  const AlphaVector a = oracle::random_unit_vector(3, rng);
  CHECK(phase_insensitive_distance(transform_alpha(a, ModeUnitary::identity(3)), a) == 0.0);
  CHECK_THROWS_AS(transform_alpha(a, h), ShapeMismatch);
  const ModeUnitary u(oracle::random_unitary(3, rng));
  CHECK(transform_alpha(a, u).norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("alpha round trip and equivariance") {
  std::mt19937_64 rng(22);
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 5; ++n) {
      const AlphaVector a = oracle::random_unit_vector(m, rng);
      const FockState s = single_mode_state(a, n);
      CHECK(phase_insensitive_distance(expect_alpha(s), a) < 1e-9);

      const ModeUnitary u(oracle::random_unitary(m, rng));
      const FockState moved = apply_mode_unitary(s, u);
      const auto c = is_single_mode_type(moved);
      REQUIRE(c.single_mode);
      CHECK(phase_insensitive_distance(*c.alpha, transform_alpha(a, u)) < 1e-9);
    }
  }
}

TEST_CASE("non-single-mode states stay so under unitaries") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 3;
    const int n = 2 + trial % 3;
    const FockState s = oracle::random_state(n, m, B, rng);
    REQUIRE_FALSE(is_single_mode_type(s).single_mode);
    const FockState moved = apply_mode_unitary(s, ModeUnitary(oracle::random_unitary(m, rng)));
    CHECK_FALSE(is_single_mode_type(moved).single_mode);
  }
}

TEST_CASE("distinct alphas give distinct states") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 3;
    const int n = 1 + trial % 4;
    const AlphaVector a = oracle::random_unit_vector(m, rng);
    const AlphaVector b = oracle::random_unit_vector(m, rng);
    REQUIRE(phase_insensitive_distance(a, b) > 1e-6);
    CHECK(fidelity(single_mode_state(a, n), single_mode_state(b, n)) < 1.0 - 1e-9);
  }
}

TEST_CASE("single-mode detection statistics are multinomial") {
  std::mt19937_64 rng(25);
  const AlphaVector a = oracle::random_unit_vector(3, rng);
  const int n = 4;
  for (const auto& [occ, p] : detection_distribution(single_mode_state(a, n))) {
    double expected = oracle::factorial(n);
    for (int i = 0; i < 3; ++i) {
      expected *= std::pow(std::norm(a(i)), occ[i]) / oracle::factorial(occ[i]);
    }
    CHECK(std::abs(p - expected) < 1e-12);
  }
}

TEST_CASE("reported residual of an accepted state is at rounding level") {
  AlphaVector a(2);
  a << 0.6, Complex(0.0, 0.8) * std::polar(1.0, 0.3);
  const auto c = is_single_mode_type(single_mode_state(a, 3));
  REQUIRE(c.single_mode);
  CHECK(c.residual < 1e-12);
}
