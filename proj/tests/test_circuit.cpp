#include <numbers>
#include <random>

#include "doctest.h"
#include "fockopt/circuit.hpp"
#include "fockopt/circuit_io.hpp"
#include "fockopt/nonlocality.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fockopt;
using testing::kInvSqrt2;

namespace {

const Statistics B = Statistics::Boson;
const Statistics F = Statistics::Fermion;

int count_beam_splitters(const Circuit& c) {
  int n = 0;
  for (const auto& e : c.elements()) n += std::holds_alternative<BeamSplitter>(e);
  return n;
}

int count_phase_shifters(const Circuit& c) {
  int n = 0;
  for (const auto& e : c.elements()) n += std::holds_alternative<PhaseShifter>(e);
  return n;
}

}  // namespace

TEST_CASE("circuit validation") {
  CHECK_THROWS_AS(Circuit(2, {PhaseShifter{2, 0.1}}), InvalidCircuit);
  CHECK_THROWS_AS(Circuit(2, {BeamSplitter{0, 0, hadamard()}}), InvalidCircuit);
  Eigen::Matrix2cd bad;
  bad << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(Circuit(2, {BeamSplitter{0, 1, bad}}), InvalidCircuit);
  CHECK_THROWS_AS(Circuit(2, {Detector{1, 0}, PhaseShifter{1, 0.3}}), InvalidCircuit);
  CHECK_THROWS_AS(Circuit(2, {Detector{0, 0}, Detector{0, 0}}), InvalidCircuit);
  CHECK_THROWS_AS(Circuit(2, {Detector{0, 0}, Detector{1, 0}}), InvalidCircuit);
  CHECK_THROWS_AS(Circuit(3, {Detector{1, 0}}, std::vector<int>{0, 1}), InvalidCircuit);
  CHECK_NOTHROW(Circuit(3, {Detector{1, 0}}, std::vector<int>{2, 0}));
  CHECK_THROWS_AS(Circuit(0), InvalidCircuit);
}

TEST_CASE("phases are stored in [0, 2 pi)") {
  const Circuit c(1, {PhaseShifter{0, -0.5}, PhaseShifter{0, 7.0}});
  CHECK(std::get<PhaseShifter>(c.elements()[0]).phi ==
        doctest::Approx(2 * std::numbers::pi - 0.5));
  CHECK(std::get<PhaseShifter>(c.elements()[1]).phi == doctest::Approx(7.0 - 2 * std::numbers::pi));
}

TEST_CASE("heralds, outputs and readout modes") {
  const Circuit c(4, {Detector{1, 2}, Detector{3, std::nullopt}});
  CHECK(c.heralds() == std::map<int, int>{{1, 2}});
  CHECK(c.outputs() == std::vector<int>{0, 2, 3});
  CHECK(c.readout_modes() == std::vector<int>{3});
  CHECK(c.has_detectors());
  CHECK_FALSE(Circuit(2).has_detectors());
}

TEST_CASE("run circuit examples") {
  const CircuitRun hom =
      run_circuit(make_number_state({1, 1}, B), Circuit(2, {BeamSplitter{0, 1, hadamard()}}));
  CHECK(hom.probability == 1.0);
  CHECK(testing::close(hom.state.amplitude({2, 0}), kInvSqrt2));
  CHECK(testing::close(hom.state.amplitude({0, 2}), -kInvSqrt2));

  std::mt19937_64 rng(8);
  const FockState s = oracle::random_state(2, 3, B, rng);
  const CircuitRun same = run_circuit(s, Circuit(3));
  CHECK(testing::max_difference(same.state, s) < 1e-15);
  CHECK(same.probability == 1.0);

  CHECK_THROWS_AS(run_circuit(s, Circuit(2)), ShapeMismatch);
  CHECK_THROWS_AS(run_circuit(make_number_state({1, 1, 0}, B), Circuit(3, {Detector{2, 1}})),
                  ZeroOutcome);
}

TEST_CASE("fermion herald circuit prepares |11>") {
  std::mt19937_64 rng(9);
  const FockState s = oracle::random_state(3, 5, F, rng);
  const Complex target = s.amplitude({1, 1, 0, 1, 0});
  const CircuitRun run = run_circuit(s, fermion_herald_circuit(5, {0, 1, 0}));
  CHECK(run.probability == doctest::Approx(std::norm(target)).epsilon(1e-12));
  CHECK(run.state.amplitudes().size() == 1);
  CHECK(std::abs(run.state.amplitude({1, 1})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fermion_herald_circuit(4, {0}), InvalidParameter);
}

TEST_CASE("circuit to unitary") {
  const double phi = 0.7;
  const ModeUnitary ps = circuit_to_unitary(Circuit(2, {PhaseShifter{0, phi}}));
  CHECK(testing::close(ps(0, 0), std::polar(1.0, phi)));
  CHECK(testing::close(ps(1, 1), 1.0));
  CHECK(std::abs(ps(0, 1)) == 0.0);

  const ModeUnitary h = circuit_to_unitary(Circuit(2, {BeamSplitter{0, 1, hadamard()}}));
  CHECK(h.matrix().isApprox(Eigen::MatrixXcd(testing::hadamard2()), 1e-15));

  const ModeUnitary sw = circuit_to_unitary(Circuit(3, {Swap{0, 2}}));
  CHECK(sw(0, 2) == Complex(1.0));
  CHECK(sw(1, 1) == Complex(1.0));

  CHECK_THROWS_AS(circuit_to_unitary(Circuit(2, {Detector{0, 0}})), InvalidCircuit);
}

TEST_CASE("Reck decomposition") {
  SUBCASE("identity gives an empty circuit") {
    CHECK(reck_decompose(ModeUnitary::identity(3)).elements().empty());
  }
  SUBCASE("two modes need one beam splitter") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
      const ModeUnitary u(oracle::random_unitary(2, rng));
      const Circuit c = reck_decompose(u);
      CHECK(count_beam_splitters(c) == 1);
      CHECK(count_phase_shifters(c) <= 2);
      CHECK((circuit_to_unitary(c).matrix() - u.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("random unitaries round trip") {
    std::mt19937_64 rng(12);
    for (int m = 1; m <= 5; ++m) {
      for (int trial = 0; trial < 10; ++trial) {
        const ModeUnitary u(oracle::random_unitary(m, rng));
        const Circuit c = reck_decompose(u);
        CHECK(count_beam_splitters(c) <= m * (m - 1) / 2);
        CHECK(count_phase_shifters(c) <= m);
        CHECK((circuit_to_unitary(c).matrix() - u.matrix()).cwiseAbs().maxCoeff() < 1e-9);
        for (const auto& e : c.elements()) {
          if (const auto* bs = std::get_if<BeamSplitter>(&e)) CHECK(bs->t == bs->s + 1);
        }
      }
    }
  }
  SUBCASE("permutation and diagonal matrices") {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(3, 3);
    p(0, 2) = 1.0;
    p(1, 0) = Complex(0.0, 1.0);
    p(2, 1) = -1.0;
    const Circuit c = reck_decompose(ModeUnitary(p));
    CHECK((circuit_to_unitary(c).matrix() - p).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Identity(3, 3);
    d(1, 1) = std::polar(1.0, 0.4);
    const Circuit dc = reck_decompose(ModeUnitary(d));
    CHECK(count_beam_splitters(dc) == 0);
    CHECK(count_phase_shifters(dc) == 1);
  }
}

TEST_CASE("gates on disjoint modes commute") {
  std::mt19937_64 rng(13);
  const FockState s = oracle::random_state(3, 4, B, rng);
  const Eigen::Matrix2cd v = oracle::random_unitary(2, rng);
  const GateElement g1 = BeamSplitter{0, 1, v};
  const GateElement g2 = BeamSplitter{2, 3, hadamard()};
  const GateElement g3 = PhaseShifter{1, 1.1};
  const auto a = run_circuit(s, Circuit(4, {g1, g2})).state;
  const auto b = run_circuit(s, Circuit(4, {g2, g1})).state;
  CHECK(fidelity(a, b) == doctest::Approx(1.0).epsilon(1e-10));
  const auto c = run_circuit(s, Circuit(4, {g2, g3})).state;
  const auto d = run_circuit(s, Circuit(4, {g3, g2})).state;
  CHECK(fidelity(c, d) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("deferred measurement") {
  std::mt19937_64 rng(14);
  for (auto stats : {B, F}) {
    const FockState s = oracle::random_state(2, 4, stats, rng);
    const Eigen::Matrix2cd v = oracle::random_unitary(2, rng);
    // Detector on mode 4 sits between gates acting on the other modes.
    const Circuit c(4, {BeamSplitter{2, 3, hadamard()}, Detector{3, 1}, BeamSplitter{0, 1, v},
                        BeamSplitter{1, 2, hadamard()}});
    const CircuitRun run = run_circuit(s, c);
    const HeraldResult h = herald(apply_mode_unitary(s, deferred_unitary(c)), {{3, 1}});
    CHECK(run.probability == doctest::Approx(h.probability).epsilon(1e-12));
    CHECK(fidelity(run.state, h.state) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("herald probabilities over all outcomes sum to one") {
  std::mt19937_64 rng(15);
  const FockState s = oracle::random_state(3, 4, B, rng);
  const ModeUnitary u(oracle::random_unitary(4, rng));
  const Circuit mixer = reck_decompose(u);
  double total = 0.0;
  for (int k2 = 0; k2 <= 3; ++k2) {
    for (int k3 = 0; k2 + k3 <= 3; ++k3) {
      Circuit c = mixer.appended(Detector{2, k2}).appended(Detector{3, k3});
      try {
        total += run_circuit(s, c).probability;
      } catch (const ZeroOutcome&) {
      }
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("mode permutation carries fermion signs") {
  const FockState s = make_number_state({1, 1, 0}, F);
  const FockState swapped = permute_modes(s, {1, 0, 2});
  CHECK(swapped.amplitude({1, 1, 0}) == Complex(-1.0));
  CHECK(permute_modes(make_number_state({1, 1, 0}, B), {1, 0, 2}).amplitude({1, 1, 0}) ==
        Complex(1.0));
  CHECK_THROWS_AS(permute_modes(s, {0, 0, 1}), ShapeMismatch);

  // Observables do not depend on which mode order fixes the fermion signs:
  // relabelling state and unitary together commutes with evolution.
  std::mt19937_64 rng(16);
  const std::vector<int> order{2, 0, 3, 1};
  for (int trial = 0; trial < 5; ++trial) {
    const FockState psi = oracle::random_state(2, 4, F, rng);
    const Eigen::MatrixXcd u = oracle::random_unitary(4, rng);
    Eigen::MatrixXcd relabelled(4, 4);
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) relabelled(k, l) = u(order[k], order[l]);
    const FockState a = permute_modes(apply_mode_unitary(psi, ModeUnitary(u)), order);
    const FockState b = apply_mode_unitary(permute_modes(psi, order), ModeUnitary(relabelled));
    CHECK(testing::max_difference(a, b) < 1e-12);
  }
}

TEST_CASE("explicit outputs reorder the result") {
  const FockState s(B, 3, 2, {{{2, 0, 0}, 1.0}});
  const CircuitRun run = run_circuit(s, Circuit(3, {Detector{1, 0}}, std::vector<int>{2, 0}));
  CHECK(run.state.amplitude({0, 2}) == Complex(1.0));
}

TEST_CASE("standard circuits") {
  SUBCASE("Yurke-Stoler on |11>") {
    const PostSelection ys = yurke_stoler_postselect(make_number_state({1, 1}, B));
    CHECK(ys.probability == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("trivial filter passes the state through") {
    std::mt19937_64 rng(17);
    const FockState s = oracle::random_state(2, 2, B, rng);
    const CircuitRun run = filtered_state(s, 0);
    CHECK(run.probability == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fidelity(run.state, s) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("erasure of a three-particle NOON state") {
    const FockState noon(B, 2, 3, {{{3, 0}, kInvSqrt2}, {{0, 3}, kInvSqrt2}});
    const CircuitRun run = erased_state(noon);
    CHECK(std::abs(run.state.amplitude({1, 1})) < 1e-12);
    CHECK(std::abs(run.state.amplitude({2, 0})) ==
          doctest::Approx(std::abs(run.state.amplitude({0, 2}))).epsilon(1e-12));
    CHECK(std::abs(run.state.amplitude({2, 0})) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  }
  SUBCASE("parameter checks") {
    CHECK_THROWS_AS(two_particle_filter_circuit(2, 3), InvalidParameter);
    CHECK_THROWS_AS(two_particle_filter_circuit(-1, 3), InvalidParameter);
    CHECK_THROWS_AS(quantum_erasure_circuit(1), InvalidParameter);
    CHECK(yurke_stoler_circuit().elements().size() == 3);
  }
}

TEST_CASE("circuit files") {
  const std::string text = R"({"modes":3,"elements":[
    {"type":"bs","modes":[1,2],"matrix":[[0.6,0.8],[[0.8,0],[-0.6,0]]]},
    {"type":"ps","mode":3,"phi":0.25},
    {"type":"swap","modes":[2,3]},
    {"type":"detect","mode":1,"herald":1},
    {"type":"detect","mode":2}],
    "outputs":[3,2]})";
  const Circuit c = parse_circuit(text);
  CHECK(c.n_modes() == 3);
  CHECK(c.elements().size() == 5);
  const auto& bs = std::get<BeamSplitter>(c.elements()[0]);
  CHECK(bs.s == 0);
  CHECK(bs.t == 1);
  CHECK(bs.matrix(1, 1) == Complex(-0.6));
  CHECK(c.heralds() == std::map<int, int>{{0, 1}});
  CHECK(c.outputs() == std::vector<int>{2, 1});
  CHECK(c.readout_modes() == std::vector<int>{1});

  const Circuit again = parse_circuit(dump_circuit(c));
  CHECK(again.outputs() == c.outputs());
  CHECK(circuit_to_json(again) == circuit_to_json(c));

  CHECK_THROWS_AS(parse_circuit(R"({"modes":2,"elements":[{"type":"bs","modes":[1,3],"matrix":[[1,0],[0,1]]}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_circuit(R"({"modes":2,"elements":[{"type":"mirror","mode":1}]})"), ParseError);
  CHECK_THROWS_AS(parse_circuit(R"({"modes":2,"elements":[{"type":"bs","modes":[1,2],"matrix":[[1,1],[0,1]]}]})"),
                  InvalidCircuit);
  try {
    parse_circuit("{\"modes\":2,\n \"elements\": [,]}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 15);
  }
}

TEST_CASE("unitary files") {
  const ModeUnitary u = parse_unitary(R"({"modes":2,"matrix":[[0,1],[[0,1],0]]})");
  CHECK(u(1, 0) == Complex(0.0, 1.0));
  CHECK_THROWS_AS(parse_unitary(R"({"modes":2,"matrix":[[1,1],[0,1]]})"), NotUnitary);
  CHECK_THROWS_AS(parse_unitary(R"({"modes":2,"matrix":[[1,0]]})"), ParseError);
}
