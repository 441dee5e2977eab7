#pragma once

// Constructive search for a Bell-violating passive linear optical
// experiment, and replay of the experiments it returns.

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fockopt/circuit.hpp"
#include "fockopt/nonlocality.hpp"

namespace fockopt {

/// A preparation circuit that heralds a two-particle state on two modes,
/// followed by the Yurke-Stoler test with fixed CHSH settings.
///
/// The preparation acts on the input modes followed by any vacuum ancillas;
/// its two output modes, in order, feed inputs 1 and 2 of the Yurke-Stoler
/// interferometer.
struct WitnessExperiment {
  int input_modes = 0;
  Circuit preparation{1};
  std::vector<std::string> steps;  ///< readable account of the heralds
  BellTestResult result;
};

struct NoViolationFound {
  std::string reason;
};

/// Search order: fermions herald every mode but the first two occupied ones
/// of the first basis term. Bosons on two modes try the two-particle filter
/// for s = 0 .. N-2, then quantum erasure for NOON-type states. Bosons on
/// more modes herald vacuum in modes 3..M and recurse when that leaves a
/// non-single-mode pair; otherwise rotate the pair so the vacuum-heralded
/// component sits in mode 2, herald k = 0 .. N-1 particles there and recurse,
/// and finally herald vacuum in mode 1 and recurse on the rest. The first
/// experiment with chsh > 2 + kViolationMargin wins.
std::variant<WitnessExperiment, NoViolationFound> find_witness(const FockState& state);

/// The four modes of the full experiment, appended to the preparation's:
/// Alice holds (up, down), Bob holds (up, down).
struct WitnessLayout {
  int n_modes;
  std::array<int, 2> alice;
  std::array<int, 2> bob;
};
WitnessLayout witness_layout(const WitnessExperiment& w);

/// Preparation, Yurke-Stoler interferometer, the measurement circuits for
/// settings (x, y) and readout detectors on the four party modes.
Circuit literal_witness_circuit(const WitnessExperiment& w, int x, int y);

/// CHSH with the stored settings via run_circuit, Yurke-Stoler
/// post-selection and Born-rule projection.
double replay_witness(const FockState& input, const WitnessExperiment& w);

/// CHSH from coincidence counts of the four literal circuits.
double replay_witness_literal(const FockState& input, const WitnessExperiment& w);

nlohmann::json settings_to_json(const BellTestResult& r);
/// Reads {"party_A":[basis, basis],"party_B":[basis, basis]}; each basis is
/// {"vectors":[[up, down], [up, down]]} (outcome +1 first) or {"bloch":[x,y,z]}.
/// Throws ParseError.
void settings_from_json(const nlohmann::json& doc, std::array<QubitBasis, 2>& party_a,
                        std::array<QubitBasis, 2>& party_b);

nlohmann::json witness_to_json(const WitnessExperiment& w);

}  // namespace fockopt
