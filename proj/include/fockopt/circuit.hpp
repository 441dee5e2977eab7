#pragma once

// Passive linear optical circuits: beam splitters, phase shifters, swaps and
// number-resolving detectors acting on numbered modes.

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fockopt/fock_state.hpp"

namespace fockopt {

/// Arbitrary 2x2 unitary V on modes (s, t):
///   (a_s^dag, a_t^dag) -> V (a_s^dag, a_t^dag).
struct BeamSplitter {
  int s;
  int t;
  Eigen::Matrix2cd matrix;
};

/// a_s^dag -> e^{i phi} a_s^dag, phi stored in [0, 2 pi).
struct PhaseShifter {
  int mode;
  double phi;
};

struct Swap {
  int s;
  int t;
};

/// Terminates its mode. With a herald count the run is conditioned on that
/// reading; without one the count is simply read out.
struct Detector {
  int mode;
  std::optional<int> herald;
};

using GateElement = std::variant<BeamSplitter, PhaseShifter, Swap, Detector>;

/// The 2x2 Hadamard (1/sqrt 2)[[1, 1], [1, -1]]. It is its own inverse.
Eigen::Matrix2cd hadamard();

/// Ordered list of elements; the first element acts first.
class Circuit {
 public:
  /// Throws InvalidCircuit when an element touches a mode out of range or a
  /// mode already terminated by a detector, a beam splitter is not unitary
  /// within kUnitaryTolerance or has s == t, or `outputs` is not a
  /// permutation of the modes left after heralding.
  explicit Circuit(int n_modes, std::vector<GateElement> elements = {},
                   std::optional<std::vector<int>> outputs = std::nullopt);

  int n_modes() const { return n_modes_; }
  const std::vector<GateElement>& elements() const { return elements_; }

  /// Mode -> required count, over detectors that carry a herald.
  std::map<int, int> heralds() const;

  /// Modes surviving the heralds, in the order the output state lists them.
  const std::vector<int>& outputs() const { return outputs_; }

  /// Detector modes without a herald, ascending.
  std::vector<int> readout_modes() const;

  bool has_detectors() const;
  bool explicit_outputs() const { return explicit_outputs_; }

  /// Copy with one more element appended (outputs recomputed).
  Circuit appended(const GateElement& element) const;

  /// Copy with extra vacuum modes appended at the end.
  Circuit widened(int n_modes) const;

 private:
  int n_modes_;
  std::vector<GateElement> elements_;
  std::vector<int> outputs_;
  bool explicit_outputs_;
};

/// The element as an n_modes x n_modes mode unitary. Throws InvalidCircuit
/// for detectors.
ModeUnitary element_unitary(const GateElement& element, int n_modes);

/// Product of the embedded gate unitaries in application order.
/// Throws InvalidCircuit when the circuit contains detectors.
ModeUnitary circuit_to_unitary(const Circuit& circuit);

/// Same product with detectors skipped. Valid because no element may act on
/// a mode after its detector, so every readout commutes to the end.
ModeUnitary deferred_unitary(const Circuit& circuit);

struct CircuitRun {
  FockState state;     ///< normalized, on circuit.outputs() in that order
  double probability;  ///< overall herald success probability
};

/// Applies every gate in order, then all heralds jointly, then orders the
/// surviving modes as circuit.outputs(). Readout-only detector modes stay in
/// the output so callers can take their statistics.
/// Throws ShapeMismatch when the state has the wrong mode count and
/// ZeroOutcome when the heralds cannot fire.
CircuitRun run_circuit(const FockState& state, const Circuit& circuit);

/// Reorders modes: output mode k is input mode order[k]. Fermion amplitudes
/// pick up the sign of the induced reordering of creation operators.
FockState permute_modes(const FockState& state, const std::vector<int>& order);

/// Reck triangular decomposition into at most M(M-1)/2 beam splitters on
/// neighbouring modes and at most M phase shifters. Elements that are the
/// identity to 1e-15 are omitted, so the identity yields an empty circuit.
/// Throws NotUnitary.
Circuit reck_decompose(const ModeUnitary& u);

/// Adds a readout detector to every mode that does not yet carry one.
Circuit with_terminal_detectors(const Circuit& circuit);

// Standard topologies. Mode layouts (0-based):
//   yurke_stoler_circuit        [1, 2, 1', 2']
//   two_particle_filter_circuit [1, 2, 1'', 2'']
//   quantum_erasure_circuit     [1, 2, 1'', 2'']
//   fermion_herald_circuit      [1, 2, 3, ..., M]

/// H on {1,1'}, H^-1 (= H) on {2,2'}, then 1' <-> 2'. No detectors: the
/// coincidence post-selection is done by postselect_dual_rail.
Circuit yurke_stoler_circuit();

/// H on {1,1''} and {2,2''}; detectors herald s in 1'' and N-s-2 in 2''.
/// Throws InvalidParameter unless 0 <= s <= N-2.
Circuit two_particle_filter_circuit(int s, int n_particles);

/// The filter with an extra H on {1'',2''} before detection, heralding
/// (N-2, 0). Throws InvalidParameter for N < 2.
Circuit quantum_erasure_circuit(int n_particles);

/// Detectors on modes 3..M heralding `counts` (length M-2); outputs 1, 2.
Circuit fermion_herald_circuit(int n_modes, const std::vector<int>& counts);

}  // namespace fockopt
