#include "fockopt/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace fockopt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<int> touched_modes(const GateElement& e) {
  return std::visit(
      overloaded{[](const BeamSplitter& g) { return std::vector<int>{g.s, g.t}; },
                 [](const PhaseShifter& g) { return std::vector<int>{g.mode}; },
                 [](const Swap& g) { return std::vector<int>{g.s, g.t}; },
                 [](const Detector& g) { return std::vector<int>{g.mode}; }},
      e);
}

GateElement canonical(GateElement e) {
  if (auto* ps = std::get_if<PhaseShifter>(&e)) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double phi = std::fmod(ps->phi, two_pi);
    if (phi < 0.0) phi += two_pi;
    if (phi >= two_pi) phi = 0.0;
    ps->phi = phi;
  }
  return e;
}

}  // namespace

Eigen::Matrix2cd hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h;
  h << r, r, r, -r;
  return h;
}

Circuit::Circuit(int n_modes, std::vector<GateElement> elements,
                 std::optional<std::vector<int>> outputs)
    : n_modes_(n_modes), explicit_outputs_(outputs.has_value()) {
  if (n_modes < 1) throw InvalidCircuit("circuit needs at least one mode");
  std::set<int> detected;
  elements_.reserve(elements.size());
  for (auto& raw : elements) {
    GateElement e = canonical(std::move(raw));
    const auto modes = touched_modes(e);
    for (int m : modes) {
      if (m < 0 || m >= n_modes) {
        throw InvalidCircuit("element acts on mode " + std::to_string(m + 1) +
                             " outside 1.." + std::to_string(n_modes));
      }
      if (detected.contains(m)) {
        throw InvalidCircuit("element acts on mode " + std::to_string(m + 1) +
                             " after its detector");
      }
    }
    if (modes.size() == 2 && modes[0] == modes[1]) {
      throw InvalidCircuit("two-mode element needs distinct modes");
    }
    if (const auto* bs = std::get_if<BeamSplitter>(&e)) {
      if (unitarity_defect(bs->matrix) > kUnitaryTolerance) {
        throw InvalidCircuit("beam splitter matrix is not unitary");
      }
    }
    if (const auto* d = std::get_if<Detector>(&e)) {
      if (d->herald && *d->herald < 0) throw InvalidCircuit("negative herald count");
      detected.insert(d->mode);
    }
    elements_.push_back(std::move(e));
  }

  const auto heralded = heralds();
  std::vector<int> survivors;
  for (int m = 0; m < n_modes; ++m) {
    if (!heralded.contains(m)) survivors.push_back(m);
  }
  if (survivors.empty()) throw InvalidCircuit("every mode is heralded");
  if (outputs) {
    std::vector<int> sorted = *outputs;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != survivors) {
      throw InvalidCircuit("outputs must list exactly the modes without a herald");
    }
    outputs_ = std::move(*outputs);
  } else {
    outputs_ = std::move(survivors);
  }
}

std::map<int, int> Circuit::heralds() const {
  std::map<int, int> out;
  for (const auto& e : elements_) {
    if (const auto* d = std::get_if<Detector>(&e); d && d->herald) {
      out[d->mode] = *d->herald;
    }
  }
  return out;
}

std::vector<int> Circuit::readout_modes() const {
  std::vector<int> out;
  for (const auto& e : elements_) {
    if (const auto* d = std::get_if<Detector>(&e); d && !d->herald) {
      out.push_back(d->mode);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Circuit::has_detectors() const {
  return std::any_of(elements_.begin(), elements_.end(), [](const GateElement& e) {
    return std::holds_alternative<Detector>(e);
  });
}

Circuit Circuit::appended(const GateElement& element) const {
  auto elements = elements_;
  elements.push_back(element);
  return Circuit(n_modes_, std::move(elements));
}

Circuit Circuit::widened(int n_modes) const {
  if (n_modes < n_modes_) throw InvalidCircuit("cannot narrow a circuit");
  return Circuit(n_modes, elements_);
}

ModeUnitary element_unitary(const GateElement& element, int n_modes) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n_modes, n_modes);
  std::visit(overloaded{[&](const BeamSplitter& g) {
                          u(g.s, g.s) = g.matrix(0, 0);
                          u(g.s, g.t) = g.matrix(0, 1);
                          u(g.t, g.s) = g.matrix(1, 0);
                          u(g.t, g.t) = g.matrix(1, 1);
                        },
                        [&](const PhaseShifter& g) {
                          u(g.mode, g.mode) = std::polar(1.0, g.phi);
                        },
                        [&](const Swap& g) {
                          u(g.s, g.s) = 0.0;
                          u(g.t, g.t) = 0.0;
                          u(g.s, g.t) = 1.0;
                          u(g.t, g.s) = 1.0;
                        },
                        [](const Detector&) {
                          throw InvalidCircuit("a detector has no mode unitary");
                        }},
             element);
  return ModeUnitary(std::move(u));
}

ModeUnitary circuit_to_unitary(const Circuit& circuit) {
  if (circuit.has_detectors()) {
    throw InvalidCircuit("circuit with detectors has no single mode unitary");
  }
  return deferred_unitary(circuit);
}

ModeUnitary deferred_unitary(const Circuit& circuit) {
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(circuit.n_modes(), circuit.n_modes());
  for (const auto& e : circuit.elements()) {
    if (std::holds_alternative<Detector>(e)) continue;
    total = total * element_unitary(e, circuit.n_modes()).matrix();
  }
  return ModeUnitary(std::move(total));
}

FockState permute_modes(const FockState& state, const std::vector<int>& order) {
  const int m = state.n_modes();
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < m; ++k) {
    if (static_cast<int>(sorted.size()) != m || sorted[k] != k) {
      throw ShapeMismatch("mode order is not a permutation");
    }
  }
  std::vector<int> position(m);
  for (int k = 0; k < m; ++k) position[order[k]] = k;

  const bool fermion = state.statistics() == Statistics::Fermion;
  Amplitudes out;
  for (const auto& [occ, a] : state.amplitudes()) {
    Occupation moved(m);
    for (int i = 0; i < m; ++i) moved[position[i]] = occ[i];
    double sign = 1.0;
    if (fermion) {
      std::vector<int> seq;
      for (int i = 0; i < m; ++i) {
        if (occ[i] == 1) seq.push_back(position[i]);
      }
      int inversions = 0;
      for (std::size_t x = 0; x < seq.size(); ++x) {
        for (std::size_t y = x + 1; y < seq.size(); ++y) inversions += seq[x] > seq[y];
      }
      if (inversions % 2 == 1) sign = -1.0;
    }
    out.emplace(std::move(moved), sign * a);
  }
  return FockState(state.statistics(), m, state.n_particles(), std::move(out));
}

CircuitRun run_circuit(const FockState& state, const Circuit& circuit) {
  if (state.n_modes() != circuit.n_modes()) {
    throw ShapeMismatch("state has " + std::to_string(state.n_modes()) +
                        " modes, circuit expects " + std::to_string(circuit.n_modes()));
  }
  FockState current = state;
  for (const auto& e : circuit.elements()) {
    if (std::holds_alternative<Detector>(e)) continue;
    current = apply_mode_unitary(current, element_unitary(e, circuit.n_modes()));
  }

  double probability = 1.0;
  std::vector<int> survivors;
  const auto required = circuit.heralds();
  if (!required.empty()) {
    auto heralded = herald(current, required);
    current = std::move(heralded.state);
    probability = heralded.probability;
  } else {
    current = current.normalized();
  }
  for (int m = 0; m < circuit.n_modes(); ++m) {
    if (!required.contains(m)) survivors.push_back(m);
  }

  // outputs() is a permutation of the survivors; express it in local indices.
  std::vector<int> order;
  order.reserve(survivors.size());
  for (int mode : circuit.outputs()) {
    order.push_back(static_cast<int>(
        std::lower_bound(survivors.begin(), survivors.end(), mode) - survivors.begin()));
  }
  if (!std::is_sorted(order.begin(), order.end())) current = permute_modes(current, order);
  return {std::move(current), probability};
}

Circuit reck_decompose(const ModeUnitary& u) {
  const int m = u.dim();
  Eigen::MatrixXcd work = u.matrix();
  constexpr double skip = 1e-15;

  // Right-multiplying by T on columns (j, j+1) nulls work(row, j). Rows are
  // cleared from the bottom up; each cleared row leaves a single unimodular
  // entry on the diagonal and, by unitarity, a zero column above it.
  struct Nulling {
    int j;
    Eigen::Matrix2cd t;
  };
  std::vector<Nulling> steps;
  for (int row = m - 1; row >= 1; --row) {
    for (int j = 0; j < row; ++j) {
      const Complex a = work(row, j);
      const Complex b = work(row, j + 1);
      const double r = std::hypot(std::abs(a), std::abs(b));
      if (std::abs(a) <= skip || r == 0.0) continue;
      Eigen::Matrix2cd t;
      t << b / r, std::conj(a) / r, -a / r, std::conj(b) / r;
      const Eigen::MatrixXcd cols = work.middleCols(j, 2) * t;
      work.middleCols(j, 2) = cols;
      work(row, j) = 0.0;
      steps.push_back({j, t});
    }
  }

  // u * T_1 ... T_K = D, so u = D T_K^dag ... T_1^dag in application order.
  std::vector<GateElement> elements;
  for (int k = 0; k < m; ++k) {
    const double phi = std::arg(work(k, k));
    if (std::abs(phi) > skip) elements.push_back(PhaseShifter{k, phi});
  }
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const Eigen::Matrix2cd v = it->t.adjoint();
    if ((v - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= skip) continue;
    elements.push_back(BeamSplitter{it->j, it->j + 1, v});
  }
  return Circuit(m, std::move(elements));
}

Circuit with_terminal_detectors(const Circuit& circuit) {
  std::set<int> detected;
  for (const auto& e : circuit.elements()) {
    if (const auto* d = std::get_if<Detector>(&e)) detected.insert(d->mode);
  }
  auto elements = circuit.elements();
  for (int m = 0; m < circuit.n_modes(); ++m) {
    if (!detected.contains(m)) elements.push_back(Detector{m, std::nullopt});
  }
  return Circuit(circuit.n_modes(), std::move(elements));
}

Circuit yurke_stoler_circuit() {
  return Circuit(4, {BeamSplitter{0, 2, hadamard()},
                     BeamSplitter{1, 3, hadamard().inverse()},
                     Swap{2, 3}});
}

Circuit two_particle_filter_circuit(int s, int n_particles) {
  if (n_particles < 2 || s < 0 || s > n_particles - 2) {
    throw InvalidParameter("filter needs N >= 2 and 0 <= s <= N-2");
  }
  return Circuit(4, {BeamSplitter{0, 2, hadamard()}, BeamSplitter{1, 3, hadamard()},
                     Detector{2, s}, Detector{3, n_particles - s - 2}});
}

Circuit quantum_erasure_circuit(int n_particles) {
  if (n_particles < 2) throw InvalidParameter("erasure needs N >= 2");
  return Circuit(4, {BeamSplitter{0, 2, hadamard()}, BeamSplitter{1, 3, hadamard()},
                     BeamSplitter{2, 3, hadamard()}, Detector{2, n_particles - 2},
                     Detector{3, 0}});
}

Circuit fermion_herald_circuit(int n_modes, const std::vector<int>& counts) {
  if (n_modes < 2 || static_cast<int>(counts.size()) != n_modes - 2) {
    throw InvalidParameter("fermion herald needs M >= 2 and M-2 counts");
  }
  std::vector<GateElement> elements;
  for (int j = 2; j < n_modes; ++j) {
    if (counts[j - 2] < 0) throw InvalidParameter("negative herald count");
    elements.push_back(Detector{j, counts[j - 2]});
  }
  return Circuit(n_modes, std::move(elements));
}

}  // namespace fockopt
