#include "fockopt/witness.hpp"

#include <optional>
#include <sstream>

#include "fockopt/circuit_io.hpp"
#include "fockopt/classifier.hpp"
#include "json_util.hpp"

namespace fockopt {

using detail::json;

namespace {

struct Path {
  std::vector<GateElement> elements;
  int n_total;
  std::vector<std::string> steps;
};

struct SearchContext {
  const FockState& input;
};

std::string mode_name(int m) { return std::to_string(m + 1); }

bool is_identity(const Eigen::Matrix2cd& v) {
  return (v - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= 1e-15;
}

std::optional<WitnessExperiment> leaf(const SearchContext& ctx, const FockState& pair,
                                      const Path& path) {
  const PostSelection ys = yurke_stoler_postselect(pair);
  BellTestResult result = chsh_max(ys.chi);
  if (!result.violated) return std::nullopt;

  WitnessExperiment w;
  w.input_modes = ctx.input.n_modes();
  w.preparation = Circuit(path.n_total, path.elements);
  w.steps = path.steps;
  const CircuitRun run = run_circuit(embed_modes(ctx.input, path.n_total), w.preparation);
  result.success_probability = run.probability * ys.probability;
  w.result = result;
  return w;
}

std::optional<WitnessExperiment> search(const SearchContext& ctx, const FockState& cur,
                                        const std::vector<int>& live, const Path& path);

std::optional<WitnessExperiment> search_two_modes(const SearchContext& ctx,
                                                  const FockState& cur,
                                                  const std::vector<int>& live,
                                                  const Path& path) {
  const int n = cur.n_particles();
  if (n == 2) return leaf(ctx, cur, path);

  const int g1 = path.n_total;
  const int g2 = path.n_total + 1;
  for (int s = 0; s + 2 <= n; ++s) {
    CircuitRun heralded{cur, 0.0};
    try {
      heralded = filtered_state(cur, s);
    } catch (const ZeroOutcome&) {
      continue;
    }
    Path next = path;
    next.n_total += 2;
    next.elements.insert(next.elements.end(),
                         {BeamSplitter{live[0], g1, hadamard()},
                          BeamSplitter{live[1], g2, hadamard()}, Detector{g1, s},
                          Detector{g2, n - s - 2}});
    next.steps.push_back("two-particle filter on modes " + mode_name(live[0]) + ", " +
                         mode_name(live[1]) + ": herald " + std::to_string(s) + " in ancilla " +
                         mode_name(g1) + " and " + std::to_string(n - s - 2) + " in ancilla " +
                         mode_name(g2));
    if (auto w = leaf(ctx, heralded.state, next)) return w;
  }

  if (filter_condition_residuals(cur).middle_vanish) {
    CircuitRun heralded{cur, 0.0};
    try {
      heralded = erased_state(cur);
    } catch (const ZeroOutcome&) {
      return std::nullopt;
    }
    Path next = path;
    next.n_total += 2;
    next.elements.insert(next.elements.end(),
                         {BeamSplitter{live[0], g1, hadamard()},
                          BeamSplitter{live[1], g2, hadamard()},
                          BeamSplitter{g1, g2, hadamard()}, Detector{g1, n - 2},
                          Detector{g2, 0}});
    next.steps.push_back("quantum erasure on modes " + mode_name(live[0]) + ", " +
                         mode_name(live[1]) + ": herald " + std::to_string(n - 2) +
                         " in ancilla " + mode_name(g1) + " and 0 in ancilla " + mode_name(g2));
    if (auto w = leaf(ctx, heralded.state, next)) return w;
  }
  return std::nullopt;
}

std::optional<WitnessExperiment> search_many_modes(const SearchContext& ctx,
                                                   const FockState& cur,
                                                   const std::vector<int>& live,
                                                   const Path& path) {
  const int m = cur.n_modes();
  const int n = cur.n_particles();

  // Vacuum in every mode but the first two.
  std::map<int, int> rest_empty;
  for (int k = 2; k < m; ++k) rest_empty[k] = 0;
  std::optional<FockState> pair;
  try {
    pair = herald(cur, rest_empty).state;
  } catch (const ZeroOutcome&) {
  }

  Eigen::Vector2cd alpha(0.0, 1.0);
  if (pair) {
    const Classification c = is_single_mode_type(*pair);
    if (!c.single_mode) {
      Path next = path;
      std::string heralded_modes;
      for (int k = 2; k < m; ++k) {
        next.elements.push_back(Detector{live[k], 0});
        heralded_modes += (k > 2 ? ", " : "") + mode_name(live[k]);
      }
      next.steps.push_back((m > 3 ? "herald 0 in modes " : "herald 0 in mode ") + heralded_modes);
      if (auto w = search(ctx, *pair, {live[0], live[1]}, next)) return w;
    } else if (c.alpha) {
      alpha = *c.alpha;
    }
  }

  // Rotate the pair so that the vacuum-heralded component lies in the
  // second mode: alpha * U^dag = (0, 1).
  Eigen::Matrix2cd u;
  u << std::conj(alpha(1)), -std::conj(alpha(0)), alpha(0), alpha(1);
  const Eigen::Matrix2cd v = u.adjoint();
  Path rotated_path = path;
  FockState rotated = cur;
  if (!is_identity(v)) {
    const BeamSplitter local{0, 1, v};
    rotated = apply_mode_unitary(cur, element_unitary(local, m));
    rotated_path.elements.push_back(BeamSplitter{live[0], live[1], v});
    rotated_path.steps.push_back("beam splitter on modes " + mode_name(live[0]) + ", " +
                                 mode_name(live[1]) + " moving the vacuum-heralded component "
                                 "into mode " + mode_name(live[1]));
  }
  std::vector<int> without_second = live;
  without_second.erase(without_second.begin() + 1);
  for (int k = 0; k + 2 <= n; ++k) {
    std::optional<FockState> reduced;
    try {
      reduced = herald(rotated, {{1, k}}).state;
    } catch (const ZeroOutcome&) {
      continue;
    }
    Path next = rotated_path;
    next.elements.push_back(Detector{live[1], k});
    next.steps.push_back("herald " + std::to_string(k) + " in mode " + mode_name(live[1]));
    if (auto w = search(ctx, *reduced, without_second, next)) return w;
  }

  std::optional<FockState> reduced;
  try {
    reduced = herald(cur, {{0, 0}}).state;
  } catch (const ZeroOutcome&) {
    return std::nullopt;
  }
  Path next = path;
  next.elements.push_back(Detector{live[0], 0});
  next.steps.push_back("herald 0 in mode " + mode_name(live[0]));
  return search(ctx, *reduced, {live.begin() + 1, live.end()}, next);
}

std::optional<WitnessExperiment> search(const SearchContext& ctx, const FockState& cur,
                                        const std::vector<int>& live, const Path& path) {
  if (cur.n_particles() < 2 || cur.n_modes() < 2) return std::nullopt;
  if (cur.n_modes() == 2) return search_two_modes(ctx, cur, live, path);
  return search_many_modes(ctx, cur, live, path);
}

std::optional<WitnessExperiment> search_fermions(const SearchContext& ctx) {
  const FockState& state = ctx.input;
  const Occupation& occ = state.amplitudes().begin()->first;
  std::vector<int> occupied;
  for (int k = 0; k < state.n_modes(); ++k) {
    if (occ[k] == 1) occupied.push_back(k);
  }
  const int i = occupied[0];
  const int j = occupied[1];
  std::map<int, int> required;
  Path path{{}, state.n_modes(), {}};
  for (int k = 0; k < state.n_modes(); ++k) {
    if (k == i || k == j) continue;
    required[k] = occ[k];
    path.elements.push_back(Detector{k, occ[k]});
  }
  FockState pair = state;
  if (!required.empty()) {
    std::ostringstream msg;
    msg << "herald";
    for (const auto& [mode, count] : required) msg << ' ' << count << "@" << mode_name(mode);
    path.steps.push_back(msg.str());
    pair = herald(state, required).state;
  }
  return leaf(ctx, pair, path);
}

json basis_to_json(const QubitBasis& b) {
  const Eigen::Vector3d n = b.bloch();
  json vectors = json::array();
  for (int c = 0; c < 2; ++c) {
    vectors.push_back({detail::complex_to_json(b.vectors(0, c)),
                       detail::complex_to_json(b.vectors(1, c))});
  }
  return {{"bloch", {n.x(), n.y(), n.z()}}, {"vectors", vectors}};
}

QubitBasis basis_from_json(const json& j) {
  if (j.is_object() && j.contains("vectors")) {
    const json& v = j.at("vectors");
    if (!v.is_array() || v.size() != 2 || !v[0].is_array() || v[0].size() != 2 ||
        !v[1].is_array() || v[1].size() != 2) {
      throw ParseError("basis \"vectors\" must be two [up, down] pairs");
    }
    QubitBasis b;
    for (int c = 0; c < 2; ++c) {
      b.vectors(0, c) = detail::complex_from_json(v[c][0]);
      b.vectors(1, c) = detail::complex_from_json(v[c][1]);
    }
    if (unitarity_defect(b.vectors) > 1e-9) throw ParseError("basis vectors are not orthonormal");
    return b;
  }
  if (j.is_object() && j.contains("bloch")) {
    const json& n = j.at("bloch");
    if (!n.is_array() || n.size() != 3) throw ParseError("\"bloch\" must have three entries");
    Eigen::Vector3d v;
    for (int k = 0; k < 3; ++k) {
      if (!n[k].is_number()) throw ParseError("\"bloch\" entries must be numbers");
      v(k) = n[k].get<double>();
    }
    if (v.norm() == 0.0) throw ParseError("\"bloch\" must be nonzero");
    return QubitBasis::from_bloch(v);
  }
  throw ParseError("a basis needs \"vectors\" or \"bloch\"");
}

std::array<QubitBasis, 2> party_from_json(const json& doc, const char* key) {
  const json& list = detail::require(doc, key);
  if (!list.is_array() || list.size() != 2) {
    throw ParseError(std::string("\"") + key + "\" must list two bases");
  }
  return {basis_from_json(list[0]), basis_from_json(list[1])};
}

}  // namespace

std::variant<WitnessExperiment, NoViolationFound> find_witness(const FockState& state) {
  const int n = state.n_particles();
  if (n < 2) return NoViolationFound{"fewer than two particles"};
  if (state.n_modes() < 2) return NoViolationFound{"a single mode"};

  const SearchContext ctx{state};
  std::optional<WitnessExperiment> found;
  if (state.statistics() == Statistics::Fermion) {
    found = search_fermions(ctx);
  } else {
    std::vector<int> live(state.n_modes());
    for (int k = 0; k < state.n_modes(); ++k) live[k] = k;
    found = search(ctx, state, live, Path{{}, state.n_modes(), {}});
  }
  if (found) return *found;
  return NoViolationFound{"no heralded two-particle state violates CHSH"};
}

WitnessLayout witness_layout(const WitnessExperiment& w) {
  const auto& out = w.preparation.outputs();
  if (out.size() != 2) throw InvalidCircuit("witness preparation must leave two modes");
  const int n = w.preparation.n_modes() + 2;
  return {n, {out[0], n - 2}, {n - 1, out[1]}};
}

Circuit literal_witness_circuit(const WitnessExperiment& w, int x, int y) {
  const WitnessLayout lay = witness_layout(w);
  std::vector<GateElement> elements = w.preparation.elements();
  const int p1 = lay.alice[0], q1 = lay.alice[1], q2 = lay.bob[0], p2 = lay.bob[1];
  elements.push_back(BeamSplitter{p1, q1, hadamard()});
  elements.push_back(BeamSplitter{p2, q2, hadamard()});
  elements.push_back(Swap{q1, q2});
  const Circuit meas_a = dual_rail_measurement_circuit(w.result.party_a.at(x), p1, q1, lay.n_modes);
  const Circuit meas_b = dual_rail_measurement_circuit(w.result.party_b.at(y), q2, p2, lay.n_modes);
  for (const auto& e : meas_a.elements()) elements.push_back(e);
  for (const auto& e : meas_b.elements()) elements.push_back(e);
  for (int m : {p1, q1, q2, p2}) elements.push_back(Detector{m, std::nullopt});
  return Circuit(lay.n_modes, std::move(elements));
}

double replay_witness(const FockState& input, const WitnessExperiment& w) {
  const CircuitRun run = run_circuit(embed_modes(input, w.preparation.n_modes()), w.preparation);
  const PostSelection ys = yurke_stoler_postselect(run.state);
  return chsh_value(ys.chi, w.result.party_a, w.result.party_b);
}

double replay_witness_literal(const FockState& input, const WitnessExperiment& w) {
  const WitnessLayout lay = witness_layout(w);
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const Circuit c = literal_witness_circuit(w, x, y);
      const CircuitRun run = run_circuit(embed_modes(input, lay.n_modes), c);
      const auto& out = c.outputs();
      auto local = [&](int mode) {
        return static_cast<int>(std::find(out.begin(), out.end(), mode) - out.begin());
      };
      const int a_up = local(lay.alice[0]), a_down = local(lay.alice[1]);
      const int b_up = local(lay.bob[0]), b_down = local(lay.bob[1]);
      double weight = 0.0;
      double corr = 0.0;
      for (const auto& [occ, p] : detection_distribution(run.state)) {
        if (occ[a_up] + occ[a_down] != 1 || occ[b_up] + occ[b_down] != 1) continue;
        const double sign = (occ[a_up] == 1 ? 1.0 : -1.0) * (occ[b_up] == 1 ? 1.0 : -1.0);
        weight += p;
        corr += sign * p;
      }
      if (weight < kHeraldCutoff) throw ZeroOutcome("no coincidences in witness replay");
      total += (x == 1 && y == 1 ? -1.0 : 1.0) * corr / weight;
    }
  }
  return total;
}

json settings_to_json(const BellTestResult& r) {
  return {{"party_A", {basis_to_json(r.party_a[0]), basis_to_json(r.party_a[1])}},
          {"party_B", {basis_to_json(r.party_b[0]), basis_to_json(r.party_b[1])}}};
}

void settings_from_json(const json& doc, std::array<QubitBasis, 2>& party_a,
                        std::array<QubitBasis, 2>& party_b) {
  const json& block = doc.is_object() && doc.contains("settings") ? doc.at("settings") : doc;
  party_a = party_from_json(block, "party_A");
  party_b = party_from_json(block, "party_B");
}

json witness_to_json(const WitnessExperiment& w) {
  const WitnessLayout lay = witness_layout(w);
  return {{"input_modes", w.input_modes},
          {"circuit", circuit_to_json(w.preparation)},
          {"heralds", w.steps},
          {"yurke_stoler",
           {{"inputs", {lay.alice[0] + 1, lay.bob[1] + 1}},
            {"ancillas", {lay.alice[1] + 1, lay.bob[0] + 1}},
            {"party_A", {lay.alice[0] + 1, lay.alice[1] + 1}},
            {"party_B", {lay.bob[0] + 1, lay.bob[1] + 1}}}},
          {"settings", settings_to_json(w.result)},
          {"chsh", w.result.chsh},
          {"success_probability", w.result.success_probability}};
}

}  // namespace fockopt
