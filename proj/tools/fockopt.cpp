// fockopt command-line front end.
//
// Exit codes: 0 success or violation found, 10 negative result, 11 input
// rejected because the state admits no hidden-variable model, 2 bad input.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fockopt/circuit_io.hpp"
#include "fockopt/classifier.hpp"
#include "fockopt/lhv.hpp"
#include "fockopt/nonlocality.hpp"
#include "fockopt/state_io.hpp"
#include "fockopt/witness.hpp"

using namespace fockopt;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 10;
constexpr int kExitNoModel = 11;
constexpr int kExitInput = 2;

enum class Format { Table, Csv, Json };

std::string num(double x, Format f = Format::Table) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f == Format::Csv ? "%.17g" : "%.12g", x);
  return buf;
}

std::string complex_text(Complex z) {
  if (z.imag() == 0.0) return num(z.real());
  if (z.real() == 0.0) return num(z.imag()) + "i";
  const std::string im = num(std::abs(z.imag()));
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + im + "i";
}

std::string alpha_text(const AlphaVector& a) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (i) s += ", ";
    s += complex_text(a(i));
  }
  return s + ")";
}

std::string occupation_text(const Occupation& occ) {
  std::string s = "|";
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(occ[i]);
  }
  return s + ">";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json alpha_json(const AlphaVector& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(complex_json(a(i)));
  return out;
}

// Ordered key/value report printed as "key: value" lines or two-column CSV.
class KeyValues {
 public:
  void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value, Format f) { add(std::move(key), num(value, f)); }

  void print(std::ostream& os, Format f) const {
    if (f == Format::Csv) {
      os << "field,value\n";
      for (const auto& [k, v] : rows_) os << csv_field(k) << "," << csv_field(v) << "\n";
    } else {
      for (const auto& [k, v] : rows_) os << k << ": " << v << "\n";
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

FockState read_state(const std::string& path) {
  LoadedState loaded = load_state(path);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return loaded.state;
}

// Circuit from a circuit file or from the "circuit" key of a witness file.
Circuit read_circuit(const std::string& path) {
  const std::string text = read_text_file(path);
  const json doc = [&] {
    try {
      return json::parse(text);
    } catch (const json::parse_error&) {
      return json();  // let parse_circuit report the position
    }
  }();
  if (doc.is_object() && doc.contains("circuit") && !doc.contains("elements")) {
    return circuit_from_json(doc.at("circuit"));
  }
  return parse_circuit(text);
}

// ---- classify ----------------------------------------------------------

int cmd_classify(const std::string& state_path, double tol, Format f) {
  const FockState state = read_state(state_path);
  const Classification c = is_single_mode_type(state, tol);

  if (f == Format::Json) {
    json out{{"single_mode", c.single_mode},
             {"statistics", to_string(state.statistics())},
             {"modes", state.n_modes()},
             {"particles", state.n_particles()},
             {"residual", c.residual}};
    out["alpha"] = c.alpha ? alpha_json(*c.alpha) : json(nullptr);
    out["violated"] = c.violated ? json(*c.violated) : json(nullptr);
    if (!c.reason.empty()) out["reason"] = c.reason;
    std::cout << out.dump(2) << "\n";
  } else {
    if (f == Format::Table) std::cout << (c.single_mode ? "SINGLE-MODE-TYPE" : "NOT-SINGLE-MODE") << "\n";
    KeyValues kv;
    if (f == Format::Csv) kv.add("verdict", c.single_mode ? "SINGLE-MODE-TYPE" : "NOT-SINGLE-MODE");
    kv.add("statistics", to_string(state.statistics()));
    kv.add("modes", std::to_string(state.n_modes()));
    kv.add("particles", std::to_string(state.n_particles()));
    if (c.alpha) kv.add("alpha", alpha_text(*c.alpha));
    if (c.violated) kv.add("violated", occupation_text(*c.violated));
    if (!c.reason.empty()) kv.add("reason", c.reason);
    kv.add("residual", c.residual, f);
    kv.print(std::cout, f);
  }
  return c.single_mode ? kExitOk : kExitNegative;
}

// ---- evolve ------------------------------------------------------------

int cmd_evolve(const std::string& state_path, const std::string& circuit_path,
               const std::string& out_path, Format f) {
  FockState state = read_state(state_path);
  const Circuit circuit = read_circuit(circuit_path);
  if (state.n_modes() > circuit.n_modes()) {
    throw ShapeMismatch("state has " + std::to_string(state.n_modes()) + " modes, circuit only " +
                        std::to_string(circuit.n_modes()));
  }
  // Modes the circuit has beyond the state are vacuum ancillas.
  state = embed_modes(state, circuit.n_modes());

  CircuitRun run{state, 1.0};
  try {
    run = run_circuit(state, circuit);
  } catch (const ZeroOutcome& e) {
    std::cerr << "heralds cannot fire: " << e.what() << "\n";
    return kExitNegative;
  }
  std::cerr << "success_probability: " << num(run.probability) << "\n";

  const std::string doc = dump_state(run.state) + "\n";
  if (!out_path.empty()) write_text(out_path, doc);

  if (f == Format::Json) {
    if (out_path.empty()) std::cout << doc;
    return kExitOk;
  }
  if (f == Format::Csv) {
    std::cout << "occupation,re,im,probability\n";
  } else {
    std::cout << to_string(run.state.statistics()) << " state, " << run.state.n_modes() << " modes, "
              << run.state.n_particles() << " particles\n";
  }
  for (const auto& [occ, a] : run.state.amplitudes()) {
    if (f == Format::Csv) {
      std::cout << csv_field(occupation_text(occ)) << "," << num(a.real(), f) << "," << num(a.imag(), f) << ","
                << num(std::norm(a), f) << "\n";
    } else {
      std::cout << "  " << occupation_text(occ) << "  " << complex_text(a) << "  p=" << num(std::norm(a)) << "\n";
    }
  }
  return kExitOk;
}

// ---- ys-test -----------------------------------------------------------

json basis_pair_json(const std::array<QubitBasis, 2>& party) {
  json out = json::array();
  for (const auto& b : party) {
    const Eigen::Vector3d n = b.bloch();
    out.push_back({n.x(), n.y(), n.z()});
  }
  return out;
}

std::string basis_pair_text(const std::array<QubitBasis, 2>& party) {
  std::string s;
  for (std::size_t i = 0; i < 2; ++i) {
    const Eigen::Vector3d n = party[i].bloch();
    if (i) s += "; ";
    s += "(" + num(n.x()) + ", " + num(n.y()) + ", " + num(n.z()) + ")";
  }
  return s;
}

int cmd_ys_test(const std::string& state_path, const std::string& settings_path, Format f) {
  const FockState state = read_state(state_path);
  if (state.n_modes() != 2 || state.n_particles() != 2) {
    throw ShapeMismatch("ys-test needs a two-particle state on two modes");
  }
  const PostSelection post = yurke_stoler_postselect(state);
  const BellTestResult best = chsh_max(post.chi);

  std::optional<double> given;
  if (!settings_path.empty()) {
    std::array<QubitBasis, 2> pa, pb;
    settings_from_json(json::parse(read_text_file(settings_path)), pa, pb);
    given = chsh_value(post.chi, pa, pb);
  }
  const double reported = given.value_or(best.chsh);
  const bool violated = reported > 2.0 + kViolationMargin;

  if (f == Format::Json) {
    json out{{"success_probability", post.probability},
             {"qubit_state", {complex_json(post.chi.e), complex_json(post.chi.f), complex_json(post.chi.g),
                              complex_json(post.chi.h)}},
             {"product", product_condition(post.chi)},
             {"chsh_max", best.chsh},
             {"optimal_settings", {{"party_A", basis_pair_json(best.party_a)},
                                   {"party_B", basis_pair_json(best.party_b)}}},
             {"violated", violated}};
    if (given) out["chsh"] = *given;
    std::cout << out.dump(2) << "\n";
  } else {
    KeyValues kv;
    kv.add("success_probability", post.probability, f);
    kv.add("qubit_state", complex_text(post.chi.e) + ", " + complex_text(post.chi.f) + ", " +
                              complex_text(post.chi.g) + ", " + complex_text(post.chi.h));
    kv.add("product", product_condition(post.chi) ? "yes" : "no");
    kv.add("chsh_max", best.chsh, f);
    kv.add("optimal_party_A", basis_pair_text(best.party_a));
    kv.add("optimal_party_B", basis_pair_text(best.party_b));
    if (given) kv.add("chsh", *given, f);
    kv.add("violated", violated ? "yes" : "no");
    kv.print(std::cout, f);
  }
  return violated ? kExitOk : kExitNegative;
}

// ---- witness -----------------------------------------------------------

int cmd_witness(const std::string& state_path, const std::string& out_path, Format f) {
  const FockState state = read_state(state_path);
  const auto found = find_witness(state);
  if (const auto* none = std::get_if<NoViolationFound>(&found)) {
    if (f == Format::Json) {
      std::cout << json{{"violation", false}, {"reason", none->reason}}.dump(2) << "\n";
    } else {
      KeyValues kv;
      kv.add("violation", "no");
      kv.add("reason", none->reason);
      kv.print(std::cout, f);
    }
    return kExitNegative;
  }

  const auto& w = std::get<WitnessExperiment>(found);
  const json doc = witness_to_json(w);
  if (!out_path.empty()) write_text(out_path, doc.dump(2) + "\n");

  if (f == Format::Json) {
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }
  const WitnessLayout lay = witness_layout(w);
  KeyValues kv;
  kv.add("violation", "yes");
  kv.add("chsh", w.result.chsh, f);
  kv.add("success_probability", w.result.success_probability, f);
  kv.add("input_modes", std::to_string(w.input_modes));
  kv.add("circuit_modes", std::to_string(w.preparation.n_modes()));
  kv.add("circuit_elements", std::to_string(w.preparation.elements().size()));
  for (std::size_t i = 0; i < w.steps.size(); ++i) kv.add("herald_" + std::to_string(i + 1), w.steps[i]);
  kv.add("party_A_modes", std::to_string(lay.alice[0] + 1) + "," + std::to_string(lay.alice[1] + 1));
  kv.add("party_B_modes", std::to_string(lay.bob[0] + 1) + "," + std::to_string(lay.bob[1] + 1));
  kv.add("settings_A", basis_pair_text(w.result.party_a));
  kv.add("settings_B", basis_pair_text(w.result.party_b));
  kv.print(std::cout, f);
  return kExitOk;
}

// ---- lhv-compare -------------------------------------------------------

int cmd_lhv_compare(const std::string& state_path, const std::string& circuit_path, std::int64_t shots,
                    std::optional<std::uint64_t> seed_flag, Format f) {
  const FockState state = read_state(state_path);
  const Circuit circuit = read_circuit(circuit_path);
  if (shots <= 0) throw InvalidParameter("--shots must be positive");

  const Classification c = is_single_mode_type(state);
  if (!c.single_mode) {
    std::cerr << "state is not of the single-mode type (" << c.reason
              << "); no local hidden-variable model reproduces its statistics in every experiment\n";
    return kExitNoModel;
  }
  if (state.n_modes() > circuit.n_modes()) {
    throw ShapeMismatch("state has more modes than the circuit");
  }
  AlphaVector alpha = AlphaVector::Zero(circuit.n_modes());
  if (c.alpha) {
    alpha.head(state.n_modes()) = *c.alpha;
  } else {
    alpha(0) = 1.0;  // vacuum: any direction will do
  }
  const std::uint64_t seed = seed_flag.value_or(default_seed());
  const LhvReport r = compare_lhv_quantum(EpistemicSpec{alpha, state.n_particles()}, circuit, shots, seed);
  const bool chi_ok = r.chi_square_p > kChiSquareAlpha;

  std::string modes;
  for (std::size_t i = 0; i < r.observed.size(); ++i) modes += (i ? "," : "") + std::to_string(r.observed[i] + 1);

  if (f == Format::Json) {
    json rows = json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"outcome", row.outcome ? json(*row.outcome) : json("rejected")},
                      {"quantum_prob", row.quantum_prob},
                      {"lhv_freq", row.lhv_freq},
                      {"stderr", row.stderr_freq},
                      {"z_score", row.z_score}});
    }
    json observed = json::array();
    for (int m : r.observed) observed.push_back(m + 1);
    std::cout << json{{"shots", r.shots},         {"seed", r.seed},
                      {"observed_modes", observed}, {"rows", rows},
                      {"tv_distance", r.tv_distance}, {"tv_bound", r.tv_bound},
                      {"chi_square", r.chi_square}, {"dof", r.dof},
                      {"chi_square_p", r.chi_square_p}, {"pass", chi_ok}}
                     .dump(2)
              << "\n";
  } else if (f == Format::Csv) {
    std::cout << "outcome,quantum_prob,lhv_freq,stderr,z_score\n";
    for (const auto& row : r.rows) {
      std::cout << csv_field(row.outcome ? occupation_text(*row.outcome) : "rejected") << ","
                << num(row.quantum_prob, f) << "," << num(row.lhv_freq, f) << "," << num(row.stderr_freq, f)
                << "," << num(row.z_score, f) << "\n";
    }
    std::cerr << "chi_square_p: " << num(r.chi_square_p) << "\n";
  } else {
    std::printf("shots: %lld  seed: %llu  observed modes: %s\n", static_cast<long long>(r.shots),
                static_cast<unsigned long long>(r.seed), modes.c_str());
    std::printf("%-16s %18s %18s %18s %18s\n", "outcome", "quantum_prob", "lhv_freq", "stderr", "z_score");
    for (const auto& row : r.rows) {
      std::printf("%-16s %18s %18s %18s %18s\n",
                  (row.outcome ? occupation_text(*row.outcome) : std::string("rejected")).c_str(),
                  num(row.quantum_prob).c_str(), num(row.lhv_freq).c_str(), num(row.stderr_freq).c_str(),
                  num(row.z_score).c_str());
    }
    std::printf("tv_distance: %s (bound %s)\n", num(r.tv_distance).c_str(), num(r.tv_bound).c_str());
    std::printf("chi_square: %s  dof: %d  p: %s\n", num(r.chi_square).c_str(), r.dof, num(r.chi_square_p).c_str());
    std::printf("%s\n", chi_ok ? "PASS" : "FAIL");
    std::fflush(stdout);
  }
  return chi_ok ? kExitOk : kExitNegative;
}

// ---- decompose ---------------------------------------------------------

int cmd_decompose(const std::string& unitary_path, const std::string& out_path, Format f) {
  const Circuit c = reck_decompose(parse_unitary(read_text_file(unitary_path)));
  const std::string doc = dump_circuit(c) + "\n";
  if (!out_path.empty()) write_text(out_path, doc);
  if (f == Format::Json) {
    if (out_path.empty()) std::cout << doc;
    return kExitOk;
  }
  if (f == Format::Csv) std::cout << "index,type,modes,parameters\n";
  int index = 0;
  for (const auto& e : c.elements()) {
    ++index;
    std::string type, modes, params;
    if (const auto* bs = std::get_if<BeamSplitter>(&e)) {
      type = "bs";
      modes = std::to_string(bs->s + 1) + "," + std::to_string(bs->t + 1);
      params = complex_text(bs->matrix(0, 0)) + "; " + complex_text(bs->matrix(0, 1)) + "; " +
               complex_text(bs->matrix(1, 0)) + "; " + complex_text(bs->matrix(1, 1));
    } else if (const auto* ps = std::get_if<PhaseShifter>(&e)) {
      type = "ps";
      modes = std::to_string(ps->mode + 1);
      params = "phi=" + num(ps->phi, f);
    }
    if (f == Format::Csv) {
      std::cout << index << "," << type << "," << csv_field(modes) << "," << csv_field(params) << "\n";
    } else {
      std::cout << index << ". " << type << " [" << modes << "] " << params << "\n";
    }
  }
  if (f == Format::Table) std::cout << c.elements().size() << " elements on " << c.n_modes() << " modes\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identical-particle linear optics: classification, Bell tests and hidden-variable checks"};
  app.require_subcommand(1, 1);

  Format format = Format::Table;
  const std::map<std::string, Format> formats{{"table", Format::Table}, {"csv", Format::Csv}, {"json", Format::Json}};
  bool format_given = false;
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Report format: table, csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
        ->each([&](const std::string&) { format_given = true; });
  };

  std::string state_path, circuit_path, settings_path, out_path, unitary_path;
  double tol = kDefaultClassifyTolerance;
  std::int64_t shots = 100000;
  std::optional<std::uint64_t> seed;

  auto* classify = app.add_subcommand("classify", "Decide whether a state is of the single-mode type");
  classify->add_option("state", state_path, "State file")->required()->check(CLI::ExistingFile);
  classify->add_option("--tol", tol, "Relative coefficient tolerance")->check(CLI::PositiveNumber);
  add_format(classify);

  auto* evolve = app.add_subcommand("evolve", "Run a state through a circuit (or a witness file's circuit)");
  evolve->add_option("state", state_path, "State file")->required()->check(CLI::ExistingFile);
  evolve->add_option("circuit", circuit_path, "Circuit or witness file")->required()->check(CLI::ExistingFile);
  evolve->add_option("--out", out_path, "Write the output state file here");
  add_format(evolve);

  auto* ys = app.add_subcommand("ys-test", "Yurke-Stoler Bell test on a two-mode two-particle state");
  ys->add_option("state", state_path, "State file")->required()->check(CLI::ExistingFile);
  ys->add_option("--settings", settings_path, "Settings or witness file")->check(CLI::ExistingFile);
  add_format(ys);

  auto* witness = app.add_subcommand("witness", "Search for a Bell-violating experiment");
  witness->add_option("state", state_path, "State file")->required()->check(CLI::ExistingFile);
  witness->add_option("--out", out_path, "Also write the experiment as JSON here");
  add_format(witness);

  auto* lhv = app.add_subcommand("lhv-compare", "Compare hidden-variable sampling with quantum predictions");
  lhv->add_option("state", state_path, "State file")->required()->check(CLI::ExistingFile);
  lhv->add_option("circuit", circuit_path, "Circuit file")->required()->check(CLI::ExistingFile);
  lhv->add_option("--shots", shots, "Number of runs")->check(CLI::PositiveNumber);
  lhv->add_option("--seed", seed, "RNG seed (overrides FOCKOPT_SEED)");
  add_format(lhv);

  auto* decompose = app.add_subcommand("decompose", "Reck decomposition of a unitary file");
  decompose->add_option("unitary", unitary_path, "Unitary file")->required()->check(CLI::ExistingFile);
  decompose->add_option("--out", out_path, "Write the circuit file here");
  add_format(decompose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  // Artifacts default to JSON, reports to a table.
  const auto fmt = [&](Format fallback) { return format_given ? format : fallback; };

  try {
    if (*classify) return cmd_classify(state_path, tol, fmt(Format::Table));
    if (*evolve) return cmd_evolve(state_path, circuit_path, out_path, fmt(Format::Json));
    if (*ys) return cmd_ys_test(state_path, settings_path, fmt(Format::Table));
    if (*witness) return cmd_witness(state_path, out_path, fmt(Format::Json));
    if (*lhv) return cmd_lhv_compare(state_path, circuit_path, shots, seed, fmt(Format::Table));
    if (*decompose) return cmd_decompose(unitary_path, out_path, fmt(Format::Json));
  } catch (const ParseError& e) {
    // Syntax errors already lead with "line L, column C".
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
