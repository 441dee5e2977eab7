#include "fockopt/state_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace fockopt {

using detail::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedState parse_state(const std::string& text) {
  const json doc = detail::parse_document(text);
  const json& stats_value = detail::require(doc, "statistics");
  if (!stats_value.is_string()) throw ParseError("\"statistics\" must be a string");
  const std::string stats_name = stats_value.get<std::string>();
  Statistics statistics;
  if (stats_name == "boson") {
    statistics = Statistics::Boson;
  } else if (stats_name == "fermion") {
    statistics = Statistics::Fermion;
  } else {
    throw ParseError("unknown statistics \"" + stats_name + "\"");
  }
  const int modes = detail::require_int(doc, "modes");
  if (modes < 1) throw ParseError("\"modes\" must be positive");

  const json& terms = detail::require(doc, "terms");
  if (!terms.is_array() || terms.empty()) {
    throw ParseError("\"terms\" must be a non-empty array");
  }

  Amplitudes amps;
  int n_particles = -1;
  for (const json& term : terms) {
    const json& occ_value = detail::require(term, "occ");
    if (!occ_value.is_array()) throw ParseError("\"occ\" must be an array");
    Occupation occ;
    for (const json& n : occ_value) {
      if (!n.is_number_integer()) throw ParseError("occupation entries must be integers");
      occ.push_back(n.get<int>());
    }
    if (static_cast<int>(occ.size()) != modes) {
      throw ParseError("occupation vector length differs from \"modes\"");
    }
    int total = 0;
    for (int n : occ) total += n;
    if (n_particles < 0) n_particles = total;
    if (total != n_particles) {
      throw ParseError("terms have different particle numbers");
    }
    const double re = term.contains("re") ? detail::require_number(term, "re") : 0.0;
    const double im = term.contains("im") ? detail::require_number(term, "im") : 0.0;
    if (!amps.emplace(occ, Complex{re, im}).second) {
      throw ParseError("duplicate occupation vector in \"terms\"");
    }
  }

  FockState raw(statistics, modes, n_particles, std::move(amps));
  LoadedState loaded{raw.normalized(), {}};
  const double norm = raw.norm();
  if (std::abs(norm - 1.0) > kLoadNormWarning) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "state norm " << norm << " renormalized to 1";
    loaded.warnings.push_back(msg.str());
  }
  return loaded;
}

LoadedState load_state(const std::filesystem::path& path) {
  return parse_state(read_text_file(path));
}

std::string dump_state(const FockState& state, int indent) {
  json terms = json::array();
  for (const auto& [occ, a] : state.amplitudes()) {
    terms.push_back({{"occ", occ}, {"re", a.real()}, {"im", a.imag()}});
  }
  json doc = {{"statistics", to_string(state.statistics())},
              {"modes", state.n_modes()},
              {"terms", terms}};
  return doc.dump(indent);
}

}  // namespace fockopt
