#include "fockopt/circuit_io.hpp"

#include "fockopt/state_io.hpp"
#include "json_util.hpp"

namespace fockopt {

using detail::json;

namespace {

int mode_index(const json& v, int n_modes) {
  if (!v.is_number_integer()) throw ParseError("mode indices must be integers");
  const int m = v.get<int>();
  if (m < 1 || m > n_modes) {
    throw ParseError("mode " + std::to_string(m) + " outside 1.." + std::to_string(n_modes));
  }
  return m - 1;
}

std::pair<int, int> mode_pair(const json& element, int n_modes) {
  const json& modes = detail::require(element, "modes");
  if (!modes.is_array() || modes.size() != 2) {
    throw ParseError("\"modes\" must list two modes");
  }
  return {mode_index(modes[0], n_modes), mode_index(modes[1], n_modes)};
}

Eigen::MatrixXcd matrix_from_json(const json& rows, int dim) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
    throw ParseError("matrix must have " + std::to_string(dim) + " rows");
  }
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != dim) {
      throw ParseError("matrix row " + std::to_string(i + 1) + " must have " +
                       std::to_string(dim) + " entries");
    }
    for (int j = 0; j < dim; ++j) m(i, j) = detail::complex_from_json(rows[i][j]);
  }
  return m;
}

}  // namespace

Circuit circuit_from_json(const json& doc) {
  const int n_modes = detail::require_int(doc, "modes");
  if (n_modes < 1) throw ParseError("\"modes\" must be positive");
  const json& list = detail::require(doc, "elements");
  if (!list.is_array()) throw ParseError("\"elements\" must be an array");

  std::vector<GateElement> elements;
  for (const json& e : list) {
    const json& type_value = detail::require(e, "type");
    if (!type_value.is_string()) throw ParseError("element \"type\" must be a string");
    const std::string type = type_value.get<std::string>();
    if (type == "bs") {
      auto [s, t] = mode_pair(e, n_modes);
      Eigen::Matrix2cd v = matrix_from_json(detail::require(e, "matrix"), 2);
      elements.push_back(BeamSplitter{s, t, v});
    } else if (type == "ps") {
      elements.push_back(PhaseShifter{mode_index(detail::require(e, "mode"), n_modes),
                                      detail::require_number(e, "phi")});
    } else if (type == "swap") {
      auto [s, t] = mode_pair(e, n_modes);
      elements.push_back(Swap{s, t});
    } else if (type == "detect") {
      Detector d{mode_index(detail::require(e, "mode"), n_modes), std::nullopt};
      if (e.contains("herald") && !e.at("herald").is_null()) {
        d.herald = detail::require_int(e, "herald");
      }
      elements.push_back(d);
    } else {
      throw ParseError("unknown element type \"" + type + "\"");
    }
  }

  std::optional<std::vector<int>> outputs;
  if (doc.contains("outputs") && !doc.at("outputs").is_null()) {
    const json& out = doc.at("outputs");
    if (!out.is_array()) throw ParseError("\"outputs\" must be an array");
    outputs.emplace();
    for (const json& m : out) outputs->push_back(mode_index(m, n_modes));
  }
  return Circuit(n_modes, std::move(elements), std::move(outputs));
}

Circuit parse_circuit(const std::string& text) {
  return circuit_from_json(detail::parse_document(text));
}

Circuit load_circuit(const std::filesystem::path& path) {
  return parse_circuit(read_text_file(path));
}

json circuit_to_json(const Circuit& circuit) {
  json elements = json::array();
  for (const auto& e : circuit.elements()) {
    if (const auto* bs = std::get_if<BeamSplitter>(&e)) {
      json rows = json::array();
      for (int i = 0; i < 2; ++i) {
        rows.push_back({detail::complex_to_json(bs->matrix(i, 0)),
                        detail::complex_to_json(bs->matrix(i, 1))});
      }
      elements.push_back({{"type", "bs"}, {"modes", {bs->s + 1, bs->t + 1}}, {"matrix", rows}});
    } else if (const auto* ps = std::get_if<PhaseShifter>(&e)) {
      elements.push_back({{"type", "ps"}, {"mode", ps->mode + 1}, {"phi", ps->phi}});
    } else if (const auto* sw = std::get_if<Swap>(&e)) {
      elements.push_back({{"type", "swap"}, {"modes", {sw->s + 1, sw->t + 1}}});
    } else {
      const auto& d = std::get<Detector>(e);
      json j = {{"type", "detect"}, {"mode", d.mode + 1}};
      if (d.herald) j["herald"] = *d.herald;
      elements.push_back(j);
    }
  }
  json doc = {{"modes", circuit.n_modes()}, {"elements", elements}};
  if (circuit.explicit_outputs()) {
    json out = json::array();
    for (int m : circuit.outputs()) out.push_back(m + 1);
    doc["outputs"] = out;
  }
  return doc;
}

std::string dump_circuit(const Circuit& circuit, int indent) {
  return circuit_to_json(circuit).dump(indent);
}

ModeUnitary parse_unitary(const std::string& text) {
  const json doc = detail::parse_document(text);
  const int n = detail::require_int(doc, "modes");
  if (n < 1) throw ParseError("\"modes\" must be positive");
  return ModeUnitary(matrix_from_json(detail::require(doc, "matrix"), n));
}

json unitary_to_json(const Eigen::MatrixXcd& u) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < u.cols(); ++j) row.push_back(detail::complex_to_json(u(i, j)));
    rows.push_back(row);
  }
  return {{"modes", u.rows()}, {"matrix", rows}};
}

}  // namespace fockopt
