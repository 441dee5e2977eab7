#pragma once

// Text circuit files, 1-based mode indices, elements in application order:
//   {"modes":M,
//    "elements":[{"type":"bs","modes":[s,t],"matrix":[[v00,v01],[v10,v11]]},
//                {"type":"ps","mode":s,"phi":x},
//                {"type":"swap","modes":[s,t]},
//                {"type":"detect","mode":s,"herald":k}],
//    "outputs":[...]}
// Matrix entries are numbers or [re, im] pairs. "herald" and "outputs" are
// optional.
//
// Unitary files for decomposition: {"modes":M,"matrix":[[...], ...]}.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fockopt/circuit.hpp"

namespace fockopt {

/// Throws ParseError for malformed documents and InvalidCircuit for
/// well-formed ones that violate the circuit rules.
Circuit circuit_from_json(const nlohmann::json& doc);
Circuit parse_circuit(const std::string& text);
Circuit load_circuit(const std::filesystem::path& path);

nlohmann::json circuit_to_json(const Circuit& circuit);
std::string dump_circuit(const Circuit& circuit, int indent = 2);

/// Throws ParseError, or NotUnitary when the matrix is not unitary.
ModeUnitary parse_unitary(const std::string& text);
nlohmann::json unitary_to_json(const Eigen::MatrixXcd& u);

}  // namespace fockopt
