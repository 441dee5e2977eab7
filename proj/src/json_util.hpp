#pragma once

// Helpers shared by the state and circuit readers.

#include <complex>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "fockopt/error.hpp"

namespace fockopt::detail {

using nlohmann::json;

/// 1-based line and column of a byte offset.
inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the offset one past the offending character.
    auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
}

inline const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string("missing key \"") + key + "\"");
  }
  return obj.at(key);
}

inline int require_int(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("key \"") + key + "\" must be an integer");
  }
  return v.get<int>();
}

inline double require_number(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_number()) {
    throw ParseError(std::string("key \"") + key + "\" must be a number");
  }
  return v.get<double>();
}

/// A complex entry is either a real number or a [re, im] pair.
inline std::complex<double> complex_from_json(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ParseError("complex entries must be a number or a [re, im] pair");
}

inline json complex_to_json(std::complex<double> z) {
  return json::array({z.real(), z.imag()});
}

}  // namespace fockopt::detail
