#pragma once

// Text state files:
//   {"statistics":"boson"|"fermion","modes":M,
//    "terms":[{"occ":[n1,...,nM],"re":x,"im":y}, ...]}
// Occupation vectors list modes in order 1..M.

#include <filesystem>
#include <string>
#include <vector>

#include "fockopt/fock_state.hpp"

namespace fockopt {

struct LoadedState {
  FockState state;                    ///< normalized
  std::vector<std::string> warnings;  ///< e.g. renormalization notices
};

/// Deviation of the stored norm from 1 beyond which loading warns.
inline constexpr double kLoadNormWarning = 1e-6;

/// Throws ParseError (with line/column for syntax errors), or the
/// InvalidOccupation/ShapeMismatch/ZeroState raised by FockState itself.
LoadedState parse_state(const std::string& text);
LoadedState load_state(const std::filesystem::path& path);

std::string dump_state(const FockState& state, int indent = 2);

/// Whole file as a string; throws ParseError when unreadable.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fockopt
