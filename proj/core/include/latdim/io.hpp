#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "latdim/lattice.hpp"

namespace latdim::io {

/// Reads the JSONL set format (optional `{"dim":..,"provenance":..}` header, then one
/// `[x,y,...]` array per line) or the plain-text format (whitespace-separated integers,
/// one point per line). Blank lines and lines starting with `#` are skipped.
LatticeSet read_set(std::istream& in, std::string source_name = "<stream>");
LatticeSet read_set(const std::filesystem::path& path);

/// Writes the header line, then one compact JSON array per point, LF-terminated.
/// `extra` keys are merged into the header object.
void write_set(std::ostream& out, const LatticeSet& set, const nlohmann::json& extra = nlohmann::json::object());
void write_set(const std::filesystem::path& path, const LatticeSet& set,
               const nlohmann::json& extra = nlohmann::json::object());

} // namespace latdim::io
