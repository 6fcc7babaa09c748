// intentforge/jsonio.hpp
//
// Deterministic JSON emission. nlohmann::json objects already iterate in
// sorted key order; dump_deterministic additionally pins float formatting
// to six decimals so reports are byte-stable across runs and platforms.

#ifndef INTENTFORGE_JSONIO_HPP
#define INTENTFORGE_JSONIO_HPP

#include <string>

#include <json.hpp>

namespace intentforge {

// Sorted keys (inherited from the object type), integers verbatim,
// floating point numbers as "%.6f". Not whitespace-pretty; the output is
// a machine artifact.
std::string dump_deterministic(const nlohmann::json& value);

// Reads a whole file or throws ValidationError naming the path.
std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& contents);

}  // namespace intentforge

#endif  // INTENTFORGE_JSONIO_HPP
