// src/jsonio.cpp

#include "intentforge/jsonio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "intentforge/error.hpp"

namespace intentforge {

namespace {

void dump_value(const nlohmann::json& v, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump_value(it.value(), out);
      }
      out += '}';
      break;
    }
    case value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        dump_value(item, out);
      }
      out += ']';
      break;
    }
    case value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", v.get<double>());
      out += buf;
      break;
    }
    default:
      out += v.dump();  // strings, ints, bools, null
      break;
  }
}

}  // namespace

std::string dump_deterministic(const nlohmann::json& value) {
  std::string out;
  dump_value(value, out);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << contents;
  if (!out) throw Error("short write: " + path);
}

}  // namespace intentforge
