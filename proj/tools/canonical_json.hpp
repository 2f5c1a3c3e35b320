#pragma once
// Deterministic JSON text: keys sorted, floats as %.12e, integers as integers,
// two-space indentation. Parsing the output and emitting it again is byte-identical.

#include <cmath>
#include <cstdio>
#include <string>

#include "json.hpp"

namespace hardy::io {

using json = nlohmann::json;

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

namespace detail {

inline void emit(json const& j, std::string& out, int depth) {
  auto pad = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ",\n";
        first = false;
        pad(depth + 1);
        out += json(it.key()).dump();
        out += ": ";
        emit(it.value(), out, depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        pad(depth + 1);
        emit(j[i], out, depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string to_canonical(json const& j) {
  std::string out;
  detail::emit(j, out, 0);
  out += "\n";
  return out;
}

}  // namespace hardy::io
