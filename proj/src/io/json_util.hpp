#pragma once

#include <string>

#include "json.hpp"
#include "qfc/core/errors.hpp"
#include "qfc/core/grid.hpp"

namespace qfc::io::detail {

using nlohmann::json;

inline json grid_to_json(const FrequencyGrid& g) {
  return json{{"label", g.label()},
              {"center_omega", g.center()},
              {"spacing", g.spacing()},
              {"count", g.count()},
              {"center_wavelength_nm", g.wavelength_nm((g.count() - 1) / 2)}};
}

// Typed field access for file headers; failures become ParseError naming
// the JSON path within `file`.
template <class T>
T field(const json& j, const std::string& key, const std::string& file, const std::string& where = "") {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing field " + where + "/" + key, file, 0);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError("wrong type for field " + where + "/" + key, file, 0);
  }
}

inline FrequencyGrid grid_from_json(const json& j, const std::string& file, const std::string& where) {
  if (!j.is_object()) throw ParseError("expected an object at " + where, file, 0);
  try {
    return FrequencyGrid(field<double>(j, "center_omega", file, where), field<double>(j, "spacing", file, where),
                         field<std::size_t>(j, "count", file, where), j.value("label", std::string{}));
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("invalid grid at ") + where + ": " + e.what(), file, 0);
  }
}

inline void check_schema(const json& j, const std::string& expected, const std::string& file) {
  const auto it = j.find("schema");
  if (it == j.end() || !it->is_string()) throw ParseError("missing schema tag", file, 0);
  if (it->get<std::string>() != expected)
    throw ParseError("schema mismatch: expected " + expected + ", found " + it->get<std::string>(), file, 0);
}

inline json parse_json(const std::string& text, const std::string& file, std::size_t base = 0) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), file, base + (e.byte > 0 ? e.byte - 1 : 0));
  }
}

}  // namespace qfc::io::detail
