#pragma once

#include "domcalc/dsl.hpp"

#include <stdexcept>
#include <string>

namespace domcalc::testing {

inline std::string source_path(const std::string& rel) { return std::string(DOMCALC_SOURCE_DIR) + "/" + rel; }

inline std::string aircraft_text() { return dsl::read_file(source_path("models/aircraft.dom")); }

inline DomainModel parse_ok(const std::string& text)
{
  auto r = dsl::parse_model(text, "<test>");
  if (!r.ok()) throw std::runtime_error("fixture does not parse: " + format_diagnostic(r.diagnostics.front()));
  return std::move(r.model);
}

inline DomainModel aircraft() { return parse_ok(aircraft_text()); }

}  // namespace domcalc::testing
