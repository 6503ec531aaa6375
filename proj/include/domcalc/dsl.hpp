#pragma once

#include "domcalc/common.hpp"
#include "domcalc/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace domcalc::dsl {

struct ParseResult
{
  DomainModel model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Parses `.dom` text. Never throws: syntax errors (E001) and duplicate
/// names (E002) become diagnostics, and parsing resumes at the next
/// top-level declaration. Unresolved references are left to analysis.
ParseResult parse_model(std::string_view text, const std::string& file = "<input>");

/// Canonical text; parse_model(print_model(m)).model is structurally equal to m.
std::string print_model(const DomainModel& model);

/// Canonical rendering of description statements alone.
std::string print_descriptions(const std::vector<DescriptionStmt>& stmts);

/// Reads a file into a string. Throws Error("IoError").
std::string read_file(const std::string& path);

}  // namespace domcalc::dsl
