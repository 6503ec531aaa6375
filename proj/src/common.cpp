#include "domcalc/common.hpp"

#include <algorithm>

namespace domcalc {

std::string format_diagnostic(const Diagnostic& d, bool color)
{
  std::string loc = (d.span.file.empty() ? std::string("<input>") : d.span.file) + ":" +
                    std::to_string(d.span.startLine) + ":" + std::to_string(d.span.startCol) + ": ";
  std::string code = d.code;
  if (color) code = (d.severity == Severity::error ? "\x1b[31m" : "\x1b[33m") + code + "\x1b[0m";
  return loc + code + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags)
{
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

}  // namespace domcalc
