#pragma once

#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace domcalc {

/// Nominal identifier. Distinct tags keep sort names, id types, attribute
/// names and the rest from being mixed up.
template <class Tag>
class Name
{
public:
  Name() = default;
  explicit Name(std::string s) : d_value(std::move(s)) {}

  const std::string& str() const { return d_value; }
  bool empty() const { return d_value.empty(); }

  friend auto operator<=>(const Name&, const Name&) = default;
  friend bool operator==(const Name&, const Name&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Name& n) { return os << n.d_value; }

private:
  std::string d_value;
};

using SortName       = Name<struct SortTag>;
using IdTypeName     = Name<struct IdTypeTag>;
using AttrName       = Name<struct AttrTag>;
using ChannelName    = Name<struct ChannelTag>;
using KindName       = Name<struct KindTag>;
using ConversionName = Name<struct ConversionTag>;

struct SourceSpan
{
  std::string file;
  int startLine = 1;
  int startCol  = 1;
  int endLine   = 1;
  int endCol    = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { error, warning };

/// Codes are stable strings: E0xx syntax, E1xx analysis, E2xx units,
/// E3xx compile, W2xx unit warnings.
struct Diagnostic
{
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  SourceSpan span;
};

/// Renders `file:line:col: code: message`.
std::string format_diagnostic(const Diagnostic& d, bool color = false);
bool has_errors(const std::vector<Diagnostic>& diags);

/// Error raised by API operations whose contract names a failure
/// (UnknownSort, NotComposite, UncoveredChannel, ...). `code()` is that name.
class Error : public std::runtime_error
{
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), d_code(std::move(code))
  {
  }
  const std::string& code() const { return d_code; }

private:
  std::string d_code;
};

}  // namespace domcalc
