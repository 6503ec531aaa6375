#pragma once

#include "domcalc/common.hpp"
#include "domcalc/scalar.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace domcalc::units {

enum class BaseDim { m = 0, kg, s, A, K, mol, cd };
inline constexpr std::size_t kBaseCount = 7;

/// Exponent vector over (m, kg, s, A, K, mol, cd).
class Dimension
{
public:
  Dimension() = default;
  explicit Dimension(std::array<int, kBaseCount> e) : d_exp(e) {}
  static Dimension base(BaseDim b);

  int operator[](BaseDim b) const { return d_exp[static_cast<std::size_t>(b)]; }
  const std::array<int, kBaseCount>& exponents() const { return d_exp; }
  bool dimensionless() const;

  /// "m^1 kg^1 s^-2"; "1" when dimensionless.
  std::string to_string() const;

  friend bool operator==(const Dimension&, const Dimension&) = default;
  friend auto operator<=>(const Dimension&, const Dimension&) = default;

private:
  std::array<int, kBaseCount> d_exp{};
};

Dimension dim_mul(const Dimension& a, const Dimension& b);
Dimension dim_div(const Dimension& a, const Dimension& b);
Dimension dim_pow(const Dimension& a, int n);

/// Result of evaluating a unit expression: `value_SI = value * scale + offset`.
/// Only a lone affine symbol (°C) carries an offset.
struct UnitValue
{
  Dimension dimension;
  Scalar scale{1};
  Scalar offset{0};
};

struct UnitSymbol
{
  std::string symbol;
  std::string name;
  Dimension dimension;
  Scalar scale{1};
  Scalar offset{0};
  bool prefixable = true;
};

struct Prefix
{
  std::string symbol;
  std::string name;
  int exponent;
};

const std::vector<UnitSymbol>& unit_symbols();
const std::vector<Prefix>& prefixes();

/// Parses `kg*m/s^2`, `km`, `(W/A)*s`, `1`. Throws Error with code
/// UnknownUnitSymbol, UnknownPrefix or BadUnitExpression.
UnitValue parse_unit(std::string_view text);

/// Name of the named unit (Table-style: "newton", "pascal", ...) or derived
/// quantity ("square meter") whose dimension matches, else "derived".
std::string unit_name_for(const Dimension& d);

enum class KindRole { point, interval, plain };
std::string to_string(KindRole r);
std::optional<KindRole> role_from_string(std::string_view s);

struct QuantityKind
{
  KindName name;
  Dimension dimension;
  KindRole role = KindRole::plain;
  Scalar scale{1};
  Scalar offset{0};
  std::string unit = "1";
  /// Kind produced by point - point.
  std::optional<KindName> intervalKind;
  /// Nominal result kind of mean over points.
  std::optional<KindName> meanKind;
  /// Point difference carries the precondition lhs >= rhs (calendar time).
  bool orderedDifference = false;

  friend bool operator==(const QuantityKind&, const QuantityKind&) = default;
};

enum class OpKind { add, sub, mul, div, compare, mean, scaleByReal, rateOfChange };
inline constexpr std::array<OpKind, 8> kAllOps = {OpKind::add,     OpKind::sub,  OpKind::mul,
                                                  OpKind::div,     OpKind::compare,
                                                  OpKind::mean,    OpKind::scaleByReal,
                                                  OpKind::rateOfChange};
std::string to_string(OpKind op);
std::optional<OpKind> op_from_string(std::string_view s);

struct Allowed
{
  QuantityKind result;
  /// Runtime precondition: lhs >= rhs (point subtraction on ordered kinds).
  bool requiresOrderedOperands = false;
};

struct Forbidden
{
  std::string reason;
};

using OpVerdict = std::variant<Allowed, Forbidden>;

inline bool is_forbidden(const OpVerdict& v) { return std::holds_alternative<Forbidden>(v); }

/// Registered quantity kinds plus the operator-permission ledger. The
/// built-in instance covers base, derived and further SI kinds together with
/// calendar Time/TimeInterval and Celsius temperature.
class KindRegistry
{
public:
  KindRegistry() = default;
  static const KindRegistry& builtin();

  /// Returns true when `k` shadows a kind that was already registered.
  bool add(QuantityKind k);
  /// Registers a local ledger entry; nullopt result means forbidden.
  /// Returns true when it overrides a different built-in verdict.
  bool add_rule(OpKind op, const KindName& lhs, const KindName& rhs, std::optional<KindName> result);

  const QuantityKind* find(const KindName& name) const;
  /// Throws Error("UnregisteredKind").
  const QuantityKind& at(const KindName& name) const;
  const std::vector<KindName>& names() const { return d_order; }

  /// Ledger verdict for registered kinds. Throws Error("UnregisteredKind").
  OpVerdict check_op(OpKind op, const KindName& lhs, const KindName& rhs) const;
  /// Ledger verdict for arbitrary (possibly derived) kinds.
  OpVerdict check_op(OpKind op, const QuantityKind& lhs, const QuantityKind& rhs) const;

  QuantityKind interval_of(const QuantityKind& point) const;
  QuantityKind mean_kind_of(const QuantityKind& k) const;
  /// Non-point registered kind with this dimension at unit scale, else a
  /// synthesized plain kind named `fallback`.
  QuantityKind canonical_for(const Dimension& d, const Scalar& scale, const std::string& fallback) const;

private:
  struct RuleKey
  {
    OpKind op;
    KindName lhs, rhs;
    friend auto operator<=>(const RuleKey&, const RuleKey&) = default;
  };
  OpVerdict builtin_verdict(OpKind op, const QuantityKind& l, const QuantityKind& r) const;

  std::map<KindName, QuantityKind> d_kinds;
  std::vector<KindName> d_order;
  std::map<RuleKey, std::optional<KindName>> d_rules;
};

/// Builds a kind from a unit expression; the offset of an affine unit is
/// kept only for point kinds.
QuantityKind make_kind(const KindName& name, KindRole role, std::string_view unit);

/// A value expressed in the units of its kind.
struct Quantity
{
  Scalar value;
  QuantityKind kind;

  Scalar to_si() const;
  std::string to_string() const;
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

/// Parses "900 km/h", "10 °C", "0", "5/18 m/s" into `kind` units. A bare
/// number is taken in the kind's own unit. Throws Error with code BadValue or
/// DimensionMismatch (or the unit parse codes).
Quantity parse_quantity(std::string_view text, const QuantityKind& kind);

/// Arithmetic mean in the coherent linear scale, tagged with the mean kind.
/// Throws Error("EmptyInput") or Error("MixedKinds").
Quantity mean(std::span<const Quantity> values, const KindRegistry& reg);

/// delta / per with dimension dim(delta) - dim(s). Throws
/// Error("ZeroTimeInterval") when per <= 0, Error("Forbidden") when the
/// ledger rejects the operands.
Quantity rate_of_change(const Quantity& delta, const Quantity& per, const KindRegistry& reg);

/// Runtime evaluation of a binary operator under the ledger. Enforces the
/// ordered-difference precondition (Error("PreconditionViolated")).
Quantity evaluate(OpKind op, const Quantity& lhs, const Quantity& rhs, const KindRegistry& reg);

// ---------------------------------------------------------------------------
// Attribute-value expressions

struct Expr
{
  enum class Form { name, literal, binary, call };
  Form form = Form::literal;
  /// Identifier, literal text, operator symbol or callee.
  std::string text;
  std::vector<Expr> args;
  SourceSpan span;
};

/// Grammar: comparisons over `+ -` over `* /`, atoms are numbers, (dotted)
/// names, calls `f(a, ...)` and parentheses. Throws Error("ExprSyntax").
Expr parse_expr(std::string_view text, const std::string& file = "<expr>");
std::string to_string(const Expr& e);

struct ConversionSig
{
  KindName from, to;
};

using KindEnv = std::map<std::string, KindName>;

/// Folds check_op over the tree. Free names resolve through `env`, then as
/// registered kind names. Calls: mean(...), rate(delta, per) and declared
/// conversions. Diagnostics: E201 forbidden operation, E202 unknown name,
/// E206 conversion argument kind mismatch, E207 unknown function or arity.
std::variant<QuantityKind, Diagnostic> typecheck_expr(
    const Expr& e, const KindEnv& env, const KindRegistry& reg,
    const std::map<std::string, ConversionSig>& conversions = {});

}  // namespace domcalc::units
