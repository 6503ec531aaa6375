#include "domcalc/units.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace domcalc::units {

// ---------------------------------------------------------------------------
// Dimension

Dimension Dimension::base(BaseDim b)
{
  std::array<int, kBaseCount> e{};
  e[static_cast<std::size_t>(b)] = 1;
  return Dimension(e);
}

bool Dimension::dimensionless() const
{
  return std::all_of(d_exp.begin(), d_exp.end(), [](int x) { return x == 0; });
}

std::string Dimension::to_string() const
{
  static const char* symbols[kBaseCount] = {"m", "kg", "s", "A", "K", "mol", "cd"};
  std::string out;
  for (std::size_t i = 0; i < kBaseCount; ++i)
  {
    if (d_exp[i] == 0) continue;
    if (!out.empty()) out += ' ';
    out += symbols[i];
    out += '^';
    out += std::to_string(d_exp[i]);
  }
  return out.empty() ? "1" : out;
}

Dimension dim_mul(const Dimension& a, const Dimension& b)
{
  std::array<int, kBaseCount> e{};
  for (std::size_t i = 0; i < kBaseCount; ++i) e[i] = a.exponents()[i] + b.exponents()[i];
  return Dimension(e);
}

Dimension dim_div(const Dimension& a, const Dimension& b)
{
  std::array<int, kBaseCount> e{};
  for (std::size_t i = 0; i < kBaseCount; ++i) e[i] = a.exponents()[i] - b.exponents()[i];
  return Dimension(e);
}

Dimension dim_pow(const Dimension& a, int n)
{
  std::array<int, kBaseCount> e{};
  for (std::size_t i = 0; i < kBaseCount; ++i) e[i] = a.exponents()[i] * n;
  return Dimension(e);
}

// ---------------------------------------------------------------------------
// Symbol tables

namespace {

Dimension dim(int m, int kg, int s, int A = 0, int K = 0, int mol = 0, int cd = 0)
{
  return Dimension({m, kg, s, A, K, mol, cd});
}

Scalar lit(const char* text) { return *Scalar::parse(text); }

}  // namespace

const std::vector<UnitSymbol>& unit_symbols()
{
  static const std::vector<UnitSymbol> table = [] {
    std::vector<UnitSymbol> t;
    // base units
    t.push_back({"m", "meter", dim(1, 0, 0)});
    t.push_back({"kg", "kilogram", dim(0, 1, 0), Scalar(1), Scalar(0), false});
    t.push_back({"g", "gram", dim(0, 1, 0), lit("0.001")});
    t.push_back({"s", "second", dim(0, 0, 1)});
    t.push_back({"A", "ampere", dim(0, 0, 0, 1)});
    t.push_back({"K", "kelvin", dim(0, 0, 0, 0, 1)});
    t.push_back({"mol", "mole", dim(0, 0, 0, 0, 0, 1)});
    t.push_back({"cd", "candela", dim(0, 0, 0, 0, 0, 0, 1)});
    // named derived units
    t.push_back({"rad", "radian", dim(0, 0, 0)});
    t.push_back({"sr", "steradian", dim(0, 0, 0)});
    t.push_back({"Hz", "hertz", dim(0, 0, -1)});
    t.push_back({"N", "newton", dim(1, 1, -2)});
    t.push_back({"Pa", "pascal", dim(-1, 1, -2)});
    t.push_back({"J", "joule", dim(2, 1, -2)});
    t.push_back({"W", "watt", dim(2, 1, -3)});
    t.push_back({"C", "coulomb", dim(0, 0, 1, 1)});
    t.push_back({"V", "volt", dim(2, 1, -3, -1)});
    t.push_back({"F", "farad", dim(-2, -1, 4, 2)});
    t.push_back({"\xCE\xA9", "ohm", dim(2, 1, -3, -2)});
    t.push_back({"ohm", "ohm", dim(2, 1, -3, -2)});
    t.push_back({"S", "siemens", dim(-2, -1, 3, 2)});
    t.push_back({"Wb", "weber", dim(2, 1, -2, -1)});
    t.push_back({"T", "tesla", dim(0, 1, -2, -1)});
    t.push_back({"H", "henry", dim(2, 1, -2, -2)});
    t.push_back({"\xC2\xB0" "C", "degree Celsius", dim(0, 0, 0, 0, 1), Scalar(1), lit("273.15"), false});
    t.push_back({"degC", "degree Celsius", dim(0, 0, 0, 0, 1), Scalar(1), lit("273.15"), false});
    t.push_back({"lm", "lumen", dim(0, 0, 0, 0, 0, 0, 1)});
    t.push_back({"lx", "lux", dim(-2, 0, 0, 0, 0, 0, 1)});
    // accepted for use with SI; not prefixable
    t.push_back({"min", "minute", dim(0, 0, 1), Scalar(60), Scalar(0), false});
    t.push_back({"h", "hour", dim(0, 0, 1), Scalar(3600), Scalar(0), false});
    // pi/180 to 18 significant digits; exact between values of one kind
    t.push_back({"deg", "degree", dim(0, 0, 0), lit("0.0174532925199432958"), Scalar(0), false});
    t.push_back({"\xC2\xB0", "degree", dim(0, 0, 0), lit("0.0174532925199432958"), Scalar(0), false});
    return t;
  }();
  return table;
}

const std::vector<Prefix>& prefixes()
{
  static const std::vector<Prefix> table = {
      {"da", "deca", 1},   {"h", "hecto", 2},  {"k", "kilo", 3},   {"M", "mega", 6},
      {"G", "giga", 9},    {"T", "tera", 12},  {"P", "peta", 15},  {"E", "exa", 18},
      {"Z", "zetta", 21},  {"Y", "yotta", 24}, {"d", "deci", -1},  {"c", "centi", -2},
      {"m", "milli", -3},  {"\xCE\xBC", "micro", -6}, {"u", "micro", -6}, {"n", "nano", -9},
      {"p", "pico", -12},  {"f", "femto", -15}, {"a", "atto", -18}, {"z", "zepto", -21},
      {"y", "yocto", -24},
  };
  return table;
}

namespace {

const UnitSymbol* exact_symbol(std::string_view s)
{
  for (const auto& u : unit_symbols())
    if (u.symbol == s) return &u;
  return nullptr;
}

UnitValue resolve_symbol(std::string_view s, bool& has_offset)
{
  if (const UnitSymbol* u = exact_symbol(s))
  {
    has_offset = !u->offset.is_zero();
    return {u->dimension, u->scale, u->offset};
  }
  has_offset = false;
  // prefix + prefixable unit; longest prefix first
  std::vector<const Prefix*> ordered;
  for (const auto& p : prefixes()) ordered.push_back(&p);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Prefix* a, const Prefix* b) { return a->symbol.size() > b->symbol.size(); });
  for (const Prefix* p : ordered)
  {
    if (s.size() <= p->symbol.size() || s.substr(0, p->symbol.size()) != p->symbol) continue;
    const UnitSymbol* u = exact_symbol(s.substr(p->symbol.size()));
    if (u && u->prefixable) return {u->dimension, u->scale * Scalar::pow10(p->exponent), Scalar(0)};
  }
  // some suffix names a unit: the leading part is an unknown prefix
  for (std::size_t cut = 1; cut < s.size(); ++cut)
  {
    const UnitSymbol* u = exact_symbol(s.substr(cut));
    if (u && u->prefixable)
      throw Error("UnknownPrefix", "unknown prefix '" + std::string(s.substr(0, cut)) + "' on unit '" +
                                       u->symbol + "'");
  }
  throw Error("UnknownUnitSymbol", "unknown unit symbol '" + std::string(s) + "'");
}

class UnitParser
{
public:
  explicit UnitParser(std::string_view text) : d_text(text) {}

  UnitValue parse()
  {
    skip_ws();
    if (at_end()) fail("empty unit expression");
    bool lone = false;
    UnitValue v = expr(lone);
    skip_ws();
    if (!at_end()) fail("unexpected '" + std::string(1, d_text[d_pos]) + "'");
    if (!lone) v.offset = Scalar(0);
    return v;
  }

private:
  UnitValue expr(bool& lone)
  {
    UnitValue acc = term(lone);
    for (;;)
    {
      skip_ws();
      if (at_end() || (peek() != '*' && peek() != '/')) return acc;
      char op = d_text[d_pos++];
      bool ignored = false;
      UnitValue rhs = term(ignored);
      lone = false;
      if (op == '*')
      {
        acc.dimension = dim_mul(acc.dimension, rhs.dimension);
        acc.scale *= rhs.scale;
      }
      else
      {
        acc.dimension = dim_div(acc.dimension, rhs.dimension);
        acc.scale /= rhs.scale;
      }
    }
  }

  UnitValue term(bool& lone)
  {
    UnitValue base = atom(lone);
    skip_ws();
    if (!at_end() && peek() == '^')
    {
      ++d_pos;
      skip_ws();
      int sign = 1;
      if (!at_end() && (peek() == '-' || peek() == '+'))
      {
        sign = peek() == '-' ? -1 : 1;
        ++d_pos;
      }
      std::size_t start = d_pos;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++d_pos;
      if (start == d_pos) fail("expected integer exponent");
      int n = sign * std::stoi(std::string(d_text.substr(start, d_pos - start)));
      base.dimension = dim_pow(base.dimension, n);
      Scalar s(1);
      for (int i = 0; i < (n < 0 ? -n : n); ++i) s *= base.scale;
      base.scale = n < 0 ? Scalar(1) / s : s;
      lone = false;
    }
    return base;
  }

  UnitValue atom(bool& lone)
  {
    skip_ws();
    if (at_end()) fail("expected unit");
    char c = peek();
    if (c == '(')
    {
      ++d_pos;
      bool inner_lone = false;
      UnitValue v = expr(inner_lone);
      skip_ws();
      if (at_end() || peek() != ')') fail("expected ')'");
      ++d_pos;
      lone = false;
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)))
    {
      std::size_t start = d_pos;
      while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++d_pos;
      auto value = Scalar::parse(d_text.substr(start, d_pos - start));
      if (!value) fail("bad numeric factor");
      lone = false;
      return {Dimension{}, *value, Scalar(0)};
    }
    std::size_t start = d_pos;
    while (!at_end() && !is_operator(peek())) ++d_pos;
    if (start == d_pos) fail("unexpected '" + std::string(1, c) + "'");
    bool has_offset = false;
    UnitValue v = resolve_symbol(d_text.substr(start, d_pos - start), has_offset);
    lone = true;
    return v;
  }

  static bool is_operator(char c)
  {
    return c == '*' || c == '/' || c == '^' || c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c));
  }
  void skip_ws()
  {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++d_pos;
  }
  bool at_end() const { return d_pos >= d_text.size(); }
  char peek() const { return d_text[d_pos]; }
  [[noreturn]] void fail(const std::string& msg) const
  {
    throw Error("BadUnitExpression", msg + " in '" + std::string(d_text) + "'");
  }

  std::string_view d_text;
  std::size_t d_pos = 0;
};

}  // namespace

UnitValue parse_unit(std::string_view text) { return UnitParser(text).parse(); }

std::string unit_name_for(const Dimension& d)
{
  if (d.dimensionless()) return "dimensionless";
  for (const auto& u : unit_symbols())
    if (u.dimension == d && u.scale == Scalar(1) && u.offset.is_zero()) return u.name;
  static const std::vector<std::pair<std::string, Dimension>> further = {
      {"square meter", dim(2, 0, 0)},
      {"cubic meter", dim(3, 0, 0)},
      {"meter per second", dim(1, 0, -1)},
      {"meter per second squared", dim(1, 0, -2)},
      {"reciprocal meter", dim(-1, 0, 0)},
      {"kilogram per cubic meter", dim(-3, 1, 0)},
      {"cubic meter per kilogram", dim(3, -1, 0)},
      {"ampere per square meter", dim(-2, 0, 0, 1)},
      {"ampere per meter", dim(-1, 0, 0, 1)},
      {"mole per cubic meter", dim(-3, 0, 0, 0, 0, 1)},
      {"candela per square meter", dim(-2, 0, 0, 0, 0, 0, 1)},
  };
  for (const auto& [name, fd] : further)
    if (fd == d) return name;
  return "derived";
}

// ---------------------------------------------------------------------------
// Quantity kinds and the ledger

std::string to_string(KindRole r)
{
  switch (r)
  {
    case KindRole::point: return "point";
    case KindRole::interval: return "interval";
    case KindRole::plain: return "plain";
  }
  return "plain";
}

std::optional<KindRole> role_from_string(std::string_view s)
{
  if (s == "point") return KindRole::point;
  if (s == "interval") return KindRole::interval;
  if (s == "plain") return KindRole::plain;
  return std::nullopt;
}

std::string to_string(OpKind op)
{
  switch (op)
  {
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::compare: return "compare";
    case OpKind::mean: return "mean";
    case OpKind::scaleByReal: return "scaleByReal";
    case OpKind::rateOfChange: return "rateOfChange";
  }
  return "add";
}

std::optional<OpKind> op_from_string(std::string_view s)
{
  for (OpKind op : kAllOps)
    if (to_string(op) == s) return op;
  return std::nullopt;
}

QuantityKind make_kind(const KindName& name, KindRole role, std::string_view unit)
{
  UnitValue u = parse_unit(unit);
  QuantityKind k;
  k.name = name;
  k.dimension = u.dimension;
  k.role = role;
  k.scale = u.scale;
  k.offset = role == KindRole::point ? u.offset : Scalar(0);
  k.unit = std::string(unit);
  return k;
}

namespace {

QuantityKind builtin_kind(const char* name, KindRole role, const char* unit, const char* interval = nullptr,
                          const char* mean_kind = nullptr, bool ordered = false)
{
  QuantityKind k = make_kind(KindName(name), role, unit);
  if (interval) k.intervalKind = KindName(interval);
  if (mean_kind) k.meanKind = KindName(mean_kind);
  k.orderedDifference = ordered;
  return k;
}

bool is_real_like(const QuantityKind& k) { return k.role == KindRole::plain && k.dimension.dimensionless(); }

}  // namespace

const KindRegistry& KindRegistry::builtin()
{
  static const KindRegistry reg = [] {
    using R = KindRole;
    KindRegistry r;
    r.add(builtin_kind("Real", R::plain, "1"));
    r.add(builtin_kind("Bool", R::plain, "1"));
    r.add(builtin_kind("Length", R::plain, "m"));
    r.add(builtin_kind("Mass", R::plain, "kg"));
    r.add(builtin_kind("TimeInterval", R::interval, "s"));
    r.add(builtin_kind("Time", R::point, "s", "TimeInterval", nullptr, true));
    r.add(builtin_kind("ElectricCurrent", R::plain, "A"));
    r.add(builtin_kind("TempIntv", R::interval, "K"));
    r.add(builtin_kind("ThermodynamicTemperature", R::point, "K", "TempIntv"));
    r.add(builtin_kind("Temp", R::point, "\xC2\xB0" "C", "TempIntv", "MeanTemp"));
    r.add(builtin_kind("MeanTemp", R::point, "\xC2\xB0" "C", "TempIntv"));
    r.add(builtin_kind("AmountOfSubstance", R::plain, "mol"));
    r.add(builtin_kind("LuminousIntensity", R::plain, "cd"));
    r.add(builtin_kind("Angle", R::plain, "rad"));
    r.add(builtin_kind("SolidAngle", R::plain, "sr"));
    r.add(builtin_kind("Frequency", R::plain, "Hz"));
    r.add(builtin_kind("Force", R::plain, "N"));
    r.add(builtin_kind("Pressure", R::plain, "Pa"));
    r.add(builtin_kind("Energy", R::plain, "J"));
    r.add(builtin_kind("Power", R::plain, "W"));
    r.add(builtin_kind("ElectricCharge", R::plain, "C"));
    r.add(builtin_kind("Voltage", R::plain, "V"));
    r.add(builtin_kind("Capacitance", R::plain, "F"));
    r.add(builtin_kind("Resistance", R::plain, "ohm"));
    r.add(builtin_kind("Conductance", R::plain, "S"));
    r.add(builtin_kind("MagneticFlux", R::plain, "Wb"));
    r.add(builtin_kind("MagneticFluxDensity", R::plain, "T"));
    r.add(builtin_kind("Inductance", R::plain, "H"));
    r.add(builtin_kind("LuminousFlux", R::plain, "lm"));
    r.add(builtin_kind("Illuminance", R::plain, "lx"));
    r.add(builtin_kind("Area", R::plain, "m^2"));
    r.add(builtin_kind("Volume", R::plain, "m^3"));
    r.add(builtin_kind("Velocity", R::plain, "m/s"));
    r.add(builtin_kind("Acceleration", R::plain, "m/s^2"));
    r.add(builtin_kind("WaveNumber", R::plain, "m^-1"));
    r.add(builtin_kind("MassDensity", R::plain, "kg/m^3"));
    r.add(builtin_kind("SpecificVolume", R::plain, "m^3/kg"));
    r.add(builtin_kind("CurrentDensity", R::plain, "A/m^2"));
    r.add(builtin_kind("MagneticFieldStrength", R::plain, "A/m"));
    r.add(builtin_kind("Concentration", R::plain, "mol/m^3"));
    r.add(builtin_kind("Luminance", R::plain, "cd/m^2"));
    r.add(builtin_kind("MassFraction", R::plain, "kg/kg"));
    return r;
  }();
  return reg;
}

bool KindRegistry::add(QuantityKind k)
{
  KindName name = k.name;
  auto [it, inserted] = d_kinds.insert_or_assign(name, std::move(k));
  if (inserted) d_order.push_back(name);
  return !inserted;
}

bool KindRegistry::add_rule(OpKind op, const KindName& lhs, const KindName& rhs, std::optional<KindName> result)
{
  bool differs = false;
  const QuantityKind* l = find(lhs);
  const QuantityKind* r = find(rhs);
  if (l && r)
  {
    OpVerdict before = builtin_verdict(op, *l, *r);
    if (result)
      differs = is_forbidden(before) || std::get<Allowed>(before).result.name != *result;
    else
      differs = !is_forbidden(before);
  }
  d_rules[RuleKey{op, lhs, rhs}] = std::move(result);
  return differs;
}

const QuantityKind* KindRegistry::find(const KindName& name) const
{
  auto it = d_kinds.find(name);
  return it == d_kinds.end() ? nullptr : &it->second;
}

const QuantityKind& KindRegistry::at(const KindName& name) const
{
  if (const QuantityKind* k = find(name)) return *k;
  throw Error("UnregisteredKind", "quantity kind '" + name.str() + "' is not registered");
}

QuantityKind KindRegistry::interval_of(const QuantityKind& point) const
{
  if (point.intervalKind)
    if (const QuantityKind* k = find(*point.intervalKind)) return *k;
  QuantityKind k = point;
  k.name = point.intervalKind ? *point.intervalKind : KindName(point.name.str() + "Intv");
  k.role = KindRole::interval;
  k.offset = Scalar(0);
  k.intervalKind.reset();
  k.meanKind.reset();
  k.orderedDifference = false;
  return k;
}

QuantityKind KindRegistry::mean_kind_of(const QuantityKind& k) const
{
  if (k.role == KindRole::point && k.meanKind)
    if (const QuantityKind* m = find(*k.meanKind)) return *m;
  return k;
}

QuantityKind KindRegistry::canonical_for(const Dimension& d, const Scalar& scale, const std::string& fallback) const
{
  if (scale == Scalar(1))
  {
    for (const auto& n : d_order)
    {
      const QuantityKind& k = d_kinds.at(n);
      if (k.role != KindRole::point && k.dimension == d && k.scale == Scalar(1)) return k;
    }
  }
  QuantityKind k;
  k.name = KindName(fallback);
  k.dimension = d;
  k.role = KindRole::plain;
  k.scale = scale;
  k.unit = d.to_string();
  return k;
}

OpVerdict KindRegistry::check_op(OpKind op, const KindName& lhs, const KindName& rhs) const
{
  return check_op(op, at(lhs), at(rhs));
}

OpVerdict KindRegistry::check_op(OpKind op, const QuantityKind& l, const QuantityKind& r) const
{
  if (auto it = d_rules.find(RuleKey{op, l.name, r.name}); it != d_rules.end())
  {
    if (!it->second) return Forbidden{"forbidden by declared rule " + to_string(op) + "(" + l.name.str() + ", " + r.name.str() + ")"};
    if (const QuantityKind* k = find(*it->second)) return Allowed{*k};
    return Forbidden{"declared rule result '" + it->second->str() + "' is not registered"};
  }
  return builtin_verdict(op, l, r);
}

OpVerdict KindRegistry::builtin_verdict(OpKind op, const QuantityKind& l, const QuantityKind& r) const
{
  const bool lp = l.role == KindRole::point;
  const bool rp = r.role == KindRole::point;
  const std::string pair = "(" + l.name.str() + ", " + r.name.str() + ")";
  auto same_dim = [&] { return l.dimension == r.dimension; };
  // interval-flavoured result for sums of non-point operands
  auto linear_sum = [&]() -> QuantityKind {
    if (l.name == r.name) return l;
    if (l.role == KindRole::interval) return l;
    if (r.role == KindRole::interval) return r;
    return l;
  };

  switch (op)
  {
    case OpKind::add:
      if (!same_dim()) return Forbidden{"cannot add quantities of different dimension " + pair};
      if (lp && rp) return Forbidden{"cannot add two point quantities " + pair};
      if (lp) return Allowed{l};
      if (rp) return Allowed{r};
      return Allowed{linear_sum()};

    case OpKind::sub:
      if (!same_dim()) return Forbidden{"cannot subtract quantities of different dimension " + pair};
      if (lp && rp)
      {
        bool ordered = l.orderedDifference || r.orderedDifference;
        return Allowed{interval_of(l), ordered};
      }
      if (lp) return Allowed{l};
      if (rp) return Forbidden{"cannot subtract a point quantity from a non-point quantity " + pair};
      return Allowed{linear_sum()};

    case OpKind::mul:
      if (lp || rp) return Forbidden{"cannot multiply a point quantity " + pair};
      if (is_real_like(r)) return Allowed{l};
      if (is_real_like(l)) return Allowed{r};
      return Allowed{canonical_for(dim_mul(l.dimension, r.dimension), l.scale * r.scale,
                                   "(" + l.name.str() + "*" + r.name.str() + ")")};

    case OpKind::div:
      if (lp || rp) return Forbidden{"cannot divide a point quantity " + pair};
      if (is_real_like(r)) return Allowed{l};
      return Allowed{canonical_for(dim_div(l.dimension, r.dimension), l.scale / r.scale,
                                   "(" + l.name.str() + "/" + r.name.str() + ")")};

    case OpKind::compare:
      if (l.name != r.name) return Forbidden{"comparison requires equal kinds " + pair};
      if (const QuantityKind* b = find(KindName("Bool"))) return Allowed{*b};
      return Allowed{canonical_for(Dimension{}, Scalar(1), "Bool")};

    case OpKind::mean:
      if (l.name != r.name) return Forbidden{"mean requires values of one kind " + pair};
      return Allowed{mean_kind_of(l)};

    case OpKind::scaleByReal:
      if (!is_real_like(r)) return Forbidden{"scale factor must be a dimensionless real " + pair};
      if (lp) return Forbidden{"cannot scale a point quantity " + pair};
      return Allowed{l};

    case OpKind::rateOfChange:
      if (lp || rp) return Forbidden{"rate of change needs non-point operands " + pair};
      if (r.dimension != Dimension::base(BaseDim::s))
        return Forbidden{"rate of change must be taken per time interval " + pair};
      return Allowed{canonical_for(dim_div(l.dimension, r.dimension), l.scale / r.scale,
                                   "(" + l.name.str() + "/" + r.name.str() + ")")};
  }
  return Forbidden{"unknown operator"};
}

// ---------------------------------------------------------------------------
// Values

Scalar Quantity::to_si() const
{
  Scalar si = value * kind.scale;
  if (kind.role == KindRole::point) si += kind.offset;
  return si;
}

std::string Quantity::to_string() const
{
  if (kind.unit == "1" || kind.unit.empty()) return value.to_string();
  return value.to_string() + " " + kind.unit;
}

namespace {

Quantity from_si(const Scalar& si, const QuantityKind& kind)
{
  Scalar v = si;
  if (kind.role == KindRole::point) v -= kind.offset;
  return Quantity{v / kind.scale, kind};
}

}  // namespace

Quantity parse_quantity(std::string_view text, const QuantityKind& kind)
{
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E'))
  {
    std::size_t j = i + 1;
    if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
    if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
    {
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      i = j;
    }
  }
  if (i < text.size() && text[i] == '/' && i + 1 < text.size() &&
      std::isdigit(static_cast<unsigned char>(text[i + 1])))
  {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  }
  auto number = Scalar::parse(text.substr(0, i));
  if (!number) throw Error("BadValue", "cannot read a number from '" + std::string(text) + "'");
  std::string_view unit = trim(text.substr(i));
  if (unit.empty()) return Quantity{*number, kind};

  UnitValue u = parse_unit(unit);
  if (u.dimension != kind.dimension)
    throw Error("DimensionMismatch", "value '" + std::string(text) + "' has dimension " + u.dimension.to_string() +
                                         " but kind " + kind.name.str() + " has " + kind.dimension.to_string());
  Scalar si = *number * u.scale;
  if (kind.role == KindRole::point) si += u.offset;
  return from_si(si, kind);
}

Quantity mean(std::span<const Quantity> values, const KindRegistry& reg)
{
  if (values.empty()) throw Error("EmptyInput", "mean of no values");
  const QuantityKind& k = values.front().kind;
  Scalar sum;
  for (const Quantity& q : values)
  {
    if (q.kind.name != k.name)
      throw Error("MixedKinds", "mean over " + k.name.str() + " and " + q.kind.name.str());
    sum += q.to_si();
  }
  OpVerdict v = reg.check_op(OpKind::mean, k, k);
  if (is_forbidden(v)) throw Error("Forbidden", std::get<Forbidden>(v).reason);
  return from_si(sum / Scalar(static_cast<std::int64_t>(values.size())), std::get<Allowed>(v).result);
}

Quantity rate_of_change(const Quantity& delta, const Quantity& per, const KindRegistry& reg)
{
  OpVerdict v = reg.check_op(OpKind::rateOfChange, delta.kind, per.kind);
  if (is_forbidden(v)) throw Error("Forbidden", std::get<Forbidden>(v).reason);
  if (per.value.sign() <= 0) throw Error("ZeroTimeInterval", "rate of change over a non-positive time interval");
  return from_si(delta.to_si() / per.to_si(), std::get<Allowed>(v).result);
}

Quantity evaluate(OpKind op, const Quantity& lhs, const Quantity& rhs, const KindRegistry& reg)
{
  if (op == OpKind::rateOfChange) return rate_of_change(lhs, rhs, reg);
  OpVerdict v = reg.check_op(op, lhs.kind, rhs.kind);
  if (is_forbidden(v)) throw Error("Forbidden", std::get<Forbidden>(v).reason);
  const Allowed& a = std::get<Allowed>(v);
  Scalar l = lhs.to_si(), r = rhs.to_si();
  if (a.requiresOrderedOperands && l < r)
    throw Error("PreconditionViolated", "difference requires " + lhs.to_string() + " >= " + rhs.to_string());
  switch (op)
  {
    case OpKind::add: return from_si(l + r, a.result);
    case OpKind::sub: return from_si(l - r, a.result);
    case OpKind::mul:
    case OpKind::scaleByReal: return from_si(l * r, a.result);
    case OpKind::div:
      if (r.is_zero()) throw Error("DivisionByZero", "division by a zero quantity");
      return from_si(l / r, a.result);
    case OpKind::compare: return Quantity{Scalar(l < r ? -1 : (l == r ? 0 : 1)), a.result};
    case OpKind::mean: return from_si((l + r) / Scalar(2), a.result);
    case OpKind::rateOfChange: break;
  }
  throw Error("Forbidden", "unknown operator");
}

// ---------------------------------------------------------------------------
// Expressions

namespace {

class ExprParser
{
public:
  ExprParser(std::string_view text, std::string file) : d_text(text), d_file(std::move(file)) {}

  Expr parse()
  {
    Expr e = comparison();
    skip_ws();
    if (d_pos < d_text.size()) fail("unexpected '" + std::string(1, d_text[d_pos]) + "'");
    return e;
  }

private:
  Expr comparison()
  {
    Expr lhs = additive();
    skip_ws();
    static const char* ops[] = {"<=", ">=", "==", "!=", "<", ">"};
    for (const char* op : ops)
    {
      std::string_view o(op);
      if (d_text.substr(d_pos, o.size()) == o)
      {
        d_pos += o.size();
        Expr rhs = additive();
        return binary(std::string(o), std::move(lhs), std::move(rhs));
      }
    }
    return lhs;
  }

  Expr additive()
  {
    Expr acc = multiplicative();
    for (;;)
    {
      skip_ws();
      if (d_pos >= d_text.size() || (d_text[d_pos] != '+' && d_text[d_pos] != '-')) return acc;
      std::string op(1, d_text[d_pos++]);
      Expr rhs = multiplicative();
      acc = binary(op, std::move(acc), std::move(rhs));
    }
  }

  Expr multiplicative()
  {
    Expr acc = atom();
    for (;;)
    {
      skip_ws();
      if (d_pos >= d_text.size() || (d_text[d_pos] != '*' && d_text[d_pos] != '/')) return acc;
      std::string op(1, d_text[d_pos++]);
      Expr rhs = atom();
      acc = binary(op, std::move(acc), std::move(rhs));
    }
  }

  Expr atom()
  {
    skip_ws();
    if (d_pos >= d_text.size()) fail("unexpected end of expression");
    std::size_t start = d_pos;
    char c = d_text[d_pos];
    if (c == '(')
    {
      ++d_pos;
      Expr inner = comparison();
      expect(')');
      inner.span.startCol = static_cast<int>(start) + 1;
      inner.span.endCol = static_cast<int>(d_pos) + 1;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)))
    {
      while (d_pos < d_text.size() && (std::isdigit(static_cast<unsigned char>(d_text[d_pos])) || d_text[d_pos] == '.'))
        ++d_pos;
      Expr e;
      e.form = Expr::Form::literal;
      e.text = std::string(d_text.substr(start, d_pos - start));
      if (!Scalar::parse(e.text)) fail("bad number '" + e.text + "'");
      e.span = span(start, d_pos);
      return e;
    }
    if (is_ident_char(c) && !std::isdigit(static_cast<unsigned char>(c)))
    {
      while (d_pos < d_text.size() && is_ident_char(d_text[d_pos])) ++d_pos;
      Expr e;
      e.text = std::string(d_text.substr(start, d_pos - start));
      skip_ws();
      if (d_pos < d_text.size() && d_text[d_pos] == '(')
      {
        ++d_pos;
        e.form = Expr::Form::call;
        skip_ws();
        if (d_pos < d_text.size() && d_text[d_pos] == ')')
          ++d_pos;
        else
        {
          for (;;)
          {
            e.args.push_back(comparison());
            skip_ws();
            if (d_pos < d_text.size() && d_text[d_pos] == ',')
            {
              ++d_pos;
              continue;
            }
            expect(')');
            break;
          }
        }
      }
      else
        e.form = Expr::Form::name;
      e.span = span(start, d_pos);
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr binary(std::string op, Expr lhs, Expr rhs)
  {
    Expr e;
    e.form = Expr::Form::binary;
    e.text = std::move(op);
    e.span = span(static_cast<std::size_t>(lhs.span.startCol - 1), static_cast<std::size_t>(rhs.span.endCol - 1));
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  static bool is_ident_char(char c)
  {
    unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.' || u >= 0x80;
  }
  SourceSpan span(std::size_t b, std::size_t e) const
  {
    return SourceSpan{d_file, 1, static_cast<int>(b) + 1, 1, static_cast<int>(e) + 1};
  }
  void expect(char c)
  {
    skip_ws();
    if (d_pos >= d_text.size() || d_text[d_pos] != c) fail(std::string("expected '") + c + "'");
    ++d_pos;
  }
  void skip_ws()
  {
    while (d_pos < d_text.size() && std::isspace(static_cast<unsigned char>(d_text[d_pos]))) ++d_pos;
  }
  [[noreturn]] void fail(const std::string& msg) const
  {
    throw Error("ExprSyntax", msg + " at column " + std::to_string(d_pos + 1));
  }

  std::string_view d_text;
  std::string d_file;
  std::size_t d_pos = 0;
};

std::optional<OpKind> binary_op(const std::string& sym)
{
  if (sym == "+") return OpKind::add;
  if (sym == "-") return OpKind::sub;
  if (sym == "*") return OpKind::mul;
  if (sym == "/") return OpKind::div;
  if (sym == "<" || sym == "<=" || sym == ">" || sym == ">=" || sym == "==" || sym == "!=") return OpKind::compare;
  return std::nullopt;
}

Diagnostic diag(const std::string& code, const std::string& msg, const SourceSpan& span)
{
  return Diagnostic{Severity::error, code, msg, span};
}

}  // namespace

Expr parse_expr(std::string_view text, const std::string& file) { return ExprParser(text, file).parse(); }

std::string to_string(const Expr& e)
{
  switch (e.form)
  {
    case Expr::Form::name:
    case Expr::Form::literal: return e.text;
    case Expr::Form::binary: return "(" + to_string(e.args[0]) + " " + e.text + " " + to_string(e.args[1]) + ")";
    case Expr::Form::call:
    {
      std::string out = e.text + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + to_string(e.args[i]);
      return out + ")";
    }
  }
  return e.text;
}

std::variant<QuantityKind, Diagnostic> typecheck_expr(const Expr& e, const KindEnv& env, const KindRegistry& reg,
                                                      const std::map<std::string, ConversionSig>& conversions)
{
  using Result = std::variant<QuantityKind, Diagnostic>;
  switch (e.form)
  {
    case Expr::Form::literal: return reg.at(KindName("Real"));

    case Expr::Form::name:
    {
      if (auto it = env.find(e.text); it != env.end())
      {
        if (const QuantityKind* k = reg.find(it->second)) return *k;
        return diag("E202", "'" + e.text + "' has unregistered quantity kind '" + it->second.str() + "'", e.span);
      }
      if (const QuantityKind* k = reg.find(KindName(e.text))) return *k;
      return diag("E202", "unknown name '" + e.text + "'", e.span);
    }

    case Expr::Form::binary:
    {
      Result l = typecheck_expr(e.args[0], env, reg, conversions);
      if (std::holds_alternative<Diagnostic>(l)) return l;
      Result r = typecheck_expr(e.args[1], env, reg, conversions);
      if (std::holds_alternative<Diagnostic>(r)) return r;
      OpKind op = *binary_op(e.text);
      OpVerdict v = reg.check_op(op, std::get<QuantityKind>(l), std::get<QuantityKind>(r));
      if (auto* f = std::get_if<Forbidden>(&v))
        return diag("E201", "forbidden operation '" + to_string(e) + "': " + f->reason, e.span);
      return std::get<Allowed>(v).result;
    }

    case Expr::Form::call:
    {
      std::vector<QuantityKind> args;
      for (const Expr& a : e.args)
      {
        Result r = typecheck_expr(a, env, reg, conversions);
        if (std::holds_alternative<Diagnostic>(r)) return r;
        args.push_back(std::get<QuantityKind>(r));
      }
      if (e.text == "mean")
      {
        if (args.empty()) return diag("E207", "mean needs at least one argument", e.span);
        QuantityKind result = reg.mean_kind_of(args.front());
        for (const QuantityKind& k : args)
        {
          OpVerdict v = reg.check_op(OpKind::mean, args.front(), k);
          if (auto* f = std::get_if<Forbidden>(&v))
            return diag("E201", "forbidden operation '" + to_string(e) + "': " + f->reason, e.span);
          result = std::get<Allowed>(v).result;
        }
        return result;
      }
      if (e.text == "rate")
      {
        if (args.size() != 2) return diag("E207", "rate takes (delta, per)", e.span);
        OpVerdict v = reg.check_op(OpKind::rateOfChange, args[0], args[1]);
        if (auto* f = std::get_if<Forbidden>(&v))
          return diag("E201", "forbidden operation '" + to_string(e) + "': " + f->reason, e.span);
        return std::get<Allowed>(v).result;
      }
      if (auto it = conversions.find(e.text); it != conversions.end())
      {
        if (args.size() != 1) return diag("E207", "conversion '" + e.text + "' takes one argument", e.span);
        if (args[0].name != it->second.from)
          return diag("E206",
                      "conversion '" + e.text + "' expects " + it->second.from.str() + " but got " +
                          args[0].name.str(),
                      e.args[0].span);
        if (const QuantityKind* k = reg.find(it->second.to)) return *k;
        return diag("E202", "conversion result kind '" + it->second.to.str() + "' is not registered", e.span);
      }
      return diag("E207", "unknown function '" + e.text + "'", e.span);
    }
  }
  return diag("E207", "malformed expression", e.span);
}

}  // namespace domcalc::units
