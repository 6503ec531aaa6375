#pragma once

#include "domcalc/common.hpp"
#include "domcalc/scalar.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace domcalc {

enum class EndurantKind { part, component, material };
enum class Discreteness { discrete, continuous };
enum class AttrCategory { static_, inert, reactive, autonomous, biddable, programmable };

std::string to_string(EndurantKind k);
std::string to_string(AttrCategory c);
std::optional<AttrCategory> category_from_string(std::string_view s);

/// Dynamic attributes whose values arrive from outside the behaviour.
inline bool is_external(AttrCategory c)
{
  return c == AttrCategory::inert || c == AttrCategory::reactive || c == AttrCategory::autonomous;
}
/// Attributes passed along tail-recursive invocations.
inline bool is_controllable(AttrCategory c)
{
  return c == AttrCategory::biddable || c == AttrCategory::programmable;
}

/// Products and finite sets over unique-identifier types.
struct MereologyExpr
{
  enum class Form { empty, single, set, product };
  Form form = Form::empty;
  IdTypeName id;                      // single, set
  std::vector<MereologyExpr> factors; // product

  static MereologyExpr empty() { return {}; }
  static MereologyExpr single(IdTypeName id) { return {Form::single, std::move(id), {}}; }
  static MereologyExpr set_of(IdTypeName id) { return {Form::set, std::move(id), {}}; }
  static MereologyExpr product(std::vector<MereologyExpr> fs) { return {Form::product, {}, std::move(fs)}; }

  /// Leaf id types in left-to-right order.
  std::vector<IdTypeName> leaves() const;
  /// `PPI x TDI`, `PPI-set`, `empty`.
  std::string to_string() const;

  friend bool operator==(const MereologyExpr&, const MereologyExpr&) = default;
};

struct AttributeDecl
{
  AttrName name;
  KindName quantity;
  AttrCategory category = AttrCategory::static_;

  friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

/// Initial (controllable) or constant (static) value, kept as written.
struct InitDecl
{
  AttrName attr;
  std::string value;

  friend bool operator==(const InitDecl&, const InitDecl&) = default;
};

/// Behaviour name and the short form used in channel names (`po` in po_di_ch).
struct BehaviourNaming
{
  std::string process;
  std::string abbrev;

  friend bool operator==(const BehaviourNaming&, const BehaviourNaming&) = default;
};

struct EndurantDecl
{
  SortName name;
  EndurantKind kind = EndurantKind::part;
  Discreteness discreteness = Discreteness::discrete;
  bool composite = false;
  std::vector<SortName> children;
  std::optional<IdTypeName> idType;
  std::optional<MereologyExpr> mereology;
  std::vector<AttributeDecl> attributes;
  std::vector<InitDecl> inits;
  std::optional<BehaviourNaming> behaviour;
  std::optional<std::string> doc;

  const AttributeDecl* find_attribute(const AttrName& a) const;
  const InitDecl* find_init(const AttrName& a) const;

  friend bool operator==(const EndurantDecl&, const EndurantDecl&) = default;
};

/// User quantity kind: `quantity LO : point "deg";`
struct QuantityDecl
{
  KindName name;
  std::string role;
  std::string unit;
  std::optional<KindName> intervalKind;
  std::optional<KindName> meanKind;
  bool ordered = false;

  friend bool operator==(const QuantityDecl&, const QuantityDecl&) = default;
};

/// Model-local ledger entry: `rule add(Time, Time) = forbidden;`
struct RuleDecl
{
  std::string op;
  KindName lhs, rhs;
  std::optional<KindName> result;

  friend bool operator==(const RuleDecl&, const RuleDecl&) = default;
};

/// Affine map x -> scale * x + offset between two kinds.
struct ConversionDecl
{
  ConversionName name;
  KindName from, to;
  std::optional<ConversionName> inverseOf;
  Scalar scale{1};
  Scalar offset{0};

  Scalar apply(const Scalar& x) const { return scale * x + offset; }

  friend bool operator==(const ConversionDecl&, const ConversionDecl&) = default;
};

struct ChannelDecl
{
  ChannelName name;
  std::vector<KindName> message;

  friend bool operator==(const ChannelDecl&, const ChannelDecl&) = default;
};

/// target.attrs[i] must always equal chain_i(sources[i]).
struct AxiomDecl
{
  struct Source
  {
    SortName sort;
    AttrName attr;
    std::vector<ConversionName> chain;

    friend bool operator==(const Source&, const Source&) = default;
  };

  std::string name;
  SortName target;
  std::vector<AttrName> targetAttrs;
  std::vector<Source> sources;

  friend bool operator==(const AxiomDecl&, const AxiomDecl&) = default;
};

/// Codomain of a description observer.
struct TypeExpr
{
  enum class Form { empty, name, set, product, attrType, attrValue };
  Form form = Form::empty;
  std::string name;
  std::vector<TypeExpr> factors;

  static TypeExpr named(std::string n) { return {Form::name, std::move(n), {}}; }
  std::string to_string() const;

  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

/// Formal description statements (what the observe_* prompts emit):
/// `type A, B;`, `value obs_B : A -> B;`, `category reactive : P.X;`.
struct TypeStmt
{
  std::vector<std::string> names;
  friend bool operator==(const TypeStmt&, const TypeStmt&) = default;
};

struct ObserverStmt
{
  std::string name;
  SortName domain;
  TypeExpr codomain;
  friend bool operator==(const ObserverStmt&, const ObserverStmt&) = default;
};

struct CategoryStmt
{
  AttrCategory category = AttrCategory::static_;
  std::vector<std::pair<SortName, AttrName>> attrs;
  friend bool operator==(const CategoryStmt&, const CategoryStmt&) = default;
};

using DescriptionStmt = std::variant<TypeStmt, ObserverStmt, CategoryStmt>;

/// Source locations, keyed by declaration path ("sort:PP", "attr:PP.LO",
/// "axiom:ip300", ...). Not part of structural equality.
class SpanIndex
{
public:
  void set(const std::string& key, SourceSpan span) { d_spans[key] = std::move(span); }
  SourceSpan get(const std::string& key) const;
  void set_file(std::string f) { d_file = std::move(f); }
  const std::string& file() const { return d_file; }

private:
  std::map<std::string, SourceSpan> d_spans;
  std::string d_file;
};

struct DomainModel
{
  std::vector<QuantityDecl> quantities;
  std::vector<RuleDecl> rules;
  std::vector<ConversionDecl> conversions;
  std::vector<EndurantDecl> endurants;
  std::vector<ChannelDecl> channels;
  std::vector<AxiomDecl> axioms;
  std::vector<DescriptionStmt> descriptions;
  SpanIndex spans;

  const EndurantDecl* find_sort(const SortName& s) const;
  const ConversionDecl* find_conversion(const ConversionName& c) const;
  const QuantityDecl* find_quantity(const KindName& k) const;
  /// Sort declaring `id` as its unique identifier type.
  const EndurantDecl* sort_with_id(const IdTypeName& id) const;
  bool empty() const;
};

/// Structural equality: declarations only, spans ignored.
bool structurally_equal(const DomainModel& a, const DomainModel& b);

/// Throws Error("UnknownSort").
const EndurantDecl& model_lookup(const DomainModel& model, const SortName& name);

std::set<IdTypeName> id_types_of(const DomainModel& model);

}  // namespace domcalc
