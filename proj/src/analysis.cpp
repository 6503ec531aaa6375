#include "domcalc/analysis.hpp"

#include "domcalc/compiler.hpp"
#include "domcalc/dsl.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace domcalc::analysis {

using units::KindRegistry;
using units::QuantityKind;

Classification classify(const DomainModel& model, const SortName& name)
{
  const EndurantDecl& e = model_lookup(model, name);
  Classification c;
  c.isEntity = true;
  c.isEndurant = true;
  c.isPerdurant = false;
  c.isPart = e.kind == EndurantKind::part;
  c.isComponent = e.kind == EndurantKind::component;
  c.isMaterial = e.kind == EndurantKind::material;
  c.isContinuous = e.discreteness == Discreteness::continuous;
  c.isDiscrete = !c.isContinuous;
  c.isComposite = c.isPart && e.composite;
  c.isAtomic = c.isPart && !e.composite;
  return c;
}

namespace {

std::string join_names(const std::vector<std::string>& names)
{
  if (names.empty()) return "";
  if (names.size() == 1) return names.front();
  std::string out;
  for (std::size_t i = 0; i + 1 < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out + " and " + names.back();
}

TypeExpr type_of(const MereologyExpr& m)
{
  switch (m.form)
  {
    case MereologyExpr::Form::empty: return TypeExpr{};
    case MereologyExpr::Form::single: return TypeExpr::named(m.id.str());
    case MereologyExpr::Form::set: return TypeExpr{TypeExpr::Form::set, m.id.str(), {}};
    case MereologyExpr::Form::product:
    {
      TypeExpr t{TypeExpr::Form::product, {}, {}};
      for (const auto& f : m.factors) t.factors.push_back(type_of(f));
      return t;
    }
  }
  return TypeExpr{};
}

TypeExpr attribute_type(const KindName& k)
{
  return TypeExpr{TypeExpr::Form::product,
                  {},
                  {TypeExpr{TypeExpr::Form::attrType, k.str(), {}}, TypeExpr{TypeExpr::Form::attrValue, k.str(), {}}}};
}

}  // namespace

DescriptionText observe_part_sorts(const DomainModel& model, const SortName& name)
{
  const EndurantDecl& e = model_lookup(model, name);
  if (e.kind != EndurantKind::part || !e.composite)
    throw Error("NotComposite", name.str() + " is not a composite part");
  DescriptionText d;
  TypeStmt types;
  std::vector<std::string> names;
  for (const auto& c : e.children)
  {
    types.names.push_back(c.str());
    names.push_back(c.str());
  }
  d.narrative = name.str() + " is composed from " + std::to_string(names.size()) + " part sort" +
                (names.size() == 1 ? "" : "s") + ": " + join_names(names) + ".";
  d.formal.push_back(types);
  for (const auto& c : e.children) d.formal.push_back(ObserverStmt{"obs_" + c.str(), name, TypeExpr::named(c.str())});
  return d;
}

DescriptionText observe_unique_identifier(const DomainModel& model, const SortName& name)
{
  const EndurantDecl& e = model_lookup(model, name);
  if (e.kind == EndurantKind::material || !e.idType)
    throw Error("NoIdentifier", name.str() + " has no unique identifier");
  DescriptionText d;
  d.narrative = name.str() + " parts are uniquely identified by values of type " + e.idType->str() + ".";
  d.formal.push_back(TypeStmt{{e.idType->str()}});
  d.formal.push_back(ObserverStmt{"uid_" + name.str(), name, TypeExpr::named(e.idType->str())});
  return d;
}

DescriptionText observe_mereology(const DomainModel& model, const SortName& name)
{
  const EndurantDecl& e = model_lookup(model, name);
  if (e.kind != EndurantKind::part) throw Error("NotAPart", name.str() + " is not a part");
  MereologyExpr m = e.mereology.value_or(MereologyExpr::empty());
  DescriptionText d;
  std::vector<std::string> related;
  for (const auto& id : m.leaves())
  {
    const EndurantDecl* other = model.sort_with_id(id);
    related.push_back(other ? other->name.str() : id.str());
  }
  d.narrative = related.empty() ? name.str() + " is related to no other parts."
                                : name.str() + " is related to " + join_names(related) + ".";
  d.formal.push_back(ObserverStmt{"mereo_" + name.str(), name, type_of(m)});
  return d;
}

DescriptionText observe_attributes(const DomainModel& model, const SortName& name)
{
  const EndurantDecl& e = model_lookup(model, name);
  DescriptionText d;
  if (e.attributes.empty())
  {
    d.narrative = name.str() + " has no attributes.";
    return d;
  }
  TypeStmt types;
  std::vector<std::string> names;
  for (const auto& a : e.attributes)
  {
    names.push_back(a.name.str());
    if (std::find(types.names.begin(), types.names.end(), a.quantity.str()) == types.names.end())
      types.names.push_back(a.quantity.str());
  }
  d.narrative = name.str() + " has attributes " + join_names(names) + ".";
  d.formal.push_back(types);
  for (const auto& a : e.attributes)
    d.formal.push_back(ObserverStmt{"attr_" + a.name.str(), name, attribute_type(a.quantity)});
  std::vector<CategoryStmt> cats;
  for (const auto& a : e.attributes)
  {
    auto it = std::find_if(cats.begin(), cats.end(), [&](const CategoryStmt& c) { return c.category == a.category; });
    if (it == cats.end())
    {
      cats.push_back(CategoryStmt{a.category, {}});
      it = cats.end() - 1;
    }
    it->attrs.emplace_back(name, a.name);
  }
  for (auto& c : cats) d.formal.push_back(std::move(c));
  return d;
}

std::string render(const DescriptionText& d)
{
  std::string out = "Narrative:\n  " + d.narrative + "\nFormal:\n";
  std::string formal = dsl::print_descriptions(d.formal);
  std::size_t pos = 0;
  while (pos < formal.size())
  {
    std::size_t nl = formal.find('\n', pos);
    out += "  " + formal.substr(pos, nl - pos) + "\n";
    pos = nl == std::string::npos ? formal.size() : nl + 1;
  }
  return out;
}

namespace {

class Checker
{
public:
  explicit Checker(const DomainModel& m) : d_model(m) {}

  void error(const std::string& code, const std::string& msg, const std::string& key)
  {
    d_diags.push_back(Diagnostic{Severity::error, code, msg, d_model.spans.get(key)});
  }
  void warning(const std::string& code, const std::string& msg, const std::string& key)
  {
    d_diags.push_back(Diagnostic{Severity::warning, code, msg, d_model.spans.get(key)});
  }

  KindRegistry registry()
  {
    KindRegistry reg = KindRegistry::builtin();
    for (const auto& q : d_model.quantities)
    {
      std::string key = "quantity:" + q.name.str();
      auto role = units::role_from_string(q.role);
      if (!role)
      {
        error("E202", "unknown role '" + q.role + "' for " + q.name.str(), key);
        continue;
      }
      try
      {
        QuantityKind k = units::make_kind(q.name, *role, q.unit);
        k.orderedDifference = q.ordered;
        k.intervalKind = q.intervalKind;
        k.meanKind = q.meanKind;
        if (KindRegistry::builtin().find(q.name))
          warning("W210", "quantity " + q.name.str() + " shadows the built-in kind", key);
        reg.add(std::move(k));
      }
      catch (const Error& e)
      {
        error("E203", "bad unit \"" + q.unit + "\" for " + q.name.str() + ": " + e.what(), key);
      }
    }
    for (const auto& q : d_model.quantities)
    {
      std::string key = "quantity:" + q.name.str();
      if (q.intervalKind && !reg.find(*q.intervalKind))
        error("E202", "unknown interval kind " + q.intervalKind->str() + " for " + q.name.str(), key);
      if (q.meanKind && !reg.find(*q.meanKind))
        error("E202", "unknown mean kind " + q.meanKind->str() + " for " + q.name.str(), key);
    }
    for (std::size_t i = 0; i < d_model.rules.size(); ++i)
    {
      const RuleDecl& r = d_model.rules[i];
      std::string key = "rule:" + std::to_string(i);
      auto op = units::op_from_string(r.op);
      if (!op)
      {
        error("E207", "unknown operator '" + r.op + "'", key);
        continue;
      }
      bool ok = true;
      for (const KindName* k : {&r.lhs, &r.rhs})
        if (!reg.find(*k)) error("E202", "unknown kind " + k->str() + " in rule", key), ok = false;
      if (r.result && !reg.find(*r.result)) error("E202", "unknown result kind " + r.result->str(), key), ok = false;
      if (!ok) continue;
      if (reg.add_rule(*op, r.lhs, r.rhs, r.result))
        warning("W210", "rule " + r.op + "(" + r.lhs.str() + ", " + r.rhs.str() + ") overrides the built-in verdict",
                key);
    }
    return reg;
  }

  void structure()
  {
    const auto ids = id_types_of(d_model);
    std::map<SortName, std::vector<SortName>> owners;
    for (const auto& e : d_model.endurants)
    {
      const std::string s = e.name.str();
      const std::string key = "sort:" + s;
      switch (e.kind)
      {
        case EndurantKind::material:
          if (e.mereology) error("E105", "material " + s + " cannot have a mereology", "mereo:" + s);
          if (e.idType) error("E105", "material " + s + " cannot have a unique identifier", "id:" + s);
          if (e.composite) error("E105", "material " + s + " cannot be composite", key);
          if (e.discreteness != Discreteness::continuous) error("E105", "material " + s + " must be continuous", key);
          break;
        case EndurantKind::component:
          if (e.mereology) error("E105", "component " + s + " cannot have a mereology", "mereo:" + s);
          if (!e.idType) error("E105", "component " + s + " lacks a unique identifier", key);
          if (e.composite) error("E105", "component " + s + " cannot be composite", key);
          if (e.discreteness != Discreteness::discrete) error("E105", "component " + s + " must be discrete", key);
          break;
        case EndurantKind::part:
          if (!e.idType) error("E105", "part " + s + " lacks a unique identifier", key);
          if (!e.mereology) error("E105", "part " + s + " lacks a mereology (use 'mereo empty;')", key);
          if (e.discreteness != Discreteness::discrete) error("E105", "part " + s + " must be discrete", key);
          break;
      }
      if (e.mereology)
        for (const auto& leaf : e.mereology->leaves())
          if (!ids.count(leaf))
            error("E101", "mereology of " + s + " refers to undeclared id type " + leaf.str(), "mereo:" + s);
      if (e.composite && e.children.empty()) error("E104", "composite " + s + " has no children", key);
      for (const auto& c : e.children)
      {
        const EndurantDecl* child = d_model.find_sort(c);
        if (!child)
          error("E104", "unknown child sort " + c.str() + " of " + s, "child:" + s + "." + c.str());
        else if (child->kind != EndurantKind::part)
          error("E104", "child " + c.str() + " of " + s + " is not a part sort", "child:" + s + "." + c.str());
        owners[c].push_back(e.name);
      }
    }
    for (const auto& [child, parents] : owners)
      if (parents.size() > 1 && d_model.find_sort(child))
        error("E103", "part sort " + child.str() + " is a child of more than one composite", "sort:" + child.str());
    cycles();
  }

  void cycles()
  {
    std::map<SortName, int> colour;
    std::set<SortName> reported;
    std::vector<SortName> stack;
    std::function<void(const EndurantDecl&)> visit = [&](const EndurantDecl& e) {
      colour[e.name] = 1;
      stack.push_back(e.name);
      for (const auto& c : e.children)
      {
        const EndurantDecl* child = d_model.find_sort(c);
        if (!child) continue;
        if (colour[c] == 1)
        {
          auto from = std::find(stack.begin(), stack.end(), c);
          std::string path;
          bool fresh = false;
          for (auto it = from; it != stack.end(); ++it)
          {
            path += it->str() + " -> ";
            fresh |= reported.insert(*it).second;
          }
          if (fresh) error("E102", "composite cycle " + path + c.str(), "sort:" + c.str());
        }
        else if (colour[c] == 0)
          visit(*child);
      }
      stack.pop_back();
      colour[e.name] = 2;
    };
    for (const auto& e : d_model.endurants)
      if (colour[e.name] == 0) visit(e);
  }

  void attributes(const KindRegistry& reg)
  {
    for (const auto& e : d_model.endurants)
    {
      const std::string s = e.name.str();
      for (const auto& a : e.attributes)
        if (!reg.find(a.quantity))
          error("E202", "unknown quantity kind " + a.quantity.str() + " for " + s + "." + a.name.str(),
                "attr:" + s + "." + a.name.str());
      for (const auto& in : e.inits)
      {
        const std::string key = "init:" + s + "." + in.attr.str();
        const AttributeDecl* a = e.find_attribute(in.attr);
        if (!a)
        {
          error("E116", "init for unknown attribute " + s + "." + in.attr.str(), key);
          continue;
        }
        if (is_external(a->category))
        {
          error("E116", "init for " + to_string(a->category) + " attribute " + s + "." + in.attr.str() +
                            " (its values come from the environment)",
                key);
          continue;
        }
        const QuantityKind* k = reg.find(a->quantity);
        if (!k) continue;
        try
        {
          units::parse_quantity(in.value, *k);
        }
        catch (const Error& err)
        {
          std::string code = err.code() == "BadValue"            ? "E204"
                             : err.code() == "DimensionMismatch" ? "E205"
                                                                 : "E203";
          error(code, "init value \"" + in.value + "\" for " + s + "." + in.attr.str() + ": " + err.what(), key);
        }
      }
      if (e.kind == EndurantKind::part)
        for (const auto& a : e.attributes)
          if (is_controllable(a.category) && !e.find_init(a.name))
            error("E303", "missing init for " + to_string(a.category) + " attribute " + s + "." + a.name.str(),
                  "attr:" + s + "." + a.name.str());
    }
  }

  bool has_inverse(const ConversionDecl& c) const
  {
    if (c.inverseOf) return true;
    for (const auto& other : d_model.conversions)
      if (other.inverseOf && *other.inverseOf == c.name) return true;
    return false;
  }

  void conversions(const KindRegistry& reg)
  {
    for (const auto& c : d_model.conversions)
    {
      const std::string key = "conversion:" + c.name.str();
      for (const KindName* k : {&c.from, &c.to})
        if (!reg.find(*k)) error("E202", "unknown kind " + k->str() + " in conversion " + c.name.str(), key);
      if (c.scale.sign() == 0 && c.inverseOf)
        error("E108", "conversion " + c.name.str() + " has scale 0 and cannot have an inverse", key);
      if (!c.inverseOf) continue;
      const ConversionDecl* inv = d_model.find_conversion(*c.inverseOf);
      if (!inv)
        error("E112", "unknown inverse conversion " + c.inverseOf->str() + " of " + c.name.str(), key);
      else if (inv->from != c.to || inv->to != c.from)
        error("E108",
              "inverse " + inv->name.str() + " : " + inv->from.str() + " -> " + inv->to.str() + " does not reverse " +
                  c.name.str() + " : " + c.from.str() + " -> " + c.to.str(),
              key);
      else if (inv->inverseOf != c.name)
        error("E108", "inverse declarations of " + c.name.str() + " and " + inv->name.str() + " are not mutual", key);
    }
  }

  void axioms()
  {
    std::set<std::pair<SortName, AttrName>> tracked;
    for (const auto& ax : d_model.axioms)
    {
      const std::string key = "axiom:" + ax.name;
      const std::string tkey = "axiom-target:" + ax.name;
      const EndurantDecl* target = d_model.find_sort(ax.target);
      if (!target) error("E109", "unknown target sort " + ax.target.str() + " in axiom " + ax.name, tkey);
      else if (target->kind != EndurantKind::part)
        error("E109", "axiom target " + ax.target.str() + " is not a part", tkey);
      if (ax.targetAttrs.size() != ax.sources.size())
        error("E111",
              "axiom " + ax.name + " displays " + std::to_string(ax.targetAttrs.size()) + " attributes but tracks " +
                  std::to_string(ax.sources.size()),
              key);
      std::vector<const AttributeDecl*> targets;
      for (const auto& ta : ax.targetAttrs)
      {
        const AttributeDecl* a = target ? target->find_attribute(ta) : nullptr;
        targets.push_back(a);
        if (!target) continue;
        if (!a)
          error("E114", "unknown attribute " + ax.target.str() + "." + ta.str() + " in axiom " + ax.name, tkey);
        else if (a->category != AttrCategory::programmable)
          error("E110",
                "axiom target " + ax.target.str() + "." + ta.str() + " is " + to_string(a->category) +
                    ", not programmable",
                tkey);
        else if (!tracked.insert({ax.target, ta}).second)
          error("E110", "attribute " + ax.target.str() + "." + ta.str() + " is tracked by more than one axiom", tkey);
      }
      for (std::size_t i = 0; i < ax.sources.size(); ++i)
      {
        const auto& src = ax.sources[i];
        const std::string skey = "axiom-source:" + ax.name + "." + std::to_string(i);
        const EndurantDecl* s = d_model.find_sort(src.sort);
        const AttributeDecl* a = nullptr;
        if (!s)
          error("E109", "unknown source sort " + src.sort.str() + " in axiom " + ax.name, skey);
        else if (!(a = s->find_attribute(src.attr)))
          error("E114", "unknown attribute " + src.sort.str() + "." + src.attr.str() + " in axiom " + ax.name, skey);
        else if (!is_external(a->category))
          error("E118",
                "axiom source " + src.sort.str() + "." + src.attr.str() + " is " + to_string(a->category) +
                    "; sources must be inert, reactive or autonomous",
                skey);
        // chain typing
        std::optional<KindName> current = a ? std::optional<KindName>(a->quantity) : std::nullopt;
        bool chain_ok = true;
        for (std::size_t k = 0; k < src.chain.size(); ++k)
        {
          const ConversionDecl* c = d_model.find_conversion(src.chain[k]);
          if (!c)
          {
            error("E112", "unknown conversion " + src.chain[k].str() + " in axiom " + ax.name, skey);
            chain_ok = false;
            break;
          }
          if (current && c->from != *current)
          {
            error("E113",
                  "conversion " + c->name.str() + " expects " + c->from.str() + " but receives " + current->str(),
                  skey);
            chain_ok = false;
            break;
          }
          current = c->to;
          if (k == 0 && has_inverse(*c))
            error("E106", "recording conversion " + c->name.str() + " must not declare an inverse", skey);
          if (k > 0 && !has_inverse(*c))
            error("E107", "display conversion " + c->name.str() + " must declare an inverse", skey);
        }
        if (chain_ok && current && i < targets.size() && targets[i] && targets[i]->quantity != *current)
          error("E113",
                "chain from " + src.sort.str() + "." + src.attr.str() + " yields " + current->str() + " but " +
                    ax.target.str() + "." + targets[i]->name.str() + " is " + targets[i]->quantity.str(),
                skey);
      }
    }
  }

  void channels(const KindRegistry& reg)
  {
    for (const auto& c : d_model.channels)
      for (const auto& k : c.message)
        if (!reg.find(k))
          error("E202", "unknown message kind " + k.str() + " on channel " + c.name.str(), "channel:" + c.name.str());
  }

  void descriptions(const KindRegistry& reg)
  {
    std::set<std::string> type_names;
    for (const auto& e : d_model.endurants)
    {
      type_names.insert(e.name.str());
      if (e.idType) type_names.insert(e.idType->str());
    }
    for (const auto& k : reg.names()) type_names.insert(k.str());

    for (std::size_t i = 0; i < d_model.descriptions.size(); ++i)
    {
      const std::string key = "desc:" + std::to_string(i);
      const auto& stmt = d_model.descriptions[i];
      if (const auto* t = std::get_if<TypeStmt>(&stmt))
      {
        for (const auto& n : t->names)
          if (!type_names.count(n)) error("E115", "type " + n + " names no sort, identifier or quantity kind", key);
      }
      else if (const auto* o = std::get_if<ObserverStmt>(&stmt))
        observer(*o, key);
      else if (const auto* c = std::get_if<CategoryStmt>(&stmt))
      {
        for (const auto& [s, a] : c->attrs)
        {
          const EndurantDecl* e = d_model.find_sort(s);
          const AttributeDecl* attr = e ? e->find_attribute(a) : nullptr;
          if (!e)
            error("E109", "unknown sort " + s.str() + " in category statement", key);
          else if (!attr)
            error("E115", "unknown attribute " + s.str() + "." + a.str() + " in category statement", key);
          else if (attr->category != c->category)
            error("E115",
                  s.str() + "." + a.str() + " is " + to_string(attr->category) + ", not " + to_string(c->category),
                  key);
        }
      }
    }
  }

  void observer(const ObserverStmt& o, const std::string& key)
  {
    const EndurantDecl* e = d_model.find_sort(o.domain);
    if (!e)
    {
      error("E109", "observer " + o.name + " has unknown domain " + o.domain.str(), key);
      return;
    }
    auto suffix = [&](const std::string& prefix) -> std::optional<std::string> {
      if (o.name.rfind(prefix, 0) == 0) return o.name.substr(prefix.size());
      return std::nullopt;
    };
    auto mismatch = [&](const std::string& expected) {
      error("E115", "observer " + o.name + " : " + o.domain.str() + " -> " + o.codomain.to_string() +
                        " disagrees with the model (expected " + expected + ")",
            key);
    };
    if (auto child = suffix("obs_"))
    {
      bool has = std::find(e->children.begin(), e->children.end(), SortName(*child)) != e->children.end();
      if (!has || o.codomain != TypeExpr::named(*child)) mismatch(o.domain.str() + " -> " + *child + " as a child");
    }
    else if (auto sort = suffix("uid_"))
    {
      if (*sort != o.domain.str() || !e->idType || o.codomain != TypeExpr::named(e->idType->str()))
        mismatch(e->idType ? "uid_" + o.domain.str() + " : " + o.domain.str() + " -> " + e->idType->str()
                           : "no identifier");
    }
    else if (auto sort2 = suffix("mereo_"))
    {
      TypeExpr expected = type_of(e->mereology.value_or(MereologyExpr::empty()));
      if (*sort2 != o.domain.str() || o.codomain != expected) mismatch(expected.to_string());
    }
    else if (auto attr = suffix("attr_"))
    {
      const AttributeDecl* a = e->find_attribute(AttrName(*attr));
      if (!a)
        mismatch("an attribute named " + *attr);
      else if (o.codomain != attribute_type(a->quantity) && o.codomain != TypeExpr::named(a->quantity.str()))
        mismatch(attribute_type(a->quantity).to_string());
    }
    else
      error("E115", "observer " + o.name + " is not an obs_, uid_, mereo_ or attr_ observer", key);
  }

  std::vector<Diagnostic> take() { return std::move(d_diags); }
  const std::vector<Diagnostic>& diags() const { return d_diags; }

private:
  const DomainModel& d_model;
  std::vector<Diagnostic> d_diags;
};

}  // namespace

KindRegistry build_registry(const DomainModel& model, std::vector<Diagnostic>& diags)
{
  Checker c(model);
  KindRegistry reg = c.registry();
  auto found = c.take();
  diags.insert(diags.end(), found.begin(), found.end());
  return reg;
}

std::vector<Diagnostic> check_wellformed(const DomainModel& model)
{
  Checker c(model);
  KindRegistry reg = c.registry();
  c.structure();
  c.attributes(reg);
  c.conversions(reg);
  c.axioms();
  c.channels(reg);
  c.descriptions(reg);
  std::vector<Diagnostic> diags = c.take();
  if (!has_errors(diags))
  {
    auto more = typecheck_axioms(model, reg);
    diags.insert(diags.end(), more.begin(), more.end());
  }
  if (!has_errors(diags))
  {
    auto more = compiler::compile_diagnostics(model, reg);
    diags.insert(diags.end(), more.begin(), more.end());
  }
  return diags;
}

std::vector<AxiomEquation> axiom_equations(const DomainModel& model)
{
  std::vector<AxiomEquation> out;
  for (const auto& ax : model.axioms)
  {
    for (std::size_t i = 0; i < ax.sources.size() && i < ax.targetAttrs.size(); ++i)
    {
      const auto& src = ax.sources[i];
      SourceSpan span = model.spans.get("axiom-source:" + ax.name + "." + std::to_string(i));
      units::Expr e{units::Expr::Form::name, src.sort.str() + "." + src.attr.str(), {}, span};
      for (const auto& c : src.chain) e = units::Expr{units::Expr::Form::call, c.str(), {e}, span};
      out.push_back(AxiomEquation{ax.name, ax.target, ax.targetAttrs[i], std::move(e)});
    }
  }
  return out;
}

std::vector<Diagnostic> typecheck_axioms(const DomainModel& model, const KindRegistry& reg)
{
  units::KindEnv env;
  for (const auto& e : model.endurants)
    for (const auto& a : e.attributes) env[e.name.str() + "." + a.name.str()] = a.quantity;
  std::map<std::string, units::ConversionSig> sigs;
  for (const auto& c : model.conversions) sigs[c.name.str()] = units::ConversionSig{c.from, c.to};

  std::vector<Diagnostic> diags;
  for (const auto& eq : axiom_equations(model))
  {
    auto r = units::typecheck_expr(eq.expr, env, reg, sigs);
    if (auto* d = std::get_if<Diagnostic>(&r))
    {
      diags.push_back(*d);
      continue;
    }
    const auto& kind = std::get<QuantityKind>(r);
    const EndurantDecl* t = model.find_sort(eq.targetSort);
    const AttributeDecl* a = t ? t->find_attribute(eq.targetAttr) : nullptr;
    if (a && a->quantity != kind.name)
      diags.push_back(Diagnostic{Severity::error, "E113",
                                 "axiom " + eq.axiom + ": " + units::to_string(eq.expr) + " has kind " +
                                     kind.name.str() + " but " + eq.targetSort.str() + "." + eq.targetAttr.str() +
                                     " is " + a->quantity.str(),
                                 eq.expr.span});
  }
  return diags;
}

}  // namespace domcalc::analysis
