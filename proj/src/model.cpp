#include "domcalc/model.hpp"

#include <algorithm>

namespace domcalc {

std::string to_string(EndurantKind k)
{
  switch (k)
  {
    case EndurantKind::part: return "part";
    case EndurantKind::component: return "component";
    case EndurantKind::material: return "material";
  }
  return "part";
}

std::string to_string(AttrCategory c)
{
  switch (c)
  {
    case AttrCategory::static_: return "static";
    case AttrCategory::inert: return "inert";
    case AttrCategory::reactive: return "reactive";
    case AttrCategory::autonomous: return "autonomous";
    case AttrCategory::biddable: return "biddable";
    case AttrCategory::programmable: return "programmable";
  }
  return "static";
}

std::optional<AttrCategory> category_from_string(std::string_view s)
{
  for (AttrCategory c : {AttrCategory::static_, AttrCategory::inert, AttrCategory::reactive,
                         AttrCategory::autonomous, AttrCategory::biddable, AttrCategory::programmable})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::vector<IdTypeName> MereologyExpr::leaves() const
{
  std::vector<IdTypeName> out;
  switch (form)
  {
    case Form::empty: break;
    case Form::single:
    case Form::set: out.push_back(id); break;
    case Form::product:
      for (const auto& f : factors)
      {
        auto sub = f.leaves();
        out.insert(out.end(), sub.begin(), sub.end());
      }
      break;
  }
  return out;
}

std::string MereologyExpr::to_string() const
{
  switch (form)
  {
    case Form::empty: return "empty";
    case Form::single: return id.str();
    case Form::set: return id.str() + "-set";
    case Form::product:
    {
      std::string out;
      for (std::size_t i = 0; i < factors.size(); ++i)
      {
        if (i) out += " x ";
        const auto& f = factors[i];
        out += f.form == Form::product ? "(" + f.to_string() + ")" : f.to_string();
      }
      return out;
    }
  }
  return "empty";
}

std::string TypeExpr::to_string() const
{
  switch (form)
  {
    case Form::empty: return "empty";
    case Form::name: return name;
    case Form::set: return name + "-set";
    case Form::attrType: return "AT(" + name + ")";
    case Form::attrValue: return "AV(" + name + ")";
    case Form::product:
    {
      std::string out;
      for (std::size_t i = 0; i < factors.size(); ++i)
      {
        if (i) out += " x ";
        const auto& f = factors[i];
        out += f.form == Form::product ? "(" + f.to_string() + ")" : f.to_string();
      }
      return out;
    }
  }
  return "empty";
}

const AttributeDecl* EndurantDecl::find_attribute(const AttrName& a) const
{
  for (const auto& attr : attributes)
    if (attr.name == a) return &attr;
  return nullptr;
}

const InitDecl* EndurantDecl::find_init(const AttrName& a) const
{
  for (const auto& i : inits)
    if (i.attr == a) return &i;
  return nullptr;
}

SourceSpan SpanIndex::get(const std::string& key) const
{
  if (auto it = d_spans.find(key); it != d_spans.end()) return it->second;
  return SourceSpan{d_file, 1, 1, 1, 1};
}

const EndurantDecl* DomainModel::find_sort(const SortName& s) const
{
  for (const auto& e : endurants)
    if (e.name == s) return &e;
  return nullptr;
}

const ConversionDecl* DomainModel::find_conversion(const ConversionName& c) const
{
  for (const auto& conv : conversions)
    if (conv.name == c) return &conv;
  return nullptr;
}

const QuantityDecl* DomainModel::find_quantity(const KindName& k) const
{
  for (const auto& q : quantities)
    if (q.name == k) return &q;
  return nullptr;
}

const EndurantDecl* DomainModel::sort_with_id(const IdTypeName& id) const
{
  for (const auto& e : endurants)
    if (e.idType && *e.idType == id) return &e;
  return nullptr;
}

bool DomainModel::empty() const
{
  return quantities.empty() && rules.empty() && conversions.empty() && endurants.empty() && channels.empty() &&
         axioms.empty() && descriptions.empty();
}

bool structurally_equal(const DomainModel& a, const DomainModel& b)
{
  return a.quantities == b.quantities && a.rules == b.rules && a.conversions == b.conversions &&
         a.endurants == b.endurants && a.channels == b.channels && a.axioms == b.axioms &&
         a.descriptions == b.descriptions;
}

const EndurantDecl& model_lookup(const DomainModel& model, const SortName& name)
{
  if (const EndurantDecl* e = model.find_sort(name)) return *e;
  throw Error("UnknownSort", "no endurant sort named '" + name.str() + "'");
}

std::set<IdTypeName> id_types_of(const DomainModel& model)
{
  std::set<IdTypeName> ids;
  for (const auto& e : model.endurants)
    if (e.idType && e.kind != EndurantKind::material) ids.insert(*e.idType);
  return ids;
}

}  // namespace domcalc
