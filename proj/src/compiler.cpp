#include "domcalc/compiler.hpp"

#include "domcalc/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace domcalc::compiler {

using units::KindRegistry;

namespace {

const char* kTimes = " \xC3\x97 ";  // " × "
const char* kPrime = "\xE2\x80\xB2"; // ′
const char* kPar = " \xE2\x88\xA5 ";  // " ∥ "
const char* kDefines = " \xE2\x89\xA1 "; // " ≡ "
const char* kArrow = " \xE2\x86\x92 "; // " → "

std::string lower(std::string s)
{
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, const std::string& sep, F f)
{
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    if (i) out += sep;
    out += f(xs[i]);
  }
  return out;
}

bool related(const EndurantDecl& p, const EndurantDecl& q)
{
  if (!p.mereology || !q.idType) return false;
  auto leaves = p.mereology->leaves();
  return std::find(leaves.begin(), leaves.end(), *q.idType) != leaves.end();
}

std::vector<const EndurantDecl*> parts_of(const DomainModel& model)
{
  std::vector<const EndurantDecl*> out;
  for (const auto& e : model.endurants)
    if (e.kind == EndurantKind::part && e.idType) out.push_back(&e);
  return out;
}

const EndurantDecl& part_lookup(const DomainModel& model, const SortName& name)
{
  const EndurantDecl& e = model_lookup(model, name);
  if (e.kind != EndurantKind::part) throw Error("NotAPart", name.str() + " is not a part");
  return e;
}

void throw_if_illformed(const DomainModel& model)
{
  auto diags = analysis::check_wellformed(model);
  for (const auto& d : diags)
    if (d.severity == Severity::error) throw Error("IllFormed", format_diagnostic(d));
}

}  // namespace

std::vector<AttrName> BehaviourSignature::controllableParams() const
{
  std::vector<AttrName> out;
  for (const auto& g : controllableGroups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

std::string ProcessDef::var_for(const AttrName& a) { return lower(a.str()); }

const AttributeDecl* ProcessDef::attribute(const AttrName& a) const
{
  for (const auto& attr : attributes)
    if (attr.name == a) return &attr;
  return nullptr;
}

std::vector<const ProcessDef*> ProcessGraph::processes() const
{
  std::vector<const ProcessDef*> out;
  std::function<void(const ProcessNode&)> walk = [&](const ProcessNode& n) {
    if (n.core) out.push_back(&*n.core);
    for (const auto& c : n.children) walk(c);
  };
  for (const auto& r : roots) walk(r);
  return out;
}

const Channel* ProcessGraph::find_channel(const ChannelName& name) const
{
  for (const auto& c : channels)
    if (c.name == name) return &c;
  return nullptr;
}

const ProcessDef* ProcessGraph::find_process(const std::string& name) const
{
  for (const ProcessDef* p : processes())
    if (p->name == name) return p;
  return nullptr;
}

std::string process_name(const EndurantDecl& e) { return e.behaviour ? e.behaviour->process : lower(e.name.str()); }

std::string process_abbrev(const EndurantDecl& e) { return e.behaviour ? e.behaviour->abbrev : lower(e.name.str()); }

std::string uid_placeholder(const IdTypeName& id)
{
  std::string s = id.str();
  if (s.size() > 1 && s.back() == 'I') s.pop_back();
  if (s.size() > 1 && s.back() == 'P') s.pop_back();
  return lower(s) + "\xCF\x80";  // π
}

std::string controllable_type_name(const SortName& sort)
{
  std::string s = sort.str();
  if (s.size() > 1 && s.back() == 'P') s.pop_back();
  return s + "A";
}

std::string external_channel_name(const AttrName& a) { return "attr_" + a.str() + "_ch"; }

ChannelName flow_channel_name(const EndurantDecl& sender, const EndurantDecl& receiver)
{
  return ChannelName(process_abbrev(sender) + "_" + process_abbrev(receiver) + "_ch");
}

ChannelDerivation derive_channels(const DomainModel& model, const KindRegistry& reg)
{
  (void)reg;
  ChannelDerivation out;
  std::vector<Channel> externals, flows;
  auto err = [&](const std::string& code, const std::string& msg, const std::string& key) {
    out.diagnostics.push_back(Diagnostic{Severity::error, code, msg, model.spans.get(key)});
  };
  auto find = [&](std::vector<Channel>& v, const ChannelName& n) -> Channel* {
    for (auto& c : v)
      if (c.name == n) return &c;
    return nullptr;
  };
  const auto parts = parts_of(model);

  for (const EndurantDecl* p : parts)
    for (const auto& a : p->attributes)
    {
      if (!is_external(a.category)) continue;
      ChannelName name(external_channel_name(a.name));
      if (Channel* other = find(externals, name))
      {
        err("E304",
            "attribute " + a.name.str() + " is external in both " + other->to.str() + " and " + p->name.str() +
                " (channel " + name.str() + " would be shared)",
            "attr:" + p->name.str() + "." + a.name.str());
        continue;
      }
      Channel c;
      c.name = name;
      c.kind = Channel::Kind::external;
      c.message = {a.quantity};
      c.sender = kEnvironment;
      c.receiver = process_name(*p);
      c.to = p->name;
      c.components.push_back(Channel::Component{a.name, std::nullopt, a.quantity, a.name, {}});
      externals.push_back(std::move(c));
    }

  auto flow_channel = [&](const EndurantDecl& s, const EndurantDecl& t, const std::string& key) -> Channel* {
    ChannelName name = flow_channel_name(s, t);
    if (Channel* c = find(flows, name))
    {
      if (c->from != s.name || c->to != t.name)
      {
        err("E304",
            "channel " + name.str() + " would connect both " + c->from.str() + "->" + c->to.str() + " and " +
                s.name.str() + "->" + t.name.str(),
            key);
        return nullptr;
      }
      return c;
    }
    if (find(externals, name))
    {
      err("E304", "channel " + name.str() + " collides with an external attribute channel", key);
      return nullptr;
    }
    Channel c;
    c.name = name;
    c.kind = Channel::Kind::mereology;
    c.sender = process_name(s);
    c.receiver = process_name(t);
    c.from = s.name;
    c.to = t.name;
    flows.push_back(std::move(c));
    return &flows.back();
  };

  // Flows implied by axioms.
  for (const auto& ax : model.axioms)
  {
    const EndurantDecl* t = model.find_sort(ax.target);
    if (!t || t->kind != EndurantKind::part) continue;
    for (std::size_t i = 0; i < ax.sources.size() && i < ax.targetAttrs.size(); ++i)
    {
      const auto& src = ax.sources[i];
      const std::string key = "axiom-source:" + ax.name + "." + std::to_string(i);
      const EndurantDecl* s = model.find_sort(src.sort);
      if (!s) continue;
      if (s->name == t->name)
      {
        err("E305", "axiom " + ax.name + " tracks an attribute of its own target sort " + s->name.str(), key);
        continue;
      }
      if (s->kind != EndurantKind::part || !(related(*s, *t) || related(*t, *s)))
      {
        err("E305",
            "axiom " + ax.name + " source " + s->name.str() + " is not related by mereology to " + t->name.str(),
            key);
        continue;
      }
      const AttributeDecl* a = s->find_attribute(src.attr);
      if (!a) continue;
      Channel* c = flow_channel(*s, *t, key);
      if (!c) continue;
      Channel::Component comp;
      comp.source = src.attr;
      comp.kind = a->quantity;
      if (!src.chain.empty())
      {
        comp.recording = src.chain.front();
        if (const ConversionDecl* conv = model.find_conversion(src.chain.front())) comp.kind = conv->to;
        comp.display.assign(src.chain.begin() + 1, src.chain.end());
      }
      comp.target = ax.targetAttrs[i];
      c->message.push_back(comp.kind);
      c->components.push_back(std::move(comp));
    }
  }

  // Declared channels: either confirm a derived flow or introduce one.
  for (const auto& decl : model.channels)
  {
    const std::string key = "channel:" + decl.name.str();
    if (find(externals, decl.name))
    {
      err("E304", "declared channel " + decl.name.str() + " collides with an external attribute channel", key);
      continue;
    }
    if (Channel* c = find(flows, decl.name))
    {
      if (c->message != decl.message)
        err("E301",
            "declared message " + join(decl.message, " x ", [](const KindName& k) { return k.str(); }) + " of " +
                decl.name.str() + " does not match the derived " +
                join(c->message, " x ", [](const KindName& k) { return k.str(); }),
            key);
      continue;
    }
    const EndurantDecl* from = nullptr;
    const EndurantDecl* to = nullptr;
    for (const EndurantDecl* p : parts)
      for (const EndurantDecl* q : parts)
        if (!from && p != q && (related(*p, *q) || related(*q, *p)) && flow_channel_name(*p, *q) == decl.name)
          from = p, to = q;
    if (!from)
    {
      err("E301", "channel " + decl.name.str() + " does not connect two related parts", key);
      continue;
    }
    std::vector<Channel::Component> comps;
    std::set<AttrName> used;
    bool ok = true;
    for (const auto& k : decl.message)
    {
      std::optional<Channel::Component> comp;
      for (const auto& a : from->attributes)
        if (!comp && is_external(a.category) && !used.count(a.name) && a.quantity == k)
          comp = Channel::Component{a.name, std::nullopt, k, std::nullopt, {}};
      for (const auto& a : from->attributes)
        for (const auto& conv : model.conversions)
          if (!comp && is_external(a.category) && !used.count(a.name) && conv.from == a.quantity && conv.to == k)
            comp = Channel::Component{a.name, conv.name, k, std::nullopt, {}};
      if (!comp)
      {
        err("E301", "no attribute of " + from->name.str() + " yields message kind " + k.str() + " on " + decl.name.str(),
            key);
        ok = false;
        break;
      }
      used.insert(comp->source);
      comps.push_back(*comp);
    }
    if (!ok) continue;
    if (Channel* c = flow_channel(*from, *to, key))
    {
      c->message = decl.message;
      c->components = std::move(comps);
    }
  }

  // Related pairs with no channel either way fall back to forwarding the
  // sender's external attributes unconverted.
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
    {
      const EndurantDecl& p = *parts[i];
      const EndurantDecl& q = *parts[j];
      if (!(related(p, q) || related(q, p))) continue;
      bool linked = std::any_of(flows.begin(), flows.end(), [&](const Channel& c) {
        return (c.from == p.name && c.to == q.name) || (c.from == q.name && c.to == p.name);
      });
      if (linked) continue;
      bool made = false;
      for (auto [x, y] : {std::pair{&p, &q}, std::pair{&q, &p}})
      {
        std::vector<Channel::Component> comps;
        for (const auto& a : x->attributes)
          if (is_external(a.category)) comps.push_back(Channel::Component{a.name, std::nullopt, a.quantity, std::nullopt, {}});
        if (comps.empty()) continue;
        if (Channel* c = flow_channel(*x, *y, "sort:" + x->name.str()))
        {
          for (const auto& comp : comps) c->message.push_back(comp.kind);
          c->components = std::move(comps);
        }
        made = true;
      }
      if (!made)
        err("E301",
            "related parts " + p.name.str() + " and " + q.name.str() +
                " have no message kind: neither has external attributes, no axiom tracks across them and no "
                "channel is declared",
            "mereo:" + p.name.str());
    }

  std::sort(flows.begin(), flows.end(), [](const Channel& a, const Channel& b) { return a.name < b.name; });
  out.channels = std::move(externals);
  out.channels.insert(out.channels.end(), flows.begin(), flows.end());
  return out;
}

std::vector<Channel> derive_channels(const DomainModel& model)
{
  throw_if_illformed(model);
  std::vector<Diagnostic> diags;
  KindRegistry reg = analysis::build_registry(model, diags);
  return derive_channels(model, reg).channels;
}

namespace {

/// Throws Error("E302") when the composition below `root` is cyclic.
void check_acyclic(const DomainModel& model, const SortName& root)
{
  std::vector<SortName> path;
  std::function<void(const SortName&)> walk = [&](const SortName& s) {
    if (std::find(path.begin(), path.end(), s) != path.end())
      throw Error("E302", "composition cycle through " + s.str());
    const EndurantDecl* e = model.find_sort(s);
    if (!e) return;
    path.push_back(s);
    for (const auto& c : e->children) walk(c);
    path.pop_back();
  };
  walk(root);
}

ProcessDef build_process(const DomainModel& model, const EndurantDecl& e, const std::vector<Channel>& channels)
{
  ProcessDef p;
  p.name = process_name(e);
  p.abbrev = process_abbrev(e);
  p.sort = e.name;
  p.attributes = e.attributes;
  p.uidPlaceholder = e.idType ? uid_placeholder(*e.idType) : "";
  BehaviourSignature& sig = p.signature;
  if (e.idType) sig.uidParam = *e.idType;
  sig.mereologyParam = e.mereology.value_or(MereologyExpr::empty());

  for (const auto& a : e.attributes)
    if (a.category == AttrCategory::static_)
    {
      sig.staticParams.push_back(a.name);
      if (const InitDecl* in = e.find_init(a.name)) p.staticConsts.emplace_back(a.name, in->value);
    }

  for (const auto& a : e.attributes)
    if (is_external(a.category))
    {
      ChannelName ch(external_channel_name(a.name));
      p.body.ops.push_back(Op{Op::Kind::receive, ch, ProcessDef::var_for(a.name)});
      p.inputChannels.push_back(ch);
    }

  std::vector<std::vector<AttrName>> groups;
  std::set<AttrName> fed;
  for (const auto& c : channels)
  {
    if (c.kind != Channel::Kind::mereology) continue;
    if (c.from == e.name)
    {
      p.body.ops.push_back(Op{Op::Kind::send, c.name, ""});
      p.outputChannels.push_back(c.name);
    }
    else if (c.to == e.name)
    {
      const EndurantDecl* sender = model.find_sort(c.from);
      std::string var = (sender ? process_abbrev(*sender) : lower(c.from.str())) + kPrime;
      p.body.ops.push_back(Op{Op::Kind::receive, c.name, var});
      p.inputChannels.push_back(c.name);
      std::vector<AttrName> group;
      for (std::size_t k = 0; k < c.components.size(); ++k)
      {
        const auto& comp = c.components[k];
        if (!comp.target || fed.count(*comp.target)) continue;
        fed.insert(*comp.target);
        group.push_back(*comp.target);
        p.body.updates.push_back(Update{*comp.target, c.name, var, k, comp.display});
      }
      if (!group.empty()) groups.push_back(std::move(group));
    }
  }
  std::vector<AttrName> rest;
  for (const auto& a : e.attributes)
    if (is_controllable(a.category) && !fed.count(a.name)) rest.push_back(a.name);
  if (!rest.empty()) groups.push_back(std::move(rest));

  sig.controllableGroups = groups;
  sig.controllableType = groups.empty() ? "" : controllable_type_name(e.name);
  p.programmableArgs = sig.controllableParams();
  for (const auto& a : p.programmableArgs)
  {
    const InitDecl* in = e.find_init(a);
    p.controllableInit.emplace_back(a, in ? in->value : std::string());
  }
  sig.inChannels = p.inputChannels;
  sig.outChannels = p.outputChannels;
  return p;
}

bool needs_core(const EndurantDecl& e, const std::vector<Channel>& channels, const CompileOptions& opts)
{
  if (!e.composite || e.children.empty() || opts.alwaysCore || !e.attributes.empty()) return true;
  return std::any_of(channels.begin(), channels.end(), [&](const Channel& c) {
    return c.kind == Channel::Kind::mereology && (c.from == e.name || c.to == e.name);
  });
}

ProcessNode build_node(const DomainModel& model, const EndurantDecl& e, const std::vector<Channel>& channels,
                       const CompileOptions& opts)
{
  ProcessNode n;
  n.sort = e.name;
  n.composite = e.composite;
  if (needs_core(e, channels, opts)) n.core = build_process(model, e, channels);
  for (const auto& c : e.children) n.children.push_back(build_node(model, model_lookup(model, c), channels, opts));
  return n;
}

ProcessGraph assemble(const DomainModel& model, const std::vector<const EndurantDecl*>& roots,
                      const CompileOptions& opts)
{
  std::vector<Diagnostic> diags;
  KindRegistry reg = analysis::build_registry(model, diags);
  ChannelDerivation derived = derive_channels(model, reg);

  ProcessGraph g;
  for (const EndurantDecl* r : roots) g.roots.push_back(build_node(model, *r, derived.channels, opts));
  std::set<std::string> names;
  for (const ProcessDef* p : g.processes()) names.insert(p->name);
  for (const auto& c : derived.channels)
    if (names.count(c.sender) || names.count(c.receiver)) g.channels.push_back(c);

  auto add_kind = [&](const KindName& k) {
    if (const auto* q = reg.find(k)) g.kinds.emplace(k, *q);
  };
  for (const auto& e : model.endurants)
    for (const auto& a : e.attributes) add_kind(a.quantity);
  for (const auto& c : model.conversions)
  {
    add_kind(c.from);
    add_kind(c.to);
    g.conversions.emplace(c.name, c);
  }
  for (const auto& c : g.channels)
    for (const auto& k : c.message) add_kind(k);
  return g;
}

}  // namespace

std::vector<Diagnostic> compile_diagnostics(const DomainModel& model, const KindRegistry& reg)
{
  std::vector<Diagnostic> diags;
  for (const auto& e : model.endurants)
  {
    try
    {
      check_acyclic(model, e.name);
    }
    catch (const Error& err)
    {
      diags.push_back(Diagnostic{Severity::error, "E302", err.what(), model.spans.get("sort:" + e.name.str())});
      return diags;
    }
  }
  auto derived = derive_channels(model, reg);
  diags.insert(diags.end(), derived.diagnostics.begin(), derived.diagnostics.end());
  return diags;
}

BehaviourSignature derive_signature(const DomainModel& model, const SortName& part)
{
  const EndurantDecl& e = part_lookup(model, part);
  std::vector<Diagnostic> diags;
  KindRegistry reg = analysis::build_registry(model, diags);
  return build_process(model, e, derive_channels(model, reg).channels).signature;
}

ProcessGraph compile_process(const DomainModel& model, const SortName& part, CompileOptions opts)
{
  const EndurantDecl& e = part_lookup(model, part);
  check_acyclic(model, part);
  throw_if_illformed(model);
  return assemble(model, {&e}, opts);
}

ProcessGraph compile_model(const DomainModel& model, CompileOptions opts)
{
  for (const auto& e : model.endurants) check_acyclic(model, e.name);
  throw_if_illformed(model);
  std::set<SortName> children;
  for (const auto& e : model.endurants)
    for (const auto& c : e.children) children.insert(c);
  std::vector<const EndurantDecl*> roots;
  for (const EndurantDecl* p : parts_of(model))
    if (!children.count(p->name)) roots.push_back(p);
  return assemble(model, roots, opts);
}

// Printing ---------------------------------------------------------------------

namespace {

std::string mereo_type(const MereologyExpr& m)
{
  switch (m.form)
  {
    case MereologyExpr::Form::empty: return "";
    case MereologyExpr::Form::single: return m.id.str();
    case MereologyExpr::Form::set: return m.id.str() + "-set";
    case MereologyExpr::Form::product:
      return join(m.factors, kTimes, [](const MereologyExpr& f) {
        return f.form == MereologyExpr::Form::product ? "(" + mereo_type(f) + ")" : mereo_type(f);
      });
  }
  return "";
}

std::string mereo_params(const MereologyExpr& m)
{
  switch (m.form)
  {
    case MereologyExpr::Form::empty: return "";
    case MereologyExpr::Form::single: return uid_placeholder(m.id);
    case MereologyExpr::Form::set: return uid_placeholder(m.id) + "s";
    case MereologyExpr::Form::product:
      return "(" + join(m.factors, ",", [](const MereologyExpr& f) { return mereo_params(f); }) + ")";
  }
  return "";
}

std::string tuple(const std::vector<std::string>& xs)
{
  if (xs.size() == 1) return xs.front();
  return "(" + join(xs, ",", [](const std::string& s) { return s; }) + ")";
}

KindName kind_of(const ProcessDef& p, const AttrName& a)
{
  const AttributeDecl* d = p.attribute(a);
  return d ? d->quantity : KindName(a.str());
}

std::string type_tuple(const ProcessDef& p, const std::vector<AttrName>& attrs)
{
  return join(attrs, kTimes, [&](const AttrName& a) { return kind_of(p, a).str(); });
}

std::string controllable_type(const ProcessDef& p)
{
  const auto& groups = p.signature.controllableGroups;
  if (groups.size() == 1) return type_tuple(p, groups.front());
  return join(groups, kTimes, [&](const std::vector<AttrName>& g) {
    return g.size() == 1 ? type_tuple(p, g) : "(" + type_tuple(p, g) + ")";
  });
}

std::string header(const ProcessDef& p)
{
  std::string params = p.uidPlaceholder;
  std::string m = mereo_params(p.signature.mereologyParam);
  if (!m.empty()) params += "," + m;
  return p.name + "(" + params + ")";
}

std::string conv_name(const ChannelName& c)
{
  std::string s = c.str();
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "_ch") == 0) s.resize(s.size() - 3);
  return "conv_" + s;
}

/// True when the updates fed by `c` pass the message through unchanged.
bool passthrough(const Channel& c, const std::vector<AttrName>& group)
{
  if (group.size() != c.components.size()) return false;
  for (std::size_t i = 0; i < group.size(); ++i)
    if (!c.components[i].target || *c.components[i].target != group[i] || !c.components[i].display.empty())
      return false;
  return true;
}

std::string apply_chain(const std::vector<ConversionName>& chain, std::string x)
{
  for (const auto& c : chain) x = c.str() + "(" + x + ")";
  return x;
}

std::vector<std::string> component_params(const Channel& c)
{
  std::vector<std::string> names;
  for (const auto& comp : c.components)
  {
    std::string base = lower(comp.kind.str());
    std::string n = base;
    for (int k = 2; std::find(names.begin(), names.end(), n) != names.end(); ++k) n = base + std::to_string(k);
    names.push_back(n);
  }
  return names;
}

}  // namespace

std::string print_signature(const ProcessDef& p)
{
  const auto& sig = p.signature;
  std::string dom = sig.uidParam.str();
  std::string m = mereo_type(sig.mereologyParam);
  if (!m.empty()) dom += kTimes + (sig.mereologyParam.form == MereologyExpr::Form::product ? "(" + m + ")" : m);
  if (!sig.staticParams.empty())
  {
    std::string s = type_tuple(p, sig.staticParams);
    dom += kTimes + (sig.staticParams.size() > 1 ? "(" + s + ")" : s);
  }
  std::string out = p.name + ": " + dom + kArrow;
  if (!sig.controllableType.empty()) out += sig.controllableType + kArrow;
  std::vector<std::string> io;
  auto names = [](const std::vector<ChannelName>& cs) {
    return join(cs, ",", [](const ChannelName& c) { return c.str(); });
  };
  if (!sig.inChannels.empty()) io.push_back("in " + names(sig.inChannels));
  if (!sig.outChannels.empty()) io.push_back("out " + names(sig.outChannels));
  if (!io.empty()) out += join(io, ", ", [](const std::string& s) { return s; }) + " ";
  return out + "Unit";
}

std::string print_definition(const ProcessDef& p, const ProcessGraph& graph)
{
  const auto& groups = p.signature.controllableGroups;
  auto group_vars = [&](const std::vector<AttrName>& g) {
    std::vector<std::string> vs;
    for (const auto& a : g) vs.push_back(ProcessDef::var_for(a));
    return tuple(vs);
  };
  std::string ctrl;
  if (!groups.empty())
    ctrl = "(" + join(groups, ",", group_vars) + ")";

  std::string out = header(p) + ctrl + kDefines;
  int lets = 0;
  const auto& ops = p.body.ops;
  for (std::size_t i = 0; i < ops.size();)
  {
    if (ops[i].kind == Op::Kind::receive)
    {
      std::vector<std::string> vars, chans;
      for (; i < ops.size() && ops[i].kind == Op::Kind::receive; ++i)
      {
        vars.push_back(ops[i].var);
        chans.push_back(ops[i].channel.str() + "?");
      }
      out += "let " + tuple(vars) + " = " + tuple(chans) + " in ";
      ++lets;
      continue;
    }
    const Channel* c = graph.find_channel(ops[i].channel);
    std::vector<std::string> payload;
    if (c)
      for (const auto& comp : c->components)
      {
        std::string v = ProcessDef::var_for(comp.source);
        payload.push_back(comp.recording ? comp.recording->str() + "(" + v + ")" : v);
      }
    out += ops[i].channel.str() + " ! " + tuple(payload) + "; ";
    ++i;
  }

  std::vector<std::string> args;
  for (const auto& g : groups)
  {
    const Update* u = nullptr;
    for (const auto& up : p.body.updates)
      if (up.target == g.front()) u = &up;
    if (!u)
    {
      args.push_back(group_vars(g));
      continue;
    }
    const Channel* c = graph.find_channel(u->channel);
    args.push_back(c && passthrough(*c, g) ? u->var : conv_name(u->channel) + "(" + u->var + ")");
  }
  out += header(p);
  if (!groups.empty()) out += "(" + join(args, ",", [](const std::string& s) { return s; }) + ")";
  for (int k = 0; k < lets; ++k) out += " end";
  return out;
}

std::string print_process(const ProcessGraph& graph)
{
  std::ostringstream os;
  if (!graph.channels.empty())
  {
    os << "channel\n";
    for (const auto& c : graph.channels)
      os << "  " << c.name << " : " << join(c.message, kTimes, [](const KindName& k) { return k.str(); }) << "\n";
    os << "\n";
  }

  std::function<std::string(const ProcessNode&, bool)> compose = [&](const ProcessNode& n, bool nested) {
    std::vector<std::string> parts;
    if (n.core)
    {
      std::string call = header(*n.core);
      if (!n.core->signature.controllableType.empty()) call += "(init_" + n.core->signature.controllableType + ")";
      parts.push_back(call);
    }
    for (const auto& c : n.children) parts.push_back(compose(c, true));
    if (parts.empty()) return std::string("skip");
    std::string s = join(parts, kPar, [](const std::string& x) { return x; });
    return nested && parts.size() > 1 ? "(" + s + ")" : s;
  };
  for (const auto& r : graph.roots) os << "compile(" << r.sort << ")" << kDefines << compose(r, false) << "\n";

  for (const ProcessDef* p : graph.processes())
  {
    os << "\n";
    const auto& sig = p->signature;
    if (!sig.controllableType.empty()) os << "type " << sig.controllableType << " = " << controllable_type(*p) << "\n";
    os << "value\n";
    if (!sig.controllableType.empty())
    {
      std::vector<std::string> groups;
      for (const auto& g : sig.controllableGroups)
      {
        std::vector<std::string> vals;
        for (const auto& a : g)
          for (const auto& [attr, v] : p->controllableInit)
            if (attr == a) vals.push_back(v);
        groups.push_back(tuple(vals));
      }
      os << "  init_" << sig.controllableType << " : " << sig.controllableType << " = "
         << (groups.size() == 1 ? groups.front() : "(" + join(groups, ",", [](const std::string& s) { return s; }) + ")")
         << "\n";
    }
    os << "  " << print_signature(*p) << "\n";
    os << "  " << print_definition(*p, graph) << "\n";
    for (const auto& g : sig.controllableGroups)
    {
      const Update* u = nullptr;
      for (const auto& up : p->body.updates)
        if (up.target == g.front()) u = &up;
      if (!u) continue;
      const Channel* c = graph.find_channel(u->channel);
      if (!c || passthrough(*c, g)) continue;
      auto params = component_params(*c);
      std::vector<std::string> results;
      for (const auto& a : g)
        for (const auto& up : p->body.updates)
          if (up.target == a) results.push_back(apply_chain(up.chain, params[up.component]));
      std::string name = conv_name(c->name);
      os << "  " << name << ": " << join(c->message, kTimes, [](const KindName& k) { return k.str(); }) << kArrow
         << type_tuple(*p, g) << "\n";
      os << "  " << name << "(" << join(params, ",", [](const std::string& s) { return s; }) << ")" << kDefines
         << tuple(results) << "\n";
    }
  }
  return os.str();
}

std::string graph_to_json(const ProcessGraph& graph)
{
  using nlohmann::ordered_json;
  auto names = [](const auto& xs) {
    ordered_json a = ordered_json::array();
    for (const auto& x : xs) a.push_back(x.str());
    return a;
  };
  ordered_json processes = ordered_json::array();
  ordered_json edges = ordered_json::array();
  std::function<void(const ProcessNode&)> walk = [&](const ProcessNode& n) {
    ordered_json node;
    node["sort"] = n.sort.str();
    node["composite"] = n.composite;
    ordered_json kids = ordered_json::array();
    for (const auto& c : n.children) kids.push_back(c.sort.str());
    node["children"] = kids;
    if (n.core)
    {
      const ProcessDef& p = *n.core;
      const auto& s = p.signature;
      ordered_json groups = ordered_json::array();
      for (const auto& g : s.controllableGroups) groups.push_back(names(g));
      ordered_json pj;
      pj["name"] = p.name;
      pj["abbrev"] = p.abbrev;
      pj["signature"] = {{"uidParam", s.uidParam.str()},
                         {"mereologyParam", s.mereologyParam.to_string()},
                         {"staticParams", names(s.staticParams)},
                         {"controllableParams", names(s.controllableParams())},
                         {"controllableGroups", groups},
                         {"controllableType", s.controllableType},
                         {"inChannels", names(s.inChannels)},
                         {"outChannels", names(s.outChannels)},
                         {"neverTerminates", s.neverTerminates}};
      ordered_json consts = ordered_json::array();
      for (const auto& [a, v] : p.staticConsts) consts.push_back({{"attr", a.str()}, {"value", v}});
      pj["staticConsts"] = consts;
      ordered_json init = ordered_json::array();
      for (const auto& [a, v] : p.controllableInit) init.push_back({{"attr", a.str()}, {"value", v}});
      pj["controllableInit"] = init;
      ordered_json ops = ordered_json::array();
      for (const auto& op : p.body.ops)
      {
        ordered_json o = {{"op", op.kind == Op::Kind::send ? "send" : "receive"}, {"channel", op.channel.str()}};
        if (op.kind == Op::Kind::receive) o["var"] = op.var;
        ops.push_back(o);
      }
      ordered_json updates = ordered_json::array();
      for (const auto& u : p.body.updates)
        updates.push_back({{"target", u.target.str()},
                           {"channel", u.channel.str()},
                           {"component", u.component},
                           {"chain", names(u.chain)}});
      pj["body"] = {{"ops", ops}, {"updates", updates}, {"recurse", true}};
      node["process"] = pj;
    }
    else
      node["process"] = nullptr;
    processes.push_back(node);
    for (const auto& c : n.children)
    {
      edges.push_back({{"kind", "parallel"}, {"from", n.sort.str()}, {"to", c.sort.str()}});
      walk(c);
    }
  };
  for (const auto& r : graph.roots) walk(r);

  ordered_json channels = ordered_json::array();
  for (const auto& c : graph.channels)
  {
    ordered_json comps = ordered_json::array();
    for (const auto& comp : c.components)
    {
      ordered_json cj = {{"source", comp.source.str()}, {"kind", comp.kind.str()}};
      cj["recording"] = comp.recording ? ordered_json(comp.recording->str()) : ordered_json(nullptr);
      cj["target"] = comp.target ? ordered_json(comp.target->str()) : ordered_json(nullptr);
      cj["display"] = names(comp.display);
      comps.push_back(cj);
    }
    channels.push_back({{"name", c.name.str()},
                        {"kind", c.kind == Channel::Kind::external ? "external" : "mereology"},
                        {"message", names(c.message)},
                        {"sender", c.sender},
                        {"receiver", c.receiver},
                        {"components", comps}});
    edges.push_back({{"kind", "channel"}, {"channel", c.name.str()}, {"from", c.sender}, {"to", c.receiver}});
  }

  ordered_json doc;
  doc["processes"] = processes;
  doc["channels"] = channels;
  doc["edges"] = edges;
  return doc.dump(2) + "\n";
}

}  // namespace domcalc::compiler
