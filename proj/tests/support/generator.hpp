#pragma once

// Random well-formed models and scripts for property tests.

#include "domcalc/analysis.hpp"
#include "domcalc/compiler.hpp"
#include "domcalc/model.hpp"
#include "domcalc/simulator.hpp"

#include <random>
#include <string>
#include <vector>

namespace domcalc::testing {

struct GenOptions
{
  int maxParts = 4;
  int maxAttrs = 3;
  /// Adds a component, a material, doc strings, a rule and description
  /// statements (exercise the printer; irrelevant to behaviour).
  bool extras = false;
};

inline int pick(std::mt19937_64& rng, int lo, int hi)
{
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline bool coin(std::mt19937_64& rng) { return rng() % 2 == 0; }

inline DomainModel generate_model(std::mt19937_64& rng, const GenOptions& opt = {})
{
  static const char* kinds[] = {"Length", "Velocity", "Real", "Temp", "Time", "Mass"};
  static const AttrCategory cats[] = {AttrCategory::static_,    AttrCategory::inert,    AttrCategory::reactive,
                                      AttrCategory::autonomous, AttrCategory::biddable, AttrCategory::programmable};
  DomainModel m;
  const bool composite = opt.maxParts >= 2 && pick(rng, 0, 2) == 0;
  const int atomics = pick(rng, 1, opt.maxParts - (composite ? 1 : 0));
  int attr_counter = 0;

  std::vector<EndurantDecl> parts;
  for (int i = 0; i < atomics; ++i)
  {
    EndurantDecl e;
    std::string n = std::string("P") + static_cast<char>('A' + i);
    e.name = SortName(n);
    e.idType = IdTypeName(n + "I");
    int na = pick(rng, 0, opt.maxAttrs);
    for (int k = 0; k < na; ++k)
    {
      AttributeDecl a;
      a.name = AttrName("A" + std::to_string(attr_counter++));
      a.quantity = KindName(kinds[pick(rng, 0, 5)]);
      a.category = cats[pick(rng, 0, 5)];
      e.attributes.push_back(a);
      if (is_controllable(a.category) || (a.category == AttrCategory::static_ && coin(rng)))
        e.inits.push_back(InitDecl{a.name, std::to_string(pick(rng, -5, 5))});
    }
    if (opt.extras && coin(rng)) e.doc = "Part " + n + " of a generated model.";
    if (coin(rng)) e.behaviour = BehaviourNaming{"beh_" + n, "b" + std::string(1, static_cast<char>('a' + i))};
    parts.push_back(std::move(e));
  }

  auto has_external = [](const EndurantDecl& e) {
    for (const auto& a : e.attributes)
      if (is_external(a.category)) return true;
    return false;
  };

  // Mereology: only pairs where some side can talk.
  std::vector<std::vector<IdTypeName>> mentions(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
    {
      if (!(has_external(parts[i]) || has_external(parts[j])) || !coin(rng)) continue;
      int dir = pick(rng, 0, 2);
      if (dir != 1) mentions[i].push_back(*parts[j].idType);
      if (dir != 0) mentions[j].push_back(*parts[i].idType);
    }
  for (std::size_t i = 0; i < parts.size(); ++i)
  {
    const auto& ms = mentions[i];
    auto leaf = [&](const IdTypeName& id) {
      return pick(rng, 0, 3) == 0 ? MereologyExpr::set_of(id) : MereologyExpr::single(id);
    };
    if (ms.empty())
      parts[i].mereology = MereologyExpr::empty();
    else if (ms.size() == 1)
      parts[i].mereology = leaf(ms.front());
    else
    {
      std::vector<MereologyExpr> fs;
      for (const auto& id : ms) fs.push_back(leaf(id));
      parts[i].mereology = MereologyExpr::product(std::move(fs));
    }
  }

  auto related = [&](std::size_t a, std::size_t b) {
    auto has = [&](std::size_t x, std::size_t y) {
      for (const auto& id : mentions[x])
        if (id == *parts[y].idType) return true;
      return false;
    };
    return has(a, b) || has(b, a);
  };

  // Axioms: pair programmable targets with external sources of related parts.
  std::vector<bool> used_target(static_cast<std::size_t>(attr_counter), false);
  std::vector<bool> used_source(static_cast<std::size_t>(attr_counter), false);
  int conv_counter = 0;
  auto attr_index = [](const AttrName& a) { return static_cast<std::size_t>(std::stoi(a.str().substr(1))); };
  for (std::size_t t = 0; t < parts.size(); ++t)
    for (std::size_t s = 0; s < parts.size(); ++s)
    {
      if (s == t || !related(s, t) || !coin(rng)) continue;
      AxiomDecl ax;
      ax.name = "ax" + std::to_string(m.axioms.size());
      ax.target = parts[t].name;
      for (auto& ta : parts[t].attributes)
      {
        if (ta.category != AttrCategory::programmable || used_target[attr_index(ta.name)]) continue;
        const AttributeDecl* src = nullptr;
        for (const auto& sa : parts[s].attributes)
          if (is_external(sa.category) && !used_source[attr_index(sa.name)])
          {
            src = &sa;
            break;
          }
        if (!src) break;
        used_target[attr_index(ta.name)] = true;
        used_source[attr_index(src->name)] = true;
        std::string k = std::to_string(conv_counter++);
        KindName rec("R" + k), disp("D" + k);
        m.quantities.push_back(QuantityDecl{rec, "plain", "1", std::nullopt, std::nullopt, false});
        m.quantities.push_back(QuantityDecl{disp, "plain", "1", std::nullopt, std::nullopt, false});
        Scalar a(pick(rng, 1, 9));
        a /= Scalar(pick(rng, 1, 4));
        Scalar b(pick(rng, -50, 50));
        Scalar c(pick(rng, 1, 5));
        ConversionDecl r{ConversionName("rec" + k), src->quantity, rec, std::nullopt, c, Scalar(pick(rng, -9, 9))};
        ConversionDecl d{ConversionName("disp" + k), rec, disp, ConversionName("inv" + k), a, b};
        ConversionDecl v{ConversionName("inv" + k), disp, rec, ConversionName("disp" + k), Scalar(1) / a, -b / a};
        m.conversions.push_back(r);
        m.conversions.push_back(d);
        m.conversions.push_back(v);
        ta.quantity = disp;
        ax.targetAttrs.push_back(ta.name);
        ax.sources.push_back(AxiomDecl::Source{parts[s].name, src->name, {r.name, d.name}});
      }
      if (!ax.sources.empty()) m.axioms.push_back(std::move(ax));
    }

  if (composite)
  {
    EndurantDecl c;
    c.name = SortName("CM");
    c.idType = IdTypeName("CMI");
    c.mereology = MereologyExpr::empty();
    c.composite = true;
    int kids = pick(rng, 1, atomics);
    for (int i = 0; i < kids; ++i) c.children.push_back(parts[static_cast<std::size_t>(i)].name);
    m.endurants.push_back(std::move(c));
  }
  for (auto& p : parts) m.endurants.push_back(std::move(p));

  if (opt.extras)
  {
    EndurantDecl comp;
    comp.name = SortName("CO");
    comp.kind = EndurantKind::component;
    comp.idType = IdTypeName("COI");
    comp.attributes.push_back(AttributeDecl{AttrName("W0"), KindName("Mass"), AttrCategory::static_});
    m.endurants.push_back(comp);
    EndurantDecl mat;
    mat.name = SortName("MT");
    mat.kind = EndurantKind::material;
    mat.discreteness = Discreteness::continuous;
    mat.attributes.push_back(AttributeDecl{AttrName("V0"), KindName("Volume"), AttrCategory::inert});
    m.endurants.push_back(mat);
    m.quantities.push_back(QuantityDecl{KindName("Stamp"), "point", "s", KindName("TimeInterval"), std::nullopt, true});
    m.rules.push_back(RuleDecl{"add", KindName("Stamp"), KindName("Stamp"), std::nullopt});
    for (const auto& e : m.endurants)
      if (e.kind == EndurantKind::part)
      {
        auto d = analysis::observe_attributes(m, e.name);
        m.descriptions.insert(m.descriptions.end(), d.formal.begin(), d.formal.end());
        break;
      }
  }
  return m;
}

/// Script covering every external channel of `graph`: integer values in the
/// kinds' own units, random modes.
inline sim::EnvironmentScript generate_script(const compiler::ProcessGraph& graph, std::mt19937_64& rng)
{
  sim::EnvironmentScript s;
  for (const auto& c : graph.channels)
  {
    if (c.kind != compiler::Channel::Kind::external) continue;
    sim::ScriptSeries series;
    series.mode = pick(rng, 0, 3) == 0 ? sim::ScriptSeries::Mode::cyclic : sim::ScriptSeries::Mode::hold;
    std::size_t step = 0;
    int n = pick(rng, 1, 4);
    for (int i = 0; i < n; ++i)
    {
      series.points.emplace_back(step, std::to_string(pick(rng, -100, 100)));
      step += static_cast<std::size_t>(pick(rng, 1, 7));
    }
    s.series.emplace(c.name, std::move(series));
  }
  return s;
}

}  // namespace domcalc::testing
