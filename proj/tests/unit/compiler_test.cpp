#include "domcalc/compiler.hpp"
#include "domcalc/dsl.hpp"

#include "../support/fixtures.hpp"
#include "../support/generator.hpp"

#include <doctest.h>

#include <json.hpp>

#include <set>

using namespace domcalc;
using namespace domcalc::compiler;

namespace {

std::vector<std::string> channel_names(const std::vector<Channel>& cs)
{
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.name.str());
  return out;
}

std::size_t count_nodes(const ProcessNode& n)
{
  std::size_t k = 1;
  for (const auto& c : n.children) k += count_nodes(c);
  return k;
}

std::size_t depth(const ProcessNode& n)
{
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, depth(c));
  return d + 1;
}

/// Declaration-tree size and depth by structural recursion over the model.
std::pair<std::size_t, std::size_t> decl_tree(const DomainModel& m, const SortName& s)
{
  const auto& e = model_lookup(m, s);
  std::size_t size = 1, d = 0;
  for (const auto& c : e.children)
  {
    auto [cs, cd] = decl_tree(m, c);
    size += cs;
    d = std::max(d, cd);
  }
  return {size, d + 1};
}

/// Same tree shape: sorts and child multisets agree node by node.
bool isomorphic(const DomainModel& m, const ProcessNode& n)
{
  const auto& e = model_lookup(m, n.sort);
  if (e.children.size() != n.children.size()) return false;
  std::multiset<SortName> want(e.children.begin(), e.children.end()), got;
  for (const auto& c : n.children) got.insert(c.sort);
  if (want != got) return false;
  return std::all_of(n.children.begin(), n.children.end(), [&](const ProcessNode& c) { return isomorphic(m, c); });
}

}  // namespace

TEST_SUITE("compiler")
{
  TEST_CASE("aircraft channels")
  {
    auto cs = derive_channels(testing::aircraft());
    CHECK(channel_names(cs) == std::vector<std::string>{"attr_LO_ch", "attr_LA_ch", "attr_AL_ch", "attr_VEL_ch",
                                                        "attr_ACC_ch", "po_di_ch", "td_di_ch"});
    const auto& po = cs[5];
    CHECK(po.message == std::vector<KindName>{KindName("rLO"), KindName("rLA"), KindName("rAL")});
    CHECK(po.sender == "position");
    CHECK(po.receiver == "display");
    CHECK(cs[6].message == std::vector<KindName>{KindName("rVEL"), KindName("rACC")});
    CHECK(cs[0].sender == kEnvironment);
  }

  TEST_CASE("no dynamic attributes and no relations means no channels")
  {
    auto m = testing::parse_ok("part A { id AI; mereo empty; attr X : Real static; init X = \"1\"; }\n"
                               "part B { id BI; mereo empty; }");
    CHECK(derive_channels(m).empty());
  }

  TEST_CASE("mutually related parts communicate in both directions")
  {
    auto m = testing::parse_ok("part A { id AI; mereo BI; attr X : Length reactive; }\n"
                               "part B { id BI; mereo AI; attr Y : Length inert; }");
    auto cs = derive_channels(m);
    std::set<std::pair<std::string, std::string>> dirs;
    for (const auto& c : cs)
      if (c.kind == Channel::Kind::mereology) dirs.emplace(c.from.str(), c.to.str());
    CHECK(dirs == std::set<std::pair<std::string, std::string>>{{"A", "B"}, {"B", "A"}});
  }

  TEST_CASE("directed channels agree with an enumeration of related pairs")
  {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 200; ++i)
    {
      auto m = testing::generate_model(rng);
      m.axioms.clear();
      // Oracle: each related pair carries one channel per side that has external attributes.
      std::set<std::pair<std::string, std::string>> want;
      for (const auto& p : m.endurants)
        for (const auto& q : m.endurants)
        {
          if (p.name == q.name || !p.mereology || !q.mereology) continue;
          auto mentions = [](const EndurantDecl& x, const EndurantDecl& y) {
            auto ls = x.mereology->leaves();
            return std::find(ls.begin(), ls.end(), *y.idType) != ls.end();
          };
          bool ext = std::any_of(p.attributes.begin(), p.attributes.end(),
                                 [](const AttributeDecl& a) { return is_external(a.category); });
          if ((mentions(p, q) || mentions(q, p)) && ext) want.emplace(p.name.str(), q.name.str());
        }
      std::set<std::pair<std::string, std::string>> got;
      for (const auto& c : derive_channels(m))
        if (c.kind == Channel::Kind::mereology) got.emplace(c.from.str(), c.to.str());
      CHECK(got == want);
    }
  }

  TEST_CASE("derived signatures")
  {
    auto m = testing::aircraft();
    auto pp = derive_signature(m, SortName("PP"));
    CHECK(pp.uidParam == IdTypeName("PPI"));
    CHECK(pp.inChannels == std::vector<ChannelName>{ChannelName("attr_LO_ch"), ChannelName("attr_LA_ch"),
                                                    ChannelName("attr_AL_ch")});
    CHECK(pp.outChannels == std::vector<ChannelName>{ChannelName("po_di_ch")});
    CHECK(pp.staticParams.empty());
    CHECK(pp.controllableParams().empty());
    CHECK(pp.neverTerminates);

    auto dp = derive_signature(m, SortName("DP"));
    CHECK(dp.controllableType == "DA");
    REQUIRE(dp.controllableGroups.size() == 2);
    CHECK(dp.controllableGroups[0] == std::vector<AttrName>{AttrName("dLO"), AttrName("dLA"), AttrName("dAL")});
    CHECK(dp.controllableGroups[1] == std::vector<AttrName>{AttrName("dVEL"), AttrName("dACC")});
    CHECK(dp.inChannels == std::vector<ChannelName>{ChannelName("po_di_ch"), ChannelName("td_di_ch")});
    CHECK(dp.outChannels.empty());

    auto st = testing::parse_ok("part S { id SI; mereo empty; attr W : Mass static; init W = \"2 kg\"; }");
    auto ss = derive_signature(st, SortName("S"));
    CHECK(ss.staticParams == std::vector<AttrName>{AttrName("W")});
    CHECK(ss.inChannels.empty());
    CHECK(ss.outChannels.empty());
    auto g = compile_model(st);
    CHECK(g.processes().front()->staticConsts == std::vector<std::pair<AttrName, std::string>>{{AttrName("W"), "2 kg"}});

    CHECK_THROWS_AS(derive_signature(m, SortName("XX")), Error);
    auto comp = testing::parse_ok("component C { id CI; }");
    CHECK_THROWS_AS(derive_signature(comp, SortName("C")), Error);
  }

  TEST_CASE("compiling the aircraft composes the three atomic behaviours")
  {
    auto m = testing::aircraft();
    auto g = compile_process(m, SortName("AC"));
    REQUIRE(g.roots.size() == 1);
    const auto& ac = g.roots.front();
    CHECK(ac.composite);
    CHECK_FALSE(ac.core.has_value());
    std::vector<std::string> names;
    for (const auto* p : g.processes()) names.push_back(p->name);
    CHECK(names == std::vector<std::string>{"position", "travel_dynamics", "display"});

    auto withCore = compile_process(m, SortName("AC"), CompileOptions{true});
    CHECK(withCore.roots.front().core.has_value());
    CHECK(withCore.processes().size() == 4);

    auto pp = compile_process(m, SortName("PP"));
    CHECK(pp.processes().size() == 1);
    CHECK(pp.roots.front().children.empty());
  }

  TEST_CASE("a three-level composite compiles to a depth-three tree")
  {
    auto m = testing::parse_ok("part R composite(M1, M2) { id RI; mereo empty; }\n"
                               "part M1 composite(L1, L2) { id M1I; mereo empty; }\n"
                               "part M2 composite(L3) { id M2I; mereo empty; }\n"
                               "part L1 { id L1I; mereo empty; }\npart L2 { id L2I; mereo empty; }\n"
                               "part L3 { id L3I; mereo empty; }");
    auto g = compile_process(m, SortName("R"));
    auto [size, d] = decl_tree(m, SortName("R"));
    CHECK(count_nodes(g.roots.front()) == size);
    CHECK(depth(g.roots.front()) == d);
    CHECK(d == 3);
    CHECK(isomorphic(m, g.roots.front()));
  }

  TEST_CASE("composition cycles are rejected")
  {
    DomainModel m;
    for (const char* n : {"A", "B"})
    {
      EndurantDecl e;
      e.name = SortName(n);
      e.idType = IdTypeName(std::string(n) + "I");
      e.mereology = MereologyExpr::empty();
      e.composite = true;
      e.children.push_back(SortName(n[0] == 'A' ? "B" : "A"));
      m.endurants.push_back(e);
    }
    try
    {
      compile_process(m, SortName("A"));
      FAIL("expected a cycle error");
    }
    catch (const Error& e)
    {
      CHECK(e.code() == "E302");
    }
  }

  TEST_CASE("behaviour definitions")
  {
    auto g = compile_model(testing::aircraft());
    CHECK(print_definition(*g.find_process("position"), g) ==
          "position(pπ,dπ) ≡ let (lo,la,al) = (attr_LO_ch?,attr_LA_ch?,attr_AL_ch?) in "
          "po_di_ch ! (a2rLO(lo),a2rLA(la),a2rAL(al)); position(pπ,dπ) end");
    CHECK(print_definition(*g.find_process("display"), g) ==
          "display(dπ,(pπ,tdπ))((dlo,dla,dal),(dvel,dacc)) ≡ let (po′,td′) = (po_di_ch?,td_di_ch?) in "
          "display(dπ,(pπ,tdπ))(conv_po_di(po′),conv_td_di(td′)) end");
    CHECK(print_signature(*g.find_process("display")) == "display: DPI × (PPI × TDI) → DA → in po_di_ch,td_di_ch Unit");
    auto text = print_process(g);
    CHECK(text.find("compile(AC) ≡ position(pπ,dπ) ∥ travel_dynamics(tdπ,dπ) ∥ display(dπ,(pπ,tdπ))(init_DA)") !=
          std::string::npos);
    CHECK(text.find("type DA = (dLO × dLA × dAL) × (dVEL × dACC)") != std::string::npos);
  }

  TEST_CASE("naming conventions")
  {
    CHECK(uid_placeholder(IdTypeName("PPI")) == "pπ");
    CHECK(uid_placeholder(IdTypeName("TDI")) == "tdπ");
    CHECK(controllable_type_name(SortName("DP")) == "DA");
    CHECK(external_channel_name(AttrName("LO")) == "attr_LO_ch");
  }

  TEST_CASE("signature completeness, never-termination and structure preservation on generated models")
  {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 200; ++i)
    {
      auto m = testing::generate_model(rng);
      auto g = compile_model(m);
      CHECK(g == compile_model(m));
      for (const auto& root : g.roots) CHECK(isomorphic(m, root));
      for (const auto* p : g.processes())
      {
        CHECK(p->signature.neverTerminates);
        std::set<ChannelName> declared(p->signature.inChannels.begin(), p->signature.inChannels.end());
        declared.insert(p->signature.outChannels.begin(), p->signature.outChannels.end());
        for (const auto& op : p->body.ops) CHECK(declared.count(op.channel) == 1);
        for (const auto& u : p->body.updates) CHECK(declared.count(u.channel) == 1);

        auto params = p->signature.controllableParams();
        for (const auto& a : p->attributes)
        {
          ChannelName ext(external_channel_name(a.name));
          auto in_count = std::count(p->signature.inChannels.begin(), p->signature.inChannels.end(), ext);
          bool controllable = std::find(params.begin(), params.end(), a.name) != params.end();
          if (is_external(a.category))
          {
            CHECK(in_count == 1);
            CHECK_FALSE(controllable);
          }
          else if (is_controllable(a.category))
          {
            CHECK(in_count == 0);
            CHECK(controllable);
          }
        }
        CHECK(params.size() == static_cast<std::size_t>(std::count_if(
                                   p->attributes.begin(), p->attributes.end(),
                                   [](const AttributeDecl& a) { return is_controllable(a.category); })));
      }
    }
  }

  TEST_CASE("graph JSON lists processes, channels and edges")
  {
    auto j = nlohmann::ordered_json::parse(graph_to_json(compile_model(testing::aircraft())));
    CHECK(j["processes"].size() == 4);
    CHECK(j["channels"].size() == 7);
    std::size_t parallel = 0, channel = 0;
    for (const auto& e : j["edges"]) (e["kind"] == "parallel" ? parallel : channel)++;
    CHECK(parallel == 3);
    CHECK(channel == 7);
  }
}
