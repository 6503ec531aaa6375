#include "domcalc/analysis.hpp"
#include "domcalc/dsl.hpp"

#include "../support/fixtures.hpp"
#include "../support/generator.hpp"

#include <doctest.h>

using namespace domcalc;

namespace {

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) + 1; }

}  // namespace

TEST_SUITE("dsl")
{
  TEST_CASE("aircraft corpus parses into the composite and its three parts")
  {
    auto r = dsl::parse_model(testing::aircraft_text(), "aircraft.dom");
    REQUIRE(r.diagnostics.empty());
    const auto& m = r.model;
    const auto& ac = model_lookup(m, SortName("AC"));
    CHECK(ac.children == std::vector<SortName>{SortName("PP"), SortName("TD"), SortName("DP")});
    CHECK(model_lookup(m, SortName("PP")).idType == IdTypeName("PPI"));
    CHECK(model_lookup(m, SortName("TD")).idType == IdTypeName("TDI"));
    CHECK(model_lookup(m, SortName("DP")).idType == IdTypeName("DPI"));
    CHECK(model_lookup(m, SortName("PP")).mereology == MereologyExpr::single(IdTypeName("DPI")));
    CHECK(model_lookup(m, SortName("TD")).mereology == MereologyExpr::single(IdTypeName("DPI")));
    CHECK(model_lookup(m, SortName("DP")).mereology ==
          MereologyExpr::product({MereologyExpr::single(IdTypeName("PPI")), MereologyExpr::single(IdTypeName("TDI"))}));
    CHECK(m.spans.get("attr:PP.LA").startLine > 1);
  }

  TEST_CASE("empty input")
  {
    auto r = dsl::parse_model("", "empty.dom");
    CHECK(r.diagnostics.empty());
    CHECK(r.model.empty());
    CHECK(dsl::print_model(r.model).empty());
    auto c = dsl::parse_model("-- only a comment\n", "c.dom");
    CHECK(c.diagnostics.empty());
    CHECK(c.model.empty());
  }

  TEST_CASE("duplicate id clause is E002")
  {
    auto r = dsl::parse_model("part PP { id PPI; id PPI2; }", "dup.dom");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].code == "E002");
    CHECK(r.diagnostics[0].span.startLine == 1);
    CHECK(r.diagnostics[0].span.startCol == 19);
  }

  TEST_CASE("duplicate declarations across the model")
  {
    auto r = dsl::parse_model("part A { id AI; mereo empty; }\npart A { id BI; mereo empty; }\n"
                              "part C { id AI; mereo empty; attr X : Real static; attr X : Real static; }\n",
                              "dup.dom");
    CHECK(std::count_if(r.diagnostics.begin(), r.diagnostics.end(), [](const Diagnostic& d) { return d.code == "E002"; }) ==
          3);
  }

  TEST_CASE("syntax errors recover at the next declaration")
  {
    auto r = dsl::parse_model("part A { id ; }\npart B { id BI; mereo empty; }\nquantity Q : ;\npart C { id CI; mereo empty; }\n",
                              "bad.dom");
    CHECK(std::count_if(r.diagnostics.begin(), r.diagnostics.end(), [](const Diagnostic& d) { return d.code == "E001"; }) ==
          2);
    CHECK(r.model.find_sort(SortName("B")) != nullptr);
    CHECK(r.model.find_sort(SortName("C")) != nullptr);
    CHECK(format_diagnostic(r.diagnostics.front()).rfind("bad.dom:1:13: E001:", 0) == 0);
  }

  TEST_CASE("printing a single atomic part gives one block")
  {
    auto text = dsl::print_model(testing::parse_ok("part P { id PI; mereo empty; }"));
    CHECK(text == "part P {\n  id PI;\n  mereo empty;\n}\n");
  }

  TEST_CASE("printed aircraft shows the display part's mereology")
  {
    auto text = dsl::print_model(testing::aircraft());
    auto dp = text.find("part DP {");
    REQUIRE(dp != std::string::npos);
    CHECK(text.find("mereo PPI x TDI;", dp) != std::string::npos);
    CHECK(testing::parse_ok(text).endurants.size() == 4);
  }

  TEST_CASE("parse after print is the identity on generated models")
  {
    std::mt19937_64 rng(2024);
    testing::GenOptions opt;
    opt.extras = true;
    for (int i = 0; i < 300; ++i)
    {
      auto m = testing::generate_model(rng, opt);
      auto text = dsl::print_model(m);
      CAPTURE(text);
      auto r = dsl::parse_model(text, "gen.dom");
      REQUIRE(r.diagnostics.empty());
      CHECK(structurally_equal(m, r.model));
      CHECK(dsl::print_model(r.model) == text);
    }
  }

  TEST_CASE("every diagnostic span lies inside the input")
  {
    const std::string base = testing::aircraft_text();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i)
    {
      std::string text = base;
      for (int k = 0; k < 3; ++k)
      {
        std::size_t at = rng() % text.size();
        if (rng() % 2)
          text.erase(at, 1 + rng() % 8);
        else
          text.insert(at, 1, "{};:()x\"-"[rng() % 9]);
      }
      auto r = dsl::parse_model(text, "fuzz.dom");
      std::vector<Diagnostic> all = r.diagnostics;
      if (r.ok())
      {
        auto more = analysis::check_wellformed(r.model);
        all.insert(all.end(), more.begin(), more.end());
      }
      const std::size_t lines = line_count(text);
      for (const auto& d : all)
      {
        CAPTURE(format_diagnostic(d));
        CHECK(d.span.startLine >= 1);
        CHECK(static_cast<std::size_t>(d.span.startLine) <= lines);
        CHECK(static_cast<std::size_t>(d.span.endLine) <= lines);
        CHECK(d.span.startCol >= 1);
      }
    }
  }

  TEST_CASE("description statements round trip")
  {
    auto m = testing::aircraft();
    auto d = analysis::observe_attributes(m, SortName("PP"));
    auto text = dsl::print_descriptions(d.formal);
    CHECK(text.find("value attr_LO : PP -> AT(LO) x AV(LO);") != std::string::npos);
    CHECK(text.find("category reactive : PP.LO, PP.LA, PP.AL;") != std::string::npos);
    auto r = dsl::parse_model(text, "desc.dom");
    REQUIRE(r.diagnostics.empty());
    CHECK(r.model.descriptions == d.formal);
  }
}
