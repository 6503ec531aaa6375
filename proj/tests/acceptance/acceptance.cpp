// Acceptance suite: one line per criterion, exit status 0 only when all pass.

#include "domcalc/analysis.hpp"
#include "domcalc/compiler.hpp"
#include "domcalc/dsl.hpp"
#include "domcalc/simulator.hpp"
#include "domcalc/units.hpp"

#include "../support/fixtures.hpp"
#include "../support/generator.hpp"
#include "../support/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace domcalc;

namespace {

struct Result
{
  bool pass = true;
  std::string detail;
};

/// Records the first failed expectation.
class Expect
{
public:
  void operator()(bool ok, const std::string& what)
  {
    ++d_checks;
    if (!ok && d_result.pass)
    {
      d_result.pass = false;
      d_result.detail = what;
    }
  }
  Result done(const std::string& summary)
  {
    if (d_result.pass) d_result.detail = summary;
    return d_result;
  }
  std::size_t checks() const { return d_checks; }

private:
  Result d_result;
  std::size_t d_checks = 0;
};

// 1 ---------------------------------------------------------------------------

struct ExpectedSort
{
  std::string name;
  std::vector<std::string> children;
  std::string id;
  std::string mereo;
  std::vector<std::pair<std::string, AttrCategory>> attrs;
};

Result aircraft_round_trip()
{
  Expect expect;
  auto r = dsl::parse_model(testing::aircraft_text(), "aircraft.dom");
  expect(r.diagnostics.empty(), "aircraft.dom has parse diagnostics");
  const auto R = AttrCategory::reactive, P = AttrCategory::programmable;
  const std::vector<ExpectedSort> want = {
      {"AC", {"PP", "TD", "DP"}, "ACI", "empty", {}},
      {"PP", {}, "PPI", "DPI", {{"LO", R}, {"LA", R}, {"AL", R}}},
      {"TD", {}, "TDI", "DPI", {{"VEL", R}, {"ACC", R}}},
      {"DP", {}, "DPI", "PPI x TDI", {{"dLO", P}, {"dLA", P}, {"dAL", P}, {"dVEL", P}, {"dACC", P}}},
  };
  const auto& m = r.model;
  expect(m.endurants.size() == want.size(), "sort count");
  for (std::size_t i = 0; i < want.size() && i < m.endurants.size(); ++i)
  {
    const auto& e = m.endurants[i];
    const auto& w = want[i];
    expect(e.name.str() == w.name, "sort " + w.name);
    expect(e.kind == EndurantKind::part, w.name + " is a part");
    expect(e.composite == !w.children.empty(), w.name + " structure");
    std::vector<std::string> kids;
    for (const auto& c : e.children) kids.push_back(c.str());
    expect(kids == w.children, w.name + " children");
    expect(e.idType && e.idType->str() == w.id, w.name + " id type");
    expect(e.mereology && e.mereology->to_string() == w.mereo, w.name + " mereology");
    expect(e.attributes.size() == w.attrs.size(), w.name + " attribute count");
    for (std::size_t k = 0; k < w.attrs.size() && k < e.attributes.size(); ++k)
    {
      expect(e.attributes[k].name.str() == w.attrs[k].first, w.name + " attribute " + w.attrs[k].first);
      expect(e.attributes[k].quantity.str() == w.attrs[k].first, w.name + " attribute kind " + w.attrs[k].first);
      expect(e.attributes[k].category == w.attrs[k].second, w.name + " category of " + w.attrs[k].first);
    }
  }
  auto ids = id_types_of(m);
  for (const char* id : {"PPI", "TDI", "DPI"}) expect(ids.count(IdTypeName(id)) == 1, std::string("id type ") + id);
  auto reparsed = dsl::parse_model(dsl::print_model(m), "printed.dom");
  expect(reparsed.ok() && structurally_equal(m, reparsed.model), "print/parse round trip");
  auto diags = analysis::check_wellformed(m);
  expect(diags.empty(), diags.empty() ? "" : "check_wellformed: " + format_diagnostic(diags.front()));
  return expect.done("4 sorts, 10 attributes, check_wellformed = []");
}

// 2 ---------------------------------------------------------------------------

Result schema_reproduction()
{
  Expect expect;
  auto m = testing::aircraft();
  auto g = compiler::compile_process(m, SortName("AC"));
  std::vector<std::string> names;
  for (const auto* p : g.processes()) names.push_back(p->name);
  expect(names == std::vector<std::string>{"position", "travel_dynamics", "display"}, "process set");
  expect(g.roots.size() == 1 && g.roots[0].children.size() == 3 && !g.roots[0].core, "parallel composition shape");

  const auto* pos = g.find_process("position");
  const auto* dis = g.find_process("display");
  expect(pos && pos->signature.inChannels.size() == 3, "position has 3 in-channels");
  expect(pos && pos->signature.outChannels == std::vector<ChannelName>{ChannelName("po_di_ch")},
         "position sends on po_di_ch");
  expect(pos && pos->signature.staticParams.empty() && pos->signature.controllableParams().empty(),
         "position has no static or controllable attributes");
  expect(dis && dis->signature.controllableType == "DA", "display controllable type DA");
  expect(dis && dis->signature.inChannels.size() == 2, "display has 2 in-channels");
  expect(dis && dis->signature.controllableParams().size() == 5, "display has 5 controllables");

  const std::string golden = dsl::read_file(testing::source_path("tests/golden/aircraft_graph.json"));
  expect(compiler::graph_to_json(compiler::compile_model(m)) == golden, "graph JSON differs from golden");
  return expect.done("position ∥ travel_dynamics ∥ display, JSON matches golden");
}

// 3 ---------------------------------------------------------------------------

std::string random_value(std::mt19937_64& rng, const std::string& channel)
{
  auto n = [&](int lo, int hi) { return std::to_string(testing::pick(rng, lo, hi)); };
  if (channel == "attr_LO_ch") return n(-180, 180) + " deg";
  if (channel == "attr_LA_ch") return n(-90, 90) + " deg";
  if (channel == "attr_AL_ch") return testing::coin(rng) ? n(0, 12000) + " m" : n(0, 12) + " km";
  if (channel == "attr_VEL_ch") return testing::coin(rng) ? n(0, 1000) + " km/h" : n(0, 300) + " m/s";
  return n(-20, 20) + "/" + n(1, 9) + " m/s^2";
}

sim::EnvironmentScript random_aircraft_script(const compiler::ProcessGraph& g, std::mt19937_64& rng)
{
  sim::EnvironmentScript s;
  for (const auto& c : g.channels)
  {
    if (c.kind != compiler::Channel::Kind::external) continue;
    sim::ScriptSeries series;
    series.mode = testing::coin(rng) ? sim::ScriptSeries::Mode::cyclic : sim::ScriptSeries::Mode::hold;
    std::size_t step = 0;
    for (int i = testing::pick(rng, 1, 5); i > 0; --i)
    {
      series.points.emplace_back(step, random_value(rng, c.name.str()));
      step += static_cast<std::size_t>(testing::pick(rng, 1, 12));
    }
    s.series.emplace(c.name, std::move(series));
  }
  return s;
}

Result axiom_discharge()
{
  Expect expect;
  auto m = testing::aircraft();
  auto g = compiler::compile_model(m);
  std::mt19937_64 rng(20240601);
  std::size_t mutants = 0;
  for (int i = 0; i < 100; ++i)
  {
    auto script = random_aircraft_script(g, rng);
    auto trace = sim::run(sim::instantiate(g, script, rng()), 50);
    auto verdicts = sim::check_axioms(m, trace);
    const std::string tag = "script " + std::to_string(i);
    expect(verdicts.size() == 1 && verdicts[0].pass,
           tag + ": untampered trace fails" + (verdicts.empty() ? "" : " (" + verdicts[0].detail + ")"));

    std::vector<std::size_t> displays;
    for (std::size_t k = 0; k < trace.size(); ++k)
      if (trace[k].kind == sim::TraceEvent::Kind::recursion && trace[k].process == "display") displays.push_back(k);
    expect(!displays.empty(), tag + ": no display recursion in 50 steps");
    if (displays.empty()) continue;

    auto tampered = trace;
    auto& ev = tampered[displays[rng() % displays.size()]];
    const std::size_t comp = rng() % ev.payload.size();
    const Scalar original = ev.payload[comp].value;
    ev.payload[comp].value += Scalar(1);
    ++mutants;
    // Oracle: the untampered run passed, so the recomputed chain value is the original payload.
    auto bad = sim::check_axioms(m, tampered);
    expect(bad.size() == 1 && !bad[0].pass, tag + ": mutation not detected");
    if (bad.size() != 1 || bad[0].pass) continue;
    expect(bad[0].step == ev.step, tag + ": witness step");
    expect(bad[0].expected.size() == 1 && bad[0].expected[0].value == original, tag + ": witness expected value");
    expect(bad[0].actual.size() == 1 && bad[0].actual[0].value == original + Scalar(1), tag + ": witness actual value");
  }
  return expect.done("100 scripts x 50 steps pass; " + std::to_string(mutants) + "/100 mutants caught with witness");
}

// 4 ---------------------------------------------------------------------------

Result units_tables()
{
  Expect expect;
  std::size_t entries = 0, prefixes = 0;
  for (const auto& row : testing::unit_table())
  {
    const units::Dimension want(testing::sum_exponents(row.base));
    expect(units::parse_unit(row.symbol).dimension == want, row.name + " (symbol)");
    expect(units::parse_unit(row.derived).dimension == want, row.name + " (derived form)");
    ++entries;
  }
  for (const auto& p : testing::prefix_table())
  {
    for (const char* unit : {"m", "s", "g"})
    {
      auto u = units::parse_unit(p.symbol + unit);
      Scalar base = std::string(unit) == "g" ? Scalar(1) / Scalar(1000) : Scalar(1);
      expect(u.scale == testing::power_of_ten(p.power) * base, p.name + unit);
    }
    ++prefixes;
  }
  return expect.done(std::to_string(entries) + " table entries, " + std::to_string(prefixes) +
                     " prefixes, 0 mismatches");
}

// 5 ---------------------------------------------------------------------------

Result operator_ledger()
{
  Expect expect;
  const auto& reg = units::KindRegistry::builtin();
  auto verdict = [&](units::OpKind op, const char* l, const char* r) { return reg.check_op(op, KindName(l), KindName(r)); };
  auto result = [](const units::OpVerdict& v) {
    return units::is_forbidden(v) ? std::string("forbidden") : std::get<units::Allowed>(v).result.name.str();
  };
  using units::OpKind;
  expect(units::is_forbidden(verdict(OpKind::add, "Time", "Time")), "Time + Time");
  auto diff = verdict(OpKind::sub, "Time", "Time");
  expect(result(diff) == "TimeInterval" && std::get<units::Allowed>(diff).requiresOrderedOperands, "Time - Time");
  expect(result(verdict(OpKind::mul, "TimeInterval", "Real")) == "TimeInterval", "TimeInterval * Real");
  auto ratio = verdict(OpKind::div, "TimeInterval", "TimeInterval");
  expect(result(ratio) == "Real" && std::get<units::Allowed>(ratio).result.dimension.dimensionless(),
         "TimeInterval / TimeInterval");
  expect(units::is_forbidden(verdict(OpKind::add, "Temp", "Temp")), "Temp + Temp");
  expect(result(verdict(OpKind::mean, "Temp", "Temp")) == "MeanTemp", "mean(Temp)");

  // Closure over every registered pair, plus dimensional consistency of results.
  std::size_t verdicts = 0;
  for (const auto& l : reg.names())
    for (const auto& r : reg.names())
      for (OpKind op : units::kAllOps)
      {
        units::OpVerdict v;
        try
        {
          v = reg.check_op(op, l, r);
        }
        catch (const std::exception& e)
        {
          expect(false, "unhandled " + units::to_string(op) + "(" + l.str() + ", " + r.str() + "): " + e.what());
          continue;
        }
        ++verdicts;
        if (units::is_forbidden(v)) continue;
        const auto& res = std::get<units::Allowed>(v).result;
        const auto& lk = reg.at(l);
        const auto& rk = reg.at(r);
        units::Dimension want = res.dimension;
        if (op == OpKind::add || op == OpKind::sub || op == OpKind::mean || op == OpKind::scaleByReal)
          want = lk.dimension;
        else if (op == OpKind::mul)
          want = units::dim_mul(lk.dimension, rk.dimension);
        else if (op == OpKind::div || op == OpKind::rateOfChange)
          want = units::dim_div(lk.dimension, rk.dimension);
        else if (op == OpKind::compare)
          want = units::Dimension();
        expect(res.dimension == want, "dimension of " + units::to_string(op) + "(" + l.str() + ", " + r.str() + ")");
        const bool point_sum = op == OpKind::add && lk.role == units::KindRole::point && rk.role == units::KindRole::point;
        const bool point_product = op == OpKind::mul && (lk.role == units::KindRole::point || rk.role == units::KindRole::point);
        expect(!point_sum && !point_product,
               "point kinds admit " + units::to_string(op) + "(" + l.str() + ", " + r.str() + ")");
      }
  return expect.done("6 mandated verdicts hold; " + std::to_string(verdicts) + " ledger verdicts, none unhandled");
}

// 6 ---------------------------------------------------------------------------

Result group_laws()
{
  Expect expect;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> d(-12, 12);
  auto random_dim = [&] {
    std::array<int, units::kBaseCount> e{};
    for (auto& x : e) x = d(rng);
    return units::Dimension(e);
  };
  const units::Dimension one;
  for (int i = 0; i < 10000; ++i)
  {
    auto a = random_dim(), b = random_dim(), c = random_dim();
    expect(units::dim_mul(a, b) == units::dim_mul(b, a), "commutativity");
    expect(units::dim_mul(units::dim_mul(a, b), c) == units::dim_mul(a, units::dim_mul(b, c)), "associativity");
    expect(units::dim_mul(a, one) == a && units::dim_mul(one, a) == a, "identity");
    expect(units::dim_mul(a, units::dim_div(one, a)) == one, "inverse");
  }
  return expect.done("10000 random vectors");
}

// 7 ---------------------------------------------------------------------------

Result determinism_and_prefix()
{
  Expect expect;
  std::mt19937_64 rng(7);
  std::size_t events = 0, with_axioms = 0;
  for (int i = 0; i < 100; ++i)
  {
    auto m = testing::generate_model(rng);
    auto diags = analysis::check_wellformed(m);
    expect(diags.empty(), "generated model " + std::to_string(i) + " is ill formed");
    if (!diags.empty()) continue;
    with_axioms += !m.axioms.empty();
    auto g = compiler::compile_model(m);
    auto script = testing::generate_script(g, rng);
    const std::uint64_t seed = rng();
    const std::size_t n = static_cast<std::size_t>(testing::pick(rng, 0, 40));
    const std::size_t big = n + static_cast<std::size_t>(testing::pick(rng, 0, 40));
    auto a = sim::run(sim::instantiate(g, script, seed), big);
    auto b = sim::run(sim::instantiate(g, script, seed), big);
    expect(sim::trace_to_jsonl(a) == sim::trace_to_jsonl(b), "triple " + std::to_string(i) + ": reruns differ");
    auto p = sim::run(sim::instantiate(g, script, seed), n);
    expect(p.size() <= a.size() && std::equal(p.begin(), p.end(), a.begin()),
           "triple " + std::to_string(i) + ": run(" + std::to_string(n) + ") is not a prefix of run(" +
               std::to_string(big) + ")");
    events += a.size();
  }
  return expect.done("100 triples (" + std::to_string(with_axioms) + " with axioms), " + std::to_string(events) +
                     " events");
}

// 8 ---------------------------------------------------------------------------

Result description_idempotence()
{
  Expect expect;
  std::mt19937_64 rng(8);
  std::size_t outputs = 0;
  for (int i = 0; i < 200; ++i)
  {
    testing::GenOptions opt;
    opt.extras = i % 3 == 0;
    auto m = testing::generate_model(rng, opt);
    if (!analysis::check_wellformed(m).empty()) continue;
    const std::string base = dsl::print_model(m);
    for (const auto& e : m.endurants)
    {
      if (e.kind != EndurantKind::part) continue;
      std::vector<analysis::DescriptionText> texts;
      if (e.composite) texts.push_back(analysis::observe_part_sorts(m, e.name));
      texts.push_back(analysis::observe_unique_identifier(m, e.name));
      texts.push_back(analysis::observe_mereology(m, e.name));
      texts.push_back(analysis::observe_attributes(m, e.name));
      std::vector<DescriptionStmt> all;
      for (const auto& t : texts)
      {
        const std::string formal = dsl::print_descriptions(t.formal);
        auto alone = dsl::parse_model(formal, "formal.dom");
        expect(alone.ok() && alone.model.descriptions == t.formal, "formal text of " + e.name.str() + " does not re-parse");
        auto with_model = dsl::parse_model(base + "\n" + formal, "described.dom");
        expect(with_model.ok(), "model plus description of " + e.name.str() + " does not parse");
        if (with_model.ok())
        {
          auto ds = analysis::check_wellformed(with_model.model);
          expect(ds.empty(), ds.empty() ? "" : "re-validation: " + format_diagnostic(ds.front()));
        }
        all.insert(all.end(), t.formal.begin(), t.formal.end());
        ++outputs;
      }
      auto combined = dsl::parse_model(base + "\n" + dsl::print_descriptions(all), "all.dom");
      expect(combined.ok() && analysis::check_wellformed(combined.model).empty(),
             "all descriptions of " + e.name.str() + " together");
    }
  }
  return expect.done(std::to_string(outputs) + " prompt outputs re-parse and re-validate");
}

}  // namespace

int main()
{
  struct Criterion
  {
    int id;
    const char* title;
    double budget;  // seconds
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "aircraft corpus round-trip", 1.0, aircraft_round_trip},
      {2, "schema reproduction", 1.0, schema_reproduction},
      {3, "axiom discharge and mutation testing", 10.0, axiom_discharge},
      {4, "units tables", 0, units_tables},
      {5, "operator ledger", 0, operator_ledger},
      {6, "dimension group laws", 0, group_laws},
      {7, "simulator determinism and prefix monotonicity", 0, determinism_and_prefix},
      {8, "description idempotence", 0, description_idempotence},
  };
  int failed = 0;
  for (const auto& c : criteria)
  {
    Result r;
    const auto start = std::chrono::steady_clock::now();
    try
    {
      r = c.run();
    }
    catch (const std::exception& e)
    {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.pass && c.budget > 0 && secs >= c.budget)
      r = {false, "took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget) + " s"};
    failed += !r.pass;
    char line[64];
    std::snprintf(line, sizeof line, "%.3f s", secs);
    std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " (" << line << ") - "
              << r.detail << "\n";
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : std::string("all 8 criteria passed\n"));
  return failed ? 1 : 0;
}
