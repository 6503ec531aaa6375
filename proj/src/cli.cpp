#include "domcalc/cli.hpp"

#include "domcalc/analysis.hpp"
#include "domcalc/compiler.hpp"
#include "domcalc/dsl.hpp"
#include "domcalc/simulator.hpp"
#include "domcalc/units.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>

namespace domcalc {

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kFailed = 2;

struct Context
{
  std::ostream& out;
  std::ostream& err;
  bool color;

  void report(const std::vector<Diagnostic>& diags) const
  {
    for (const auto& d : diags) err << format_diagnostic(d, color) << "\n";
  }
};

/// Parses `path`; prints diagnostics and returns nullopt on syntax errors.
std::optional<DomainModel> load(const Context& ctx, const std::string& path)
{
  auto result = dsl::parse_model(dsl::read_file(path), path);
  ctx.report(result.diagnostics);
  if (!result.ok()) return std::nullopt;
  return std::move(result.model);
}

/// Well-formedness gate shared by describe, compile and simulate.
bool wellformed(const Context& ctx, const DomainModel& model)
{
  auto diags = analysis::check_wellformed(model);
  ctx.report(diags);
  return !has_errors(diags);
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("IoError", "cannot write '" + path + "'");
  f << text;
}

int cmd_parse(const Context& ctx, const std::string& path)
{
  auto model = load(ctx, path);
  if (!model) return kError;
  ctx.out << dsl::print_model(*model);
  return kOk;
}

int cmd_check(const Context& ctx, const std::string& path)
{
  auto model = load(ctx, path);
  if (!model) return kError;
  if (!wellformed(ctx, *model)) return kFailed;
  ctx.out << path << ": ok (" << model->endurants.size() << " sorts, " << model->axioms.size() << " axioms)\n";
  return kOk;
}

int cmd_describe(const Context& ctx, const std::string& path, const std::string& sort)
{
  auto model = load(ctx, path);
  if (!model) return kError;
  if (!wellformed(ctx, *model)) return kFailed;
  std::vector<const EndurantDecl*> sorts;
  if (!sort.empty())
    sorts.push_back(&model_lookup(*model, SortName(sort)));
  else
    for (const auto& e : model->endurants) sorts.push_back(&e);

  bool first = true;
  for (const EndurantDecl* e : sorts)
  {
    if (!first) ctx.out << "\n";
    first = false;
    auto c = analysis::classify(*model, e->name);
    ctx.out << "# " << e->name << " (" << to_string(e->kind)
            << (c.isPart ? (c.isComposite ? ", composite" : ", atomic") : "")
            << (c.isContinuous ? ", continuous" : ", discrete") << ")\n";
    if (e->doc) ctx.out << *e->doc << "\n";
    std::vector<analysis::DescriptionText> texts;
    if (c.isComposite) texts.push_back(analysis::observe_part_sorts(*model, e->name));
    if (e->idType && !c.isMaterial) texts.push_back(analysis::observe_unique_identifier(*model, e->name));
    if (c.isPart) texts.push_back(analysis::observe_mereology(*model, e->name));
    texts.push_back(analysis::observe_attributes(*model, e->name));
    for (const auto& t : texts) ctx.out << analysis::render(t);
  }
  return kOk;
}

int cmd_compile(const Context& ctx, const std::string& path, const std::string& json_path, bool always_core)
{
  auto model = load(ctx, path);
  if (!model) return kError;
  if (!wellformed(ctx, *model)) return kFailed;
  compiler::CompileOptions opts;
  opts.alwaysCore = always_core;
  auto graph = compiler::compile_model(*model, opts);
  ctx.out << compiler::print_process(graph);
  if (!json_path.empty())
  {
    if (json_path == "-")
      ctx.out << compiler::graph_to_json(graph);
    else
      write_file(json_path, compiler::graph_to_json(graph));
  }
  return kOk;
}

struct SimulateArgs
{
  std::string path, script, trace;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 100;
};

int cmd_simulate(const Context& ctx, const SimulateArgs& a)
{
  auto model = load(ctx, a.path);
  if (!model) return kError;
  if (!wellformed(ctx, *model)) return kFailed;
  auto graph = compiler::compile_model(*model);
  auto script = sim::EnvironmentScript::from_json(dsl::read_file(a.script));
  auto config = sim::instantiate(graph, script, a.seed);
  auto trace = sim::run(config, a.steps);
  if (!a.trace.empty())
  {
    if (a.trace == "-")
      ctx.out << sim::trace_to_jsonl(trace);
    else
      write_file(a.trace, sim::trace_to_jsonl(trace));
  }
  auto axioms = sim::check_axioms(*model, trace);
  auto roundtrips = sim::conversion_roundtrip_check(*model, a.samples, a.seed);
  ctx.out << sim::verdicts_to_json(axioms, roundtrips);
  bool ok = std::all_of(axioms.begin(), axioms.end(), [](const sim::Verdict& v) { return v.pass; }) &&
            std::all_of(roundtrips.begin(), roundtrips.end(), [](const sim::Verdict& v) { return v.pass; });
  return ok ? kOk : kFailed;
}

std::string scale_suffix(const units::UnitValue& u)
{
  std::string s;
  if (u.scale != Scalar(1)) s += " (scale " + u.scale.to_string() + ")";
  if (!u.offset.is_zero()) s += " (offset " + u.offset.to_string() + ")";
  return s;
}

int cmd_units_check(const Context& ctx, const std::string& text)
{
  try
  {
    units::UnitValue u = units::parse_unit(text);
    ctx.out << units::unit_name_for(u.dimension) << ": " << u.dimension.to_string() << scale_suffix(u) << "\n";
    return kOk;
  }
  catch (const Error& unit_error)
  {
    units::Expr e;
    try
    {
      e = units::parse_expr(text, "<units>");
    }
    catch (const Error&)
    {
      ctx.err << unit_error.what() << "\n";
      return kError;
    }
    auto r = units::typecheck_expr(e, {}, units::KindRegistry::builtin());
    if (const auto* d = std::get_if<Diagnostic>(&r))
    {
      // A lone unknown name is better explained by the unit parser.
      if (e.form == units::Expr::Form::name && d->code == "E202")
      {
        ctx.err << unit_error.what() << "\n";
        return kError;
      }
      ctx.out << "rejected: " << d->code << ": " << d->message << "\n";
      return kFailed;
    }
    const auto& k = std::get<units::QuantityKind>(r);
    ctx.out << k.name << ": " << k.dimension.to_string() << " (" << units::to_string(k.role) << ")\n";
    return kOk;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color)
{
  CLI::App app{"domcalc: domain descriptions with units, behaviours and axiom checking", "domcalc"};
  app.require_subcommand(1);

  std::string path, sort, json_path, unit_expr;
  bool always_core = false;
  SimulateArgs sim_args;

  auto* parse = app.add_subcommand("parse", "Print the canonical form of a model");
  parse->add_option("file", path, "Model file (.dom)")->required();

  auto* check = app.add_subcommand("check", "Check a model for well-formedness");
  check->add_option("file", path, "Model file (.dom)")->required();

  auto* describe = app.add_subcommand("describe", "Emit narrative and formal descriptions");
  describe->add_option("file", path, "Model file (.dom)")->required();
  describe->add_option("--sort", sort, "Describe only this sort");

  auto* compile = app.add_subcommand("compile", "Compile parts into behaviour definitions");
  compile->add_option("file", path, "Model file (.dom)")->required();
  compile->add_option("--json", json_path, "Write the process graph as JSON ('-' for stdout)");
  compile->add_flag("--always-core", always_core, "Emit composite core behaviours even when empty");

  auto* simulate = app.add_subcommand("simulate", "Run compiled behaviours and check axioms");
  simulate->add_option("file", sim_args.path, "Model file (.dom)")->required();
  simulate->add_option("--script", sim_args.script, "Environment script (JSON)")->required();
  simulate->add_option("--steps", sim_args.steps, "Maximum number of rendezvous")->required();
  simulate->add_option("--seed", sim_args.seed, "Scheduler and sampling seed")->required();
  simulate->add_option("--trace", sim_args.trace, "Write the trace as JSON lines ('-' for stdout)");
  simulate->add_option("--samples", sim_args.samples, "Samples per inverse conversion pair");

  auto* units_cmd = app.add_subcommand("units", "Unit and quantity-kind utilities");
  units_cmd->require_subcommand(1);
  auto* units_check = units_cmd->add_subcommand("check", "Show the dimension of a unit or kind expression");
  units_check->add_option("expr", unit_expr, "Unit expression or kind expression")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::ParseError& e)
  {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  Context ctx{out, err, color};
  try
  {
    if (*parse) return cmd_parse(ctx, path);
    if (*check) return cmd_check(ctx, path);
    if (*describe) return cmd_describe(ctx, path, sort);
    if (*compile) return cmd_compile(ctx, path, json_path, always_core);
    if (*simulate) return cmd_simulate(ctx, sim_args);
    if (*units_check) return cmd_units_check(ctx, unit_expr);
  }
  catch (const Error& e)
  {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace domcalc
