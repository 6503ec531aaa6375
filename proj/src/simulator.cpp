#include "domcalc/simulator.hpp"

#include "domcalc/units.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace domcalc::sim {

using compiler::Channel;
using compiler::Op;
using compiler::ProcessDef;
using compiler::ProcessGraph;
using nlohmann::json;
using nlohmann::ordered_json;

std::optional<std::size_t> ScriptSeries::point_at(std::size_t step) const
{
  if (points.empty()) return std::nullopt;
  std::size_t last = points.back().first;
  if (mode == Mode::finite && step > last) return std::nullopt;
  if (mode == Mode::cyclic) step %= last + 1;
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < points.size() && points[i].first <= step; ++i) found = i;
  return found;
}

namespace {

ScriptSeries::Mode mode_from(const std::string& s)
{
  if (s == "hold") return ScriptSeries::Mode::hold;
  if (s == "cyclic") return ScriptSeries::Mode::cyclic;
  if (s == "finite") return ScriptSeries::Mode::finite;
  throw Error("BadScript", "unknown script mode '" + s + "'");
}

std::string mode_name(ScriptSeries::Mode m)
{
  switch (m)
  {
    case ScriptSeries::Mode::hold: return "hold";
    case ScriptSeries::Mode::cyclic: return "cyclic";
    case ScriptSeries::Mode::finite: return "finite";
  }
  return "hold";
}

}  // namespace

EnvironmentScript EnvironmentScript::from_json(const std::string& text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::exception& e)
  {
    throw Error("BadScript", std::string("script is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("BadScript", "script must be a JSON object mapping channels to values");
  EnvironmentScript s;
  for (const auto& [channel, entry] : doc.items())
  {
    ScriptSeries series;
    const json* points = &entry;
    if (entry.is_object())
    {
      if (!entry.contains("points")) throw Error("BadScript", channel + ": object form needs \"points\"");
      points = &entry.at("points");
      if (entry.contains("mode"))
      {
        if (!entry.at("mode").is_string()) throw Error("BadScript", channel + ": mode must be a string");
        series.mode = mode_from(entry.at("mode").get<std::string>());
      }
    }
    if (!points->is_array() || points->empty())
      throw Error("BadScript", channel + ": expected a nonempty array of [step, value] pairs");
    for (const auto& p : *points)
    {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_string())
        throw Error("BadScript", channel + ": each point must be [step, \"value unit\"]");
      std::size_t step = p[0].get<std::size_t>();
      if (!series.points.empty() && step <= series.points.back().first)
        throw Error("BadScript", channel + ": steps must be strictly increasing");
      series.points.emplace_back(step, p[1].get<std::string>());
    }
    if (series.points.front().first != 0)
      throw Error("BadScript", channel + ": the first point must be at step 0");
    s.series.emplace(ChannelName(channel), std::move(series));
  }
  return s;
}

std::string EnvironmentScript::to_json() const
{
  ordered_json doc = ordered_json::object();
  for (const auto& [channel, series] : this->series)
  {
    ordered_json pts = ordered_json::array();
    for (const auto& [step, v] : series.points) pts.push_back({step, v});
    if (series.mode == ScriptSeries::Mode::hold)
      doc[channel.str()] = pts;
    else
      doc[channel.str()] = {{"mode", mode_name(series.mode)}, {"points", pts}};
  }
  return doc.dump() + "\n";
}

std::string to_string(TraceEvent::Kind k)
{
  switch (k)
  {
    case TraceEvent::Kind::send: return "send";
    case TraceEvent::Kind::receive: return "receive";
    case TraceEvent::Kind::recursion: return "recursion";
    case TraceEvent::Kind::deadlock: return "deadlock";
  }
  return "send";
}

std::string trace_to_jsonl(const Trace& trace)
{
  std::string out;
  for (const auto& e : trace)
  {
    ordered_json j;
    j["step"] = e.step;
    j["kind"] = to_string(e.kind);
    j["channel"] = e.channel.str();
    j["process"] = e.process;
    ordered_json payload = ordered_json::array();
    for (const auto& v : e.payload) payload.push_back({{"kind", v.kind.str()}, {"value", v.value.to_string()}});
    j["payload"] = payload;
    out += j.dump() + "\n";
  }
  return out;
}

Trace trace_from_jsonl(const std::string& text)
{
  Trace trace;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try
    {
      json j = json::parse(line);
      TraceEvent e;
      e.step = j.at("step").get<std::size_t>();
      std::string kind = j.at("kind").get<std::string>();
      if (kind == "send") e.kind = TraceEvent::Kind::send;
      else if (kind == "receive") e.kind = TraceEvent::Kind::receive;
      else if (kind == "recursion") e.kind = TraceEvent::Kind::recursion;
      else if (kind == "deadlock") e.kind = TraceEvent::Kind::deadlock;
      else throw Error("BadTrace", "unknown event kind '" + kind + "'");
      e.channel = ChannelName(j.at("channel").get<std::string>());
      e.process = j.at("process").get<std::string>();
      for (const auto& v : j.at("payload"))
      {
        auto value = Scalar::parse(v.at("value").get<std::string>());
        if (!value) throw Error("BadTrace", "bad payload value");
        e.payload.push_back(PayloadValue{KindName(v.at("kind").get<std::string>()), *value});
      }
      trace.push_back(std::move(e));
    }
    catch (const json::exception& ex)
    {
      throw Error("BadTrace", "line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return trace;
}

RunConfig instantiate(const ProcessGraph& graph, const EnvironmentScript& script, std::uint64_t seed)
{
  RunConfig cfg;
  cfg.d_seed = seed;
  auto g = std::make_shared<const ProcessGraph>(graph);
  cfg.d_graph = g;

  auto kind_of = [&](const KindName& k) -> const units::QuantityKind& {
    auto it = g->kinds.find(k);
    if (it == g->kinds.end()) throw Error("UnregisteredKind", "kind " + k.str() + " is not part of the graph");
    return it->second;
  };

  for (const ProcessDef* p : g->processes())
  {
    RunConfig::ProcessState st;
    st.def = p;
    for (const auto& [attr, text] : p->controllableInit)
    {
      if (text.empty())
        throw Error("MissingInit", p->name + ": no initial value for controllable attribute " + attr.str());
      const AttributeDecl* a = p->attribute(attr);
      KindName k = a ? a->quantity : KindName(attr.str());
      units::Quantity q = units::parse_quantity(text, kind_of(k));
      st.controllables.emplace(attr, PayloadValue{k, q.value});
    }
    for (const auto& op : p->body.ops)
    {
      if (op.kind != Op::Kind::receive) continue;
      const Channel* c = g->find_channel(op.channel);
      if (!c || c->kind != Channel::Kind::external || cfg.d_offers.count(op.channel)) continue;
      auto it = script.series.find(op.channel);
      if (it == script.series.end())
        throw Error("UncoveredChannel", "the script gives no values for " + op.channel.str());
      RunConfig::Offer offer;
      offer.mode = it->second.mode;
      const KindName& k = c->message.front();
      for (const auto& [step, text] : it->second.points)
        offer.points.emplace_back(step, PayloadValue{k, units::parse_quantity(text, kind_of(k)).value});
      if (offer.points.empty() || offer.points.front().first != 0)
        throw Error("BadScript", op.channel.str() + ": the first point must be at step 0");
      cfg.d_offers.emplace(op.channel, std::move(offer));
    }
    cfg.d_states.push_back(std::move(st));
  }
  return cfg;
}

namespace {

std::optional<PayloadValue> offer_at(const RunConfig::Offer& offer, std::size_t step)
{
  ScriptSeries probe;
  probe.mode = offer.mode;
  for (const auto& [s, v] : offer.points) probe.points.emplace_back(s, "");
  auto i = probe.point_at(step);
  if (!i) return std::nullopt;
  return offer.points[*i].second;
}

Scalar apply(const ProcessGraph& g, const ConversionName& c, const Scalar& x)
{
  auto it = g.conversions.find(c);
  if (it == g.conversions.end()) throw Error("UnknownConversion", "conversion " + c.str() + " is not in the graph");
  return it->second.apply(x);
}

struct Pair
{
  ChannelName channel;
  std::string sender;
  std::size_t senderIndex;  // into states; npos for the environment
  std::size_t receiverIndex;
};

}  // namespace

Trace run(const RunConfig& config, std::size_t maxSteps)
{
  Trace trace;
  if (maxSteps == 0 || config.d_states.empty()) return trace;
  const ProcessGraph& g = *config.d_graph;
  std::vector<RunConfig::ProcessState> states = config.d_states;
  constexpr std::size_t env = static_cast<std::size_t>(-1);

  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < states.size(); ++i) by_name[states[i].def->name] = i;

  auto current = [&](std::size_t i) -> const Op* {
    const auto& ops = states[i].def->body.ops;
    return states[i].pc < ops.size() ? &ops[states[i].pc] : nullptr;
  };

  auto recurse = [&](std::size_t i, std::size_t step) {
    RunConfig::ProcessState& st = states[i];
    if (st.pc < st.def->body.ops.size()) return;
    for (const auto& u : st.def->body.updates)
    {
      const auto& msg = st.vars.at(u.var);
      Scalar x = msg.at(u.component).value;
      for (const auto& c : u.chain) x = apply(g, c, x);
      auto& slot = st.controllables.at(u.target);
      slot.value = x;
    }
    TraceEvent e{step, TraceEvent::Kind::recursion, ChannelName(), st.def->name, {}};
    for (const auto& a : st.def->programmableArgs) e.payload.push_back(st.controllables.at(a));
    trace.push_back(std::move(e));
    st.pc = 0;
  };

  bool any_ops = std::any_of(states.begin(), states.end(),
                             [](const RunConfig::ProcessState& s) { return !s.def->body.ops.empty(); });

  for (std::size_t step = 0; step < maxSteps; ++step)
  {
    std::vector<Pair> enabled;
    for (std::size_t r = 0; r < states.size(); ++r)
    {
      const Op* op = current(r);
      if (!op || op->kind != Op::Kind::receive) continue;
      const Channel* c = g.find_channel(op->channel);
      if (!c) continue;
      if (c->kind == Channel::Kind::external)
      {
        auto it = config.d_offers.find(op->channel);
        if (it != config.d_offers.end() && offer_at(it->second, step))
          enabled.push_back(Pair{op->channel, compiler::kEnvironment, env, r});
        continue;
      }
      auto s = by_name.find(c->sender);
      if (s == by_name.end()) continue;
      const Op* sop = current(s->second);
      if (sop && sop->kind == Op::Kind::send && sop->channel == op->channel)
        enabled.push_back(Pair{op->channel, c->sender, s->second, r});
    }
    if (enabled.empty())
    {
      if (any_ops) trace.push_back(TraceEvent{step, TraceEvent::Kind::deadlock, ChannelName(), "", {}});
      break;
    }
    std::sort(enabled.begin(), enabled.end(), [](const Pair& a, const Pair& b) {
      return std::tie(a.channel, a.sender) < std::tie(b.channel, b.sender);
    });
    const Pair& pick = enabled[(config.d_seed + step) % enabled.size()];
    const Channel& c = *g.find_channel(pick.channel);

    std::vector<PayloadValue> payload;
    if (pick.senderIndex == env)
      payload.push_back(*offer_at(config.d_offers.at(pick.channel), step));
    else
    {
      const auto& vars = states[pick.senderIndex].vars;
      for (const auto& comp : c.components)
      {
        const auto& src = vars.at(ProcessDef::var_for(comp.source)).at(0);
        Scalar x = comp.recording ? apply(g, *comp.recording, src.value) : src.value;
        payload.push_back(PayloadValue{comp.kind, x});
      }
    }
    auto& recv = states[pick.receiverIndex];
    trace.push_back(TraceEvent{step, TraceEvent::Kind::send, pick.channel, pick.sender, payload});
    trace.push_back(TraceEvent{step, TraceEvent::Kind::receive, pick.channel, recv.def->name, payload});
    recv.vars[current(pick.receiverIndex)->var] = payload;
    ++recv.pc;
    if (pick.senderIndex != env)
    {
      ++states[pick.senderIndex].pc;
      recurse(pick.senderIndex, step);
    }
    recurse(pick.receiverIndex, step);
  }
  return trace;
}

namespace {

std::string chain_text(const std::vector<ConversionName>& chain, std::string x)
{
  for (const auto& c : chain) x = c.str() + "(" + x + ")";
  return x;
}

struct SourceTrack
{
  std::size_t index;               // position in the axiom
  AttrName targetAttr;
  std::size_t ctrlIndex;           // position in the target's recursion payload
  std::string sender;              // sender process
  ChannelName flow;                // sender -> target channel
  std::size_t component;           // position in the flow payload
  ChannelName external;            // attr_A_ch feeding the sender
  std::vector<ConversionName> chain;
  std::string label;               // "PP.LO"
};

}  // namespace

std::vector<Verdict> check_axioms(const DomainModel& model, const Trace& trace)
{
  std::vector<Verdict> out;
  if (model.axioms.empty()) return out;
  const ProcessGraph g = compiler::compile_model(model);
  auto convert = [&](const std::vector<ConversionName>& chain, Scalar x) {
    for (const auto& c : chain) x = model.find_conversion(c)->apply(x);
    return x;
  };

  for (const auto& ax : model.axioms)
  {
    Verdict v;
    v.name = ax.name;
    const EndurantDecl& target = model_lookup(model, ax.target);
    const std::string tproc = compiler::process_name(target);
    const ProcessDef* tdef = g.find_process(tproc);
    std::vector<SourceTrack> tracks;
    for (std::size_t i = 0; i < ax.sources.size(); ++i)
    {
      const auto& src = ax.sources[i];
      const EndurantDecl& s = model_lookup(model, src.sort);
      SourceTrack t;
      t.index = i;
      t.targetAttr = ax.targetAttrs[i];
      t.sender = compiler::process_name(s);
      t.flow = compiler::flow_channel_name(s, target);
      t.external = ChannelName(compiler::external_channel_name(src.attr));
      t.chain = src.chain;
      t.label = src.sort.str() + "." + src.attr.str();
      t.ctrlIndex = 0;
      if (tdef)
      {
        const auto& args = tdef->programmableArgs;
        t.ctrlIndex = std::find(args.begin(), args.end(), t.targetAttr) - args.begin();
      }
      t.component = 0;
      if (const Channel* c = g.find_channel(t.flow))
        for (std::size_t k = 0; k < c->components.size(); ++k)
          if (c->components[k].target == t.targetAttr) t.component = k;
      tracks.push_back(std::move(t));
    }

    // Values each sender received on each external channel, in order, and
    // messages the target received on each flow channel, in order.
    std::map<std::pair<std::string, ChannelName>, std::vector<Scalar>> inputs;
    std::map<ChannelName, std::size_t> delivered;
    auto fail = [&](std::size_t step, const KindName& kind, const Scalar& expected, const Scalar& actual,
                    const std::string& detail) {
      v.pass = false;
      v.step = step;
      v.expected = {PayloadValue{kind, expected}};
      v.actual = {PayloadValue{kind, actual}};
      v.detail = detail;
    };

    for (const auto& e : trace)
    {
      if (!v.pass) break;
      if (e.kind == TraceEvent::Kind::receive && !e.payload.empty())
        inputs[{e.process, e.channel}].push_back(e.payload.front().value);
      if (e.kind == TraceEvent::Kind::receive && e.process == tproc)
      {
        bool is_flow = false;
        for (const auto& t : tracks)
        {
          if (t.flow != e.channel) continue;
          is_flow = true;
          std::size_t m = delivered[e.channel];
          const auto& xs = inputs[{t.sender, t.external}];
          if (m >= xs.size() || t.component >= e.payload.size()) continue;
          std::vector<ConversionName> rec(t.chain.begin(), t.chain.begin() + std::min<std::size_t>(1, t.chain.size()));
          Scalar expected = convert(rec, xs[m]);
          if (e.payload[t.component].value != expected)
          {
            fail(e.step, e.payload[t.component].kind, expected, e.payload[t.component].value,
                 e.channel.str() + " carried " + e.payload[t.component].value.to_string() + " for " +
                     chain_text(rec, t.label) + " = " + expected.to_string());
            break;
          }
        }
        if (is_flow) ++delivered[e.channel];
      }
      if (e.kind == TraceEvent::Kind::recursion && e.process == tproc)
      {
        for (const auto& t : tracks)
        {
          std::size_t m = delivered[t.flow];
          if (m == 0) continue;
          const auto& xs = inputs[{t.sender, t.external}];
          if (m > xs.size() || t.ctrlIndex >= e.payload.size()) continue;
          Scalar expected = convert(t.chain, xs[m - 1]);
          const PayloadValue& actual = e.payload[t.ctrlIndex];
          if (actual.value != expected)
          {
            fail(e.step, actual.kind, expected, actual.value,
                 ax.target.str() + "." + t.targetAttr.str() + " = " + actual.value.to_string() + " but " +
                     chain_text(t.chain, t.label) + " = " + expected.to_string());
            break;
          }
        }
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Verdict> conversion_roundtrip_check(const DomainModel& model, std::size_t samples, std::uint64_t seed)
{
  std::vector<Verdict> out;
  std::set<std::pair<ConversionName, ConversionName>> seen;
  std::mt19937_64 rng(seed);
  for (const auto& c : model.conversions)
  {
    if (!c.inverseOf) continue;
    auto key = std::minmax(c.name, *c.inverseOf);
    if (!seen.insert({key.first, key.second}).second) continue;
    Verdict v;
    v.name = c.name.str() + "/" + c.inverseOf->str();
    const ConversionDecl* inv = model.find_conversion(*c.inverseOf);
    if (!inv)
    {
      v.pass = false;
      v.detail = "inverse " + c.inverseOf->str() + " is not declared";
      out.push_back(std::move(v));
      continue;
    }
    for (std::size_t i = 0; i < samples && v.pass; ++i)
    {
      std::int64_t num = static_cast<std::int64_t>(rng() % 2000001) - 1000000;
      std::int64_t den = static_cast<std::int64_t>(rng() % 1000) + 1;
      Scalar x = Scalar(num) / Scalar(den);
      for (auto [f, b] : {std::pair{&c, inv}, std::pair{inv, &c}})
      {
        Scalar back = b->apply(f->apply(x));
        if (back != x)
        {
          v.pass = false;
          v.step = i;
          v.expected = {PayloadValue{f->from, x}};
          v.actual = {PayloadValue{f->from, back}};
          v.detail = b->name.str() + "(" + f->name.str() + "(" + x.to_string() + ")) = " + back.to_string();
          break;
        }
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string verdicts_to_json(const std::vector<Verdict>& axioms, const std::vector<Verdict>& roundtrips)
{
  auto encode = [](const std::vector<Verdict>& vs) {
    ordered_json a = ordered_json::array();
    for (const auto& v : vs)
    {
      ordered_json j;
      j["name"] = v.name;
      j["status"] = v.pass ? "pass" : "fail";
      if (!v.pass)
      {
        j["step"] = v.step ? ordered_json(*v.step) : ordered_json(nullptr);
        auto vals = [](const std::vector<PayloadValue>& xs) {
          ordered_json p = ordered_json::array();
          for (const auto& x : xs) p.push_back({{"kind", x.kind.str()}, {"value", x.value.to_string()}});
          return p;
        };
        j["expected"] = vals(v.expected);
        j["actual"] = vals(v.actual);
        j["detail"] = v.detail;
      }
      a.push_back(j);
    }
    return a;
  };
  ordered_json doc;
  doc["axioms"] = encode(axioms);
  doc["roundtrips"] = encode(roundtrips);
  bool ok = std::all_of(axioms.begin(), axioms.end(), [](const Verdict& v) { return v.pass; }) &&
            std::all_of(roundtrips.begin(), roundtrips.end(), [](const Verdict& v) { return v.pass; });
  doc["status"] = ok ? "pass" : "fail";
  return doc.dump(2) + "\n";
}

}  // namespace domcalc::sim
