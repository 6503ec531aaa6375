#pragma once

#include "domcalc/compiler.hpp"
#include "domcalc/model.hpp"
#include "domcalc/scalar.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace domcalc::sim {

/// Values offered on one external channel. A point's step is the number of
/// rendezvous completed before the offer. Between points the last value
/// holds; `cyclic` repeats the points with period last-step + 1; `finite`
/// stops offering after the last point.
struct ScriptSeries
{
  enum class Mode { hold, cyclic, finite };
  Mode mode = Mode::hold;
  std::vector<std::pair<std::size_t, std::string>> points;

  /// Index into `points` for the offer at `step`, if any.
  std::optional<std::size_t> point_at(std::size_t step) const;
};

struct EnvironmentScript
{
  std::map<ChannelName, ScriptSeries> series;

  /// {"attr_LO_ch": [[0, "10 deg"], ...], "attr_X_ch": {"mode": "cyclic",
  /// "points": [...]}}. Throws Error("BadScript").
  static EnvironmentScript from_json(const std::string& text);
  std::string to_json() const;
};

struct PayloadValue
{
  KindName kind;
  Scalar value;

  friend bool operator==(const PayloadValue&, const PayloadValue&) = default;
};

struct TraceEvent
{
  enum class Kind { send, receive, recursion, deadlock };
  std::size_t step = 0;
  Kind kind = Kind::send;
  ChannelName channel;
  std::string process;
  std::vector<PayloadValue> payload;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

std::string to_string(TraceEvent::Kind k);

using Trace = std::vector<TraceEvent>;

/// One JSON object per line: {step, kind, channel, process, payload:[{kind,value}]}.
std::string trace_to_jsonl(const Trace& trace);
/// Throws Error("BadTrace").
Trace trace_from_jsonl(const std::string& text);

/// A graph ready to run: processes at their initial program point with
/// parsed script values and initial controllables.
class RunConfig
{
public:
  struct ProcessState
  {
    const compiler::ProcessDef* def = nullptr;
    std::size_t pc = 0;
    std::map<std::string, std::vector<PayloadValue>> vars;
    std::map<AttrName, PayloadValue> controllables;
  };
  struct Offer
  {
    ScriptSeries::Mode mode = ScriptSeries::Mode::hold;
    std::vector<std::pair<std::size_t, PayloadValue>> points;
  };

  std::size_t process_count() const { return d_states.size(); }
  std::uint64_t seed() const { return d_seed; }
  const compiler::ProcessGraph& graph() const { return *d_graph; }

private:
  friend RunConfig instantiate(const compiler::ProcessGraph&, const EnvironmentScript&, std::uint64_t);
  friend Trace run(const RunConfig&, std::size_t);

  std::shared_ptr<const compiler::ProcessGraph> d_graph;
  std::vector<ProcessState> d_states;
  std::map<ChannelName, Offer> d_offers;
  std::uint64_t d_seed = 0;
};

/// Throws UncoveredChannel, MissingInit, BadScript or a value parse error.
RunConfig instantiate(const compiler::ProcessGraph& graph, const EnvironmentScript& script, std::uint64_t seed);

/// Runs until `maxSteps` rendezvous, quiescence or deadlock. Among enabled
/// (channel, sender) pairs, sorted, the one at (seed + step) mod n is taken.
Trace run(const RunConfig& config, std::size_t maxSteps);

struct Verdict
{
  std::string name;
  bool pass = true;
  std::optional<std::size_t> step;
  std::vector<PayloadValue> expected, actual;
  std::string detail;
};

/// One verdict per axiom. At every recursion of the target behaviour each
/// tracked controllable must equal the full chain applied to the source
/// value behind the latest message received; each received payload must
/// equal the recording step applied to that value.
std::vector<Verdict> check_axioms(const DomainModel& model, const Trace& trace);

/// One verdict per declared inverse pair: inv(fwd(x)) = x for sampled x.
/// Conversions without a declared inverse are skipped.
std::vector<Verdict> conversion_roundtrip_check(const DomainModel& model, std::size_t samples, std::uint64_t seed);

std::string verdicts_to_json(const std::vector<Verdict>& axioms, const std::vector<Verdict>& roundtrips);

}  // namespace domcalc::sim
