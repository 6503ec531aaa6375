#pragma once

#include "domcalc/common.hpp"
#include "domcalc/model.hpp"
#include "domcalc/units.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace domcalc::compiler {

/// Name of the environment pseudo-process that drives attr_*_ch channels.
inline constexpr const char* kEnvironment = "env";

/// A compiled channel. External channels carry one attribute value from the
/// environment; mereology channels carry a tuple from one part behaviour to
/// a related one.
struct Channel
{
  enum class Kind { external, mereology };

  /// One payload position: the sender reads `source` (one of its external
  /// attributes) and applies `recording`; the receiver applies `display` in
  /// order and stores the result in `target`, if any.
  struct Component
  {
    AttrName source;
    std::optional<ConversionName> recording;
    KindName kind;
    std::optional<AttrName> target;
    std::vector<ConversionName> display;

    friend bool operator==(const Component&, const Component&) = default;
  };

  ChannelName name;
  Kind kind = Kind::external;
  std::vector<KindName> message;
  std::string sender, receiver;
  SortName from, to;
  std::vector<Component> components;

  friend bool operator==(const Channel&, const Channel&) = default;
};

struct BehaviourSignature
{
  IdTypeName uidParam;
  MereologyExpr mereologyParam;
  std::vector<AttrName> staticParams;
  /// Controllable attributes grouped by the channel that feeds them.
  std::vector<std::vector<AttrName>> controllableGroups;
  /// Name of the controllable tuple type (`DA`); empty when none.
  std::string controllableType;
  std::vector<ChannelName> inChannels, outChannels;
  bool neverTerminates = true;

  std::vector<AttrName> controllableParams() const;

  friend bool operator==(const BehaviourSignature&, const BehaviourSignature&) = default;
};

/// Channel operation in a core step.
struct Op
{
  enum class Kind { receive, send };
  Kind kind = Kind::receive;
  ChannelName channel;
  /// Variable bound by a receive.
  std::string var;

  friend bool operator==(const Op&, const Op&) = default;
};

/// Controllable update applied at recursion: target := display(var[component]).
struct Update
{
  AttrName target;
  ChannelName channel;
  std::string var;
  std::size_t component = 0;
  std::vector<ConversionName> chain;

  friend bool operator==(const Update&, const Update&) = default;
};

/// Tail-recursive core: channel operations in order, then updates, then
/// recursion.
struct CoreStep
{
  std::vector<Op> ops;
  std::vector<Update> updates;

  friend bool operator==(const CoreStep&, const CoreStep&) = default;
};

struct ProcessDef
{
  std::string name;
  std::string abbrev;
  SortName sort;
  std::string uidPlaceholder;
  BehaviourSignature signature;
  std::vector<AttributeDecl> attributes;
  std::vector<std::pair<AttrName, std::string>> staticConsts;
  std::vector<std::pair<AttrName, std::string>> controllableInit;
  std::vector<AttrName> programmableArgs;
  std::vector<ChannelName> inputChannels, outputChannels;
  CoreStep body;

  /// Variable naming the value of an external attribute inside the body.
  static std::string var_for(const AttrName& a);
  const AttributeDecl* attribute(const AttrName& a) const;

  friend bool operator==(const ProcessDef&, const ProcessDef&) = default;
};

/// Node of the parallel-composition tree; `core` is absent when elided.
struct ProcessNode
{
  SortName sort;
  bool composite = false;
  std::optional<ProcessDef> core;
  std::vector<ProcessNode> children;

  friend bool operator==(const ProcessNode&, const ProcessNode&) = default;
};

struct ProcessGraph
{
  std::vector<ProcessNode> roots;
  std::vector<Channel> channels;
  std::map<KindName, units::QuantityKind> kinds;
  std::map<ConversionName, ConversionDecl> conversions;

  /// Core processes in preorder.
  std::vector<const ProcessDef*> processes() const;
  const Channel* find_channel(const ChannelName& name) const;
  const ProcessDef* find_process(const std::string& name) const;

  friend bool operator==(const ProcessGraph&, const ProcessGraph&) = default;
};

struct CompileOptions
{
  /// Emit composite cores even when they have nothing of their own to do.
  bool alwaysCore = false;
};

// Naming conventions ---------------------------------------------------------

std::string process_name(const EndurantDecl& e);
std::string process_abbrev(const EndurantDecl& e);
/// PPI -> pπ, TDI -> tdπ.
std::string uid_placeholder(const IdTypeName& id);
/// DP -> DA.
std::string controllable_type_name(const SortName& sort);
std::string external_channel_name(const AttrName& a);
ChannelName flow_channel_name(const EndurantDecl& sender, const EndurantDecl& receiver);

struct ChannelDerivation
{
  std::vector<Channel> channels;
  std::vector<Diagnostic> diagnostics;
};

/// attr_<A>_ch per external attribute of every part, plus one channel per
/// directed flow between related parts. Diagnostics: E301, E304, E305.
ChannelDerivation derive_channels(const DomainModel& model, const units::KindRegistry& reg);
/// Convenience: derives with the model's own registry; throws Error("IllFormed")
/// on the first error.
std::vector<Channel> derive_channels(const DomainModel& model);

/// Compile-stage diagnostics (E301, E302, E304, E305) for a structurally
/// sound model.
std::vector<Diagnostic> compile_diagnostics(const DomainModel& model, const units::KindRegistry& reg);

/// Throws UnknownSort, NotAPart.
BehaviourSignature derive_signature(const DomainModel& model, const SortName& part);

/// Parallel tree for `part`. Throws UnknownSort, NotAPart, Error("E302") on
/// a composition cycle and Error("IllFormed") when the model has errors.
ProcessGraph compile_process(const DomainModel& model, const SortName& part, CompileOptions opts = {});
/// Every root part (not a child of a composite), in declaration order.
ProcessGraph compile_model(const DomainModel& model, CompileOptions opts = {});

/// Formal text: channel declarations, the composition, and one behaviour
/// definition per core process.
std::string print_process(const ProcessGraph& graph);
/// The definition line of one process (`position(pπ,dπ) ≡ let ... end`).
std::string print_definition(const ProcessDef& p, const ProcessGraph& graph);
/// `position: PPI × DPI → in ..., out ... Unit`.
std::string print_signature(const ProcessDef& p);

/// Machine-readable graph: {"processes": [...], "channels": [...], "edges": [...]}.
std::string graph_to_json(const ProcessGraph& graph);

}  // namespace domcalc::compiler
