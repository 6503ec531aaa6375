#pragma once

#include "domcalc/common.hpp"
#include "domcalc/model.hpp"
#include "domcalc/units.hpp"

#include <string>
#include <vector>

namespace domcalc::analysis {

/// Position of a declared sort in the entity ontology.
struct Classification
{
  bool isEntity = false;
  bool isEndurant = false;
  bool isPerdurant = false;
  bool isDiscrete = false;
  bool isContinuous = false;
  bool isPart = false;
  bool isComponent = false;
  bool isMaterial = false;
  bool isAtomic = false;
  bool isComposite = false;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Throws Error("UnknownSort").
Classification classify(const DomainModel& model, const SortName& name);

/// Output of a description prompt: prose plus formal statements that the
/// frontend re-parses.
struct DescriptionText
{
  std::string narrative;
  std::vector<DescriptionStmt> formal;
};

/// `type P1, ...; value obs_Pi : P -> Pi;` Throws UnknownSort, NotComposite.
DescriptionText observe_part_sorts(const DomainModel& model, const SortName& name);
/// `type PI; value uid_P : P -> PI;` Throws UnknownSort, NoIdentifier.
DescriptionText observe_unique_identifier(const DomainModel& model, const SortName& name);
/// `value mereo_P : P -> <expr>;` Throws UnknownSort, NotAPart.
DescriptionText observe_mereology(const DomainModel& model, const SortName& name);
/// `type K...; value attr_A : P -> AT(K) x AV(K); category c : P.A;`
/// Throws UnknownSort.
DescriptionText observe_attributes(const DomainModel& model, const SortName& name);

/// Renders a description as narrative followed by the formal statements.
std::string render(const DescriptionText& d);

/// Built-in kinds extended with the model's quantity and rule declarations.
/// Problems (bad units, unknown kinds, shadowing) are appended to `diags`.
units::KindRegistry build_registry(const DomainModel& model, std::vector<Diagnostic>& diags);

/// Every violation of the model's side conditions as a diagnostic; empty
/// exactly when the model is well formed and compiles.
std::vector<Diagnostic> check_wellformed(const DomainModel& model);

/// The axiom equations as expressions (`r2dLO(a2rLO(PP.LO))`) paired with
/// the target attribute each must equal, for expression type checking.
struct AxiomEquation
{
  std::string axiom;
  SortName targetSort;
  AttrName targetAttr;
  units::Expr expr;
};
std::vector<AxiomEquation> axiom_equations(const DomainModel& model);

/// Type-checks every axiom equation with typecheck_expr; E201/E202/E206/E207
/// from the checker, E113 when the result kind differs from the target's.
std::vector<Diagnostic> typecheck_axioms(const DomainModel& model, const units::KindRegistry& reg);

}  // namespace domcalc::analysis
