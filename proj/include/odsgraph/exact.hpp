#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odsgraph/collapsibility.hpp"
#include "odsgraph/graph.hpp"

namespace odsg {

/// p(node | parents). `parents` fixes the row layout: rows enumerate parent
/// configurations in row-major order (last parent varies fastest), each row
/// holds one probability per state of `node`.
struct Cpt {
  NodeId node;
  std::vector<NodeId> parents;
  std::vector<double> table;
};

/// Partial assignment of state indices.
using Assignment = std::vector<std::pair<NodeId, std::size_t>>;

/// A DAG over random and selection nodes with one CPT per node.
class DiscreteNetwork {
 public:
  /// Validates states, table shapes and row sums (1e-12). Selection nodes
  /// must be binary with states {0, 1}; decision nodes are rejected.
  DiscreteNetwork(Dag dag, std::vector<Cpt> cpts);

  const Dag& dag() const { return dag_; }
  const VariableTable& variables() const { return dag_.variables(); }
  const Cpt& cpt(NodeId v) const { return cpts_.at(v.index); }
  std::size_t cardinality(NodeId v) const { return variables()[v].cardinality(); }
  std::optional<NodeId> selection_node() const { return dag_.selection_node(); }

  /// p(v = state | parents as in `full`), `full` indexed by NodeId.
  double probability(NodeId v, std::size_t state, const std::vector<std::size_t>& full) const;
  /// The CPT row of `v` for the parent states in `full`.
  std::size_t row_index(NodeId v, const std::vector<std::size_t>& full) const;

  /// Same network with one CPT swapped (validated).
  DiscreteNetwork with_cpt(Cpt cpt) const;

 private:
  Dag dag_;
  std::vector<Cpt> cpts_;  // indexed by NodeId
};

/// Nonnegative tensor over the joint states of `scope`; first scope variable
/// varies slowest.
class Factor {
 public:
  Factor(VariableTablePtr variables, std::vector<NodeId> scope, std::vector<double> values);

  const VariableTable& variables() const { return *variables_; }
  const VariableTablePtr& variables_ptr() const { return variables_; }
  const std::vector<NodeId>& scope() const { return scope_; }
  NodeSet scope_set() const;
  const std::vector<std::size_t>& cardinalities() const { return cards_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Entries in scope order.
  double at(const std::vector<std::size_t>& states) const;
  std::size_t position(NodeId v) const;
  double total() const;
  /// Sums to one within 1e-12.
  bool normalized() const;

 private:
  VariableTablePtr variables_;
  std::vector<NodeId> scope_;
  std::vector<std::size_t> cards_;
  std::vector<double> values_;
};

/// Largest full-joint tensor the engine will enumerate.
inline constexpr std::size_t kMaxJointEntries = 10'000'000;

/// Product of all CPTs over every node, scope in NodeId order. Entries are
/// computed as the product taken in topological order of the factors.
Factor joint(const DiscreteNetwork& net);

/// Sum out everything outside `keep`. Summation visits source entries in
/// increasing index order.
Factor marginalize(const Factor& f, NodeSet keep);

/// Slice on `evidence`, drop the evidence variables, renormalize. Throws
/// zero_probability_evidence when the slice has no mass.
Factor condition(const Factor& f, const Assignment& evidence);

Factor normalize(const Factor& f);

/// Every assignment to `set` (NodeId order, last varies fastest).
std::vector<Assignment> assignments(const VariableTable& vars, NodeSet set);

std::string format(const VariableTable& vars, const Assignment& a);

struct OddsRatioReport {
  NodeId y;
  NodeId x;
  std::size_t y_category = 1;
  std::size_t x_category = 1;
  /// Reference categories are always the first declared state.
  std::size_t y_reference = 0;
  std::size_t x_reference = 0;
  Assignment context;
  double value = 1.0;
  double log_value = 0.0;
};

/// [p(y_c|x_c) p(y_0|x_0)] / [p(y_0|x_c) p(y_c|x_0)] given `context`.
/// Throws zero_cell naming the empty cell.
OddsRatioReport conditional_or(const Factor& f, NodeId y, NodeId x, const Assignment& context,
                               std::size_t y_category, std::size_t x_category);

/// Every non-reference (y, x) category pair.
std::vector<OddsRatioReport> or_collection(const Factor& f, NodeId y, NodeId x,
                                           const Assignment& context);

/// One collapsing claim: for every assignment of `full` (plus S = 1 when
/// `full_selected`), OR_YX equals the OR given the restriction of that
/// assignment to `reduced` (plus S = 1 when `reduced_selected`).
struct OrClaim {
  std::string label;
  NodeSet full;
  bool full_selected = false;
  NodeSet reduced;
  bool reduced_selected = false;
};

struct OrComparison {
  std::string claim;
  Assignment full_context;
  Assignment reduced_context;
  std::size_t y_category = 1;
  std::size_t x_category = 1;
  double full_or = 1.0;
  double reduced_or = 1.0;
  double log_difference = 0.0;
};

struct OrEqualityReport {
  std::vector<OrComparison> rows;
  double max_log_difference = 0.0;
};

/// The claims implied by a collapsibility criterion for these roles. For an
/// unsatisfied verdict the claims the roles would have licensed are used.
std::vector<OrClaim> claims_for(const RolesSpec& roles, const Verdict& verdict);

OrEqualityReport or_equality_report(const DiscreteNetwork& net, const RolesSpec& roles,
                                    const std::vector<OrClaim>& claims);
OrEqualityReport or_equality_report(const DiscreteNetwork& net, const RolesSpec& roles,
                                    const Verdict& verdict);

}  // namespace odsg
