#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odsgraph/exact.hpp"
#include "odsgraph/separation.hpp"

namespace odsg {

/// A DAG over random and selection nodes plus one intervention indicator
/// sigma with no parents and a single child, the intervened node `target`.
class InfluenceDiagram {
 public:
  /// Validates a DAG that already contains exactly one decision node.
  explicit InfluenceDiagram(Dag diagram);

  const Dag& diagram() const { return diagram_; }
  const VariableTable& variables() const { return diagram_.variables(); }
  NodeId sigma() const { return sigma_; }
  NodeId target() const { return target_; }
  /// The diagram without sigma (same variable table).
  Dag base() const { return diagram_.induced_subgraph(diagram_.nodes() - NodeSet{sigma_}); }
  std::optional<NodeId> selection_node() const { return diagram_.selection_node(); }

 private:
  Dag diagram_;
  NodeId sigma_;
  NodeId target_;
};

/// Adds sigma -> x to `g`. The new node is called "sigma" unless that name
/// is taken, then "sigma_<x>". Throws invalid_target unless x is random.
InfluenceDiagram build_influence_diagram(const Dag& g, NodeId x);

/// Result of a pair of graphical conditions.
struct ConditionCheck {
  bool holds = false;
  std::vector<CiQuery> witnesses;  ///< statements that hold
  std::vector<CiQuery> failures;   ///< statements that do not
};

/// Y ⊥⊥ sigma | (X, C) and C ⊥⊥ sigma (the latter trivial for empty C).
ConditionCheck check_sufficient_covariates(const InfluenceDiagram& id, NodeId y, NodeSet c);

struct CausalVerdict {
  bool testable = false;
  bool estimable_cor = false;
  NodeSet sufficient_set;
  NodeSet z_set;
  /// X and Y exchanged in the selection and Z conditions.
  bool swapped = false;
  std::vector<CiQuery> witnesses;
  std::vector<CiQuery> failures;
  std::vector<std::string> assumptions_flagged;
};

/// C sufficient and S ⊥⊥ X | (C, Y): OR_YX(C, S=1) estimates COR_YX(C).
CausalVerdict check_case_control_causal(const InfluenceDiagram& id, NodeId y, NodeSet c);

/// (i) S ⊥⊥ X | (Y, Z, C), (ii) Y ⊥⊥ Z | (X, C), (iii) C sufficient. The
/// variant with X and Y exchanged in (i) and (ii) is tried when the direct
/// one fails. Positivity is checked on `net` when given, else flagged.
CausalVerdict check_bias_breaking_z(const InfluenceDiagram& id, NodeId y, NodeSet c, NodeSet z,
                                    const DiscreteNetwork* net = nullptr);

/// Inclusion-minimal Z ⊆ pool passing check_bias_breaking_z, by size then name.
std::vector<NodeSet> find_z_candidates(const InfluenceDiagram& id, NodeId y, NodeSet c,
                                       NodeSet pool, std::size_t max_size);

/// Inclusion-minimal sufficient C ⊆ pool, by size then name.
std::vector<NodeSet> find_sufficient_sets(const InfluenceDiagram& id, NodeId y, NodeSet pool,
                                          std::size_t max_size);

/// Truncated factorization with p(x | pa(x)) replaced by a point mass at
/// `value`. Scope: every non-selection node in NodeId order. Throws
/// selection_under_intervention when S has children.
Factor intervention_distribution(const DiscreteNetwork& net, NodeId x, std::size_t value);

/// sum_c p(y | c, x=value) p(c) from the observational joint.
std::vector<double> standardize(const DiscreteNetwork& net, NodeId x, NodeId y, NodeSet c,
                                std::size_t value);

/// OR between p(y | context; sigma = x_category) and p(y | context; sigma =
/// x_reference). Throws positivity_violation when the context has no mass
/// under an intervention.
OddsRatioReport causal_odds_ratio(const DiscreteNetwork& net, NodeId x, NodeId y,
                                  const Assignment& context, std::size_t y_category,
                                  std::size_t x_category, std::size_t x_reference = 0);

}  // namespace odsg
