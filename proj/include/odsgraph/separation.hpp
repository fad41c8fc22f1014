#pragma once

#include <string>
#include <variant>
#include <vector>

#include "odsgraph/graph.hpp"

namespace odsg {

/// A ⊥⊥ B | Z. A and B nonempty, all three pairwise disjoint.
struct CiQuery {
  NodeSet a;
  NodeSet b;
  NodeSet z;

  bool operator==(const CiQuery&) const = default;
};

/// Throws overlapping_sets / invalid_argument when the query is malformed.
void validate(const CiQuery& q);

std::string format(const VariableTable& vars, const CiQuery& q);

enum class CiMethod { moralization, d_separation, undirected };

struct CiVerdict {
  bool holds = false;
  CiMethod method = CiMethod::moralization;
  /// For holds == false: a connecting path in the graph that was searched
  /// (the moral graph for DAG queries), from a node of A to a node of B.
  std::vector<NodeId> witness;
};

/// Plain graph separation: every path from A to B meets Z.
bool u_separated(const UndirectedGraph& graph, const CiQuery& q);

/// Separation with a connecting path when it fails.
CiVerdict u_separation_verdict(const UndirectedGraph& graph, const CiQuery& q);

/// Moralization criterion: separation in the moral graph of An(A u B u Z).
/// Decision nodes take part like any other node.
CiVerdict ci_holds(const Dag& graph, const CiQuery& q);

/// Active-trail reachability (Bayes-ball). Independent of the moral-graph
/// route; used to cross-check it.
bool d_separated(const Dag& graph, const CiQuery& q);

/// Largest graph accepted by all_implied_cis.
inline constexpr std::size_t kMaxEnumerationNodes = 16;

/// Every pairwise statement a ⊥⊥ b | Z (singletons, a before b by name,
/// |Z| <= max_set_size) implied by the graph. Ordered by (a, b, |Z|, Z).
std::vector<CiQuery> all_implied_cis(const Dag& graph, std::size_t max_set_size);

/// Graph-agnostic independence model: a DAG read through moralization or
/// an undirected graph read through separation. Collapsibility criteria are
/// phrased against this so that both graph kinds are accepted.
class IndependenceModel {
 public:
  IndependenceModel(const Dag& dag) : graph_(&dag) {}                // NOLINT
  IndependenceModel(const UndirectedGraph& ug) : graph_(&ug) {}      // NOLINT

  bool holds(const CiQuery& q) const;
  bool holds(NodeSet a, NodeSet b, NodeSet z) const { return holds(CiQuery{a, b, z}); }

  const VariableTable& variables() const;
  NodeSet nodes() const;
  void require_nodes(NodeSet a) const;
  std::optional<NodeId> selection_node() const;
  const Dag* dag() const;

 private:
  std::variant<const Dag*, const UndirectedGraph*> graph_;
};

}  // namespace odsg
