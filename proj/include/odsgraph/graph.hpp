#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "odsgraph/error.hpp"
#include "odsgraph/node_set.hpp"

namespace odsg {

enum class VariableKind { random, selection, decision };

std::string_view to_string(VariableKind kind) noexcept;

struct VariableMeta {
  std::string name;
  VariableKind kind = VariableKind::random;
  /// Empty when the variable is only used structurally (and always for
  /// decision nodes, which range over the states of their target).
  std::vector<std::string> states;

  std::size_t cardinality() const { return states.size(); }
  bool operator==(const VariableMeta&) const = default;
};

/// Name-indexed variable table shared by a graph and all graphs derived from it.
class VariableTable {
 public:
  explicit VariableTable(std::vector<VariableMeta> variables);

  std::size_t size() const { return variables_.size(); }
  const VariableMeta& operator[](NodeId id) const { return variables_.at(id.index); }
  const std::vector<VariableMeta>& all() const { return variables_; }
  NodeSet all_ids() const { return NodeSet::first(variables_.size()); }

  std::optional<NodeId> find(std::string_view name) const;
  /// Throws unknown_node.
  NodeId at(std::string_view name) const;
  NodeSet resolve(const std::vector<std::string>& names) const;

  const std::string& name(NodeId id) const { return variables_.at(id.index).name; }
  /// Members of `set` ordered by name; the canonical order for all output.
  std::vector<NodeId> sorted(NodeSet set) const;
  std::vector<std::string> names(NodeSet set) const;
  /// `{A, B, C}` style rendering, sorted by name.
  std::string format(NodeSet set) const;
  /// Lexicographic comparison of two sets by their sorted member names.
  bool name_less(NodeSet a, NodeSet b) const;

 private:
  std::vector<VariableMeta> variables_;
  std::vector<std::pair<std::string, NodeId>> by_name_;
};

using VariableTablePtr = std::shared_ptr<const VariableTable>;

/// A parsed but not yet validated graph description.
struct GraphSpec {
  enum class EdgeStyle { none, directed, undirected };

  std::vector<VariableMeta> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  EdgeStyle style = EdgeStyle::none;
  /// Optional `decision <name> target=<x>` declaration.
  std::optional<std::pair<std::string, std::string>> decision;
};

class UndirectedGraph;

class Dag {
 public:
  /// Validating constructor; edges are (parent, child).
  Dag(VariableTablePtr variables, NodeSet nodes,
      const std::vector<std::pair<NodeId, NodeId>>& edges);

  const VariableTable& variables() const { return *variables_; }
  const VariableTablePtr& variables_ptr() const { return variables_; }
  NodeSet nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  NodeSet parents(NodeId v) const { return parents_[v.index]; }
  NodeSet children(NodeId v) const { return children_[v.index]; }
  /// pa(A) excluding A.
  NodeSet parents(NodeSet a) const;
  /// ch(A) excluding A.
  NodeSet children(NodeSet a) const;
  /// an(A): nodes outside A with a directed path into A.
  NodeSet ancestors(NodeSet a) const;
  /// An(A) = an(A) u A.
  NodeSet ancestral_closure(NodeSet a) const { return ancestors(a) | a; }
  /// de(A): nodes outside A reachable from A.
  NodeSet descendants(NodeSet a) const;
  /// nd(A): everything outside A and de(A).
  NodeSet nondescendants(NodeSet a) const { return nodes_ - descendants(a) - a; }

  /// Kahn order with ties broken by name.
  std::vector<NodeId> topological_order() const;
  /// Edges sorted by (parent name, child name).
  std::vector<std::pair<NodeId, NodeId>> edges() const;
  bool has_edge(NodeId parent, NodeId child) const { return parents_[child.index].contains(parent); }

  NodeSet nodes_of_kind(VariableKind kind) const;
  /// The selection node, if the graph declares one.
  std::optional<NodeId> selection_node() const;

  Dag induced_subgraph(NodeSet a) const;
  /// Moral graph on An(A): parents with a common child in An(A) are married,
  /// directions dropped.
  UndirectedGraph moralize(NodeSet a) const;
  /// Undirected skeleton of the whole graph.
  UndirectedGraph skeleton() const;

  /// Checks that every member of `a` belongs to this graph.
  void require_nodes(NodeSet a) const;

  /// Copy with one extra variable appended to the table. Used to add a
  /// decision node; the new node has the given parents-of edges.
  Dag with_node(VariableMeta meta, const std::vector<NodeId>& children) const;

 private:
  VariableTablePtr variables_;
  NodeSet nodes_;
  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
};

class UndirectedGraph {
 public:
  UndirectedGraph(VariableTablePtr variables, NodeSet nodes,
                  const std::vector<std::pair<NodeId, NodeId>>& edges);

  const VariableTable& variables() const { return *variables_; }
  const VariableTablePtr& variables_ptr() const { return variables_; }
  NodeSet nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  NodeSet neighbors(NodeId v) const { return adjacency_[v.index]; }
  bool adjacent(NodeId a, NodeId b) const { return adjacency_[a.index].contains(b); }
  /// Each edge once as (lower-name, higher-name), sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;
  std::size_t edge_count() const;

  UndirectedGraph induced_subgraph(NodeSet a) const;
  void require_nodes(NodeSet a) const;

  bool operator==(const UndirectedGraph& other) const;

 private:
  VariableTablePtr variables_;
  NodeSet nodes_;
  std::vector<NodeSet> adjacency_;
};

/// build_dag: resolve names, reject duplicates, dangling edges and cycles.
Dag build_dag(const GraphSpec& spec);
UndirectedGraph build_undirected(const GraphSpec& spec);

/// All maximal complete sets, each member list sorted by name, the list
/// sorted lexicographically by member names. Pivoting Bron-Kerbosch.
std::vector<NodeSet> cliques(const UndirectedGraph& graph);

}  // namespace odsg
