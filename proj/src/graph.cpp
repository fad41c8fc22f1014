#include "odsgraph/graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace odsg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::cycle_detected: return "CycleDetected";
    case ErrorCode::dangling_edge: return "DanglingEdge";
    case ErrorCode::duplicate_node: return "DuplicateNode";
    case ErrorCode::unknown_node: return "UnknownNode";
    case ErrorCode::overlapping_sets: return "OverlappingSets";
    case ErrorCode::graph_too_large: return "GraphTooLarge";
    case ErrorCode::invalid_roles: return "InvalidRoles";
    case ErrorCode::no_selection_node: return "NoSelectionNode";
    case ErrorCode::search_cap_exceeded: return "SearchCapExceeded";
    case ErrorCode::invalid_target: return "InvalidTarget";
    case ErrorCode::invalid_diagram: return "InvalidDiagram";
    case ErrorCode::invalid_network: return "InvalidNetwork";
    case ErrorCode::unknown_state: return "UnknownState";
    case ErrorCode::positivity_violation: return "PositivityViolation";
    case ErrorCode::zero_cell: return "ZeroCell";
    case ErrorCode::state_space_too_large: return "StateSpaceTooLarge";
    case ErrorCode::zero_probability_evidence: return "ZeroProbabilityEvidence";
    case ErrorCode::selection_under_intervention: return "SelectionUnderIntervention";
    case ErrorCode::selection_too_rare: return "SelectionTooRare";
    case ErrorCode::not_converged: return "NotConverged";
    case ErrorCode::degenerate_marginal: return "DegenerateMarginal";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view to_string(VariableKind kind) noexcept {
  switch (kind) {
    case VariableKind::random: return "random";
    case VariableKind::selection: return "selection";
    case VariableKind::decision: return "decision";
  }
  return "random";
}

// ---------------------------------------------------------------------------
// VariableTable

VariableTable::VariableTable(std::vector<VariableMeta> variables)
    : variables_(std::move(variables)) {
  if (variables_.size() > kMaxNodes) {
    fail(ErrorCode::graph_too_large,
         "graph has " + std::to_string(variables_.size()) + " nodes; the limit is " +
             std::to_string(kMaxNodes));
  }
  by_name_.reserve(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const VariableMeta& v = variables_[i];
    if (v.name.empty()) fail(ErrorCode::invalid_argument, "empty node name");
    if (v.kind == VariableKind::decision && !v.states.empty()) {
      fail(ErrorCode::invalid_argument, "decision node '" + v.name + "' cannot declare states");
    }
    if (!v.states.empty() && v.states.size() < 2) {
      fail(ErrorCode::invalid_argument, "node '" + v.name + "' needs at least two states");
    }
    by_name_.emplace_back(v.name, NodeId{static_cast<std::uint32_t>(i)});
  }
  std::sort(by_name_.begin(), by_name_.end());
  auto dup = std::adjacent_find(by_name_.begin(), by_name_.end(),
                                [](const auto& a, const auto& b) { return a.first == b.first; });
  if (dup != by_name_.end()) fail(ErrorCode::duplicate_node, "duplicate node '" + dup->first + "'");
}

std::optional<NodeId> VariableTable::find(std::string_view name) const {
  auto it = std::lower_bound(by_name_.begin(), by_name_.end(), name,
                             [](const auto& entry, std::string_view n) { return entry.first < n; });
  if (it == by_name_.end() || it->first != name) return std::nullopt;
  return it->second;
}

NodeId VariableTable::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  fail(ErrorCode::unknown_node, "unknown node '" + std::string(name) + "'");
}

NodeSet VariableTable::resolve(const std::vector<std::string>& names) const {
  NodeSet out;
  for (const auto& n : names) out.insert(at(n));
  return out;
}

std::vector<NodeId> VariableTable::sorted(NodeSet set) const {
  std::vector<NodeId> out(set.begin(), set.end());
  std::sort(out.begin(), out.end(), [this](NodeId a, NodeId b) { return name(a) < name(b); });
  return out;
}

std::vector<std::string> VariableTable::names(NodeSet set) const {
  std::vector<std::string> out;
  for (NodeId id : sorted(set)) out.push_back(name(id));
  return out;
}

std::string VariableTable::format(NodeSet set) const {
  std::string out = "{";
  bool first = true;
  for (NodeId id : sorted(set)) {
    if (!first) out += ", ";
    out += name(id);
    first = false;
  }
  return out + "}";
}

bool VariableTable::name_less(NodeSet a, NodeSet b) const {
  auto na = names(a);
  auto nb = names(b);
  return std::lexicographical_compare(na.begin(), na.end(), nb.begin(), nb.end());
}

// ---------------------------------------------------------------------------
// Dag

namespace {

std::string describe_cycle(const VariableTable& vars, NodeSet nodes,
                           const std::vector<NodeSet>& children) {
  // Colour DFS; the first back edge closes a cycle we can print.
  enum : std::uint8_t { white, grey, black };
  std::vector<std::uint8_t> colour(vars.size(), white);
  std::vector<NodeId> stack;
  std::string found;
  std::function<bool(NodeId)> visit = [&](NodeId v) {
    colour[v.index] = grey;
    stack.push_back(v);
    for (NodeId c : vars.sorted(children[v.index])) {
      if (colour[c.index] == grey) {
        auto start = std::find(stack.begin(), stack.end(), c);
        for (auto it = start; it != stack.end(); ++it) found += vars.name(*it) + " -> ";
        found += vars.name(c);
        return true;
      }
      if (colour[c.index] == white && visit(c)) return true;
    }
    stack.pop_back();
    colour[v.index] = black;
    return false;
  };
  for (NodeId v : vars.sorted(nodes)) {
    if (colour[v.index] == white && visit(v)) break;
  }
  return found;
}

}  // namespace

Dag::Dag(VariableTablePtr variables, NodeSet nodes,
         const std::vector<std::pair<NodeId, NodeId>>& edges)
    : variables_(std::move(variables)),
      nodes_(nodes),
      parents_(variables_->size()),
      children_(variables_->size()) {
  if (!variables_->all_ids().contains(nodes_)) {
    fail(ErrorCode::unknown_node, "node set exceeds variable table");
  }
  for (auto [p, c] : edges) {
    if (!nodes_.contains(p) || !nodes_.contains(c)) {
      fail(ErrorCode::dangling_edge, "edge references a node outside the graph");
    }
    parents_[c.index].insert(p);
    children_[p.index].insert(c);
  }
  for (NodeId v : nodes_) {
    if ((*variables_)[v].kind == VariableKind::decision && !parents_[v.index].empty()) {
      fail(ErrorCode::invalid_diagram,
           "decision node '" + variables_->name(v) + "' must not have parents");
    }
  }
  // Acyclicity: Kahn's algorithm must consume every node.
  if (topological_order().size() != nodes_.size()) {
    fail(ErrorCode::cycle_detected,
         "graph contains a directed cycle: " + describe_cycle(*variables_, nodes_, children_));
  }
}

NodeSet Dag::parents(NodeSet a) const {
  NodeSet out;
  for (NodeId v : a) out |= parents_[v.index];
  return out - a;
}

NodeSet Dag::children(NodeSet a) const {
  NodeSet out;
  for (NodeId v : a) out |= children_[v.index];
  return out - a;
}

NodeSet Dag::ancestors(NodeSet a) const {
  require_nodes(a);
  NodeSet seen = a;
  NodeSet frontier = a;
  while (!frontier.empty()) {
    NodeSet next;
    for (NodeId v : frontier) next |= parents_[v.index];
    frontier = next - seen;
    seen |= frontier;
  }
  return seen - a;
}

NodeSet Dag::descendants(NodeSet a) const {
  require_nodes(a);
  NodeSet seen = a;
  NodeSet frontier = a;
  while (!frontier.empty()) {
    NodeSet next;
    for (NodeId v : frontier) next |= children_[v.index];
    frontier = next - seen;
    seen |= frontier;
  }
  return seen - a;
}

std::vector<NodeId> Dag::topological_order() const {
  std::vector<NodeId> order;
  NodeSet placed;
  while (order.size() < nodes_.size()) {
    NodeSet ready;
    for (NodeId v : nodes_ - placed) {
      if (placed.contains(parents_[v.index])) ready.insert(v);
    }
    if (ready.empty()) break;  // cycle
    for (NodeId v : variables_->sorted(ready)) order.push_back(v);
    placed |= ready;
  }
  return order;
}

std::vector<std::pair<NodeId, NodeId>> Dag::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId p : variables_->sorted(nodes_)) {
    for (NodeId c : variables_->sorted(children_[p.index])) out.emplace_back(p, c);
  }
  return out;
}

NodeSet Dag::nodes_of_kind(VariableKind kind) const {
  NodeSet out;
  for (NodeId v : nodes_) {
    if ((*variables_)[v].kind == kind) out.insert(v);
  }
  return out;
}

std::optional<NodeId> Dag::selection_node() const {
  NodeSet sel = nodes_of_kind(VariableKind::selection);
  if (sel.empty()) return std::nullopt;
  if (sel.size() > 1) {
    fail(ErrorCode::invalid_roles, "graph declares more than one selection node: " +
                                       variables_->format(sel));
  }
  return *sel.begin();
}

Dag Dag::induced_subgraph(NodeSet a) const {
  require_nodes(a);
  std::vector<std::pair<NodeId, NodeId>> kept;
  for (auto [p, c] : edges()) {
    if (a.contains(p) && a.contains(c)) kept.emplace_back(p, c);
  }
  return Dag(variables_, a, kept);
}

UndirectedGraph Dag::moralize(NodeSet a) const {
  const NodeSet anc = ancestral_closure(a);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId child : anc) {
    // Ancestral sets are closed under parents, so every parent is inside.
    const std::vector<NodeId> pa(parents_[child.index].begin(), parents_[child.index].end());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      edges.emplace_back(pa[i], child);
      for (std::size_t j = i + 1; j < pa.size(); ++j) edges.emplace_back(pa[i], pa[j]);
    }
  }
  return UndirectedGraph(variables_, anc, edges);
}

UndirectedGraph Dag::skeleton() const {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (auto [p, c] : edges()) e.emplace_back(p, c);
  return UndirectedGraph(variables_, nodes_, e);
}

void Dag::require_nodes(NodeSet a) const {
  if (!nodes_.contains(a)) {
    fail(ErrorCode::unknown_node, "nodes not in graph: " + variables_->format(a - nodes_));
  }
}

Dag Dag::with_node(VariableMeta meta, const std::vector<NodeId>& children) const {
  std::vector<VariableMeta> vars = variables_->all();
  vars.push_back(std::move(meta));
  auto table = std::make_shared<const VariableTable>(std::move(vars));
  const NodeId added{static_cast<std::uint32_t>(table->size() - 1)};
  auto e = edges();
  for (NodeId c : children) e.emplace_back(added, c);
  NodeSet nodes = nodes_;
  nodes.insert(added);
  return Dag(table, nodes, e);
}

// ---------------------------------------------------------------------------
// UndirectedGraph

UndirectedGraph::UndirectedGraph(VariableTablePtr variables, NodeSet nodes,
                                 const std::vector<std::pair<NodeId, NodeId>>& edges)
    : variables_(std::move(variables)), nodes_(nodes), adjacency_(variables_->size()) {
  if (!variables_->all_ids().contains(nodes_)) {
    fail(ErrorCode::unknown_node, "node set exceeds variable table");
  }
  for (auto [a, b] : edges) {
    if (!nodes_.contains(a) || !nodes_.contains(b)) {
      fail(ErrorCode::dangling_edge, "edge references a node outside the graph");
    }
    if (a == b) {
      fail(ErrorCode::invalid_argument, "self-loop on '" + variables_->name(a) + "'");
    }
    adjacency_[a.index].insert(b);
    adjacency_[b.index].insert(a);
  }
}

std::vector<std::pair<NodeId, NodeId>> UndirectedGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId a : variables_->sorted(nodes_)) {
    for (NodeId b : variables_->sorted(adjacency_[a.index])) {
      if (variables_->name(a) < variables_->name(b)) out.emplace_back(a, b);
    }
  }
  return out;
}

std::size_t UndirectedGraph::edge_count() const {
  std::size_t twice = 0;
  for (NodeId v : nodes_) twice += adjacency_[v.index].size();
  return twice / 2;
}

UndirectedGraph UndirectedGraph::induced_subgraph(NodeSet a) const {
  require_nodes(a);
  std::vector<std::pair<NodeId, NodeId>> kept;
  for (auto [x, y] : edges()) {
    if (a.contains(x) && a.contains(y)) kept.emplace_back(x, y);
  }
  return UndirectedGraph(variables_, a, kept);
}

void UndirectedGraph::require_nodes(NodeSet a) const {
  if (!nodes_.contains(a)) {
    fail(ErrorCode::unknown_node, "nodes not in graph: " + variables_->format(a - nodes_));
  }
}

bool UndirectedGraph::operator==(const UndirectedGraph& other) const {
  if (variables_->all() != other.variables_->all() || nodes_ != other.nodes_) return false;
  for (NodeId v : nodes_) {
    if (adjacency_[v.index] != other.adjacency_[v.index]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

std::vector<std::pair<NodeId, NodeId>> resolve_edges(const VariableTable& vars,
                                                     const GraphSpec& spec) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& [a, b] : spec.edges) {
    auto pa = vars.find(a);
    auto pb = vars.find(b);
    if (!pa || !pb) {
      fail(ErrorCode::dangling_edge,
           "edge " + a + " - " + b + " references undeclared node '" + (pa ? b : a) + "'");
    }
    out.emplace_back(*pa, *pb);
  }
  return out;
}

}  // namespace

Dag build_dag(const GraphSpec& spec) {
  if (spec.style == GraphSpec::EdgeStyle::undirected) {
    fail(ErrorCode::invalid_argument, "graph description is undirected, expected a DAG");
  }
  auto vars = std::make_shared<const VariableTable>(spec.nodes);
  auto edges = resolve_edges(*vars, spec);
  return Dag(vars, vars->all_ids(), edges);
}

UndirectedGraph build_undirected(const GraphSpec& spec) {
  if (spec.style == GraphSpec::EdgeStyle::directed) {
    fail(ErrorCode::invalid_argument, "graph description is directed, expected undirected");
  }
  auto vars = std::make_shared<const VariableTable>(spec.nodes);
  auto edges = resolve_edges(*vars, spec);
  return UndirectedGraph(vars, vars->all_ids(), edges);
}

// ---------------------------------------------------------------------------
// Cliques

std::vector<NodeSet> cliques(const UndirectedGraph& graph) {
  std::vector<NodeSet> found;
  if (graph.nodes().empty()) return found;
  std::function<void(NodeSet, NodeSet, NodeSet)> expand = [&](NodeSet r, NodeSet p, NodeSet x) {
    if (p.empty() && x.empty()) {
      found.push_back(r);
      return;
    }
    // Tomita pivot: the vertex of P u X with most neighbours in P.
    NodeId pivot{};
    std::size_t best = 0;
    bool have = false;
    for (NodeId u : p | x) {
      std::size_t k = (graph.neighbors(u) & p).size();
      if (!have || k > best) {
        pivot = u;
        best = k;
        have = true;
      }
    }
    for (NodeId v : p - graph.neighbors(pivot)) {
      const NodeSet nv = graph.neighbors(v);
      expand(r | NodeSet{v}, p & nv, x & nv);
      p.erase(v);
      x.insert(v);
    }
  };
  expand(NodeSet{}, graph.nodes(), NodeSet{});
  const auto& vars = graph.variables();
  std::sort(found.begin(), found.end(),
            [&vars](NodeSet a, NodeSet b) { return vars.name_less(a, b); });
  return found;
}

}  // namespace odsg
