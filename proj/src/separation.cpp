#include "odsgraph/separation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <deque>

namespace odsg {

void validate(const CiQuery& q) {
  if (q.a.empty() || q.b.empty()) {
    fail(ErrorCode::invalid_argument, "independence query needs nonempty A and B");
  }
  if (q.a.intersects(q.b) || q.a.intersects(q.z) || q.b.intersects(q.z)) {
    fail(ErrorCode::overlapping_sets, "A, B and Z must be pairwise disjoint");
  }
}

std::string format(const VariableTable& vars, const CiQuery& q) {
  std::string out = vars.format(q.a) + " _||_ " + vars.format(q.b);
  if (!q.z.empty()) out += " | " + vars.format(q.z);
  return out;
}

CiVerdict u_separation_verdict(const UndirectedGraph& graph, const CiQuery& q) {
  validate(q);
  graph.require_nodes(q.a | q.b | q.z);
  const auto& vars = graph.variables();

  // BFS from A avoiding Z, remembering predecessors for the witness.
  std::vector<int> pred(vars.size(), -1);
  NodeSet seen = q.a;
  std::deque<NodeId> queue;
  for (NodeId s : vars.sorted(q.a)) queue.push_back(s);
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    if (q.b.contains(v)) {
      CiVerdict verdict{false, CiMethod::undirected, {}};
      for (int cur = static_cast<int>(v.index); cur >= 0; cur = pred[cur]) {
        verdict.witness.push_back(NodeId{static_cast<std::uint32_t>(cur)});
      }
      std::reverse(verdict.witness.begin(), verdict.witness.end());
      return verdict;
    }
    for (NodeId w : vars.sorted(graph.neighbors(v) - seen - q.z)) {
      seen.insert(w);
      pred[w.index] = static_cast<int>(v.index);
      queue.push_back(w);
    }
  }
  return CiVerdict{true, CiMethod::undirected, {}};
}

bool u_separated(const UndirectedGraph& graph, const CiQuery& q) {
  return u_separation_verdict(graph, q).holds;
}

CiVerdict ci_holds(const Dag& graph, const CiQuery& q) {
  validate(q);
  graph.require_nodes(q.a | q.b | q.z);
  CiVerdict verdict = u_separation_verdict(graph.moralize(q.a | q.b | q.z), q);
  verdict.method = CiMethod::moralization;
  return verdict;
}

bool d_separated(const Dag& graph, const CiQuery& q) {
  validate(q);
  graph.require_nodes(q.a | q.b | q.z);

  // Nodes whose descendants include an observed node activate v-structures.
  const NodeSet activating = graph.ancestral_closure(q.z);
  const std::size_t n = graph.variables().size();
  // visited[v][0]: reached travelling up (from a child),
  // visited[v][1]: reached travelling down (from a parent).
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::vector<std::pair<NodeId, int>> stack;
  for (NodeId a : q.a) stack.emplace_back(a, 0);

  while (!stack.empty()) {
    auto [v, dir] = stack.back();
    stack.pop_back();
    if (visited[v.index][dir]) continue;
    visited[v.index][dir] = true;
    const bool observed = q.z.contains(v);
    if (!observed && q.b.contains(v)) return false;

    if (dir == 0) {
      if (!observed) {
        for (NodeId p : graph.parents(v)) stack.emplace_back(p, 0);
        for (NodeId c : graph.children(v)) stack.emplace_back(c, 1);
      }
    } else {
      if (!observed) {
        for (NodeId c : graph.children(v)) stack.emplace_back(c, 1);
      }
      if (activating.contains(v)) {
        for (NodeId p : graph.parents(v)) stack.emplace_back(p, 0);
      }
    }
  }
  return true;
}

std::vector<CiQuery> all_implied_cis(const Dag& graph, std::size_t max_set_size) {
  if (graph.size() > kMaxEnumerationNodes) {
    fail(ErrorCode::graph_too_large,
         "all_implied_cis enumerates at most " + std::to_string(kMaxEnumerationNodes) +
             " nodes; graph has " + std::to_string(graph.size()));
  }
  const auto& vars = graph.variables();
  const std::vector<NodeId> order = vars.sorted(graph.nodes());
  std::vector<CiQuery> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const NodeSet a{order[i]};
      const NodeSet b{order[j]};
      const std::vector<NodeId> rest = vars.sorted(graph.nodes() - a - b);
      std::vector<NodeSet> subsets;
      const std::size_t m = rest.size();
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > max_set_size) continue;
        NodeSet z;
        for (std::size_t k = 0; k < m; ++k) {
          if ((mask >> k) & 1U) z.insert(rest[k]);
        }
        subsets.push_back(z);
      }
      std::sort(subsets.begin(), subsets.end(), [&vars](NodeSet x, NodeSet y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return vars.name_less(x, y);
      });
      for (NodeSet z : subsets) {
        CiQuery q{a, b, z};
        if (ci_holds(graph, q).holds) out.push_back(q);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

bool IndependenceModel::holds(const CiQuery& q) const {
  if (auto d = std::get_if<const Dag*>(&graph_)) return ci_holds(**d, q).holds;
  return u_separated(*std::get<const UndirectedGraph*>(graph_), q);
}

const VariableTable& IndependenceModel::variables() const {
  return std::visit([](auto* g) -> const VariableTable& { return g->variables(); }, graph_);
}

NodeSet IndependenceModel::nodes() const {
  return std::visit([](auto* g) { return g->nodes(); }, graph_);
}

void IndependenceModel::require_nodes(NodeSet a) const {
  std::visit([a](auto* g) { g->require_nodes(a); }, graph_);
}

std::optional<NodeId> IndependenceModel::selection_node() const {
  NodeSet sel;
  const auto& vars = variables();
  for (NodeId v : nodes()) {
    if (vars[v].kind == VariableKind::selection) sel.insert(v);
  }
  if (sel.empty()) return std::nullopt;
  if (sel.size() > 1) {
    fail(ErrorCode::invalid_roles, "graph declares more than one selection node: " + vars.format(sel));
  }
  return *sel.begin();
}

const Dag* IndependenceModel::dag() const {
  if (auto d = std::get_if<const Dag*>(&graph_)) return *d;
  return nullptr;
}

}  // namespace odsg
