#include "random_models.hpp"

#include <algorithm>
#include <numeric>

namespace odsg::testing {

Dag dag_from(const std::string& text) { return build_dag(parse_graph(text)); }

UndirectedGraph ug_from(const std::string& text) { return build_undirected(parse_graph(text)); }

DiscreteNetwork network_from(const std::string& graph, const std::string& cpts) {
  return load_network(parse_graph(graph), cpts);
}

std::size_t below(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) % n;
}

Dag random_dag(Rng& rng, const DagShape& shape) {
  std::vector<VariableMeta> metas;
  for (std::size_t i = 0; i < shape.nodes; ++i) {
    const std::size_t k = shape.min_states + below(rng, shape.max_states - shape.min_states + 1);
    VariableMeta m{"V" + std::to_string(i), VariableKind::random, {}};
    for (std::size_t s = 0; s < k; ++s) m.states.push_back(std::to_string(s));
    metas.push_back(std::move(m));
  }
  if (shape.selection) metas.push_back(VariableMeta{"S", VariableKind::selection, {"0", "1"}});
  auto vars = std::make_shared<const VariableTable>(metas);

  std::vector<std::uint32_t> order(shape.nodes);
  std::iota(order.begin(), order.end(), 0U);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[below(rng, i)]);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (rng.uniform() < shape.edge_probability) edges.emplace_back(NodeId{order[i]}, NodeId{order[j]});
    }
  }
  if (shape.selection) {
    const NodeId s{static_cast<std::uint32_t>(shape.nodes)};
    for (std::size_t i = 0; i < shape.nodes; ++i) {
      if (rng.uniform() < shape.edge_probability) edges.emplace_back(NodeId{static_cast<std::uint32_t>(i)}, s);
    }
  }
  return Dag(vars, vars->all_ids(), edges);
}

std::vector<double> random_grid_row(Rng& rng, std::size_t k, std::size_t grid) {
  // k-1 distinct cut points in 1..grid-1 give a composition with positive parts.
  std::vector<std::size_t> cuts;
  while (cuts.size() + 1 < k) {
    const std::size_t c = 1 + below(rng, grid - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(grid);
  std::vector<double> row;
  std::size_t prev = 0;
  for (std::size_t c : cuts) {
    row.push_back(static_cast<double>(c - prev) / static_cast<double>(grid));
    prev = c;
  }
  return row;
}

namespace {

Cpt random_cpt(Rng& rng, const Dag& dag, NodeId v, std::size_t grid) {
  const auto& vars = dag.variables();
  Cpt cpt{v, {}, {}};
  std::size_t rows = 1;
  for (NodeId p : dag.parents(v)) {
    cpt.parents.push_back(p);
    rows *= vars[p].cardinality();
  }
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = random_grid_row(rng, vars[v].cardinality(), grid);
    cpt.table.insert(cpt.table.end(), row.begin(), row.end());
  }
  return cpt;
}

}  // namespace

DiscreteNetwork random_network(Rng& rng, const Dag& dag, std::size_t grid) {
  std::vector<Cpt> cpts;
  for (NodeId v : dag.nodes()) cpts.push_back(random_cpt(rng, dag, v, grid));
  return DiscreteNetwork(dag, std::move(cpts));
}

DiscreteNetwork without_dependence(Rng& rng, const DiscreteNetwork& net, NodeId node, NodeId ignored,
                                   std::size_t grid) {
  const auto& vars = net.variables();
  const Cpt& old = net.cpt(node);
  Cpt cpt{node, old.parents, {}};
  const std::size_t k = vars[node].cardinality();
  std::vector<std::size_t> cards;
  for (NodeId p : old.parents) cards.push_back(vars[p].cardinality());
  std::size_t rows = 1;
  for (std::size_t c : cards) rows *= c;
  // One row per configuration of the parents other than `ignored`.
  std::vector<std::vector<double>> by_rest;
  std::vector<std::size_t> states(cards.size(), 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rest = 0;
    for (std::size_t i = 0; i < cards.size(); ++i) {
      if (old.parents[i] != ignored) rest = rest * cards[i] + states[i];
    }
    if (rest >= by_rest.size()) by_rest.resize(rest + 1);
    if (by_rest[rest].empty()) by_rest[rest] = random_grid_row(rng, k, grid);
    cpt.table.insert(cpt.table.end(), by_rest[rest].begin(), by_rest[rest].end());
    for (std::size_t i = states.size(); i-- > 0;) {
      if (++states[i] < cards[i]) break;
      states[i] = 0;
    }
  }
  return net.with_cpt(std::move(cpt));
}

}  // namespace odsg::testing
