#include "odsgraph/causal.hpp"

#include <algorithm>
#include <cmath>

#include "odsgraph/collapsibility.hpp"

namespace odsg {

InfluenceDiagram::InfluenceDiagram(Dag diagram) : diagram_(std::move(diagram)) {
  const auto& vars = diagram_.variables();
  const NodeSet decisions = diagram_.nodes_of_kind(VariableKind::decision);
  if (decisions.size() != 1) {
    fail(ErrorCode::invalid_diagram, "an influence diagram needs exactly one decision node, found " +
                                         std::to_string(decisions.size()));
  }
  sigma_ = *decisions.begin();
  if (!diagram_.parents(sigma_).empty()) {
    fail(ErrorCode::invalid_diagram, "decision node '" + vars.name(sigma_) + "' has parents " +
                                         vars.format(diagram_.parents(sigma_)));
  }
  const NodeSet ch = diagram_.children(sigma_);
  if (ch.size() != 1) {
    fail(ErrorCode::invalid_diagram, "decision node '" + vars.name(sigma_) +
                                         "' must have exactly one child, has " +
                                         vars.format(ch));
  }
  target_ = *ch.begin();
  if (vars[target_].kind != VariableKind::random) {
    fail(ErrorCode::invalid_target, "'" + vars.name(target_) + "' is not a random node");
  }
}

InfluenceDiagram build_influence_diagram(const Dag& g, NodeId x) {
  const auto& vars = g.variables();
  g.require_nodes(NodeSet{x});
  if (vars[x].kind != VariableKind::random) {
    fail(ErrorCode::invalid_target,
         "cannot intervene on " + std::string(to_string(vars[x].kind)) + " node '" + vars.name(x) + "'");
  }
  if (!g.nodes_of_kind(VariableKind::decision).empty()) {
    fail(ErrorCode::invalid_diagram, "graph already has a decision node");
  }
  std::string name = "sigma";
  if (vars.find(name)) name += "_" + vars.name(x);
  if (vars.find(name)) fail(ErrorCode::duplicate_node, "node name '" + name + "' is taken");
  return InfluenceDiagram(g.with_node(VariableMeta{name, VariableKind::decision, {}}, {x}));
}

namespace {

void require_random(const InfluenceDiagram& id, NodeId v, const char* role) {
  const auto& vars = id.variables();
  id.diagram().require_nodes(NodeSet{v});
  if (vars[v].kind != VariableKind::random) {
    fail(ErrorCode::invalid_roles, std::string(role) + " '" + vars.name(v) + "' must be a random node");
  }
}

void check_covariates(const InfluenceDiagram& id, NodeId y, NodeSet c) {
  require_random(id, y, "outcome");
  if (y == id.target()) fail(ErrorCode::invalid_roles, "outcome and exposure coincide");
  id.diagram().require_nodes(c);
  NodeSet banned{id.target(), y, id.sigma()};
  if (auto s = id.selection_node()) banned.insert(*s);
  if (c.intersects(banned)) {
    fail(ErrorCode::invalid_roles, "covariates must exclude exposure, outcome, sigma and S: " +
                                       id.variables().format(c & banned));
  }
}

void record(const Dag& g, const CiQuery& q, std::vector<CiQuery>& ok, std::vector<CiQuery>& bad,
            bool& all) {
  if (ci_holds(g, q).holds) {
    ok.push_back(q);
  } else {
    bad.push_back(q);
    all = false;
  }
}

NodeId require_selection(const InfluenceDiagram& id) {
  auto s = id.selection_node();
  if (!s) fail(ErrorCode::no_selection_node, "diagram has no selection node");
  return *s;
}

bool strictly_positive(const DiscreteNetwork& net) {
  const Factor j = joint(net);
  return std::all_of(j.values().begin(), j.values().end(), [](double p) { return p > 0.0; });
}

}  // namespace

ConditionCheck check_sufficient_covariates(const InfluenceDiagram& id, NodeId y, NodeSet c) {
  check_covariates(id, y, c);
  const NodeSet sigma{id.sigma()};
  ConditionCheck out{true, {}, {}};
  record(id.diagram(), CiQuery{NodeSet{y}, sigma, c | NodeSet{id.target()}}, out.witnesses,
         out.failures, out.holds);
  if (!c.empty()) record(id.diagram(), CiQuery{c, sigma, {}}, out.witnesses, out.failures, out.holds);
  return out;
}

CausalVerdict check_case_control_causal(const InfluenceDiagram& id, NodeId y, NodeSet c) {
  const NodeId s = require_selection(id);
  CausalVerdict v;
  v.sufficient_set = c;
  ConditionCheck suff = check_sufficient_covariates(id, y, c);
  v.witnesses = suff.witnesses;
  v.failures = suff.failures;
  bool all = suff.holds;
  record(id.diagram(), CiQuery{NodeSet{s}, NodeSet{id.target()}, c | NodeSet{y}}, v.witnesses,
         v.failures, all);
  v.testable = v.estimable_cor = all;
  return v;
}

CausalVerdict check_bias_breaking_z(const InfluenceDiagram& id, NodeId y, NodeSet c, NodeSet z,
                                    const DiscreteNetwork* net) {
  const NodeId s = require_selection(id);
  const NodeId x = id.target();
  check_covariates(id, y, c);
  check_covariates(id, y, z);
  if (z.intersects(c)) {
    fail(ErrorCode::invalid_roles, "Z and C overlap: " + id.variables().format(z & c));
  }
  const ConditionCheck suff = check_sufficient_covariates(id, y, c);

  auto attempt = [&](NodeId first, NodeId second, bool swapped) {
    CausalVerdict v;
    v.sufficient_set = c;
    v.z_set = z;
    v.swapped = swapped;
    v.witnesses = suff.witnesses;
    v.failures = suff.failures;
    bool all = suff.holds;
    record(id.diagram(), CiQuery{NodeSet{s}, NodeSet{second}, NodeSet{first} | z | c}, v.witnesses,
           v.failures, all);
    if (!z.empty()) {
      record(id.diagram(), CiQuery{NodeSet{first}, z, NodeSet{second} | c}, v.witnesses, v.failures,
             all);
    }
    v.testable = v.estimable_cor = all;
    return v;
  };
  CausalVerdict v = attempt(y, x, false);
  if (!v.testable) {
    CausalVerdict alt = attempt(x, y, true);
    if (alt.testable) v = std::move(alt);
  }
  if (net == nullptr) {
    v.assumptions_flagged.emplace_back("positivity: joint distribution assumed strictly positive");
  } else if (!strictly_positive(*net)) {
    v.assumptions_flagged.emplace_back("positivity: violated, joint distribution has zero entries");
    v.testable = v.estimable_cor = false;
  }
  return v;
}

std::vector<NodeSet> find_z_candidates(const InfluenceDiagram& id, NodeId y, NodeSet c,
                                       NodeSet pool, std::size_t max_size) {
  std::vector<NodeSet> minimal;
  for (NodeSet z : subsets_by_size(id.variables(), pool, max_size)) {
    if (std::any_of(minimal.begin(), minimal.end(), [z](NodeSet m) { return z.contains(m); })) {
      continue;
    }
    if (check_bias_breaking_z(id, y, c, z).testable) minimal.push_back(z);
  }
  return minimal;
}

std::vector<NodeSet> find_sufficient_sets(const InfluenceDiagram& id, NodeId y, NodeSet pool,
                                          std::size_t max_size) {
  std::vector<NodeSet> minimal;
  for (NodeSet c : subsets_by_size(id.variables(), pool, max_size)) {
    if (std::any_of(minimal.begin(), minimal.end(), [c](NodeSet m) { return c.contains(m); })) {
      continue;
    }
    if (check_sufficient_covariates(id, y, c).holds) minimal.push_back(c);
  }
  return minimal;
}

// ---------------------------------------------------------------------------
// Numeric side

Factor intervention_distribution(const DiscreteNetwork& net, NodeId x, std::size_t value) {
  const auto& vars = net.variables();
  net.dag().require_nodes(NodeSet{x});
  if (vars[x].kind != VariableKind::random) {
    fail(ErrorCode::invalid_target, "cannot intervene on '" + vars.name(x) + "'");
  }
  if (value >= net.cardinality(x)) {
    fail(ErrorCode::unknown_state, "state " + std::to_string(value) + " out of range for '" +
                                       vars.name(x) + "'");
  }
  NodeSet kept = net.dag().nodes();
  if (auto s = net.selection_node()) {
    if (!net.dag().children(*s).empty()) {
      fail(ErrorCode::selection_under_intervention,
           "selection node '" + vars.name(*s) +
               "' has children; its distribution under intervention is unspecified");
    }
    kept.erase(*s);
  }
  std::vector<NodeId> scope(kept.begin(), kept.end());
  std::vector<std::size_t> cards;
  std::size_t size = 1;
  for (NodeId v : scope) {
    cards.push_back(net.cardinality(v));
    if (size > kMaxJointEntries / cards.back()) {
      fail(ErrorCode::state_space_too_large, "intervened state space exceeds the cap");
    }
    size *= cards.back();
  }
  std::vector<NodeId> order;
  for (NodeId v : net.dag().topological_order()) {
    if (kept.contains(v) && v != x) order.push_back(v);
  }
  std::vector<double> values(size, 0.0);
  std::vector<std::size_t> states(scope.size(), 0);
  std::vector<std::size_t> full(vars.size(), 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    for (std::size_t i = 0; i < scope.size(); ++i) full[scope[i].index] = states[i];
    if (full[x.index] == value) {
      double p = 1.0;
      for (NodeId v : order) p *= net.probability(v, full[v.index], full);
      values[idx] = p;
    }
    for (std::size_t i = states.size(); i-- > 0;) {
      if (++states[i] < cards[i]) break;
      states[i] = 0;
    }
  }
  return Factor(net.dag().variables_ptr(), std::move(scope), std::move(values));
}

std::vector<double> standardize(const DiscreteNetwork& net, NodeId x, NodeId y, NodeSet c,
                                std::size_t value) {
  const auto& vars = net.variables();
  if (value >= net.cardinality(x)) fail(ErrorCode::unknown_state, "exposure value out of range");
  if (c.contains(x) || c.contains(y) || x == y) {
    fail(ErrorCode::invalid_roles, "covariates must exclude exposure and outcome");
  }
  const Factor m = marginalize(joint(net), c | NodeSet{x, y});
  const Factor pc = marginalize(m, c);
  std::vector<double> out(net.cardinality(y), 0.0);
  for (const Assignment& a : assignments(vars, c)) {
    std::vector<std::size_t> idx;
    for (auto [v, st] : a) idx.push_back(st);
    const double mass = c.empty() ? 1.0 : pc.at(idx);
    if (mass == 0.0) continue;
    Assignment ev = a;
    ev.emplace_back(x, value);
    Factor py = [&] {
      try {
        return condition(m, ev);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::zero_probability_evidence) throw;
        fail(ErrorCode::positivity_violation,
             "p(" + vars.name(x) + "=" + vars[x].states[value] + " | " + format(vars, a) +
                 ") = 0 with positive covariate mass");
      }
    }();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += py.values()[k] * mass;
  }
  return out;
}

OddsRatioReport causal_odds_ratio(const DiscreteNetwork& net, NodeId x, NodeId y,
                                  const Assignment& context, std::size_t y_category,
                                  std::size_t x_category, std::size_t x_reference) {
  const auto& vars = net.variables();
  if (y_category >= net.cardinality(y)) fail(ErrorCode::unknown_state, "outcome category out of range");
  auto outcome_given = [&](std::size_t value) {
    const Factor d = intervention_distribution(net, x, value);
    Factor given = d;
    try {
      given = marginalize(condition(d, context), NodeSet{y});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::zero_probability_evidence) throw;
      fail(ErrorCode::positivity_violation, "context " + format(vars, context) +
                                                " has probability zero when " + vars.name(x) +
                                                " is set to " + vars[x].states[value]);
    }
    return given.values();
  };
  const auto p1 = outcome_given(x_category);
  const auto p0 = outcome_given(x_reference);
  for (double p : {p1[y_category], p1[0], p0[y_category], p0[0]}) {
    if (!(p > 0.0)) {
      fail(ErrorCode::zero_cell, "zero interventional probability for '" + vars.name(y) + "' given " +
                                     format(vars, context));
    }
  }
  OddsRatioReport r;
  r.y = y;
  r.x = x;
  r.y_category = y_category;
  r.x_category = x_category;
  r.x_reference = x_reference;
  r.context = context;
  r.value = (p1[y_category] * p0[0]) / (p1[0] * p0[y_category]);
  r.log_value = std::log(r.value);
  return r;
}

}  // namespace odsg
