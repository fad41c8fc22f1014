#include "odsgraph/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace odsg {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::size_t checked_product(const std::vector<std::size_t>& cards, std::size_t cap,
                            const std::string& what) {
  std::size_t total = 1;
  for (std::size_t c : cards) {
    if (c != 0 && total > cap / c) {
      fail(ErrorCode::state_space_too_large,
           what + " exceeds the state-space cap of " + std::to_string(cap) + " entries");
    }
    total *= c;
  }
  return total;
}

// Odometer increment over `cards`, last position fastest. Returns false on wrap.
bool advance(std::vector<std::size_t>& states, const std::vector<std::size_t>& cards) {
  for (std::size_t i = states.size(); i-- > 0;) {
    if (++states[i] < cards[i]) return true;
    states[i] = 0;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteNetwork

DiscreteNetwork::DiscreteNetwork(Dag dag, std::vector<Cpt> cpts)
    : dag_(std::move(dag)), cpts_(dag_.variables().size()) {
  const auto& vars = dag_.variables();
  std::vector<bool> seen(vars.size(), false);
  for (Cpt& cpt : cpts) {
    if (!dag_.nodes().contains(cpt.node)) {
      fail(ErrorCode::invalid_network, "CPT for a node outside the graph");
    }
    if (seen[cpt.node.index]) {
      fail(ErrorCode::invalid_network, "two CPTs for '" + vars.name(cpt.node) + "'");
    }
    seen[cpt.node.index] = true;
    cpts_[cpt.node.index] = std::move(cpt);
  }
  for (NodeId v : dag_.nodes()) {
    const VariableMeta& meta = vars[v];
    if (meta.kind == VariableKind::decision) {
      fail(ErrorCode::invalid_network,
           "decision node '" + meta.name + "' cannot be part of a discrete network");
    }
    if (meta.states.empty()) {
      fail(ErrorCode::invalid_network, "node '" + meta.name + "' has no declared states");
    }
    if (meta.kind == VariableKind::selection &&
        meta.states != std::vector<std::string>{"0", "1"}) {
      fail(ErrorCode::invalid_network,
           "selection node '" + meta.name + "' must have states 0,1");
    }
    if (!seen[v.index]) fail(ErrorCode::invalid_network, "missing CPT for '" + meta.name + "'");
    const Cpt& cpt = cpts_[v.index];
    NodeSet declared;
    for (NodeId p : cpt.parents) declared.insert(p);
    if (declared != dag_.parents(v) || declared.size() != cpt.parents.size()) {
      fail(ErrorCode::invalid_network, "CPT parents of '" + meta.name + "' " +
                                           vars.format(declared) + " differ from graph parents " +
                                           vars.format(dag_.parents(v)));
    }
    std::size_t rows = 1;
    for (NodeId p : cpt.parents) rows *= vars[p].cardinality();
    const std::size_t k = meta.cardinality();
    if (cpt.table.size() != rows * k) {
      fail(ErrorCode::invalid_network, "CPT of '" + meta.name + "' has " +
                                           std::to_string(cpt.table.size()) + " entries, expected " +
                                           std::to_string(rows * k));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double p = cpt.table[r * k + j];
        if (!(p >= 0.0) || !std::isfinite(p)) {
          fail(ErrorCode::invalid_network, "CPT of '" + meta.name + "' has an invalid entry");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        fail(ErrorCode::invalid_network, "CPT row " + std::to_string(r) + " of '" + meta.name +
                                             "' sums to " + std::to_string(sum));
      }
    }
  }
}

std::size_t DiscreteNetwork::row_index(NodeId v, const std::vector<std::size_t>& full) const {
  const Cpt& cpt = cpts_[v.index];
  std::size_t row = 0;
  for (NodeId p : cpt.parents) row = row * cardinality(p) + full[p.index];
  return row;
}

double DiscreteNetwork::probability(NodeId v, std::size_t state,
                                    const std::vector<std::size_t>& full) const {
  return cpts_[v.index].table[row_index(v, full) * cardinality(v) + state];
}

DiscreteNetwork DiscreteNetwork::with_cpt(Cpt cpt) const {
  std::vector<Cpt> all;
  for (NodeId v : dag_.nodes()) {
    all.push_back(v == cpt.node ? cpt : cpts_[v.index]);
  }
  return DiscreteNetwork(dag_, std::move(all));
}

// ---------------------------------------------------------------------------
// Factor

Factor::Factor(VariableTablePtr variables, std::vector<NodeId> scope, std::vector<double> values)
    : variables_(std::move(variables)), scope_(std::move(scope)), values_(std::move(values)) {
  NodeSet seen;
  for (NodeId v : scope_) {
    if (seen.contains(v)) fail(ErrorCode::invalid_argument, "duplicate variable in factor scope");
    seen.insert(v);
    const std::size_t k = (*variables_)[v].cardinality();
    if (k == 0) {
      fail(ErrorCode::invalid_argument,
           "factor variable '" + variables_->name(v) + "' has no states");
    }
    cards_.push_back(k);
  }
  const std::size_t expected = checked_product(cards_, kMaxJointEntries, "factor");
  if (values_.size() != expected) {
    fail(ErrorCode::invalid_argument, "factor has " + std::to_string(values_.size()) +
                                          " entries, expected " + std::to_string(expected));
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      fail(ErrorCode::invalid_argument, "factor entries must be finite and nonnegative");
    }
  }
}

NodeSet Factor::scope_set() const {
  NodeSet s;
  for (NodeId v : scope_) s.insert(v);
  return s;
}

std::size_t Factor::position(NodeId v) const {
  auto it = std::find(scope_.begin(), scope_.end(), v);
  if (it == scope_.end()) {
    fail(ErrorCode::unknown_node, "'" + variables_->name(v) + "' is not in the factor scope");
  }
  return static_cast<std::size_t>(it - scope_.begin());
}

double Factor::at(const std::vector<std::size_t>& states) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < scope_.size(); ++i) idx = idx * cards_[i] + states.at(i);
  return values_.at(idx);
}

double Factor::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

bool Factor::normalized() const { return std::abs(total() - 1.0) <= 1e-12; }

// ---------------------------------------------------------------------------
// Operations

Factor joint(const DiscreteNetwork& net) {
  const auto& vars = net.variables();
  std::vector<NodeId> scope(net.dag().nodes().begin(), net.dag().nodes().end());
  std::vector<std::size_t> cards;
  for (NodeId v : scope) cards.push_back(net.cardinality(v));
  const std::size_t size = checked_product(cards, kMaxJointEntries, "joint state space");
  const std::vector<NodeId> order = net.dag().topological_order();

  std::vector<double> values(size);
  std::vector<std::size_t> states(scope.size(), 0);
  std::vector<std::size_t> full(vars.size(), 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    for (std::size_t i = 0; i < scope.size(); ++i) full[scope[i].index] = states[i];
    double p = 1.0;
    for (NodeId v : order) p *= net.probability(v, full[v.index], full);
    values[idx] = p;
    advance(states, cards);
  }
  return Factor(net.dag().variables_ptr(), std::move(scope), std::move(values));
}

Factor marginalize(const Factor& f, NodeSet keep) {
  if (!f.scope_set().contains(keep)) {
    fail(ErrorCode::invalid_argument, "marginal scope " + f.variables().format(keep) +
                                          " is not inside the factor scope");
  }
  std::vector<NodeId> out_scope;
  std::vector<std::size_t> out_pos;
  for (std::size_t i = 0; i < f.scope().size(); ++i) {
    if (keep.contains(f.scope()[i])) {
      out_scope.push_back(f.scope()[i]);
      out_pos.push_back(i);
    }
  }
  std::vector<std::size_t> out_cards;
  for (std::size_t i : out_pos) out_cards.push_back(f.cardinalities()[i]);
  std::size_t out_size = 1;
  for (std::size_t c : out_cards) out_size *= c;

  std::vector<double> out(out_size, 0.0);
  std::vector<std::size_t> states(f.scope().size(), 0);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < out_pos.size(); ++k) {
      target = target * out_cards[k] + states[out_pos[k]];
    }
    out[target] += f.values()[idx];
    advance(states, f.cardinalities());
  }
  return Factor(f.variables_ptr(), std::move(out_scope), std::move(out));
}

Factor normalize(const Factor& f) {
  const double z = f.total();
  if (!(z > 0.0)) fail(ErrorCode::zero_probability_evidence, "factor has no mass");
  std::vector<double> values = f.values();
  for (double& v : values) v /= z;
  return Factor(f.variables_ptr(), f.scope(), std::move(values));
}

Factor condition(const Factor& f, const Assignment& evidence) {
  const auto& vars = f.variables();
  std::vector<std::optional<std::size_t>> fixed(f.scope().size());
  for (auto [v, state] : evidence) {
    const std::size_t pos = f.position(v);
    if (state >= f.cardinalities()[pos]) {
      fail(ErrorCode::unknown_state,
           "state " + std::to_string(state) + " out of range for '" + vars.name(v) + "'");
    }
    if (fixed[pos] && *fixed[pos] != state) {
      fail(ErrorCode::invalid_argument, "contradictory evidence on '" + vars.name(v) + "'");
    }
    fixed[pos] = state;
  }
  std::vector<NodeId> out_scope;
  std::vector<std::size_t> out_cards;
  for (std::size_t i = 0; i < f.scope().size(); ++i) {
    if (!fixed[i]) {
      out_scope.push_back(f.scope()[i]);
      out_cards.push_back(f.cardinalities()[i]);
    }
  }
  std::size_t out_size = 1;
  for (std::size_t c : out_cards) out_size *= c;
  std::vector<double> out(out_size, 0.0);
  std::vector<std::size_t> states(f.scope().size(), 0);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    bool match = true;
    std::size_t target = 0;
    for (std::size_t i = 0, k = 0; i < states.size(); ++i) {
      if (fixed[i]) {
        match = match && states[i] == *fixed[i];
      } else {
        target = target * out_cards[k++] + states[i];
      }
    }
    if (match) out[target] += f.values()[idx];
    advance(states, f.cardinalities());
  }
  Factor sliced(f.variables_ptr(), std::move(out_scope), std::move(out));
  if (!(sliced.total() > 0.0)) {
    fail(ErrorCode::zero_probability_evidence,
         "evidence " + format(vars, evidence) + " has probability zero");
  }
  return normalize(sliced);
}

std::vector<Assignment> assignments(const VariableTable& vars, NodeSet set) {
  std::vector<NodeId> ids(set.begin(), set.end());
  std::vector<std::size_t> cards;
  for (NodeId v : ids) {
    if (vars[v].cardinality() == 0) {
      fail(ErrorCode::invalid_argument, "'" + vars.name(v) + "' has no declared states");
    }
    cards.push_back(vars[v].cardinality());
  }
  std::vector<Assignment> out;
  std::vector<std::size_t> states(ids.size(), 0);
  do {
    Assignment a;
    for (std::size_t i = 0; i < ids.size(); ++i) a.emplace_back(ids[i], states[i]);
    out.push_back(std::move(a));
  } while (advance(states, cards));
  return out;
}

std::string format(const VariableTable& vars, const Assignment& a) {
  std::string out;
  for (auto [v, s] : a) {
    if (!out.empty()) out += ", ";
    out += vars.name(v) + "=" + vars[v].states.at(s);
  }
  return "(" + out + ")";
}

OddsRatioReport conditional_or(const Factor& f, NodeId y, NodeId x, const Assignment& context,
                               std::size_t y_category, std::size_t x_category) {
  const auto& vars = f.variables();
  if (y == x) fail(ErrorCode::invalid_roles, "odds ratio needs two distinct variables");
  for (auto [v, s] : context) {
    if (v == y || v == x) fail(ErrorCode::invalid_roles, "context must not fix X or Y");
  }
  const Factor given = context.empty() ? normalize(f) : condition(f, context);
  const Factor pair = marginalize(given, NodeSet{y, x});
  const std::size_t ky = vars[y].cardinality();
  const std::size_t kx = vars[x].cardinality();
  if (y_category >= ky) fail(ErrorCode::unknown_state, "outcome category out of range");
  if (x_category >= kx) fail(ErrorCode::unknown_state, "exposure category out of range");

  const bool y_first = pair.scope().front() == y;
  auto cell = [&](std::size_t ys, std::size_t xs) {
    const double p = y_first ? pair.at({ys, xs}) : pair.at({xs, ys});
    if (!(p > 0.0)) {
      fail(ErrorCode::zero_cell, "zero cell p(" + vars.name(y) + "=" + vars[y].states[ys] + ", " +
                                     vars.name(x) + "=" + vars[x].states[xs] + " | " +
                                     format(vars, context) + ")");
    }
    return p;
  };
  const double num = cell(y_category, x_category) * cell(0, 0);
  const double den = cell(0, x_category) * cell(y_category, 0);
  OddsRatioReport r;
  r.y = y;
  r.x = x;
  r.y_category = y_category;
  r.x_category = x_category;
  r.context = context;
  r.value = num / den;
  r.log_value = std::log(r.value);
  return r;
}

std::vector<OddsRatioReport> or_collection(const Factor& f, NodeId y, NodeId x,
                                           const Assignment& context) {
  std::vector<OddsRatioReport> out;
  const auto& vars = f.variables();
  for (std::size_t yc = 1; yc < vars[y].cardinality(); ++yc) {
    for (std::size_t xc = 1; xc < vars[x].cardinality(); ++xc) {
      out.push_back(conditional_or(f, y, x, context, yc, xc));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collapsing claims

std::vector<OrClaim> claims_for(const RolesSpec& roles, const Verdict& verdict) {
  const OrClaim over_b{"over_b", roles.c | roles.b, false, roles.c, false};
  const OrClaim over_s{"over_s", roles.c, true, roles.c, false};
  const OrClaim over_b_and_s{"over_b_and_s", roles.c | roles.b, true, roles.c, false};

  std::optional<Criterion> criterion = verdict.criterion;
  if (!criterion) {
    if (roles.s && !roles.b.empty()) {
      criterion = Criterion::cor_reduce_i;
    } else if (roles.s) {
      criterion = Criterion::cor_S_i;
    } else {
      criterion = Criterion::thm_collapsibility_i;
    }
  }
  switch (*criterion) {
    case Criterion::thm_collapsibility_i:
    case Criterion::thm_collapsibility_ii:
    case Criterion::cor_successive:
      return {over_b};
    case Criterion::cor_S_i:
    case Criterion::cor_S_ii:
      return {over_s};
    case Criterion::cor_reduce_i:
    case Criterion::cor_reduce_ii:
      return {over_b_and_s, over_b, over_s};
    case Criterion::null_testability_i:
    case Criterion::null_testability_ii:
      break;
  }
  fail(ErrorCode::invalid_argument, "null-testability verdicts carry no odds-ratio equality");
}

OrEqualityReport or_equality_report(const DiscreteNetwork& net, const RolesSpec& roles,
                                    const std::vector<OrClaim>& claims) {
  const auto& vars = net.variables();
  bool needs_s = false;
  NodeSet scope{roles.y, roles.x};
  for (const auto& c : claims) {
    if (!c.full.contains(c.reduced)) {
      fail(ErrorCode::invalid_argument, "claim '" + c.label + "' reduces to a non-subset");
    }
    needs_s = needs_s || c.full_selected || c.reduced_selected;
    scope |= c.full;
  }
  std::optional<NodeId> s = roles.s;
  if (needs_s) {
    if (!s) s = net.selection_node();
    if (!s) fail(ErrorCode::no_selection_node, "claims condition on S=1 but no selection node");
    scope.insert(*s);
  }
  const Factor m = marginalize(joint(net), scope);

  OrEqualityReport report;
  for (const auto& claim : claims) {
    for (const Assignment& full : assignments(vars, claim.full)) {
      Assignment reduced;
      for (auto [v, st] : full) {
        if (claim.reduced.contains(v)) reduced.emplace_back(v, st);
      }
      Assignment full_ctx = full;
      if (claim.full_selected) full_ctx.emplace_back(*s, 1);
      if (claim.reduced_selected) reduced.emplace_back(*s, 1);
      const auto lhs = or_collection(m, roles.y, roles.x, full_ctx);
      const auto rhs = or_collection(m, roles.y, roles.x, reduced);
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        OrComparison row;
        row.claim = claim.label;
        row.full_context = full_ctx;
        row.reduced_context = reduced;
        row.y_category = lhs[i].y_category;
        row.x_category = lhs[i].x_category;
        row.full_or = lhs[i].value;
        row.reduced_or = rhs[i].value;
        row.log_difference = std::abs(lhs[i].log_value - rhs[i].log_value);
        report.max_log_difference = std::max(report.max_log_difference, row.log_difference);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

OrEqualityReport or_equality_report(const DiscreteNetwork& net, const RolesSpec& roles,
                                    const Verdict& verdict) {
  return or_equality_report(net, roles, claims_for(roles, verdict));
}

}  // namespace odsg
