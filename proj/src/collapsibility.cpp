#include "odsgraph/collapsibility.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

namespace odsg {

std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::thm_collapsibility_i: return "thm_collapsibility_i";
    case Criterion::thm_collapsibility_ii: return "thm_collapsibility_ii";
    case Criterion::cor_successive: return "cor_successive";
    case Criterion::cor_S_i: return "cor_S_i";
    case Criterion::cor_S_ii: return "cor_S_ii";
    case Criterion::cor_reduce_i: return "cor_reduce_i";
    case Criterion::cor_reduce_ii: return "cor_reduce_ii";
    case Criterion::null_testability_i: return "null_testability_i";
    case Criterion::null_testability_ii: return "null_testability_ii";
  }
  return "unknown";
}

void validate(const IndependenceModel& model, const RolesSpec& roles) {
  const auto& vars = model.variables();
  NodeSet singles{roles.x, roles.y};
  if (roles.s) singles.insert(*roles.s);
  model.require_nodes(singles | roles.c | roles.b);
  const std::size_t expected = roles.s ? 3 : 2;
  if (singles.size() != expected) {
    fail(ErrorCode::invalid_roles, "exposure, outcome and selection roles must be distinct nodes");
  }
  if (roles.c.intersects(singles) || roles.b.intersects(singles)) {
    fail(ErrorCode::invalid_roles,
         "covariate sets must not contain the exposure, outcome or selection node");
  }
  if (roles.c.intersects(roles.b)) {
    fail(ErrorCode::invalid_roles,
         "kept and collapsed covariates overlap: " + vars.format(roles.c & roles.b));
  }
  if (roles.s && vars[*roles.s].kind != VariableKind::selection) {
    fail(ErrorCode::invalid_roles, "'" + vars.name(*roles.s) + "' is not a selection node");
  }
}

namespace {

NodeId require_selection(const RolesSpec& roles) {
  if (!roles.s) fail(ErrorCode::no_selection_node, "criterion needs a selection node");
  return *roles.s;
}

void add_witness(Verdict& v, const CiQuery& q) {
  if (std::find(v.witnesses.begin(), v.witnesses.end(), q) == v.witnesses.end()) {
    v.witnesses.push_back(q);
  }
}

// One (i)/(ii) collapsibility test for a block conditioned on `given`.
std::optional<std::pair<Criterion, CiQuery>> collapse_block(const IndependenceModel& model,
                                                           const RolesSpec& r, NodeSet block,
                                                           NodeSet given) {
  const CiQuery first{NodeSet{r.y}, block, given | NodeSet{r.x}};
  if (model.holds(first)) return std::pair{Criterion::thm_collapsibility_i, first};
  const CiQuery second{NodeSet{r.x}, block, given | NodeSet{r.y}};
  if (model.holds(second)) return std::pair{Criterion::thm_collapsibility_ii, second};
  return std::nullopt;
}

// Blocks of `rest` with 1..max_block members, in deterministic order.
std::vector<NodeSet> candidate_blocks(const VariableTable& vars, NodeSet rest,
                                      std::size_t max_block) {
  auto all = subsets_by_size(vars, rest, max_block);
  all.erase(std::remove_if(all.begin(), all.end(), [](NodeSet s) { return s.empty(); }), all.end());
  return all;
}

using StepTest =
    std::function<std::optional<std::pair<Criterion, std::vector<CiQuery>>>(NodeSet, NodeSet)>;

// Depth-first search over ordered partitions of `b`. `step(block, rest)`
// tests block B_k with B-bar^{k+1} = rest. Failing remainders are memoized.
std::optional<std::vector<std::pair<OrderingStep, std::vector<CiQuery>>>> search_partition(
    const VariableTable& vars, NodeSet b, std::size_t max_block, const StepTest& step) {
  std::unordered_set<std::uint64_t> dead;
  std::vector<std::pair<OrderingStep, std::vector<CiQuery>>> path;
  std::function<bool(NodeSet)> dfs = [&](NodeSet remaining) {
    if (remaining.empty()) return true;
    if (dead.contains(remaining.bits())) return false;
    for (NodeSet block : candidate_blocks(vars, remaining, max_block)) {
      const NodeSet rest = remaining - block;
      if (auto passed = step(block, rest)) {
        path.push_back({OrderingStep{block, passed->first}, passed->second});
        if (dfs(rest)) return true;
        path.pop_back();
      }
    }
    dead.insert(remaining.bits());
    return false;
  };
  if (dfs(b)) return path;
  return std::nullopt;
}

void require_collapse_set(const RolesSpec& roles) {
  if (roles.b.empty()) fail(ErrorCode::invalid_roles, "collapse set B is empty");
  if (roles.b.size() > kMaxCollapseSet) {
    fail(ErrorCode::search_cap_exceeded, "collapse set has " + std::to_string(roles.b.size()) +
                                             " members; the search limit is " +
                                             std::to_string(kMaxCollapseSet));
  }
}

}  // namespace

Verdict check_collapsible_over_b(const IndependenceModel& model, const RolesSpec& roles) {
  validate(model, roles);
  if (roles.b.empty()) fail(ErrorCode::invalid_roles, "collapse set B is empty");
  Verdict v;
  const CiQuery first{NodeSet{roles.y}, roles.b, roles.c | NodeSet{roles.x}};
  const CiQuery second{NodeSet{roles.x}, roles.b, roles.c | NodeSet{roles.y}};
  if (model.holds(first)) {
    v.satisfied = true;
    v.criterion = Criterion::thm_collapsibility_i;
    add_witness(v, first);
  }
  if (model.holds(second)) {
    if (!v.satisfied) v.criterion = Criterion::thm_collapsibility_ii;
    v.satisfied = true;
    add_witness(v, second);
  }
  if (v.satisfied) v.ordering.push_back(OrderingStep{roles.b, *v.criterion});
  return v;
}

Verdict check_successive(const IndependenceModel& model, const RolesSpec& roles,
                         std::size_t max_block) {
  validate(model, roles);
  require_collapse_set(roles);
  if (max_block == 0) fail(ErrorCode::invalid_argument, "max_block must be at least 1");
  if (roles.b.size() == 1) return check_collapsible_over_b(model, roles);

  auto found = search_partition(
      model.variables(), roles.b, max_block,
      [&](NodeSet block, NodeSet rest)
          -> std::optional<std::pair<Criterion, std::vector<CiQuery>>> {
        if (auto r = collapse_block(model, roles, block, roles.c | rest)) {
          return std::pair{r->first, std::vector<CiQuery>{r->second}};
        }
        return std::nullopt;
      });
  Verdict v;
  if (!found) return v;
  v.satisfied = true;
  v.criterion = Criterion::cor_successive;
  for (auto& [step, witnesses] : *found) {
    v.ordering.push_back(step);
    for (const auto& w : witnesses) add_witness(v, w);
  }
  return v;
}

Verdict check_collapsible_over_s(const IndependenceModel& model, const RolesSpec& roles) {
  const NodeId s = require_selection(roles);
  validate(model, roles);
  Verdict v;
  const CiQuery first{NodeSet{roles.y}, NodeSet{s}, roles.c | NodeSet{roles.x}};
  const CiQuery second{NodeSet{roles.x}, NodeSet{s}, roles.c | NodeSet{roles.y}};
  if (model.holds(first)) {
    v.satisfied = true;
    v.criterion = Criterion::cor_S_i;
    add_witness(v, first);
  }
  if (model.holds(second)) {
    if (!v.satisfied) v.criterion = Criterion::cor_S_ii;
    v.satisfied = true;
    add_witness(v, second);
  }
  return v;
}

Verdict check_reduce_covariates(const IndependenceModel& model, const RolesSpec& roles,
                                std::size_t max_block) {
  const NodeId s = require_selection(roles);
  validate(model, roles);
  require_collapse_set(roles);
  if (max_block == 0) fail(ErrorCode::invalid_argument, "max_block must be at least 1");
  const NodeSet xs{roles.x};
  const NodeSet ys{roles.y};
  const NodeSet ss{s};

  auto step = [&](NodeSet block, NodeSet rest)
      -> std::optional<std::pair<Criterion, std::vector<CiQuery>>> {
    const NodeSet kept = roles.c | rest;
    const CiQuery premise{xs, ss, ys | block | kept};
    if (!model.holds(premise)) return std::nullopt;
    const CiQuery cond_i{xs, block, ys | kept};
    if (model.holds(cond_i)) {
      return std::pair{Criterion::cor_reduce_i, std::vector<CiQuery>{premise, cond_i}};
    }
    const CiQuery cond_ii{ys, block, xs | kept};
    const CiQuery s_given_kept{xs, ss, ys | kept};
    if (model.holds(cond_ii) && model.holds(s_given_kept)) {
      return std::pair{Criterion::cor_reduce_ii,
                       std::vector<CiQuery>{premise, cond_ii, s_given_kept}};
    }
    return std::nullopt;
  };

  // A single step covering all of B is the plain reduction; prefer it.
  Verdict v;
  if (auto whole = step(roles.b, NodeSet{})) {
    v.satisfied = true;
    v.criterion = whole->first;
    v.ordering.push_back(OrderingStep{roles.b, whole->first});
    for (const auto& w : whole->second) add_witness(v, w);
    return v;
  }
  auto found = search_partition(model.variables(), roles.b, max_block, step);
  if (!found) return v;
  v.satisfied = true;
  v.criterion = found->front().first.condition;
  for (auto& [st, witnesses] : *found) {
    v.ordering.push_back(st);
    for (const auto& w : witnesses) add_witness(v, w);
  }
  return v;
}

Verdict check_null_testability(const IndependenceModel& model, const RolesSpec& roles) {
  const NodeId s = require_selection(roles);
  validate(model, roles);
  Verdict v;
  const CiQuery first{NodeSet{s}, NodeSet{roles.y}, roles.c | NodeSet{roles.x}};
  const CiQuery second{NodeSet{s}, NodeSet{roles.x}, roles.c | NodeSet{roles.y}};
  if (model.holds(first)) {
    v.satisfied = true;
    v.criterion = Criterion::null_testability_i;
    add_witness(v, first);
  }
  if (model.holds(second)) {
    if (!v.satisfied) v.criterion = Criterion::null_testability_ii;
    v.satisfied = true;
    add_witness(v, second);
  }
  return v;
}

std::vector<NodeSet> subsets_by_size(const VariableTable& vars, NodeSet pool, std::size_t max_size) {
  if (pool.size() > kMaxSearchPool) {
    fail(ErrorCode::search_cap_exceeded, "search pool has " + std::to_string(pool.size()) +
                                             " members; the limit is " +
                                             std::to_string(kMaxSearchPool));
  }
  const std::vector<NodeId> members = vars.sorted(pool);
  const std::size_t m = members.size();
  std::vector<NodeSet> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > max_size) continue;
    NodeSet s;
    for (std::size_t k = 0; k < m; ++k) {
      if ((mask >> k) & 1U) s.insert(members[k]);
    }
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [&vars](NodeSet a, NodeSet b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return vars.name_less(a, b);
  });
  return out;
}

std::vector<NodeSet> find_bias_breaking_sets(const IndependenceModel& model, NodeId x, NodeId y,
                                             NodeId s, NodeSet pool, std::size_t max_size) {
  if (pool.contains(x) || pool.contains(y) || pool.contains(s)) {
    fail(ErrorCode::invalid_roles, "search pool must not contain the exposure, outcome or selection node");
  }
  std::vector<NodeSet> minimal;
  for (NodeSet c : subsets_by_size(model.variables(), pool, max_size)) {
    const bool dominated = std::any_of(minimal.begin(), minimal.end(),
                                       [c](NodeSet m) { return c.contains(m); });
    if (dominated) continue;
    if (check_collapsible_over_s(model, RolesSpec{x, y, s, c, NodeSet{}}).satisfied) {
      minimal.push_back(c);
    }
  }
  return minimal;
}

}  // namespace odsg
