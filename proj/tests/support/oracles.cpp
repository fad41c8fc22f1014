#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace odsg::testing {

std::vector<NodeSet> brute_force_cliques(const UndirectedGraph& g) {
  const auto& vars = g.variables();
  const std::vector<NodeId> nodes(g.nodes().begin(), g.nodes().end());
  std::vector<NodeSet> complete;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nodes.size()); ++mask) {
    NodeSet s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if ((mask >> i) & 1U) s.insert(nodes[i]);
    }
    bool ok = true;
    for (NodeId a : s) {
      if (!g.neighbors(a).contains(s - NodeSet{a})) ok = false;
    }
    if (ok) complete.push_back(s);
  }
  std::vector<NodeSet> maximal;
  for (NodeSet s : complete) {
    const bool dominated = std::any_of(complete.begin(), complete.end(),
                                       [s](NodeSet t) { return t != s && t.contains(s); });
    if (!dominated) maximal.push_back(s);
  }
  std::sort(maximal.begin(), maximal.end(), [&vars](NodeSet a, NodeSet b) { return vars.name_less(a, b); });
  return maximal;
}

std::vector<double> table_margin(const ContingencyTable& t, const std::vector<double>& values,
                                 NodeSet keep) {
  const Factor f(t.variables, t.scope, values);
  return marginalize(f, keep).values();
}

namespace {

// Index into the margin over `keep` for every entry of the table.
std::vector<std::size_t> margin_index(const ContingencyTable& t, NodeSet keep) {
  std::vector<std::size_t> out(t.counts.size());
  std::vector<std::size_t> states(t.scope.size(), 0);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < t.scope.size(); ++i) {
      if (keep.contains(t.scope[i])) m = m * t.cardinalities[i] + states[i];
    }
    out[idx] = m;
    for (std::size_t i = states.size(); i-- > 0;) {
      if (++states[i] < t.cardinalities[i]) break;
      states[i] = 0;
    }
  }
  return out;
}

}  // namespace

std::vector<double> decomposable_mle(const ContingencyTable& t, const std::vector<NodeSet>& cliques) {
  std::vector<double> out(t.counts.size(), 1.0);
  NodeSet covered;
  for (NodeSet c : cliques) {
    const auto num = table_margin(t, t.counts, c);
    const auto num_idx = margin_index(t, c);
    const NodeSet sep = c & covered;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= num[num_idx[i]];
    if (!covered.empty()) {
      std::vector<double> den;
      std::vector<std::size_t> den_idx(out.size(), 0);
      if (sep.empty()) {
        den = {t.total()};
      } else {
        den = table_margin(t, t.counts, sep);
        den_idx = margin_index(t, sep);
      }
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = den[den_idx[i]] > 0.0 ? out[i] / den[den_idx[i]] : 0.0;
      }
    }
    covered |= c;
  }
  return out;
}

double ci_violation(const Factor& joint, const CiQuery& q) {
  const Factor abz = marginalize(joint, q.a | q.b | q.z);
  const Factor az = marginalize(joint, q.a | q.z);
  const Factor bz = marginalize(joint, q.b | q.z);
  const Factor z = marginalize(joint, q.z);
  const auto& vars = joint.variables();
  auto lookup = [](const Factor& f, const Assignment& a) {
    std::vector<std::size_t> st;
    for (NodeId v : f.scope()) {
      for (auto [n, s] : a) {
        if (n == v) st.push_back(s);
      }
    }
    return f.at(st);
  };
  double worst = 0.0;
  for (const Assignment& a : assignments(vars, q.a | q.b | q.z)) {
    const double pz = q.z.empty() ? 1.0 : lookup(z, a);
    worst = std::max(worst, std::abs(lookup(abz, a) * pz - lookup(az, a) * lookup(bz, a)));
  }
  return worst;
}

}  // namespace odsg::testing
