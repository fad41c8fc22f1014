// odsgraph: command-line front end.
// Exit codes: 0 holds / passes, 1 does not, 2 usage or input error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odsgraph/causal.hpp"
#include "odsgraph/collapsibility.hpp"
#include "odsgraph/exact.hpp"
#include "odsgraph/formats.hpp"
#include "odsgraph/report.hpp"
#include "odsgraph/separation.hpp"
#include "odsgraph/simulate.hpp"

using namespace odsg;

namespace {

constexpr double kOrTolerance = 1e-9;
constexpr double kStandardizeTolerance = 1e-12;

using Names = std::vector<std::string>;

// A loaded graph file; exactly one of dag / ug is set.
struct LoadedGraph {
  GraphSpec spec;
  std::optional<Dag> dag;
  std::optional<UndirectedGraph> ug;

  const VariableTable& vars() const { return dag ? dag->variables() : ug->variables(); }
  IndependenceModel model() const {
    return dag ? IndependenceModel(*dag) : IndependenceModel(*ug);
  }
};

LoadedGraph load(const std::string& path) {
  LoadedGraph g{load_graph(path), std::nullopt, std::nullopt};
  if (g.spec.style == GraphSpec::EdgeStyle::undirected) {
    g.ug.emplace(build_undirected(g.spec));
  } else {
    g.dag.emplace(build_dag(g.spec));
  }
  return g;
}

const Dag& require_dag(const LoadedGraph& g, const char* what) {
  if (!g.dag) fail(ErrorCode::invalid_argument, std::string(what) + " needs a directed graph");
  return *g.dag;
}

NodeSet resolve(const VariableTable& vars, const Names& names) { return vars.resolve(names); }

NodeId resolve_one(const VariableTable& vars, const std::string& name) { return vars.at(name); }

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

// Diagram for the exposure: the graph's own decision node, or a new one.
InfluenceDiagram diagram_for(const Dag& dag, NodeId x) {
  if (dag.nodes_of_kind(VariableKind::decision).empty()) return build_influence_diagram(dag, x);
  InfluenceDiagram id(dag);
  if (id.target() != x) {
    fail(ErrorCode::invalid_roles, "decision node targets '" + dag.variables().name(id.target()) +
                                       "', not the exposure '" + dag.variables().name(x) + "'");
  }
  return id;
}

// Shared role options for collapse, null-test and verify.
struct RoleOptions {
  std::string x, y, s;
  Names keep, over;
  bool ignore_selection = false;
  std::size_t max_block = 1;

  void add(CLI::App* cmd, bool with_over) {
    cmd->add_option("--x", x, "exposure")->required();
    cmd->add_option("--y", y, "outcome")->required();
    cmd->add_option("--s", s, "selection node (default: the graph's selection node)");
    cmd->add_flag("--ignore-selection", ignore_selection, "treat the design as unselected");
    cmd->add_option("--keep,--c", keep, "covariates kept")->delimiter(',');
    if (with_over) {
      cmd->add_option("--over,--b", over, "covariates collapsed over")->delimiter(',');
      cmd->add_option("--max-block", max_block, "largest block in successive collapsing");
    }
  }

  RolesSpec roles(const IndependenceModel& model) const {
    const auto& vars = model.variables();
    RolesSpec r{resolve_one(vars, x), resolve_one(vars, y), std::nullopt, resolve(vars, keep),
                resolve(vars, over)};
    if (!s.empty()) {
      r.s = resolve_one(vars, s);
    } else if (!ignore_selection) {
      r.s = model.selection_node();
    }
    validate(model, r);
    return r;
  }

  Json echo(const VariableTable& vars, const RolesSpec& r) const {
    Json j;
    j["x"] = vars.name(r.x);
    j["y"] = vars.name(r.y);
    j["s"] = r.s ? Json(vars.name(*r.s)) : Json(nullptr);
    j["keep"] = names_json(vars, r.c);
    j["over"] = names_json(vars, r.b);
    return j;
  }
};

Verdict collapse_verdict(const IndependenceModel& model, const RolesSpec& r, std::size_t max_block) {
  if (r.s && !r.b.empty()) return check_reduce_covariates(model, r, max_block);
  if (r.s) return check_collapsible_over_s(model, r);
  if (r.b.empty()) fail(ErrorCode::invalid_roles, "nothing to collapse over: give --over or a selection node");
  return check_successive(model, r, max_block);
}

// ---------------------------------------------------------------------------

int run_check_ci(const std::string& path, const Names& a, const Names& b, const Names& given,
                 const std::string& method) {
  const LoadedGraph g = load(path);
  const auto& vars = g.vars();
  const CiQuery q{resolve(vars, a), resolve(vars, b), resolve(vars, given)};
  Json j = report_header("check-ci");
  j["graph"] = path;
  j["query"] = to_json(vars, q);
  CiVerdict v;
  if (g.ug) {
    v = u_separation_verdict(*g.ug, q);
  } else if (method == "d-separation") {
    v = CiVerdict{d_separated(*g.dag, q), CiMethod::d_separation, {}};
  } else {
    v = ci_holds(*g.dag, q);
  }
  j["holds"] = v.holds;
  j["method"] = v.method == CiMethod::d_separation ? "d-separation"
                : v.method == CiMethod::undirected ? "separation"
                                                   : "moralization";
  Json path_json = Json::array();
  for (NodeId n : v.witness) path_json.push_back(vars.name(n));
  j["connecting_path"] = std::move(path_json);
  emit(j);
  return v.holds ? 0 : 1;
}

int run_collapse(const std::string& path, const RoleOptions& opt) {
  const LoadedGraph g = load(path);
  const auto model = g.model();
  const RolesSpec r = opt.roles(model);
  const Verdict v = collapse_verdict(model, r, opt.max_block);
  Json j = report_header("collapse");
  j["graph"] = path;
  j["roles"] = opt.echo(g.vars(), r);
  j["verdict"] = to_json(g.vars(), v);
  emit(j);
  return v.satisfied ? 0 : 1;
}

int run_null_test(const std::string& path, const RoleOptions& opt) {
  const LoadedGraph g = load(path);
  const auto model = g.model();
  const RolesSpec r = opt.roles(model);
  const Verdict v = check_null_testability(model, r);
  Json j = report_header("null-test");
  j["graph"] = path;
  j["roles"] = opt.echo(g.vars(), r);
  j["verdict"] = to_json(g.vars(), v);
  emit(j);
  return v.satisfied ? 0 : 1;
}

NodeSet default_pool(const VariableTable& vars, NodeSet nodes, NodeSet exclude) {
  NodeSet pool;
  for (NodeId v : nodes - exclude) {
    if (vars[v].kind == VariableKind::random) pool.insert(v);
  }
  return pool;
}

int run_bias_breaking(const std::string& path, const std::string& xs, const std::string& ys,
                      const std::string& ss, const Names& pool_names, std::size_t max_size) {
  const LoadedGraph g = load(path);
  const auto model = g.model();
  const auto& vars = g.vars();
  const NodeId x = resolve_one(vars, xs);
  const NodeId y = resolve_one(vars, ys);
  std::optional<NodeId> s = ss.empty() ? model.selection_node() : std::optional(resolve_one(vars, ss));
  if (!s) fail(ErrorCode::no_selection_node, "graph has no selection node; pass --s");
  validate(model, RolesSpec{x, y, s, {}, {}});
  const NodeSet pool = pool_names.empty() ? default_pool(vars, model.nodes(), NodeSet{x, y, *s})
                                          : resolve(vars, pool_names);
  const auto sets = find_bias_breaking_sets(model, x, y, *s, pool,
                                            max_size == 0 ? pool.size() : max_size);
  Json j = report_header("bias-breaking");
  j["graph"] = path;
  j["x"] = xs;
  j["y"] = ys;
  j["s"] = vars.name(*s);
  j["pool"] = names_json(vars, pool);
  Json arr = Json::array();
  for (NodeSet c : sets) arr.push_back(names_json(vars, c));
  j["minimal_sets"] = std::move(arr);
  emit(j);
  return sets.empty() ? 1 : 0;
}

int run_identify(const std::string& path, const std::string& xs, const std::string& ys,
                 const std::string& ss, const Names& c_names, const std::optional<Names>& z_names,
                 const std::string& cpt_path, bool search) {
  const LoadedGraph g = load(path);
  const Dag& dag = require_dag(g, "identify");
  const auto& vars0 = dag.variables();
  const InfluenceDiagram id = diagram_for(dag, resolve_one(vars0, xs));
  const auto& vars = id.variables();
  const NodeId y = resolve_one(vars, ys);
  if (!ss.empty() && id.selection_node() != std::optional(resolve_one(vars, ss))) {
    fail(ErrorCode::invalid_roles, "'" + ss + "' is not the graph's selection node");
  }
  const NodeSet c = resolve(vars, c_names);
  const NodeSet z = z_names ? resolve(vars, *z_names) : NodeSet{};
  std::optional<DiscreteNetwork> net;
  if (!cpt_path.empty()) net.emplace(load_network(g.spec, read_file(cpt_path), cpt_path));

  Json j = report_header("identify");
  j["graph"] = path;
  j["x"] = vars.name(id.target());
  j["y"] = ys;
  j["sigma"] = vars.name(id.sigma());
  j["c"] = names_json(vars, c);
  const ConditionCheck suff = check_sufficient_covariates(id, y, c);
  j["sufficient_covariates"] = to_json(vars, suff);
  std::string conclusion = "not identified";
  bool estimable = false;
  if (auto s = id.selection_node()) {
    j["s"] = vars.name(*s);
    const CausalVerdict cc = check_case_control_causal(id, y, c);
    j["case_control"] = to_json(vars, cc);
    const CausalVerdict bz = check_bias_breaking_z(id, y, c, z, net ? &*net : nullptr);
    j["bias_breaking_z"] = to_json(vars, bz);
    if (search) {
      const NodeSet pool = default_pool(vars, id.diagram().nodes(), c | NodeSet{id.target(), y});
      Json arr = Json::array();
      for (NodeSet cand : find_z_candidates(id, y, c, pool, pool.size())) {
        arr.push_back(names_json(vars, cand));
      }
      j["z_candidates"] = std::move(arr);
    }
    if (!z.empty() && bz.estimable_cor) {
      conclusion = "COR(C) estimable by OR(Z, C, S=1)";
      estimable = true;
    } else if (cc.estimable_cor) {
      conclusion = "COR(C) estimable by OR(C, S=1)";
      estimable = true;
    } else if (bz.estimable_cor) {
      conclusion = std::string(z.empty() ? "COR(C) estimable by OR(C, S=1)" : "COR(C) estimable by OR(Z, C, S=1)") +
                   (bz.swapped ? ", X and Y interchanged" : "");
      estimable = true;
    }
  } else if (suff.holds) {
    conclusion = "COR(C) estimable by OR(C)";
    estimable = true;
  }
  j["estimable_cor"] = estimable;
  j["conclusion"] = conclusion;
  emit(j);
  return estimable ? 0 : 1;
}

int run_simulate(const std::string& graph_path, const std::string& cpt_path, std::size_t n,
                 std::uint64_t seed, bool select, const std::string& out_path, unsigned threads) {
  const GraphSpec spec = load_graph(graph_path);
  const DiscreteNetwork net = load_network(spec, read_file(cpt_path), cpt_path);
  const Dataset ds = select ? retrospective_sample(net, n, seed, threads)
                            : forward_sample(net, n, seed, threads);
  std::ofstream out(out_path);
  if (!out) fail(ErrorCode::invalid_argument, "cannot write " + out_path);
  write_csv(ds, out);
  Json j = report_header("simulate");
  j["graph"] = graph_path;
  j["cpt"] = cpt_path;
  j["out"] = out_path;
  j["rows"] = ds.rows();
  j["provenance"] = to_json(ds.provenance);
  emit(j);
  return 0;
}

std::vector<NodeSet> parse_model(const VariableTable& vars, const std::string& text) {
  std::vector<NodeSet> gens;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    Names names;
    std::stringstream ps(part);
    std::string n;
    while (std::getline(ps, n, ',')) {
      if (!n.empty()) names.push_back(n);
    }
    if (!names.empty()) gens.push_back(vars.resolve(names));
  }
  if (gens.empty()) fail(ErrorCode::invalid_argument, "empty --model");
  return gens;
}

int run_estimate(const std::string& csv_path, const std::string& xs, const std::string& ys,
                 const Names& given, const std::string& model, const std::string& correction,
                 std::size_t reps, std::uint64_t seed) {
  const Dataset ds = read_csv(read_file(csv_path), csv_path);
  const auto& vars = *ds.variables;
  const NodeId x = resolve_one(vars, xs);
  const NodeId y = resolve_one(vars, ys);
  const NodeSet c = resolve(vars, given);
  if (x == y || c.contains(x) || c.contains(y)) {
    fail(ErrorCode::invalid_roles, "exposure, outcome and --given must be disjoint");
  }
  Correction corr = Correction::none;
  if (correction == "haldane-anscombe") {
    corr = Correction::haldane_anscombe;
  } else if (correction != "none") {
    fail(ErrorCode::invalid_argument, "unknown correction '" + correction + "'");
  }
  std::vector<NodeSet> gens;
  NodeSet scope = c | NodeSet{x, y};
  if (!model.empty()) {
    gens = parse_model(vars, model);
    for (NodeSet gset : gens) scope |= gset;
  }
  const std::vector<NodeId> order(scope.begin(), scope.end());
  const ContingencyTable t = tabulate(ds, order);

  Json j = report_header("estimate");
  j["data"] = csv_path;
  j["rows"] = ds.rows();
  j["provenance"] = to_json(ds.provenance);
  std::optional<LogLinearFit> fit;
  if (!gens.empty()) {
    fit = ipf_fit(t, gens);
    Json m;
    Json gj = Json::array();
    for (NodeSet gset : fit->generators) gj.push_back(names_json(vars, gset));
    m["generators"] = std::move(gj);
    m["iterations"] = fit->iterations;
    m["max_marginal_gap"] = fit->max_marginal_gap;
    j["model"] = std::move(m);
  }
  Json results = Json::array();
  for (const Assignment& ctx : assignments(vars, c)) {
    for (std::size_t yc = 1; yc < vars[y].cardinality(); ++yc) {
      for (std::size_t xc = 1; xc < vars[x].cardinality(); ++xc) {
        Json row;
        try {
          row = to_json(vars, empirical_or(t, y, x, ctx, corr, yc, xc));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::zero_cell) throw;
          row["context"] = to_json(vars, ctx);
          row["error"] = std::string(to_string(e.code()));
          row["message"] = e.what();
        }
        if (fit) {
          try {
            const Factor f(t.variables, t.scope, fit->fitted);
            row["fitted"] = to_json(vars, conditional_or(f, y, x, ctx, yc, xc));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::zero_cell && e.code() != ErrorCode::zero_probability_evidence) throw;
            row["fitted"] = {{"error", std::string(to_string(e.code()))}};
          }
        }
        results.push_back(std::move(row));
      }
    }
    if (reps > 0) {
      const auto bs = bootstrap_se(t, y, x, ctx, gens.empty() ? std::vector<NodeSet>{scope} : gens,
                                   reps, seed);
      Json b;
      b["context"] = to_json(vars, ctx);
      b["log_se"] = bs.log_se;
      b["reps"] = bs.reps;
      b["not_converged"] = bs.not_converged;
      b["zero_cell"] = bs.zero_cell;
      b["degenerate"] = bs.degenerate;
      results.push_back({{"bootstrap", std::move(b)}});
    }
  }
  j["odds_ratios"] = std::move(results);
  emit(j);
  return 0;
}

// verify --suite collapsibility|null|causal
int run_verify(const std::string& graph_path, const std::string& cpt_path, const std::string& suite,
               const RoleOptions& opt, const Names& z_names) {
  const GraphSpec spec = load_graph(graph_path);
  const Dag full = build_dag(spec);
  const DiscreteNetwork net = load_network(spec, read_file(cpt_path), cpt_path);
  const IndependenceModel model(net.dag());
  const auto& vars = net.variables();
  const RolesSpec r = opt.roles(model);
  Json j = report_header("verify");
  j["suite"] = suite;
  j["graph"] = graph_path;
  j["cpt"] = cpt_path;
  j["roles"] = opt.echo(vars, r);
  bool pass = false;

  if (suite == "collapsibility") {
    const Verdict v = collapse_verdict(model, r, opt.max_block);
    const OrEqualityReport rep = or_equality_report(net, r, v);
    j["verdict"] = to_json(vars, v);
    j["max_log_difference"] = rep.max_log_difference;
    j["report"] = to_json(vars, rep);
    pass = v.satisfied && rep.max_log_difference <= kOrTolerance;
  } else if (suite == "null") {
    const Verdict v = check_null_testability(model, r);
    if (!r.s) fail(ErrorCode::no_selection_node, "null suite needs a selection node");
    const Factor jt = joint(net);
    double max_pop = 0.0, max_sel = 0.0;
    for (const Assignment& ctx : assignments(vars, r.c)) {
      Assignment sel = ctx;
      sel.emplace_back(*r.s, 1);
      for (const auto& o : or_collection(jt, r.y, r.x, ctx)) max_pop = std::max(max_pop, std::abs(o.log_value));
      for (const auto& o : or_collection(jt, r.y, r.x, sel)) max_sel = std::max(max_sel, std::abs(o.log_value));
    }
    j["verdict"] = to_json(vars, v);
    j["max_abs_log_or"] = max_pop;
    j["max_abs_log_or_selected"] = max_sel;
    const bool null_pop = max_pop <= kOrTolerance;
    const bool null_sel = max_sel <= kOrTolerance;
    j["agree"] = null_pop == null_sel;
    pass = v.satisfied && null_pop == null_sel;
  } else if (suite == "causal") {
    const InfluenceDiagram id = diagram_for(full, r.x);
    const ConditionCheck suff = check_sufficient_covariates(id, r.y, r.c);
    j["sufficient_covariates"] = to_json(id.variables(), suff);
    bool fired = false;
    bool ok = true;
    if (suff.holds) {
      fired = true;
      double gap = 0.0;
      for (std::size_t xv = 0; xv < net.cardinality(r.x); ++xv) {
        const auto st = standardize(net, r.x, r.y, r.c, xv);
        const auto iv = marginalize(intervention_distribution(net, r.x, xv), NodeSet{r.y});
        for (std::size_t k = 0; k < st.size(); ++k) gap = std::max(gap, std::abs(st[k] - iv.values()[k]));
      }
      j["standardization_gap"] = gap;
      ok = ok && gap <= kStandardizeTolerance;
    }
    auto compare = [&](NodeSet extra, bool selected) {
      const Factor jt = joint(net);
      double worst = 0.0;
      for (const Assignment& ctx : assignments(vars, r.c)) {
        const auto cor = causal_odds_ratio(net, r.x, r.y, ctx, 1, 1);
        for (const Assignment& zs : assignments(vars, extra)) {
          Assignment full_ctx = ctx;
          full_ctx.insert(full_ctx.end(), zs.begin(), zs.end());
          if (selected) full_ctx.emplace_back(*r.s, 1);
          const auto o = conditional_or(jt, r.y, r.x, full_ctx, 1, 1);
          worst = std::max(worst, std::abs(o.log_value - cor.log_value));
        }
      }
      return worst;
    };
    if (suff.holds) {
      const double d = compare({}, false);
      j["cor_vs_or"] = d;
      ok = ok && d <= kOrTolerance;
    }
    if (r.s) {
      const CausalVerdict cc = check_case_control_causal(id, r.y, r.c);
      j["case_control"] = to_json(id.variables(), cc);
      if (cc.estimable_cor) {
        fired = true;
        const double d = compare({}, true);
        j["case_control_discrepancy"] = d;
        ok = ok && d <= kOrTolerance;
      }
      const NodeSet z = resolve(vars, z_names);
      const CausalVerdict bz = check_bias_breaking_z(id, r.y, r.c, z, &net);
      j["bias_breaking_z"] = to_json(id.variables(), bz);
      if (bz.estimable_cor) {
        fired = true;
        const double d = compare(z, true);
        j["bias_breaking_discrepancy"] = d;
        ok = ok && d <= kOrTolerance;
      }
    }
    j["conditions_fired"] = fired;
    pass = fired && ok;
  } else {
    fail(ErrorCode::invalid_argument, "unknown suite '" + suite + "'");
  }
  j["tolerance"] = kOrTolerance;
  j["pass"] = pass;
  emit(j);
  return pass ? 0 : 1;
}

int run_moralize(const std::string& path, const Names& of, bool as_json) {
  const LoadedGraph g = load(path);
  const Dag& dag = require_dag(g, "moralize");
  const NodeSet a = of.empty() ? dag.nodes() : resolve(dag.variables(), of);
  const UndirectedGraph m = dag.moralize(a);
  if (!as_json) {
    std::cout << serialize_graph(to_spec(m));
    return 0;
  }
  Json j = report_header("moralize");
  j["graph"] = path;
  j["nodes"] = names_json(dag.variables(), m.nodes());
  Json edges = Json::array();
  for (auto [u, v] : m.edges()) edges.push_back({dag.variables().name(u), dag.variables().name(v)});
  j["edges"] = std::move(edges);
  Json cl = Json::array();
  for (NodeSet c : cliques(m)) cl.push_back(names_json(dag.variables(), c));
  j["cliques"] = std::move(cl);
  emit(j);
  return 0;
}

int run_dot(const std::string& path) {
  std::cout << to_dot(load_graph(path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphical criteria for outcome-dependent sampling designs"};
  app.require_subcommand(1);

  std::string graph, cpt, csv, method = "moralization";
  Names a, b, given, pool;
  std::optional<Names> z;
  Names z_list;
  RoleOptions roles;
  std::string x, y, s;
  std::size_t max_size = 0, n = 0, reps = 0;
  std::uint64_t seed = 1;
  bool select = false, search = false, as_json = false;
  std::string out, model, correction = "none", suite;
  unsigned threads = 1;

  auto* ci = app.add_subcommand("check-ci", "test A _||_ B | Z");
  ci->add_option("graph", graph)->required();
  ci->add_option("--a", a)->required()->delimiter(',');
  ci->add_option("--b", b)->required()->delimiter(',');
  ci->add_option("--given,--z", given)->delimiter(',');
  ci->add_option("--method", method, "moralization or d-separation")
      ->check(CLI::IsMember({"moralization", "d-separation"}));

  auto* col = app.add_subcommand("collapse", "odds-ratio collapsibility");
  col->add_option("graph", graph)->required();
  roles.add(col, true);

  auto* nt = app.add_subcommand("null-test", "testability of Y _||_ X | C from selected data");
  nt->add_option("graph", graph)->required();
  roles.add(nt, false);

  auto* bb = app.add_subcommand("bias-breaking", "minimal covariate sets that collapse over S");
  bb->add_option("graph", graph)->required();
  bb->add_option("--x", x)->required();
  bb->add_option("--y", y)->required();
  bb->add_option("--s", s);
  bb->add_option("--pool", pool)->delimiter(',');
  bb->add_option("--max-size", max_size, "0 = pool size");

  auto* idf = app.add_subcommand("identify", "causal testability and estimability");
  idf->add_option("graph", graph)->required();
  idf->add_option("--x", x)->required();
  idf->add_option("--y", y)->required();
  idf->add_option("--s", s, "selection node (must match the graph)");
  idf->add_option("--c", given)->delimiter(',');
  idf->add_option("--z", z_list)->delimiter(',');
  idf->add_option("--cpt", cpt, "network file for the positivity check");
  idf->add_flag("--search", search, "list minimal bias-breaking Z");

  auto* sim = app.add_subcommand("simulate", "sample a dataset");
  sim->add_option("graph", graph)->required();
  sim->add_option("cpt", cpt)->required();
  sim->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed);
  sim->add_flag("--select", select, "keep only rows with S = 1");
  sim->add_option("--out", out)->required();
  sim->add_option("--threads", threads, "0 = hardware concurrency");

  auto* est = app.add_subcommand("estimate", "odds ratios from a dataset");
  est->add_option("csv", csv)->required();
  est->add_option("--x", x)->required();
  est->add_option("--y", y)->required();
  est->add_option("--given", given)->delimiter(',');
  est->add_option("--model", model, "generators, e.g. X,C;Y,C");
  est->add_option("--correction", correction)->check(CLI::IsMember({"none", "haldane-anscombe"}));
  est->add_option("--bootstrap", reps, "bootstrap replicates");
  est->add_option("--seed", seed);

  auto* ver = app.add_subcommand("verify", "check graphical claims against exact odds ratios");
  ver->add_option("graph", graph)->required();
  ver->add_option("cpt", cpt)->required();
  ver->add_option("--suite", suite)->required()->check(CLI::IsMember({"collapsibility", "causal", "null"}));
  roles.add(ver, true);
  ver->add_option("--z", z_list)->delimiter(',');

  auto* mor = app.add_subcommand("moralize", "moral graph of An(A)");
  mor->add_option("graph", graph)->required();
  mor->add_option("--of", a)->delimiter(',');
  mor->add_flag("--json", as_json);

  auto* dot = app.add_subcommand("dot", "Graphviz export");
  dot->add_option("graph", graph)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ci->parsed()) return run_check_ci(graph, a, b, given, method);
    if (col->parsed()) return run_collapse(graph, roles);
    if (nt->parsed()) return run_null_test(graph, roles);
    if (bb->parsed()) return run_bias_breaking(graph, x, y, s, pool, max_size);
    if (idf->parsed()) {
      if (idf->count("--z") > 0) z = z_list;
      return run_identify(graph, x, y, s, given, z, cpt, search);
    }
    if (sim->parsed()) return run_simulate(graph, cpt, n, seed, select, out, threads);
    if (est->parsed()) return run_estimate(csv, x, y, given, model, correction, reps, seed);
    if (ver->parsed()) return run_verify(graph, cpt, suite, roles, z_list);
    if (mor->parsed()) return run_moralize(graph, a, as_json);
    if (dot->parsed()) return run_dot(graph);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
