#include <cmath>

#include "common.hpp"
#include "odsgraph/causal.hpp"

using namespace odsg;
using namespace odsg::testing;

namespace {

InfluenceDiagram fixture_id(const std::string& name) { return InfluenceDiagram(fixture_dag(name)); }

const char* kConfounded =
    "node C states=0,1\nnode X states=0,1\nnode Y states=0,1\nnode S kind=selection states=0,1\n"
    "edge C -> X\nedge C -> Y\nedge X -> Y\nedge Y -> S\n";

const char* kConfoundedCpt =
    "cpt C\n0.4 0.6\n"
    "cpt X given C\n0.7 0.3\n0.2 0.8\n"
    "cpt Y given C,X\n0.9 0.1\n0.6 0.4\n0.8 0.2\n0.3 0.7\n"
    "cpt S given Y\n0.95 0.05\n0.4 0.6\n";

}  // namespace

TEST_CASE("influence diagrams") {
  const Dag g = fixture_dag("fig03_case_control");
  const auto& v = g.variables();
  const InfluenceDiagram id = build_influence_diagram(g, v.at("X"));
  CHECK(id.variables().name(id.sigma()) == "sigma");
  CHECK(id.target() == v.at("X"));
  CHECK(id.diagram().parents(v.at("X")).contains(id.sigma()));
  CHECK(id.base().nodes() == g.nodes());
  CHECK(error_of([&] { build_influence_diagram(g, v.at("S")); }) == ErrorCode::invalid_target);
  CHECK(error_of([&] { build_influence_diagram(id.diagram(), v.at("Y")); }) == ErrorCode::invalid_diagram);

  const Dag taken = dag_from("node sigma states=0,1\nnode X states=0,1\nedge sigma -> X\n");
  const auto renamed = build_influence_diagram(taken, taken.variables().at("X"));
  CHECK(renamed.variables().name(renamed.sigma()) == "sigma_X");

  const Dag single = dag_from("node X states=0,1\n");
  const auto minimal = build_influence_diagram(single, single.variables().at("X"));
  CHECK(minimal.diagram().size() == 2);
  CHECK(minimal.diagram().children(minimal.sigma()) == NodeSet{minimal.target()});

  const auto fixture = fixture_id("fig21_simple_case_control");
  CHECK(fixture.variables().name(fixture.target()) == "X");
}

TEST_CASE("sufficient covariates") {
  const auto hrt = fixture_id("fig17_hrt_intervention");
  const auto& v = hrt.variables();
  CHECK(check_sufficient_covariates(hrt, v.at("TCI"), ids(v, {"Age", "Smo"})).holds);
  const auto none = check_sufficient_covariates(hrt, v.at("TCI"), {});
  CHECK_FALSE(none.holds);
  CHECK_FALSE(none.failures.empty());

  const auto smo = fixture_id("fig20_smoking_intervention");
  const auto& w = smo.variables();
  CHECK(check_sufficient_covariates(smo, w.at("TCI"), ids(w, {"Occ"})).holds);
  CHECK_FALSE(check_sufficient_covariates(smo, w.at("TCI"), ids(w, {"HRT"})).holds);

  const auto bare = build_influence_diagram(dag_from("node X states=0,1\nnode Y states=0,1\nedge X -> Y\n"),
                                            NodeId{0});
  CHECK(check_sufficient_covariates(bare, bare.variables().at("Y"), {}).holds);

  const auto sets = find_sufficient_sets(hrt, v.at("TCI"), ids(v, {"Age", "Occ", "Smo", "THist"}), 2);
  REQUIRE_FALSE(sets.empty());
  CHECK(sets.size() == 1);
  CHECK(sets.front() == ids(v, {"Age", "Smo"}));
}

TEST_CASE("case-control identification") {
  const auto matched = fixture_id("fig23_hrt_matched");
  const auto& v = matched.variables();
  const auto ok = check_case_control_causal(matched, v.at("TCI"), ids(v, {"Age", "Smo"}));
  CHECK(ok.estimable_cor);
  CHECK(ok.testable);

  const auto simple = fixture_id("fig21_simple_case_control");
  CHECK(check_case_control_causal(simple, simple.variables().at("Y"), ids(simple.variables(), {"C"})).estimable_cor);
  CHECK_FALSE(check_case_control_causal(simple, simple.variables().at("Y"), {}).estimable_cor);

  const auto b = build_influence_diagram(fixture_dag("fig08_matched"), NodeId{0});
  CHECK_FALSE(check_case_control_causal(b, b.variables().at("Y"), {}).estimable_cor);
}

TEST_CASE("bias-breaking Z") {
  const auto ttp = fixture_id("fig24_time_to_pregnancy");
  const auto& v = ttp.variables();
  const auto with_z = check_bias_breaking_z(ttp, v.at("Y"), ids(v, {"C"}), ids(v, {"Z"}));
  CHECK(with_z.estimable_cor);
  CHECK_FALSE(with_z.swapped);
  REQUIRE(with_z.assumptions_flagged.size() == 1);
  CHECK_FALSE(check_bias_breaking_z(ttp, v.at("Y"), ids(v, {"C"}), {}).estimable_cor);
  const auto zs = find_z_candidates(ttp, v.at("Y"), ids(v, {"C"}), ids(v, {"Z"}), 1);
  REQUIRE(zs.size() == 1);
  CHECK(zs[0] == ids(v, {"Z"}));
  CHECK(find_z_candidates(ttp, v.at("Y"), ids(v, {"C"}), {}, 1).empty());

  const auto drop = fixture_id("fig27_dropout");
  const auto& d = drop.variables();
  const auto swapped = check_bias_breaking_z(drop, d.at("Y"), ids(d, {"C"}), {});
  CHECK(swapped.estimable_cor);
  CHECK(swapped.swapped);

  SUBCASE("empty Z agrees with the case-control verdict") {
    const auto simple = fixture_id("fig21_simple_case_control");
    const auto& s = simple.variables();
    for (NodeSet c : {NodeSet{}, ids(s, {"C"})}) {
      CHECK(check_bias_breaking_z(simple, s.at("Y"), c, {}).estimable_cor ==
            check_case_control_causal(simple, s.at("Y"), c).estimable_cor);
    }
  }
  SUBCASE("selection unrelated to anything") {
    const auto iso = build_influence_diagram(
        dag_from("node X states=0,1\nnode Y states=0,1\nnode S kind=selection states=0,1\nedge X -> Y\n"), NodeId{0});
    const auto zs0 = find_z_candidates(iso, iso.variables().at("Y"), {}, {}, 0);
    REQUIRE(zs0.size() == 1);
    CHECK(zs0[0].empty());
  }
  SUBCASE("positivity checked against a network") {
    const auto net = network_from(kConfounded, kConfoundedCpt);
    const auto id = build_influence_diagram(net.dag(), net.variables().at("X"));
    const auto& w = id.variables();
    const auto r = check_bias_breaking_z(id, w.at("Y"), ids(w, {"C"}), {}, &net);
    CHECK(r.estimable_cor);
    CHECK(r.assumptions_flagged.empty());
  }
}

TEST_CASE("interventions") {
  const auto net = network_from(kConfounded, kConfoundedCpt);
  const auto& v = net.variables();
  const NodeId x = v.at("X"), y = v.at("Y"), c = v.at("C");

  const Factor doit = intervention_distribution(net, x, 1);
  CHECK(doit.scope() == std::vector<NodeId>{c, x, y});
  const Factor xm = marginalize(doit, NodeSet{x});
  CHECK(xm.values()[0] == 0.0);
  CHECK(xm.values()[1] == doctest::Approx(1.0).epsilon(1e-15));

  for (std::size_t val : {0u, 1u}) {
    const auto st = standardize(net, x, y, NodeSet{c}, val);
    const Factor ym = marginalize(intervention_distribution(net, x, val), NodeSet{y});
    for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(st[k] - ym.values()[k]) < 1e-12);
  }
  // p(Y=1 | do(X=1)) = 0.4*0.4 + 0.6*0.7
  CHECK(standardize(net, x, y, NodeSet{c}, 1)[1] == doctest::Approx(0.58).epsilon(1e-14));

  const auto cor = causal_odds_ratio(net, x, y, {}, 1, 1);
  const auto inv = causal_odds_ratio(net, x, y, {}, 1, 0, 1);
  CHECK(cor.value * inv.value == doctest::Approx(1.0).epsilon(1e-12));
  const auto in_c = causal_odds_ratio(net, x, y, {{c, 0}}, 1, 1);
  CHECK(in_c.value == doctest::Approx((0.4 * 0.9) / (0.6 * 0.1)).epsilon(1e-12));

  SUBCASE("no effect") {
    const auto flat = network_from(kConfounded,
                                   "cpt C\n0.4 0.6\ncpt X given C\n0.7 0.3\n0.2 0.8\n"
                                   "cpt Y given C,X\n0.9 0.1\n0.9 0.1\n0.3 0.7\n0.3 0.7\ncpt S given Y\n0.9 0.1\n0.5 0.5\n");
    CHECK(std::abs(causal_odds_ratio(flat, x, y, {}, 1, 1).log_value) < 1e-12);
  }
  SUBCASE("positivity") {
    const auto gap = network_from(kConfounded,
                                  "cpt C\n0.4 0.6\ncpt X given C\n1 0\n0.2 0.8\n"
                                  "cpt Y given C,X\n0.9 0.1\n0.6 0.4\n0.8 0.2\n0.3 0.7\ncpt S given Y\n0.9 0.1\n0.5 0.5\n");
    CHECK(error_of([&] { standardize(gap, x, y, NodeSet{c}, 1); }) == ErrorCode::positivity_violation);
  }
  SUBCASE("selection with children") {
    const auto bad = network_from(
        "node X states=0,1\nnode S kind=selection states=0,1\nnode Y states=0,1\nedge X -> S\nedge S -> Y\n",
        "cpt X\n0.5 0.5\ncpt S given X\n0.5 0.5\n0.2 0.8\ncpt Y given S\n0.5 0.5\n0.1 0.9\n");
    CHECK(error_of([&] { intervention_distribution(bad, bad.variables().at("X"), 1); }) ==
          ErrorCode::selection_under_intervention);
  }
}

TEST_CASE("case-control odds ratio recovers the causal odds ratio") {
  const auto net = network_from(kConfounded, kConfoundedCpt);
  const auto& v = net.variables();
  const NodeId x = v.at("X"), y = v.at("Y"), c = v.at("C"), s = v.at("S");
  const Factor j = joint(net);
  for (std::size_t cv : {0u, 1u}) {
    const double sel = conditional_or(j, y, x, {{c, cv}, {s, 1}}, 1, 1).log_value;
    const double cor = causal_odds_ratio(net, x, y, {{c, cv}}, 1, 1).log_value;
    CHECK(std::abs(sel - cor) < 1e-12);
  }
}

TEST_CASE("interventions without confounding") {
  SUBCASE("X disconnected") {
    const auto net = network_from("node X states=0,1\nnode Y states=0,1,2\n",
                                  "cpt X\n0.3 0.7\ncpt Y\n0.2 0.5 0.3\n");
    const auto& v = net.variables();
    const Factor y = marginalize(intervention_distribution(net, v.at("X"), 0), NodeSet{v.at("Y")});
    const Factor obs = marginalize(joint(net), NodeSet{v.at("Y")});
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(y.values()[k] - obs.values()[k]) < 1e-15);
    CHECK(std::abs(causal_odds_ratio(net, v.at("X"), v.at("Y"), {}, 2, 1).log_value) < 1e-15);
  }
  SUBCASE("X randomized") {
    const auto net = network_from("node X states=0,1\nnode C states=0,1\nnode Y states=0,1\nedge X -> Y\nedge C -> Y\n",
                                  "cpt X\n0.5 0.5\ncpt C\n0.2 0.8\ncpt Y given X,C\n0.9 0.1\n0.5 0.5\n0.4 0.6\n0.1 0.9\n");
    const auto& v = net.variables();
    const auto st = standardize(net, v.at("X"), v.at("Y"), {}, 1);
    const Factor given_x = condition(marginalize(joint(net), NodeSet{v.at("X"), v.at("Y")}), {{v.at("X"), 1}});
    CHECK(std::abs(st[1] - given_x.values()[1]) < 1e-15);
  }
  SUBCASE("confounding separates the causal and observed odds ratios") {
    const auto net = network_from(kConfounded, kConfoundedCpt);
    const auto& v = net.variables();
    const Factor j = marginalize(joint(net), ids(v, {"C", "X", "Y"}));
    const double marginal = conditional_or(j, v.at("Y"), v.at("X"), {}, 1, 1).log_value;
    const double cor = causal_odds_ratio(net, v.at("X"), v.at("Y"), {}, 1, 1).log_value;
    CHECK(std::abs(marginal - cor) > 0.05);
    for (std::size_t c = 0; c < 2; ++c) {
      const Assignment ctx{{v.at("C"), c}};
      CHECK(conditional_or(j, v.at("Y"), v.at("X"), ctx, 1, 1).log_value ==
            doctest::Approx(causal_odds_ratio(net, v.at("X"), v.at("Y"), ctx, 1, 1).log_value).epsilon(1e-12));
    }
  }
}
