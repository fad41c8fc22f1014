#include <cmath>

#include "common.hpp"
#include "oracles.hpp"

using namespace odsg;
using namespace odsg::testing;

namespace {

const char* kChain =
    "node X states=0,1\nnode Y states=0,1\nnode S kind=selection states=0,1\n"
    "edge X -> Y\nedge Y -> S\n";

ContingencyTable table2x2(const Dag& g, std::vector<double> counts) {
  const auto& v = g.variables();
  return ContingencyTable{g.variables_ptr(), {v.at("X"), v.at("Y")}, {2, 2}, std::move(counts)};
}

ContingencyTable random_table(Rng& rng, const Dag& g, double scale) {
  ContingencyTable t{g.variables_ptr(), {}, {}, {}};
  std::size_t size = 1;
  for (NodeId n : g.nodes()) {
    t.scope.push_back(n);
    t.cardinalities.push_back(g.variables()[n].cardinality());
    size *= t.cardinalities.back();
  }
  for (std::size_t i = 0; i < size; ++i) t.counts.push_back(1.0 + std::floor(rng.uniform() * scale));
  return t;
}

}  // namespace

TEST_CASE("rng streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) != substream_seed(2, 0));
  Rng c(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const double w[3] = {0.0, 2.0, 0.0};
  CHECK(c.categorical(w, 3) == 1);
}

TEST_CASE("forward sampling") {
  const auto net = network_from(kChain, "cpt X\n0.3 0.7\ncpt Y given X\n0.8 0.2\n0.4 0.6\ncpt S given Y\n0.9 0.1\n0.5 0.5\n");
  const Dataset one = forward_sample(net, 20000, 9, 1);
  const Dataset four = forward_sample(net, 20000, 9, 4);
  CHECK(one.cells == four.cells);
  CHECK(one.rows() == 20000);
  CHECK(one.provenance.regime == Regime::observational);
  CHECK(forward_sample(net, 100, 10).cells != forward_sample(net, 100, 11).cells);

  double mean = 0;
  for (std::size_t r = 0; r < one.rows(); ++r) mean += one.at(r, 0);
  mean /= static_cast<double>(one.rows());
  CHECK(std::abs(mean - 0.7) < 4 * std::sqrt(0.21 / 20000));

  const auto constant = network_from("node A states=0,1\n", "cpt A\n0 1\n");
  const Dataset c = forward_sample(constant, 500, 1);
  for (auto cell : c.cells) CHECK(cell == 1);
}

TEST_CASE("retrospective sampling") {
  const auto net = network_from(kChain, "cpt X\n0.3 0.7\ncpt Y given X\n0.8 0.2\n0.4 0.6\ncpt S given Y\n0.9 0.1\n0.5 0.5\n");
  const Dataset sel = retrospective_sample(net, 9000, 3, 1);
  CHECK(sel.rows() == 9000);
  CHECK(sel.provenance.regime == Regime::selected);
  CHECK(sel.provenance.n_rejected > 0);
  for (std::size_t r = 0; r < sel.rows(); ++r) REQUIRE(sel.at(r, 2) == 1);
  const Dataset par = retrospective_sample(net, 9000, 3, 3);
  CHECK(par.cells == sel.cells);
  CHECK(par.provenance.n_rejected == sel.provenance.n_rejected);

  const auto always = network_from(kChain, "cpt X\n0.3 0.7\ncpt Y given X\n0.8 0.2\n0.4 0.6\ncpt S given Y\n0 1\n0 1\n");
  CHECK(retrospective_sample(always, 1000, 1).provenance.n_rejected == 0);

  const auto never = network_from(kChain, "cpt X\n0.3 0.7\ncpt Y given X\n0.8 0.2\n0.4 0.6\ncpt S given Y\n1 0\n1 0\n");
  CHECK(error_of([&] { retrospective_sample(never, 10, 1, 1, 5000); }) == ErrorCode::selection_too_rare);

  const auto no_s = network_from("node A states=0,1\n", "cpt A\n0.5 0.5\n");
  CHECK(error_of([&] { retrospective_sample(no_s, 10, 1); }) == ErrorCode::no_selection_node);
}

TEST_CASE("selected rows follow the conditional distribution given S=1") {
  const auto net = network_from(kChain, "cpt X\n0.3 0.7\ncpt Y given X\n0.8 0.2\n0.4 0.6\ncpt S given Y\n0.9 0.1\n0.5 0.5\n");
  const auto& v = net.variables();
  const std::size_t n = 40000;
  const Factor target = condition(joint(net), {{v.at("S"), 1}});
  const auto t = tabulate(retrospective_sample(net, n, 12), {v.at("X"), v.at("Y")});
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = target.values()[i];
    CHECK(std::abs(t.counts[i] / n - p) < 4 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("tabulate") {
  const auto net = network_from(kChain, "cpt X\n0.3 0.7\ncpt Y given X\n0.8 0.2\n0.4 0.6\ncpt S given Y\n0.9 0.1\n0.5 0.5\n");
  const auto& v = net.variables();
  const Dataset d = forward_sample(net, 1000, 5);
  const auto t = tabulate(d, {v.at("X"), v.at("Y")});
  CHECK(t.total() == 1000);
  CHECK(t.counts.size() == 4);
  const Factor f = t.as_factor();
  CHECK(f.total() == 1000);
}

TEST_CASE("empirical odds ratio") {
  const Dag g = dag_from("node X states=0,1\nnode Y states=0,1\n");
  const auto& v = g.variables();
  // rows X, columns Y
  const auto t = table2x2(g, {40, 10, 10, 40});
  const auto r = empirical_or(t, v.at("Y"), v.at("X"), {});
  CHECK(r.report.value == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(r.log_se == doctest::Approx(std::sqrt(1.0 / 40 + 1.0 / 10 + 1.0 / 10 + 1.0 / 40)).epsilon(1e-12));

  const auto doubled = empirical_or(table2x2(g, {80, 20, 20, 80}), v.at("Y"), v.at("X"), {});
  CHECK(doubled.report.value == doctest::Approx(16.0));
  CHECK(doubled.log_se == doctest::Approx(r.log_se / std::sqrt(2.0)));

  const auto holes = table2x2(g, {40, 0, 10, 40});
  CHECK(error_of([&] { empirical_or(holes, v.at("Y"), v.at("X"), {}); }) == ErrorCode::zero_cell);
  const auto ha = empirical_or(holes, v.at("Y"), v.at("X"), {}, Correction::haldane_anscombe);
  CHECK(ha.report.value == doctest::Approx((40.5 * 40.5) / (0.5 * 10.5)));
  CHECK(ha.cells[2] == 0.5);
}

TEST_CASE("iterative proportional fitting") {
  const Dag g = dag_from("node A states=0,1\nnode B states=0,1,2\nnode C states=0,1\n");
  const auto& v = g.variables();
  Rng rng(17);
  const auto t = random_table(rng, g, 30);
  const NodeId a = v.at("A"), b = v.at("B"), c = v.at("C");

  SUBCASE("saturated model reproduces the table") {
    const auto fit = ipf_fit(t, {NodeSet{a, b, c}});
    CHECK(fit.iterations == 1);
    for (std::size_t i = 0; i < t.counts.size(); ++i) CHECK(std::abs(fit.fitted[i] - t.counts[i]) < 1e-9);
  }
  SUBCASE("independence model has unit odds ratio") {
    const Dag g2 = dag_from("node X states=0,1\nnode Y states=0,1\n");
    const auto t2 = table2x2(g2, {30, 12, 7, 25});
    const auto& v2 = g2.variables();
    const auto fit = ipf_fit(t2, {NodeSet{v2.at("X")}, NodeSet{v2.at("Y")}});
    const ContingencyTable fitted{t2.variables, t2.scope, t2.cardinalities, fit.fitted};
    CHECK(std::abs(empirical_or(fitted, v2.at("Y"), v2.at("X"), {}).report.log_value) < 1e-12);
  }
  SUBCASE("decomposable model matches the closed form") {
    const std::vector<NodeSet> gens{NodeSet{b, c}, NodeSet{a, b}};
    const auto fit = ipf_fit(t, gens);
    const auto order = running_intersection_order(gens);
    const auto closed = decomposable_mle(t, order);
    for (std::size_t i = 0; i < closed.size(); ++i) CHECK(std::abs(fit.fitted[i] - closed[i]) < 1e-9);
    CHECK(fit.converged);
  }
  SUBCASE("no-three-way interaction iterates") {
    const auto fit = ipf_fit(t, {NodeSet{a, b}, NodeSet{b, c}, NodeSet{a, c}});
    CHECK(fit.converged);
    CHECK(fit.iterations > 1);
    for (std::size_t i = 1; i < fit.gap_history.size(); ++i) CHECK(fit.gap_history[i] <= fit.gap_history[i - 1] + 1e-12);
    CHECK(fit.max_marginal_gap < kIpfTolerance);
    const auto capped = ipf_fit_unchecked(t, {NodeSet{a, b}, NodeSet{b, c}, NodeSet{a, c}}, 1e-14, 1);
    CHECK_FALSE(capped.converged);
    CHECK(error_of([&] { ipf_fit(t, {NodeSet{a, b}, NodeSet{b, c}, NodeSet{a, c}}, 1e-14, 1); }) ==
          ErrorCode::not_converged);
  }
  SUBCASE("bad input") {
    CHECK(error_of([&] { ipf_fit(t, {NodeSet{a, b}}); }) == ErrorCode::invalid_argument);
    ContingencyTable empty = t;
    std::fill(empty.counts.begin(), empty.counts.end(), 0.0);
    CHECK(error_of([&] { ipf_fit(empty, {NodeSet{a, b, c}}); }) == ErrorCode::degenerate_marginal);
  }
  SUBCASE("running intersection order") {
    const auto order = running_intersection_order({NodeSet{a}, NodeSet{b, c}, NodeSet{a, b}});
    REQUIRE(order.size() == 3);
    for (std::size_t k = 1; k < order.size(); ++k) {
      NodeSet before;
      for (std::size_t i = 0; i < k; ++i) before = before | order[i];
      const NodeSet sep = order[k] & before;
      bool inside = false;
      for (std::size_t i = 0; i < k; ++i) inside = inside || order[i].contains(sep);
      CHECK(inside);
    }
  }
}

TEST_CASE("bootstrap standard error") {
  const Dag g = dag_from("node X states=0,1\nnode Y states=0,1\n");
  const auto& v = g.variables();
  const auto t = table2x2(g, {40, 10, 10, 40});
  const std::vector<NodeSet> sat{NodeSet{v.at("X"), v.at("Y")}};
  const auto woolf = empirical_or(t, v.at("Y"), v.at("X"), {}).log_se;
  const auto boot = bootstrap_se(t, v.at("Y"), v.at("X"), {}, sat, 2000, 8);
  REQUIRE(boot.log_se.size() == 1);
  CHECK(std::abs(boot.log_se[0] / woolf - 1.0) < 0.15);
  CHECK(boot.reps == 2000);
  CHECK(bootstrap_se(t, v.at("Y"), v.at("X"), {}, sat, 200, 8).log_se ==
        bootstrap_se(t, v.at("Y"), v.at("X"), {}, sat, 200, 8).log_se);
  CHECK(bootstrap_se(t, v.at("Y"), v.at("X"), {}, sat, 1, 8).degenerate);
}
