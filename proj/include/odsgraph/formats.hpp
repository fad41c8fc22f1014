#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "odsgraph/exact.hpp"
#include "odsgraph/graph.hpp"
#include "odsgraph/simulate.hpp"

namespace odsg {

/// Whole file as a string; throws parse_error when it cannot be read.
std::string read_file(const std::string& path);

/// Graph description:
///   node <name> [kind=random|selection] [states=s1,s2,...]
///   edge <a> -> <b>        (or `edge <a> -- <b>`; one style per file)
///   decision <name> target=<x>
/// `#` starts a comment. The decision node is appended after all declared
/// nodes and its edge after all declared edges. Errors cite `source:line`.
GraphSpec parse_graph(std::string_view text, std::string_view source = "<input>");
GraphSpec load_graph(const std::string& path);

/// Canonical text form; parse_graph(serialize_graph(g)) == g for parsed specs.
std::string serialize_graph(const GraphSpec& spec);

GraphSpec to_spec(const Dag& dag);
GraphSpec to_spec(const UndirectedGraph& graph);

/// Lossy Graphviz rendering: selection nodes doubled, decision nodes boxed.
std::string to_dot(const GraphSpec& spec);

/// CPT description, one block per node:
///   cpt <name> [given p1,p2,...]
///   <one row of probabilities per parent configuration>
/// Rows list parent configurations in row-major order of the parents as
/// written (last parent fastest). Entries are decimals or p/q fractions,
/// separated by whitespace or commas. Rows must sum to 1 within 1e-9 and
/// are rescaled to sum to exactly 1.
std::vector<Cpt> parse_cpts(std::string_view text, const VariableTable& vars,
                            std::string_view source = "<input>");
std::string serialize_cpts(const DiscreteNetwork& net);

/// The graph without any decision node, paired with the CPTs.
DiscreteNetwork load_network(const GraphSpec& graph, std::string_view cpt_text,
                             std::string_view source = "<input>");

/// CSV with a `#` provenance prelude (regime, seed, counts, states, kinds),
/// a header row of variable names, then state labels.
void write_csv(const Dataset& data, std::ostream& out);
/// Variables are taken from `# states` / `# kind` lines; columns without a
/// states line get their observed labels in sorted order.
Dataset read_csv(std::string_view text, std::string_view source = "<input>");

}  // namespace odsg
