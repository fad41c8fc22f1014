#include "odsgraph/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace odsg {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::parse_error, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> tokens(std::string_view line, std::string_view seps = " \t\r") {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    i = line.find_first_not_of(seps, i);
    if (i == std::string_view::npos) break;
    auto j = line.find_first_of(seps, i);
    if (j == std::string_view::npos) j = line.size();
    out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return std::string(trim(hash == std::string_view::npos ? line : line.substr(0, hash)));
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& msg) {
  fail(ErrorCode::parse_error, std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_list(std::string_view s) { return tokens(s, ","); }

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  auto one = [](std::string_view t) -> std::optional<double> {
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) return std::nullopt;
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return one(s);
  auto num = one(s.substr(0, slash));
  auto den = one(s.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph files

GraphSpec parse_graph(std::string_view text, std::string_view source) {
  GraphSpec spec;
  std::set<std::string> names;
  std::optional<std::size_t> decision_line;
  const auto lines = split_lines(text);
  for (std::size_t ln = 1; ln <= lines.size(); ++ln) {
    const std::string line = strip_comment(lines[ln - 1]);
    if (line.empty()) continue;
    const auto tok = tokens(line);
    const std::string& kw = tok[0];
    if (kw == "node") {
      if (tok.size() < 2) parse_fail(source, ln, "node needs a name");
      VariableMeta meta{tok[1], VariableKind::random, {}};
      if (tok[1].find('=') != std::string::npos) parse_fail(source, ln, "node needs a name");
      for (std::size_t i = 2; i < tok.size(); ++i) {
        const auto eq = tok[i].find('=');
        if (eq == std::string::npos) parse_fail(source, ln, "expected key=value, got '" + tok[i] + "'");
        const std::string key = tok[i].substr(0, eq);
        const std::string value = tok[i].substr(eq + 1);
        if (key == "kind") {
          if (value == "random") {
            meta.kind = VariableKind::random;
          } else if (value == "selection") {
            meta.kind = VariableKind::selection;
          } else {
            parse_fail(source, ln, "unknown node kind '" + value + "'");
          }
        } else if (key == "states") {
          meta.states = split_list(value);
          if (meta.states.size() < 2) parse_fail(source, ln, "a node needs at least two states");
          std::set<std::string> uniq(meta.states.begin(), meta.states.end());
          if (uniq.size() != meta.states.size()) parse_fail(source, ln, "repeated state label");
        } else {
          parse_fail(source, ln, "unknown node attribute '" + key + "'");
        }
      }
      if (!names.insert(meta.name).second) parse_fail(source, ln, "duplicate node '" + meta.name + "'");
      spec.nodes.push_back(std::move(meta));
    } else if (kw == "edge") {
      if (tok.size() != 4) parse_fail(source, ln, "expected 'edge <a> -> <b>' or 'edge <a> -- <b>'");
      GraphSpec::EdgeStyle style;
      if (tok[2] == "->") {
        style = GraphSpec::EdgeStyle::directed;
      } else if (tok[2] == "--") {
        style = GraphSpec::EdgeStyle::undirected;
      } else {
        parse_fail(source, ln, "unknown edge operator '" + tok[2] + "'");
      }
      if (spec.style != GraphSpec::EdgeStyle::none && spec.style != style) {
        parse_fail(source, ln, "directed and undirected edges cannot be mixed");
      }
      spec.style = style;
      spec.edges.emplace_back(tok[1], tok[3]);
    } else if (kw == "decision") {
      if (decision_line) parse_fail(source, ln, "only one decision node is allowed");
      if (tok.size() != 3 || tok[2].rfind("target=", 0) != 0) {
        parse_fail(source, ln, "expected 'decision <name> target=<node>'");
      }
      spec.decision.emplace(tok[1], tok[2].substr(7));
      decision_line = ln;
    } else {
      parse_fail(source, ln, "unknown directive '" + kw + "'");
    }
  }
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    for (const auto& end : {spec.edges[i].first, spec.edges[i].second}) {
      if (!names.count(end)) {
        fail(ErrorCode::dangling_edge,
             std::string(source) + ": edge " + spec.edges[i].first + " - " + spec.edges[i].second +
                 " names undeclared node '" + end + "'");
      }
    }
  }
  if (spec.decision) {
    const auto& [name, target] = *spec.decision;
    if (spec.style == GraphSpec::EdgeStyle::undirected) {
      parse_fail(source, *decision_line, "a decision node needs a directed graph");
    }
    if (names.count(name)) parse_fail(source, *decision_line, "duplicate node '" + name + "'");
    if (!names.count(target)) parse_fail(source, *decision_line, "unknown target '" + target + "'");
    spec.nodes.push_back(VariableMeta{name, VariableKind::decision, {}});
    spec.edges.emplace_back(name, target);
    spec.style = GraphSpec::EdgeStyle::directed;
  }
  return spec;
}

GraphSpec load_graph(const std::string& path) { return parse_graph(read_file(path), path); }

std::string serialize_graph(const GraphSpec& spec) {
  std::ostringstream out;
  std::optional<std::string> decision;
  for (const auto& n : spec.nodes) {
    if (n.kind == VariableKind::decision) {
      decision = n.name;
      continue;
    }
    out << "node " << n.name << " kind=" << to_string(n.kind);
    if (!n.states.empty()) out << " states=" << join(n.states, ",");
    out << "\n";
  }
  if (decision) {
    std::string target;
    for (const auto& [a, b] : spec.edges) {
      if (a == *decision) target = b;
    }
    out << "decision " << *decision << " target=" << target << "\n";
  }
  const char* op = spec.style == GraphSpec::EdgeStyle::undirected ? " -- " : " -> ";
  for (const auto& [a, b] : spec.edges) {
    if (decision && a == *decision) continue;
    out << "edge " << a << op << b << "\n";
  }
  return out.str();
}

namespace {

GraphSpec spec_from(const VariableTable& vars, NodeSet nodes,
                    const std::vector<std::pair<NodeId, NodeId>>& edges, GraphSpec::EdgeStyle style) {
  GraphSpec spec;
  spec.style = edges.empty() ? GraphSpec::EdgeStyle::none : style;
  for (NodeId v : nodes) spec.nodes.push_back(vars[v]);
  for (auto [a, b] : edges) {
    if (vars[a].kind == VariableKind::decision) {
      spec.decision.emplace(vars.name(a), vars.name(b));
      continue;
    }
    spec.edges.emplace_back(vars.name(a), vars.name(b));
  }
  // Keep the parser's layout: decision node and its edge go last.
  std::stable_partition(spec.nodes.begin(), spec.nodes.end(),
                        [](const VariableMeta& m) { return m.kind != VariableKind::decision; });
  if (spec.decision) spec.edges.push_back(*spec.decision);
  return spec;
}

}  // namespace

GraphSpec to_spec(const Dag& dag) {
  return spec_from(dag.variables(), dag.nodes(), dag.edges(), GraphSpec::EdgeStyle::directed);
}

GraphSpec to_spec(const UndirectedGraph& graph) {
  return spec_from(graph.variables(), graph.nodes(), graph.edges(), GraphSpec::EdgeStyle::undirected);
}

std::string to_dot(const GraphSpec& spec) {
  const bool undirected = spec.style == GraphSpec::EdgeStyle::undirected;
  std::ostringstream out;
  out << (undirected ? "graph" : "digraph") << " G {\n";
  for (const auto& n : spec.nodes) {
    out << "  \"" << n.name << "\"";
    if (n.kind == VariableKind::selection) out << " [shape=doublecircle]";
    if (n.kind == VariableKind::decision) out << " [shape=box]";
    out << ";\n";
  }
  for (const auto& [a, b] : spec.edges) {
    out << "  \"" << a << "\" " << (undirected ? "--" : "->") << " \"" << b << "\";\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// CPT files

std::vector<Cpt> parse_cpts(std::string_view text, const VariableTable& vars,
                            std::string_view source) {
  std::vector<Cpt> out;
  std::size_t rows_expected = 0;
  std::size_t rows_seen = 0;
  std::size_t header_line = 0;
  auto close_block = [&] {
    if (!out.empty() && rows_seen != rows_expected) {
      parse_fail(source, header_line,
                 "cpt " + vars.name(out.back().node) + " has " + std::to_string(rows_seen) +
                     " rows, expected " + std::to_string(rows_expected));
    }
  };
  const auto lines = split_lines(text);
  for (std::size_t ln = 1; ln <= lines.size(); ++ln) {
    const std::string line = strip_comment(lines[ln - 1]);
    if (line.empty()) continue;
    const auto tok = tokens(line);
    if (tok[0] == "cpt") {
      close_block();
      if (tok.size() != 2 && !(tok.size() == 4 && tok[2] == "given")) {
        parse_fail(source, ln, "expected 'cpt <node> [given <p1,p2,...>]'");
      }
      auto node = vars.find(tok[1]);
      if (!node) parse_fail(source, ln, "unknown node '" + tok[1] + "'");
      Cpt cpt{*node, {}, {}};
      rows_expected = 1;
      if (tok.size() == 4) {
        for (const auto& p : split_list(tok[3])) {
          auto id = vars.find(p);
          if (!id) parse_fail(source, ln, "unknown parent '" + p + "'");
          cpt.parents.push_back(*id);
          rows_expected *= vars[*id].cardinality();
        }
      }
      if (vars[*node].cardinality() == 0) {
        parse_fail(source, ln, "node '" + tok[1] + "' has no declared states");
      }
      out.push_back(std::move(cpt));
      rows_seen = 0;
      header_line = ln;
      continue;
    }
    if (out.empty()) parse_fail(source, ln, "probability row before any 'cpt' header");
    Cpt& cpt = out.back();
    const std::size_t k = vars[cpt.node].cardinality();
    const auto cells = tokens(line, " \t\r,");
    if (cells.size() != k) {
      parse_fail(source, ln, "expected " + std::to_string(k) + " probabilities, got " +
                                 std::to_string(cells.size()));
    }
    if (rows_seen == rows_expected) parse_fail(source, ln, "too many rows for cpt " + vars.name(cpt.node));
    std::vector<double> row;
    double sum = 0.0;
    for (const auto& c : cells) {
      auto v = parse_number(c);
      if (!v || *v < 0.0 || !std::isfinite(*v)) parse_fail(source, ln, "bad probability '" + c + "'");
      row.push_back(*v);
      sum += *v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      parse_fail(source, ln, "row sums to " + std::to_string(sum) + ", not 1");
    }
    for (double& v : row) cpt.table.push_back(v / sum);
    ++rows_seen;
  }
  close_block();
  return out;
}

std::string serialize_cpts(const DiscreteNetwork& net) {
  const auto& vars = net.variables();
  std::ostringstream out;
  out.precision(17);
  for (NodeId v : net.dag().nodes()) {
    const Cpt& cpt = net.cpt(v);
    out << "cpt " << vars.name(v);
    if (!cpt.parents.empty()) {
      std::vector<std::string> ps;
      for (NodeId p : cpt.parents) ps.push_back(vars.name(p));
      out << " given " << join(ps, ",");
    }
    out << "\n";
    const std::size_t k = net.cardinality(v);
    for (std::size_t i = 0; i < cpt.table.size(); ++i) {
      out << cpt.table[i] << ((i + 1) % k == 0 ? "\n" : " ");
    }
  }
  return out.str();
}

DiscreteNetwork load_network(const GraphSpec& graph, std::string_view cpt_text,
                             std::string_view source) {
  Dag dag = build_dag(graph);
  const NodeSet decisions = dag.nodes_of_kind(VariableKind::decision);
  if (!decisions.empty()) dag = dag.induced_subgraph(dag.nodes() - decisions);
  auto cpts = parse_cpts(cpt_text, dag.variables(), source);
  return DiscreteNetwork(std::move(dag), std::move(cpts));
}

// ---------------------------------------------------------------------------
// Dataset CSV

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_row(std::string_view line, std::string_view source, std::size_t ln) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) parse_fail(source, ln, "unterminated quoted field");
  out.push_back(was_quoted ? cur : std::string(trim(cur)));
  return out;
}

}  // namespace

void write_csv(const Dataset& data, std::ostream& out) {
  const auto& vars = *data.variables;
  const auto& p = data.provenance;
  out << "# odsgraph dataset\n";
  out << "# regime " << to_string(p.regime) << "\n";
  out << "# seed " << p.seed << "\n";
  out << "# n_requested " << p.n_requested << "\n";
  out << "# n_rejected " << p.n_rejected << "\n";
  out << "# threads " << p.threads << "\n";
  for (NodeId v : data.columns) {
    out << "# states " << vars.name(v) << "=" << join(vars[v].states, ",") << "\n";
  }
  for (NodeId v : data.columns) {
    if (vars[v].kind == VariableKind::selection) out << "# kind " << vars.name(v) << "=selection\n";
  }
  for (std::size_t i = 0; i < data.columns.size(); ++i) {
    out << (i ? "," : "") << csv_field(vars.name(data.columns[i]));
  }
  out << "\n";
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t i = 0; i < data.columns.size(); ++i) {
      out << (i ? "," : "") << csv_field(vars[data.columns[i]].states[data.at(r, i)]);
    }
    out << "\n";
  }
}

Dataset read_csv(std::string_view text, std::string_view source) {
  std::map<std::string, std::vector<std::string>> declared;
  std::map<std::string, VariableKind> kinds;
  Provenance prov;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  const auto lines = split_lines(text);
  std::size_t header_ln = 0;
  for (std::size_t ln = 1; ln <= lines.size(); ++ln) {
    const std::string_view raw = lines[ln - 1];
    const std::string_view line = trim(raw);
    if (header.empty() && !line.empty() && line[0] == '#') {
      const auto tok = tokens(line.substr(1));
      if (tok.size() != 2) continue;
      auto to_count = [&](const std::string& s) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) parse_fail(source, ln, "bad number '" + s + "'");
        return v;
      };
      const auto eq = tok[1].find('=');
      if (tok[0] == "states" && eq != std::string::npos) {
        declared[tok[1].substr(0, eq)] = split_list(tok[1].substr(eq + 1));
      } else if (tok[0] == "kind" && eq != std::string::npos) {
        const std::string k = tok[1].substr(eq + 1);
        if (k != "random" && k != "selection") parse_fail(source, ln, "unknown kind '" + k + "'");
        kinds[tok[1].substr(0, eq)] = k == "selection" ? VariableKind::selection : VariableKind::random;
      } else if (tok[0] == "regime") {
        if (tok[1] != "observational" && tok[1] != "selected") {
          parse_fail(source, ln, "unknown regime '" + tok[1] + "'");
        }
        prov.regime = tok[1] == "selected" ? Regime::selected : Regime::observational;
      } else if (tok[0] == "seed") {
        prov.seed = to_count(tok[1]);
      } else if (tok[0] == "n_requested") {
        prov.n_requested = to_count(tok[1]);
      } else if (tok[0] == "n_rejected") {
        prov.n_rejected = to_count(tok[1]);
      } else if (tok[0] == "threads") {
        prov.threads = static_cast<unsigned>(to_count(tok[1]));
      }
      continue;
    }
    if (line.empty()) continue;
    auto cells = csv_row(raw, source, ln);
    if (header.empty()) {
      header = std::move(cells);
      header_ln = ln;
      continue;
    }
    if (cells.size() != header.size()) {
      parse_fail(source, ln, "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (header.empty()) parse_fail(source, lines.size(), "missing header row");

  std::vector<VariableMeta> metas;
  for (std::size_t i = 0; i < header.size(); ++i) {
    VariableMeta m{header[i], VariableKind::random, {}};
    if (auto it = kinds.find(m.name); it != kinds.end()) m.kind = it->second;
    if (auto it = declared.find(m.name); it != declared.end()) {
      m.states = it->second;
    } else {
      std::set<std::string> seen;
      for (const auto& r : rows) seen.insert(r[i]);
      m.states.assign(seen.begin(), seen.end());
      if (m.states.size() < 2) m.states.push_back(m.states.empty() ? "0" : m.states[0] + "_other");
    }
    metas.push_back(std::move(m));
  }
  Dataset ds;
  try {
    ds.variables = std::make_shared<const VariableTable>(metas);
  } catch (const Error& e) {
    parse_fail(source, header_ln, e.what());
  }
  for (std::size_t i = 0; i < header.size(); ++i) ds.columns.push_back(NodeId{static_cast<std::uint32_t>(i)});
  ds.provenance = prov;
  ds.cells.reserve(rows.size() * header.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto& states = metas[i].states;
      auto it = std::find(states.begin(), states.end(), rows[r][i]);
      if (it == states.end()) {
        fail(ErrorCode::unknown_state, std::string(source) + ": row " + std::to_string(r + 1) +
                                           ": '" + rows[r][i] + "' is not a state of " + header[i]);
      }
      ds.cells.push_back(static_cast<std::uint16_t>(it - states.begin()));
    }
  }
  return ds;
}

}  // namespace odsg
