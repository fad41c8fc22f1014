#include "odsgraph/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace odsg {

std::size_t Rng::categorical(const double* weights, std::size_t k) {
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += weights[i];
  const double u = uniform() * total;
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (weights[i] <= 0.0) continue;
    cum += weights[i];
    last = i;
    if (u < cum) return i;
  }
  return last;  // rounding at the top end
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t chunk) {
  return splitmix64(splitmix64(seed) ^ splitmix64(chunk + 0x632BE59BD9B4E019ULL));
}

std::string_view to_string(Regime r) noexcept {
  return r == Regime::observational ? "observational" : "selected";
}

namespace {

unsigned resolve_threads(unsigned threads) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  return threads;
}

// Runs body(i) for i in [0, n) on up to `threads` workers.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F body) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct Sampler {
  const DiscreteNetwork& net;
  std::vector<NodeId> columns;
  std::vector<NodeId> order;

  explicit Sampler(const DiscreteNetwork& n)
      : net(n), columns(n.dag().nodes().begin(), n.dag().nodes().end()),
        order(n.dag().topological_order()) {
    for (NodeId v : columns) {
      if (n.cardinality(v) > 65535) fail(ErrorCode::invalid_argument, "too many states to sample");
    }
  }

  void draw(Rng& rng, std::vector<std::size_t>& full) const {
    for (NodeId v : order) {
      const std::size_t k = net.cardinality(v);
      const double* row = net.cpt(v).table.data() + net.row_index(v, full) * k;
      full[v.index] = rng.categorical(row, k);
    }
  }

  void emit(const std::vector<std::size_t>& full, std::uint16_t* out) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out[i] = static_cast<std::uint16_t>(full[columns[i].index]);
    }
  }
};

}  // namespace

Dataset forward_sample(const DiscreteNetwork& net, std::size_t n, std::uint64_t seed,
                       unsigned threads) {
  if (n == 0) fail(ErrorCode::invalid_argument, "sample size must be at least 1");
  threads = resolve_threads(threads);
  const Sampler sampler(net);
  Dataset ds{net.dag().variables_ptr(), sampler.columns, {},
             Provenance{Regime::observational, seed, n, 0, threads}};
  const std::size_t width = sampler.columns.size();
  ds.cells.resize(n * width);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    Rng rng(substream_seed(seed, c));
    std::vector<std::size_t> full(net.variables().size(), 0);
    const std::size_t end = std::min(n, (c + 1) * kSampleChunk);
    for (std::size_t r = c * kSampleChunk; r < end; ++r) {
      sampler.draw(rng, full);
      sampler.emit(full, &ds.cells[r * width]);
    }
  });
  return ds;
}

Dataset retrospective_sample(const DiscreteNetwork& net, std::size_t n_selected,
                             std::uint64_t seed, unsigned threads, std::size_t max_draws) {
  if (n_selected == 0) fail(ErrorCode::invalid_argument, "sample size must be at least 1");
  const auto s = net.selection_node();
  if (!s) fail(ErrorCode::no_selection_node, "retrospective sampling needs a selection node");
  threads = resolve_threads(threads);
  if (max_draws == 0) max_draws = 1000 * n_selected + 1'000'000;
  const Sampler sampler(net);
  const std::size_t width = sampler.columns.size();

  struct Chunk {
    std::vector<std::uint16_t> kept;
    std::vector<std::size_t> position;  // candidate index of each kept row
  };
  // Chunks are drawn in fixed-size batches; the batch size is independent of
  // the thread count so that the same chunks are always consumed.
  constexpr std::size_t kBatch = 16;
  Dataset ds{net.dag().variables_ptr(), sampler.columns, {},
             Provenance{Regime::selected, seed, n_selected, 0, threads}};
  ds.cells.reserve(n_selected * width);
  std::size_t kept = 0;
  std::size_t drawn = 0;
  for (std::size_t base = 0; kept < n_selected; base += kBatch) {
    if (drawn >= max_draws) {
      fail(ErrorCode::selection_too_rare,
           "only " + std::to_string(kept) + " of " + std::to_string(n_selected) +
               " rows selected after " + std::to_string(drawn) + " draws");
    }
    std::vector<Chunk> batch(kBatch);
    parallel_for(kBatch, threads, [&](std::size_t i) {
      Rng rng(substream_seed(seed, base + i));
      std::vector<std::size_t> full(net.variables().size(), 0);
      std::vector<std::uint16_t> row(width);
      for (std::size_t r = 0; r < kSampleChunk; ++r) {
        sampler.draw(rng, full);
        if (full[s->index] != 1) continue;
        sampler.emit(full, row.data());
        batch[i].kept.insert(batch[i].kept.end(), row.begin(), row.end());
        batch[i].position.push_back(r);
      }
    });
    for (const Chunk& c : batch) {
      const std::size_t rows = c.position.size();
      const std::size_t take = std::min(rows, n_selected - kept);
      ds.cells.insert(ds.cells.end(), c.kept.begin(),
                      c.kept.begin() + static_cast<std::ptrdiff_t>(take * width));
      if (take < rows || kept + take == n_selected) {
        drawn += take == 0 ? 0 : c.position[take - 1] + 1;
        kept += take;
        break;
      }
      kept += take;
      drawn += kSampleChunk;
      if (drawn >= max_draws) break;
    }
  }
  ds.provenance.n_rejected = drawn - kept;
  return ds;
}

// ---------------------------------------------------------------------------
// Tables

double ContingencyTable::total() const {
  double t = 0.0;
  for (double c : counts) t += c;
  return t;
}

Factor ContingencyTable::as_factor() const { return Factor(variables, scope, counts); }

ContingencyTable tabulate(const Dataset& data, const std::vector<NodeId>& scope) {
  const auto& vars = *data.variables;
  std::vector<std::size_t> pos;
  ContingencyTable t{data.variables, scope, {}, {}};
  std::size_t size = 1;
  for (NodeId v : scope) {
    auto it = std::find(data.columns.begin(), data.columns.end(), v);
    if (it == data.columns.end()) {
      fail(ErrorCode::unknown_node, "'" + vars.name(v) + "' is not a dataset column");
    }
    pos.push_back(static_cast<std::size_t>(it - data.columns.begin()));
    t.cardinalities.push_back(vars[v].cardinality());
    size *= vars[v].cardinality();
  }
  t.counts.assign(size, 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      idx = idx * t.cardinalities[i] + data.at(r, pos[i]);
    }
    t.counts[idx] += 1.0;
  }
  return t;
}

EmpiricalOr empirical_or(const ContingencyTable& t, NodeId y, NodeId x, const Assignment& context,
                         Correction correction, std::size_t y_category, std::size_t x_category) {
  const auto& vars = *t.variables;
  const Factor f = t.as_factor();
  const std::size_t py = f.position(y);
  const std::size_t px = f.position(x);
  if (y_category == 0 || y_category >= t.cardinalities[py]) {
    fail(ErrorCode::unknown_state, "outcome category out of range");
  }
  if (x_category == 0 || x_category >= t.cardinalities[px]) {
    fail(ErrorCode::unknown_state, "exposure category out of range");
  }
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (auto [v, st] : context) {
    if (v == y || v == x) fail(ErrorCode::invalid_roles, "context must not fix X or Y");
    const std::size_t p = f.position(v);
    if (st >= t.cardinalities[p]) fail(ErrorCode::unknown_state, "context state out of range");
    fixed.emplace_back(p, st);
  }
  double n[4] = {0, 0, 0, 0};
  std::vector<std::size_t> states(t.scope.size(), 0);
  for (std::size_t idx = 0; idx < t.counts.size(); ++idx) {
    bool match = std::all_of(fixed.begin(), fixed.end(),
                             [&](auto pf) { return states[pf.first] == pf.second; });
    if (match) {
      const std::size_t ys = states[py];
      const std::size_t xs = states[px];
      const int row = ys == 0 ? 0 : (ys == y_category ? 1 : -1);
      const int col = xs == 0 ? 0 : (xs == x_category ? 1 : -1);
      if (row >= 0 && col >= 0) n[row * 2 + col] += t.counts[idx];
    }
    for (std::size_t i = states.size(); i-- > 0;) {
      if (++states[i] < t.cardinalities[i]) break;
      states[i] = 0;
    }
  }
  if (correction == Correction::haldane_anscombe) {
    for (double& c : n) c += 0.5;
  }
  for (int i = 0; i < 4; ++i) {
    if (!(n[i] > 0.0)) {
      const std::size_t ys = i / 2 == 0 ? 0 : y_category;
      const std::size_t xs = i % 2 == 0 ? 0 : x_category;
      fail(ErrorCode::zero_cell, "empty cell n(" + vars.name(y) + "=" + vars[y].states[ys] + ", " +
                                     vars.name(x) + "=" + vars[x].states[xs] + " | " +
                                     format(vars, context) + ")");
    }
  }
  EmpiricalOr out;
  std::copy(std::begin(n), std::end(n), out.cells);
  out.report.y = y;
  out.report.x = x;
  out.report.y_category = y_category;
  out.report.x_category = x_category;
  out.report.context = context;
  out.report.value = (n[3] * n[0]) / (n[1] * n[2]);
  out.report.log_value = std::log(out.report.value);
  out.log_se = std::sqrt(1 / n[0] + 1 / n[1] + 1 / n[2] + 1 / n[3]);
  return out;
}

// ---------------------------------------------------------------------------
// IPF

namespace {

bool extend_order(std::vector<NodeSet>& ordered, std::vector<NodeSet>& rest, NodeSet covered) {
  if (rest.empty()) return true;
  // widest separator first
  std::vector<std::size_t> idx(rest.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return (rest[a] & covered).size() > (rest[b] & covered).size();
  });
  for (std::size_t i : idx) {
    const NodeSet g = rest[i];
    const NodeSet sep = g & covered;
    if (!std::any_of(ordered.begin(), ordered.end(), [sep](NodeSet h) { return h.contains(sep); })) continue;
    ordered.push_back(g);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    if (extend_order(ordered, rest, covered | g)) return true;
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(i), g);
    ordered.pop_back();
  }
  return false;
}

}  // namespace

std::vector<NodeSet> running_intersection_order(const std::vector<NodeSet>& generators) {
  if (generators.size() > 8) return generators;
  for (std::size_t start = 0; start < generators.size(); ++start) {
    std::vector<NodeSet> ordered{generators[start]};
    std::vector<NodeSet> rest = generators;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(start));
    if (extend_order(ordered, rest, generators[start])) return ordered;
  }
  return generators;
}

namespace {

// For every table entry, its index in the marginal over `gen`.
std::vector<std::size_t> marginal_map(const ContingencyTable& t, NodeSet gen, std::size_t& size) {
  std::vector<std::size_t> keep;
  size = 1;
  for (std::size_t i = 0; i < t.scope.size(); ++i) {
    if (gen.contains(t.scope[i])) {
      keep.push_back(i);
      size *= t.cardinalities[i];
    }
  }
  std::vector<std::size_t> map(t.counts.size());
  std::vector<std::size_t> states(t.scope.size(), 0);
  for (std::size_t idx = 0; idx < map.size(); ++idx) {
    std::size_t m = 0;
    for (std::size_t i : keep) m = m * t.cardinalities[i] + states[i];
    map[idx] = m;
    for (std::size_t i = states.size(); i-- > 0;) {
      if (++states[i] < t.cardinalities[i]) break;
      states[i] = 0;
    }
  }
  return map;
}

std::vector<double> sum_by(const std::vector<double>& v, const std::vector<std::size_t>& map,
                           std::size_t size) {
  std::vector<double> out(size, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) out[map[i]] += v[i];
  return out;
}

}  // namespace

LogLinearFit ipf_fit_unchecked(const ContingencyTable& t, const std::vector<NodeSet>& generators,
                               double tol, std::size_t max_sweeps) {
  const auto& vars = *t.variables;
  NodeSet scope;
  for (NodeId v : t.scope) scope.insert(v);
  NodeSet covered;
  for (NodeSet g : generators) {
    if (g.empty() || !scope.contains(g)) {
      fail(ErrorCode::invalid_argument, "generator " + vars.format(g) + " is not inside the table scope");
    }
    covered |= g;
  }
  if (covered != scope) {
    fail(ErrorCode::invalid_argument, "generators do not cover " + vars.format(scope - covered));
  }
  const double total = t.total();
  if (!(total > 0.0)) fail(ErrorCode::degenerate_marginal, "table is empty");

  LogLinearFit fit;
  fit.generators = running_intersection_order(generators);
  struct Margin {
    std::vector<std::size_t> map;
    std::vector<double> observed;
  };
  std::vector<Margin> margins;
  for (NodeSet g : fit.generators) {
    Margin m;
    std::size_t size = 0;
    m.map = marginal_map(t, g, size);
    m.observed = sum_by(t.counts, m.map, size);
    margins.push_back(std::move(m));
  }
  fit.fitted.assign(t.counts.size(), total / static_cast<double>(t.counts.size()));

  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t g = 0; g < margins.size(); ++g) {
      const Margin& m = margins[g];
      const auto current = sum_by(fit.fitted, m.map, m.observed.size());
      std::vector<double> ratio(current.size(), 0.0);
      for (std::size_t k = 0; k < current.size(); ++k) {
        if (current[k] > 0.0) {
          ratio[k] = m.observed[k] / current[k];
        } else if (m.observed[k] > 0.0) {
          fail(ErrorCode::degenerate_marginal,
               "fitted margin of " + vars.format(fit.generators[g]) + " is zero where data are not");
        }
      }
      for (std::size_t i = 0; i < fit.fitted.size(); ++i) fit.fitted[i] *= ratio[m.map[i]];
    }
    double gap = 0.0;
    for (const Margin& m : margins) {
      const auto current = sum_by(fit.fitted, m.map, m.observed.size());
      for (std::size_t k = 0; k < current.size(); ++k) {
        gap = std::max(gap, std::abs(current[k] - m.observed[k]));
      }
    }
    fit.gap_history.push_back(gap);
    fit.max_marginal_gap = gap;
    fit.iterations = sweep;
    if (gap <= tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

LogLinearFit ipf_fit(const ContingencyTable& t, const std::vector<NodeSet>& generators, double tol,
                     std::size_t max_sweeps) {
  LogLinearFit fit = ipf_fit_unchecked(t, generators, tol, max_sweeps);
  if (!fit.converged) {
    fail(ErrorCode::not_converged, "IPF stopped after " + std::to_string(fit.iterations) +
                                       " sweeps with marginal gap " +
                                       std::to_string(fit.max_marginal_gap));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Bootstrap

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

BootstrapResult bootstrap_se(const ContingencyTable& t, NodeId y, NodeId x,
                             const Assignment& context, const std::vector<NodeSet>& generators,
                             std::size_t reps, std::uint64_t seed) {
  if (reps == 0) fail(ErrorCode::invalid_argument, "bootstrap needs at least one replicate");
  const auto& vars = *t.variables;
  const std::size_t pairs = (vars[y].cardinality() - 1) * (vars[x].cardinality() - 1);
  const auto n = static_cast<std::size_t>(std::llround(t.total()));
  if (n == 0) fail(ErrorCode::degenerate_marginal, "table is empty");
  std::vector<double> cumulative(t.counts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < t.counts.size(); ++i) cumulative[i] = acc += t.counts[i];

  BootstrapResult out;
  out.reps = reps;
  std::vector<std::vector<double>> draws(pairs);
  ContingencyTable resample = t;
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(substream_seed(seed, r));
    std::fill(resample.counts.begin(), resample.counts.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = rng.uniform() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      resample.counts[static_cast<std::size_t>(it - cumulative.begin())] += 1.0;
    }
    LogLinearFit fit = ipf_fit_unchecked(resample, generators);
    if (!fit.converged) {
      ++out.not_converged;
      continue;
    }
    try {
      const Factor f(t.variables, t.scope, fit.fitted);
      const auto ors = or_collection(f, y, x, context);
      for (std::size_t i = 0; i < pairs; ++i) draws[i].push_back(ors[i].log_value);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::zero_cell && e.code() != ErrorCode::zero_probability_evidence) throw;
      ++out.zero_cell;
    }
  }
  out.log_se.assign(pairs, 0.0);
  if (pairs == 0 || draws[0].size() < 2) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < pairs; ++i) {
    out.log_se[i] = (quantile(draws[i], 0.8413447460685429) - quantile(draws[i], 0.15865525393145707)) / 2;
  }
  return out;
}

}  // namespace odsg
