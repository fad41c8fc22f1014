#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "odsgraph/exact.hpp"

namespace odsg {

/// mt19937_64 with a hand-rolled uniform so the stream does not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Index drawn from `weights` (need not be normalized) by inversion.
  std::size_t categorical(const double* weights, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Seed of the independent stream for one chunk of work.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t chunk);

/// Rows are produced in fixed-size chunks, each from its own substream, so
/// the output never depends on the number of worker threads.
inline constexpr std::size_t kSampleChunk = 4096;

enum class Regime { observational, selected };
std::string_view to_string(Regime r) noexcept;

struct Provenance {
  Regime regime = Regime::observational;
  std::uint64_t seed = 0;
  std::size_t n_requested = 0;
  std::size_t n_rejected = 0;
  unsigned threads = 1;
};

/// Rows of state indices, one column per variable in declaration order.
struct Dataset {
  VariableTablePtr variables;
  std::vector<NodeId> columns;
  std::vector<std::uint16_t> cells;  ///< row-major
  Provenance provenance;

  std::size_t rows() const { return columns.empty() ? 0 : cells.size() / columns.size(); }
  std::uint16_t at(std::size_t row, std::size_t column) const {
    return cells[row * columns.size() + column];
  }
};

/// Ancestral sampling of n rows. `threads` = 0 picks the hardware count.
Dataset forward_sample(const DiscreteNetwork& net, std::size_t n, std::uint64_t seed,
                       unsigned threads = 1);

/// Rejection sampling until `n_selected` rows with S = 1 are kept. Throws
/// selection_too_rare once `max_draws` candidates have been drawn (0 means
/// 1000 * n_selected + 1e6).
Dataset retrospective_sample(const DiscreteNetwork& net, std::size_t n_selected,
                             std::uint64_t seed, unsigned threads = 1,
                             std::size_t max_draws = 0);

/// Counts over the joint states of `scope`, laid out like a Factor.
struct ContingencyTable {
  VariableTablePtr variables;
  std::vector<NodeId> scope;
  std::vector<std::size_t> cardinalities;
  std::vector<double> counts;

  double total() const;
  /// The counts as an unnormalized Factor (for the exact-engine operations).
  Factor as_factor() const;
};

ContingencyTable tabulate(const Dataset& data, const std::vector<NodeId>& scope);

enum class Correction { none, haldane_anscombe };

struct EmpiricalOr {
  OddsRatioReport report;
  /// Woolf standard error of the log odds ratio.
  double log_se = 0.0;
  /// n(y_ref,x_ref), n(y_ref,x_cat), n(y_cat,x_ref), n(y_cat,x_cat) after correction.
  double cells[4] = {0, 0, 0, 0};
};

EmpiricalOr empirical_or(const ContingencyTable& t, NodeId y, NodeId x, const Assignment& context,
                         Correction correction = Correction::none, std::size_t y_category = 1,
                         std::size_t x_category = 1);

struct LogLinearFit {
  std::vector<NodeSet> generators;  ///< in the order they were fitted
  std::vector<double> fitted;       ///< laid out like the table
  std::size_t iterations = 0;
  double max_marginal_gap = 0.0;
  std::vector<double> gap_history;  ///< one entry per full sweep
  bool converged = false;
};

inline constexpr double kIpfTolerance = 1e-8;
inline constexpr std::size_t kIpfMaxSweeps = 500;

/// Generators in an order with the running-intersection property, when one
/// exists (searched for up to 8 generators); otherwise the input order.
std::vector<NodeSet> running_intersection_order(const std::vector<NodeSet>& generators);

/// Iterative proportional scaling. Throws not_converged when the sweep cap
/// is hit, degenerate_marginal on an empty table or a fitted zero facing a
/// positive observed marginal.
LogLinearFit ipf_fit(const ContingencyTable& t, const std::vector<NodeSet>& generators,
                     double tol = kIpfTolerance, std::size_t max_sweeps = kIpfMaxSweeps);
/// Same, reporting non-convergence in the result instead of throwing.
LogLinearFit ipf_fit_unchecked(const ContingencyTable& t, const std::vector<NodeSet>& generators,
                               double tol = kIpfTolerance, std::size_t max_sweeps = kIpfMaxSweeps);

struct BootstrapResult {
  /// One entry per non-reference (y, x) category pair, y slowest.
  std::vector<double> log_se;
  std::size_t reps = 0;
  std::size_t not_converged = 0;
  /// Resamples dropped because an odds-ratio cell was empty.
  std::size_t zero_cell = 0;
  /// Fewer than two usable resamples; SEs are reported as 0.
  bool degenerate = false;
};

/// Percentile standard error (q84.13 - q15.87) / 2 of the log odds ratios
/// over multinomial resamples of the table, each refitted by IPF.
BootstrapResult bootstrap_se(const ContingencyTable& t, NodeId y, NodeId x,
                             const Assignment& context, const std::vector<NodeSet>& generators,
                             std::size_t reps, std::uint64_t seed);

}  // namespace odsg
