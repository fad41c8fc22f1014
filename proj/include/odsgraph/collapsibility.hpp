#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "odsgraph/separation.hpp"

namespace odsg {

/// Exposure, outcome, optional selection node, covariates kept (c) and
/// covariates to collapse over (b).
struct RolesSpec {
  NodeId x;
  NodeId y;
  std::optional<NodeId> s;
  NodeSet c;
  NodeSet b;
};

/// Throws invalid_roles when roles overlap, name unknown nodes, or the
/// selection role is not a selection node.
void validate(const IndependenceModel& model, const RolesSpec& roles);

enum class Criterion {
  thm_collapsibility_i,   ///< Y ⊥⊥ B | (C, X)
  thm_collapsibility_ii,  ///< X ⊥⊥ B | (C, Y)
  cor_successive,         ///< ordered partition, each block by (i) or (ii)
  cor_S_i,                ///< Y ⊥⊥ S | (C, X)
  cor_S_ii,               ///< X ⊥⊥ S | (C, Y)
  cor_reduce_i,           ///< X ⊥⊥ S | (Y,B,C) and X ⊥⊥ B | (Y,C)
  cor_reduce_ii,          ///< X ⊥⊥ S | (Y,B,C), Y ⊥⊥ B | (X,C), X ⊥⊥ S | (Y,C)
  null_testability_i,     ///< S ⊥⊥ Y | (C, X)
  null_testability_ii,    ///< S ⊥⊥ X | (C, Y)
};

std::string_view to_string(Criterion c) noexcept;

/// One block of a successive collapse and the condition it passed.
struct OrderingStep {
  NodeSet block;
  Criterion condition;
};

struct Verdict {
  bool satisfied = false;
  /// The condition that fired; empty when not satisfied.
  std::optional<Criterion> criterion;
  /// Independence statements proven by separation. Nonempty when satisfied.
  std::vector<CiQuery> witnesses;
  /// B_1, ..., B_K for successive collapsing, in collapse order.
  std::vector<OrderingStep> ordering;
};

/// Largest |B| accepted by the successive and reduction searches.
inline constexpr std::size_t kMaxCollapseSet = 12;
/// Largest pool accepted by the minimal-set searches.
inline constexpr std::size_t kMaxSearchPool = 20;

/// OR_YX(B, C) collapsible over B: (i) Y ⊥⊥ B | (C,X) or (ii) X ⊥⊥ B | (C,Y).
/// Witnesses list every condition that holds; criterion names the first.
Verdict check_collapsible_over_b(const IndependenceModel& model, const RolesSpec& roles);

/// Searches ordered partitions of B into blocks of at most `max_block`
/// nodes. Block B_k is tested conditional on (C, X or Y, B_{k+1..K}).
Verdict check_successive(const IndependenceModel& model, const RolesSpec& roles,
                         std::size_t max_block = 1);

/// OR_YX(C, S) collapsible over S. When satisfied, C is bias-breaking.
Verdict check_collapsible_over_s(const IndependenceModel& model, const RolesSpec& roles);

/// OR_YX(B, C, S) collapsible over S, (B, S) and B, applied successively
/// over an ordered partition of B when no single step covers all of it.
Verdict check_reduce_covariates(const IndependenceModel& model, const RolesSpec& roles,
                                std::size_t max_block = 1);

/// Y ⊥⊥ X | C  <=>  Y ⊥⊥ X | (C, S=1) holds whenever this is satisfied.
Verdict check_null_testability(const IndependenceModel& model, const RolesSpec& roles);

/// All inclusion-minimal C ⊆ pool with |C| <= max_size for which OR_YX(C,S)
/// collapses over S; sorted by size, then by member names.
std::vector<NodeSet> find_bias_breaking_sets(const IndependenceModel& model, NodeId x, NodeId y,
                                             NodeId s, NodeSet pool, std::size_t max_size);

/// Enumerates subsets of `pool` with at most `max_size` members in the
/// order used by every minimal-set search: by size, then by member names.
std::vector<NodeSet> subsets_by_size(const VariableTable& vars, NodeSet pool, std::size_t max_size);

}  // namespace odsg
