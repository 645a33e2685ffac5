#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsdfront/data_model.hpp"

namespace gsdfront {

// Coordinates closer than this are treated as equal when building relations.
inline constexpr double kOrderTolerance = 1e-12;
inline constexpr std::size_t kDefaultR2Budget = 2'000'000;

using IndexPair = std::pair<std::size_t, std::size_t>;

// ((t,u),(v,w)): the gain from u to t is at least the gain from w to v.
struct Quadruple {
    std::size_t t, u, v, w;
    friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

// x_i >= y_i for every coordinate (within kOrderTolerance).
bool weakly_dominates(const QualityVector& x, const QualityVector& y);

// Direct evaluation of the intensity relation for four vectors; `cardinal_count` leading coordinates
// are cardinal. Requires (t,u) and (v,w) to be in R1.
bool r2_holds(const QualityVector& t, const QualityVector& u, const QualityVector& v, const QualityVector& w,
              std::size_t cardinal_count);

// All (i,j) with vectors[i] weakly dominating vectors[j], reflexive pairs included, sorted.
std::vector<IndexPair> build_r1(std::span<const QualityVector> vectors);

struct TransitiveReduction {
    // class_of[i] is the smallest index of the mutual-dominance class containing i.
    std::vector<std::size_t> class_of;
    // Covering edges (a above b) between class representatives, sorted.
    std::vector<IndexPair> edges;
};

// Minimal edge set whose transitive closure, together with the equivalence classes, recovers
// the strict part of the preorder `r1` on `node_count` nodes.
TransitiveReduction transitive_reduction(std::size_t node_count, std::span<const IndexPair> r1);

struct R2Result {
    std::vector<Quadruple> quadruples;
    // True when the candidate pairs were restricted to covering pairs and/or the enumeration was cut.
    bool truncated = false;
    std::size_t candidate_pairs = 0;
    std::size_t examined = 0;
};

// Enumerates quadruples over strict R1 pairs. The identical-pair quadruples ((t,u),(t,u)) always hold
// and are not materialized. When the squared pair count exceeds `budget`, candidates are the
// covering pairs of `r1` in lexicographic order and at most `budget` quadruples are examined.
R2Result build_r2(std::span<const QualityVector> vectors, std::span<const IndexPair> r1, std::size_t cardinal_count,
                  std::optional<std::size_t> budget = std::nullopt);

// Removes quadruples implied by another retained quadruple combined with an R1 step, and those
// whose constraint already follows from R1. The feasible utility set is unchanged.
std::vector<Quadruple> prune_implied_r2(std::span<const QualityVector> vectors, std::span<const Quadruple> r2,
                                        std::span<const IndexPair> covering_edges);

// Observed vectors with duplicates merged, plus the relations over them.
struct PreferenceSystem {
    std::vector<QualityVector> vectors;
    std::size_t cardinal_count = 0;
    std::vector<IndexPair> r1;
    std::vector<IndexPair> r1_reduced;
    std::vector<Quadruple> r2;
    // Subset of r2 that generates the same constraint set together with r1_reduced.
    std::vector<Quadruple> r2_generators;
    bool r2_truncated = false;
    std::size_t r2_budget = kDefaultR2Budget;
    // node_of_cell[s * m + p]: vector index of the table cell (s, p).
    std::vector<std::size_t> node_of_cell;

    std::size_t node_count() const noexcept { return vectors.size(); }
};

struct SystemOptions {
    std::size_t r2_budget = kDefaultR2Budget;
};

PreferenceSystem build_preference_system(const EvaluationTable& table, const SystemOptions& options = {});

// Same construction from a bare vector list (no table cells).
PreferenceSystem build_preference_system(std::span<const QualityVector> vectors, std::size_t cardinal_count,
                                         const SystemOptions& options = {});

// Empty when `utility` (one value per node) satisfies every R1 pair and every R2 quadruple within `tol`.
std::vector<std::string> check_utility(const PreferenceSystem& system, std::span<const double> utility,
                                       double tol = 1e-9);

// Edge-list dumps: "a b" per R1 pair, "t u v w" per quadruple.
std::string r1_edge_list(std::span<const IndexPair> pairs);
std::string r2_edge_list(std::span<const Quadruple> quads);

} // namespace gsdfront
