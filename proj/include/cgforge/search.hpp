#ifndef CGFORGE_SEARCH_HPP
#define CGFORGE_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cgforge/dataset.hpp"
#include "cgforge/graph.hpp"
#include "cgforge/move.hpp"
#include "cgforge/scoring.hpp"

namespace cgforge {

struct ConstraintSet {
    std::set<Edge> forbidden;
    std::set<Edge> required;

    // Throws ValidationError if the sets overlap, contain self-loops or
    // out-of-range nodes, or the required edges form a cycle.
    void validate(std::size_t node_count) const;

    // Throws ValidationError naming the first required edge missing from g or
    // forbidden edge present in g.
    void check_satisfied_by(const Dag& g) const;
};

// Tier per variable index (1 = most upstream). Every edge from a later tier
// into an earlier one is forbidden; edges inside a tier are free.
ConstraintSet tiers_to_constraints(std::span<const int> tiers);

enum class StartGraph { empty, required_only };

struct SearchConfig {
    std::uint64_t seed = 0;  // recorded only; ties are broken by move order
    std::optional<std::size_t> max_iterations;  // default 10 * n^2
    StartGraph start = StartGraph::required_only;
};

struct TraceStep {
    Move move;
    double delta = 0.0;
    double cumulative = 0.0;
};

struct SearchTrace {
    double initial_score = 0.0;
    std::vector<TraceStep> steps;
    double final_score = 0.0;  // total_bic of the returned graph
    bool hit_iteration_cap = false;
};

struct SearchResult {
    Dag graph;
    SearchTrace trace;
};

// Every add of an absent, non-forbidden, acyclic edge; every delete of a
// present non-required edge; every reverse of a present non-required edge
// whose reversal is allowed and acyclic. Ordered add < delete < reverse, then
// by (from, to).
std::vector<Move> legal_moves(const Dag& g, const ConstraintSet& c);

// Greedy hill climbing over add/delete/reverse moves, taking the best
// strictly improving move until none remains or the iteration cap is hit.
SearchResult hill_climb(const Dataset& d, const ConstraintSet& c, const SearchConfig& cfg, ScoreCache& cache);

struct ExhaustiveResult {
    Dag graph;
    double score = 0.0;
    std::size_t considered = 0;  // DAGs enumerated that satisfy the constraints
};

// Global optimum by enumerating every labeled DAG that satisfies c. Ties go to
// the lexicographically smallest edge list. Refuses more than max_vars (<= 5)
// variables.
ExhaustiveResult exhaustive_search(const Dataset& d, const ConstraintSet& c, std::size_t max_vars = 5);

}  // namespace cgforge

#endif  // CGFORGE_SEARCH_HPP
