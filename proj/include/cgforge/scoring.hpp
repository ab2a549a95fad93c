#ifndef CGFORGE_SCORING_HPP
#define CGFORGE_SCORING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "cgforge/dataset.hpp"
#include "cgforge/graph.hpp"
#include "cgforge/move.hpp"

namespace cgforge {

// Family identity for the local-score cache. Parents strictly ascending.
struct LocalScoreKey {
    NodeId child = 0;
    std::vector<NodeId> parents;

    friend bool operator==(const LocalScoreKey&, const LocalScoreKey&) = default;
};

struct LocalScoreKeyHash {
    std::size_t operator()(const LocalScoreKey& k) const noexcept;
};

// Counts N_jk of a family. Configuration j is the mixed-radix number formed by
// the parent states in ascending parent order, first parent most significant.
struct ContingencyTable {
    std::size_t child_arity = 0;  // r
    std::size_t configs = 1;      // q
    std::vector<std::uint64_t> counts;  // configs x child_arity, row-major

    std::uint64_t count(std::size_t j, std::size_t k) const { return counts[j * child_arity + k]; }
    std::uint64_t marginal(std::size_t j) const;
    std::uint64_t total() const;
};

// Dense table. Throws ParentSetTooLargeError when q * r does not fit in memory
// limits (a runaway parent set), ValidationError when child is among parents.
ContingencyTable count_family(const Dataset& d, NodeId child, std::span<const NodeId> parents);

// BIC of one family:
//   sum_j sum_k N_jk ln(N_jk / N_j)  -  (ln N / 2) q (r - 1)
// with empty cells and unobserved configurations contributing nothing to the
// likelihood. Throws EmptyDatasetError when N = 0.
double local_bic(const Dataset& d, NodeId child, std::span<const NodeId> parents);

// Memo of local scores for one dataset. The first dataset it scores binds it;
// using it with another dataset throws std::logic_error. Not thread-safe:
// confine one cache per worker.
class ScoreCache {
public:
    double local(const Dataset& d, NodeId child, std::span<const NodeId> parents);

    std::size_t size() const { return entries_.size(); }
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    const Dataset* bound_ = nullptr;
    std::unordered_map<LocalScoreKey, double, LocalScoreKeyHash> entries_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

double local_bic(const Dataset& d, NodeId child, std::span<const NodeId> parents, ScoreCache& cache);

// Sum of local scores over every node, in node order.
double total_bic(const Dataset& d, const Dag& g);
double total_bic(const Dataset& d, const Dag& g, ScoreCache& cache);

// Score change caused by `move`, from the one or two affected families.
// Throws ValidationError naming the violated precondition for an illegal move.
double delta_score(const Dataset& d, const Dag& g, const Move& move, ScoreCache& cache);

}  // namespace cgforge

#endif  // CGFORGE_SCORING_HPP
