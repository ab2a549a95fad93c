#ifndef CGFORGE_ENSEMBLE_HPP
#define CGFORGE_ENSEMBLE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cgforge/dataset.hpp"
#include "cgforge/graph.hpp"
#include "cgforge/search.hpp"

namespace cgforge {

struct EnsembleConfig {
    std::size_t runs = 100;
    double threshold = 0.9;
    std::uint64_t base_seed = 0;
    std::size_t workers = 0;  // 0 = hardware concurrency
    std::optional<std::size_t> max_iterations;
    StartGraph start = StartGraph::required_only;

    void validate() const;  // throws ValidationError
};

// Directed-edge occurrence counts over `runs` learned graphs. A->B and B->A
// are tallied separately.
class EdgeFrequencyTable {
public:
    EdgeFrequencyTable() = default;
    EdgeFrequencyTable(std::size_t node_count, std::size_t runs);

    std::size_t node_count() const { return node_count_; }
    std::size_t runs() const { return runs_; }

    std::size_t count(Edge e) const;
    double frequency(Edge e) const { return static_cast<double>(count(e)) / static_cast<double>(runs_); }
    const std::map<Edge, std::size_t>& counts() const { return counts_; }

    void add(Edge e, std::size_t times = 1);  // throws ValidationError past runs()
    void add_graph(const Dag& g);

    friend bool operator==(const EdgeFrequencyTable&, const EdgeFrequencyTable&) = default;

private:
    std::size_t node_count_ = 0;
    std::size_t runs_ = 0;
    std::map<Edge, std::size_t> counts_;
};

struct RunSummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double final_score = 0.0;
    std::size_t edge_count = 0;
    std::size_t iterations = 0;
    bool hit_iteration_cap = false;
    std::vector<Edge> edges;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct EnsembleResult {
    EdgeFrequencyTable table;
    std::vector<RunSummary> runs;  // ordered by run index
};

// Run i hill-climbs on bootstrap_sample(d, base_seed + i). Runs execute on up
// to cfg.workers threads; the result does not depend on scheduling. The first
// failing run (lowest index) aborts the whole ensemble.
EnsembleResult learn_ensemble(const Dataset& d, const ConstraintSet& c, const EnsembleConfig& cfg);

struct AveragedGraph {
    Dag graph;
    std::map<Edge, double> frequency;  // retained edges, count / R
    std::vector<Edge> dropped;          // removed by cycle repair, in removal order
};

// Keeps edges with count / R >= threshold, then breaks any cycle by removing
// its lowest-frequency edge (ties: smallest edge) until acyclic.
AveragedGraph average_graph(const EdgeFrequencyTable& f, double threshold);

}  // namespace cgforge

#endif  // CGFORGE_ENSEMBLE_HPP
