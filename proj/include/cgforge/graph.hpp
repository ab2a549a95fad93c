#ifndef CGFORGE_GRAPH_HPP
#define CGFORGE_GRAPH_HPP

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

namespace cgforge {

using NodeId = std::size_t;
using NodeSet = std::set<NodeId>;

struct Edge {
    NodeId from = 0;
    NodeId to = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed acyclic graph over nodes 0..node_count-1. Node ids are dataset
// column indices. Mutators refuse edits that would break acyclicity.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::size_t node_count);
    // Throws StructuralError on self-loops, out-of-range ends, or cycles.
    Dag(std::size_t node_count, std::span<const Edge> edges);

    std::size_t node_count() const { return parents_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    bool has_edge(NodeId from, NodeId to) const;
    bool has_edge(Edge e) const { return has_edge(e.from, e.to); }

    // Sorted ascending.
    const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(v); }
    const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }

    // All edges in lexicographic (from, to) order.
    std::vector<Edge> edges() const;

    // True iff `to` already reaches `from`, so adding from->to closes a cycle.
    // Requires valid endpoints and from != to.
    bool would_create_cycle(Edge e) const;
    // True iff replacing e with its reversal closes a cycle (a path from->...->to
    // other than e itself). Requires e present.
    bool reversal_creates_cycle(Edge e) const;

    // Guarded mutations; throw StructuralError on an illegal edit.
    void add_edge(Edge e);
    void remove_edge(Edge e);
    void reverse_edge(Edge e);

    // Full DFS acyclicity check, independent of the mutation guards.
    bool is_acyclic() const;

    friend bool operator==(const Dag& a, const Dag& b) { return a.parents_ == b.parents_; }

private:
    void check_node(NodeId v) const;
    bool reaches(NodeId source, NodeId target, const Edge* skip) const;
    void insert_unchecked(Edge e);

    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
    std::size_t edge_count_ = 0;
};

// Parents, children and children's other parents of `target`.
NodeSet markov_blanket(const Dag& g, NodeId target);

struct Subgraph {
    Dag graph;
    std::vector<NodeId> original;  // original[i] = index in the source graph of node i
};

// Restriction of g to targets plus their Markov blankets. Retained nodes keep
// ascending original order. Throws ValidationError on empty targets.
Subgraph mb_subgraph(const Dag& g, const NodeSet& targets);

// d-separation of x and y given z, by reachability over active trails.
// Requires x != y and neither in z.
bool d_separated(const Dag& g, NodeId x, NodeId y, const NodeSet& z);

// Kahn's algorithm with smallest-index-first tie breaking.
std::vector<NodeId> topological_order(const Dag& g);

}  // namespace cgforge

#endif  // CGFORGE_GRAPH_HPP
