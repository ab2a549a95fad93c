#include "cgforge/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <queue>
#include <string>

#include "cgforge/error.hpp"

namespace cgforge {

namespace {

void insert_sorted(std::vector<NodeId>& v, NodeId x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); }

void erase_sorted(std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
}

std::string edge_text(Edge e) { return std::to_string(e.from) + "->" + std::to_string(e.to); }

}  // namespace

Dag::Dag(std::size_t node_count) : parents_(node_count), children_(node_count) {}

Dag::Dag(std::size_t node_count, std::span<const Edge> edges) : Dag(node_count) {
    for (Edge e : edges) {
        check_node(e.from);
        check_node(e.to);
        if (e.from == e.to) throw StructuralError("self-loop on node " + std::to_string(e.from));
        if (!has_edge(e)) insert_unchecked(e);
    }
    if (!is_acyclic()) throw StructuralError("edge list contains a directed cycle");
}

void Dag::check_node(NodeId v) const {
    if (v >= node_count()) {
        throw StructuralError("node " + std::to_string(v) + " out of range for graph with " +
                              std::to_string(node_count()) + " nodes");
    }
}

bool Dag::has_edge(NodeId from, NodeId to) const {
    const auto& p = parents_.at(to);
    return std::binary_search(p.begin(), p.end(), from);
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u) {
        for (NodeId c : children_[u]) out.push_back({u, c});
    }
    return out;
}

bool Dag::reaches(NodeId source, NodeId target, const Edge* skip) const {
    std::vector<char> seen(node_count(), 0);
    std::vector<NodeId> stack{source};
    seen[source] = 1;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId c : children_[v]) {
            if (skip && v == skip->from && c == skip->to) continue;
            if (c == target) return true;
            if (!seen[c]) {
                seen[c] = 1;
                stack.push_back(c);
            }
        }
    }
    return false;
}

bool Dag::would_create_cycle(Edge e) const {
    check_node(e.from);
    check_node(e.to);
    if (e.from == e.to) return true;
    return reaches(e.to, e.from, nullptr);
}

bool Dag::reversal_creates_cycle(Edge e) const {
    check_node(e.from);
    check_node(e.to);
    return reaches(e.from, e.to, &e);
}

void Dag::insert_unchecked(Edge e) {
    insert_sorted(parents_[e.to], e.from);
    insert_sorted(children_[e.from], e.to);
    ++edge_count_;
}

void Dag::add_edge(Edge e) {
    check_node(e.from);
    check_node(e.to);
    if (e.from == e.to) throw StructuralError("self-loop on node " + std::to_string(e.from));
    if (has_edge(e)) throw StructuralError("edge " + edge_text(e) + " already present");
    if (would_create_cycle(e)) throw StructuralError("adding " + edge_text(e) + " creates a cycle");
    insert_unchecked(e);
}

void Dag::remove_edge(Edge e) {
    check_node(e.from);
    check_node(e.to);
    if (!has_edge(e)) throw StructuralError("edge " + edge_text(e) + " not present");
    erase_sorted(parents_[e.to], e.from);
    erase_sorted(children_[e.from], e.to);
    --edge_count_;
}

void Dag::reverse_edge(Edge e) {
    check_node(e.from);
    check_node(e.to);
    if (!has_edge(e)) throw StructuralError("edge " + edge_text(e) + " not present");
    if (reversal_creates_cycle(e)) {
        throw StructuralError("reversing " + edge_text(e) + " creates a cycle");
    }
    remove_edge(e);
    insert_unchecked({e.to, e.from});
}

bool Dag::is_acyclic() const {
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<char> state(node_count(), 0);
    for (NodeId root = 0; root < node_count(); ++root) {
        if (state[root]) continue;
        std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
        state[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < children_[v].size()) {
                NodeId c = children_[v][next++];
                if (state[c] == 1) return false;
                if (state[c] == 0) {
                    state[c] = 1;
                    stack.push_back({c, 0});
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return true;
}

NodeSet markov_blanket(const Dag& g, NodeId target) {
    NodeSet mb(g.parents(target).begin(), g.parents(target).end());
    for (NodeId c : g.children(target)) {
        mb.insert(c);
        mb.insert(g.parents(c).begin(), g.parents(c).end());
    }
    mb.erase(target);
    return mb;
}

Subgraph mb_subgraph(const Dag& g, const NodeSet& targets) {
    if (targets.empty()) throw ValidationError("Markov blanket subgraph needs at least one target");
    NodeSet keep;
    for (NodeId t : targets) {
        if (t >= g.node_count()) {
            throw ValidationError("target node " + std::to_string(t) + " out of range");
        }
        keep.insert(t);
        auto mb = markov_blanket(g, t);
        keep.insert(mb.begin(), mb.end());
    }

    Subgraph out;
    out.original.assign(keep.begin(), keep.end());
    std::vector<NodeId> remap(g.node_count(), g.node_count());
    for (std::size_t i = 0; i < out.original.size(); ++i) remap[out.original[i]] = i;

    std::vector<Edge> edges;
    for (Edge e : g.edges()) {
        if (remap[e.from] < g.node_count() && remap[e.to] < g.node_count()) {
            edges.push_back({remap[e.from], remap[e.to]});
        }
    }
    out.graph = Dag(out.original.size(), edges);
    return out;
}

bool d_separated(const Dag& g, NodeId x, NodeId y, const NodeSet& z) {
    const std::size_t n = g.node_count();
    std::vector<char> in_z(n, 0);
    for (NodeId v : z) in_z.at(v) = 1;

    // Nodes that are in z or have a descendant in z.
    std::vector<char> ancestor_of_z(n, 0);
    std::vector<NodeId> frontier(z.begin(), z.end());
    for (NodeId v : frontier) ancestor_of_z[v] = 1;
    while (!frontier.empty()) {
        NodeId v = frontier.back();
        frontier.pop_back();
        for (NodeId p : g.parents(v)) {
            if (!ancestor_of_z[p]) {
                ancestor_of_z[p] = 1;
                frontier.push_back(p);
            }
        }
    }

    // Trail search over (node, arrived-from-child?) pairs.
    enum : int { kUp = 0, kDown = 1 };
    std::vector<std::array<char, 2>> visited(n, {0, 0});
    std::deque<std::pair<NodeId, int>> queue{{x, kUp}};
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = 1;
        if (v == y && !in_z[v]) return false;

        if (dir == kUp && !in_z[v]) {
            for (NodeId p : g.parents(v)) queue.emplace_back(p, kUp);
            for (NodeId c : g.children(v)) queue.emplace_back(c, kDown);
        } else if (dir == kDown) {
            if (!in_z[v]) {
                for (NodeId c : g.children(v)) queue.emplace_back(c, kDown);
            }
            if (ancestor_of_z[v]) {
                for (NodeId p : g.parents(v)) queue.emplace_back(p, kUp);
            }
        }
    }
    return true;
}

std::vector<NodeId> topological_order(const Dag& g) {
    const std::size_t n = g.node_count();
    std::vector<std::size_t> indegree(n);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v) {
        indegree[v] = g.parents(v).size();
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<NodeId> order;
    order.reserve(n);
    while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        order.push_back(v);
        for (NodeId c : g.children(v)) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    if (order.size() != n) throw StructuralError("graph contains a directed cycle");
    return order;
}

}  // namespace cgforge
