#include "cgforge/search.hpp"

#include <algorithm>
#include <string>

#include "cgforge/error.hpp"

namespace cgforge {

namespace {

// Deltas closer than this to the running best count as ties; a best delta
// at or below it counts as no improvement.
constexpr double kTieTolerance = 1e-9;

std::string edge_text(Edge e) { return std::to_string(e.from) + "->" + std::to_string(e.to); }

Dag start_graph(std::size_t n, const ConstraintSet& c, StartGraph start) {
    if (start == StartGraph::empty) return Dag(n);
    std::vector<Edge> req(c.required.begin(), c.required.end());
    return Dag(n, req);
}

}  // namespace

void ConstraintSet::validate(std::size_t node_count) const {
    auto check_edge = [&](Edge e, const char* which) {
        if (e.from >= node_count || e.to >= node_count) {
            throw ValidationError(std::string(which) + " edge " + edge_text(e) + " references an unknown node");
        }
        if (e.from == e.to) throw ValidationError(std::string(which) + " edge " + edge_text(e) + " is a self-loop");
    };
    for (Edge e : forbidden) check_edge(e, "forbidden");
    for (Edge e : required) {
        check_edge(e, "required");
        if (forbidden.contains(e)) {
            throw ValidationError("edge " + edge_text(e) + " is both required and forbidden");
        }
    }
    Dag g(node_count);
    for (Edge e : required) {
        if (g.has_edge(e)) continue;
        if (g.would_create_cycle(e)) {
            throw ValidationError("required edges form a cycle through " + edge_text(e));
        }
        g.add_edge(e);
    }
}

void ConstraintSet::check_satisfied_by(const Dag& g) const {
    for (Edge e : required) {
        if (e.from >= g.node_count() || e.to >= g.node_count() || !g.has_edge(e)) {
            throw ValidationError("graph lacks required edge " + edge_text(e));
        }
    }
    for (Edge e : forbidden) {
        if (e.from < g.node_count() && e.to < g.node_count() && g.has_edge(e)) {
            throw ValidationError("graph contains forbidden edge " + edge_text(e));
        }
    }
}

ConstraintSet tiers_to_constraints(std::span<const int> tiers) {
    ConstraintSet c;
    for (std::size_t u = 0; u < tiers.size(); ++u) {
        if (tiers[u] < 1) {
            throw ValidationError("node " + std::to_string(u) + " has tier " + std::to_string(tiers[u]));
        }
        for (std::size_t v = 0; v < tiers.size(); ++v) {
            if (tiers[u] > tiers[v]) c.forbidden.insert({u, v});
        }
    }
    return c;
}

std::vector<Move> legal_moves(const Dag& g, const ConstraintSet& c) {
    c.check_satisfied_by(g);
    const std::size_t n = g.node_count();
    std::vector<Move> adds, removes, reverses;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = 0; v < n; ++v) {
            if (u == v) continue;
            const Edge e{u, v};
            if (g.has_edge(e)) {
                if (c.required.contains(e)) continue;
                removes.push_back({MoveKind::remove, e});
                if (!c.forbidden.contains({v, u}) && !g.reversal_creates_cycle(e)) {
                    reverses.push_back({MoveKind::reverse, e});
                }
            } else if (!g.has_edge(v, u) && !c.forbidden.contains(e) && !g.would_create_cycle(e)) {
                adds.push_back({MoveKind::add, e});
            }
        }
    }
    std::vector<Move> out;
    out.reserve(adds.size() + removes.size() + reverses.size());
    out.insert(out.end(), adds.begin(), adds.end());
    out.insert(out.end(), removes.begin(), removes.end());
    out.insert(out.end(), reverses.begin(), reverses.end());
    return out;
}

SearchResult hill_climb(const Dataset& d, const ConstraintSet& c, const SearchConfig& cfg, ScoreCache& cache) {
    if (d.row_count() == 0) throw EmptyDatasetError();
    const std::size_t n = d.variable_count();
    c.validate(n);
    if (cfg.max_iterations && *cfg.max_iterations == 0) {
        throw ValidationError("max_iterations must be at least 1");
    }
    const std::size_t cap = cfg.max_iterations.value_or(std::max<std::size_t>(1, 10 * n * n));

    SearchResult result{start_graph(n, c, cfg.start), {}};
    Dag& g = result.graph;
    SearchTrace& trace = result.trace;
    c.check_satisfied_by(g);

    trace.initial_score = total_bic(d, g, cache);
    double cumulative = trace.initial_score;
    std::size_t iterations = 0;
    while (true) {
        const auto moves = legal_moves(g, c);
        const Move* best = nullptr;
        double best_delta = 0.0;
        for (const Move& m : moves) {
            const double delta = delta_score(d, g, m, cache);
            if (best == nullptr || delta > best_delta + kTieTolerance) {
                best = &m;
                best_delta = delta;
            }
        }
        if (best == nullptr || !(best_delta > kTieTolerance)) break;
        if (iterations == cap) {
            trace.hit_iteration_cap = true;
            break;
        }
        apply_move(g, *best);
        cumulative += best_delta;
        trace.steps.push_back({*best, best_delta, cumulative});
        ++iterations;
    }
    trace.final_score = total_bic(d, g, cache);
    return result;
}

ExhaustiveResult exhaustive_search(const Dataset& d, const ConstraintSet& c, std::size_t max_vars) {
    const std::size_t n = d.variable_count();
    if (max_vars > 5) throw ValidationError("exhaustive search supports at most 5 variables");
    if (n > max_vars) {
        throw ValidationError("exhaustive search refused: " + std::to_string(n) + " variables exceeds limit " +
                              std::to_string(max_vars));
    }
    c.validate(n);

    // Each unordered pair is absent, forward or backward.
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) pairs.push_back({i, j});
    }
    std::size_t combos = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) combos *= 3;

    ScoreCache cache;
    ExhaustiveResult best{Dag(n), 0.0, 0};
    std::vector<Edge> best_edges;
    bool have_best = false;
    std::vector<Edge> edges;
    for (std::size_t code = 0; code < combos; ++code) {
        edges.clear();
        std::size_t rest = code;
        bool ok = true;
        for (auto [i, j] : pairs) {
            const std::size_t choice = rest % 3;
            rest /= 3;
            const Edge fwd{i, j}, bwd{j, i};
            if (choice == 1) edges.push_back(fwd);
            if (choice == 2) edges.push_back(bwd);
            if ((choice == 1 && c.forbidden.contains(fwd)) || (choice == 2 && c.forbidden.contains(bwd)) ||
                (choice != 1 && c.required.contains(fwd)) || (choice != 2 && c.required.contains(bwd))) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        Dag g(n);
        std::sort(edges.begin(), edges.end());
        for (Edge e : edges) {
            if (g.would_create_cycle(e)) {
                ok = false;
                break;
            }
            g.add_edge(e);
        }
        if (!ok) continue;

        ++best.considered;
        const double score = total_bic(d, g, cache);
        if (!have_best || score > best.score || (score == best.score && edges < best_edges)) {
            best.graph = g;
            best.score = score;
            best_edges = edges;
            have_best = true;
        }
    }
    return best;
}

}  // namespace cgforge
