#include "cgforge/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <string>
#include <thread>

#include "cgforge/error.hpp"
#include "cgforge/scoring.hpp"

namespace cgforge {

void EnsembleConfig::validate() const {
    if (runs < 1) throw ValidationError("ensemble needs at least one run");
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ValidationError("threshold must lie in (0, 1], got " + std::to_string(threshold));
    }
    if (max_iterations && *max_iterations == 0) throw ValidationError("max_iterations must be at least 1");
}

EdgeFrequencyTable::EdgeFrequencyTable(std::size_t node_count, std::size_t runs)
    : node_count_(node_count), runs_(runs) {
    if (runs == 0) throw ValidationError("frequency table needs runs >= 1");
}

std::size_t EdgeFrequencyTable::count(Edge e) const {
    auto it = counts_.find(e);
    return it == counts_.end() ? 0 : it->second;
}

void EdgeFrequencyTable::add(Edge e, std::size_t times) {
    if (e.from >= node_count_ || e.to >= node_count_ || e.from == e.to) {
        throw ValidationError("frequency table edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                              " is invalid for " + std::to_string(node_count_) + " nodes");
    }
    if (times == 0) return;
    auto& n = counts_[e];
    if (n + times > runs_) {
        throw ValidationError("edge count exceeds run count " + std::to_string(runs_));
    }
    n += times;
}

void EdgeFrequencyTable::add_graph(const Dag& g) {
    for (Edge e : g.edges()) add(e);
}

EnsembleResult learn_ensemble(const Dataset& d, const ConstraintSet& c, const EnsembleConfig& cfg) {
    cfg.validate();
    c.validate(d.variable_count());
    if (d.row_count() == 0) throw EmptyDatasetError();

    std::vector<RunSummary> summaries(cfg.runs);
    std::vector<std::exception_ptr> failures(cfg.runs);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.runs; i = next++) {
            try {
                const std::uint64_t seed = cfg.base_seed + i;
                const Dataset sample = bootstrap_sample(d, seed);
                SearchConfig sc{seed, cfg.max_iterations, cfg.start};
                ScoreCache cache;
                auto res = hill_climb(sample, c, sc, cache);
                RunSummary& s = summaries[i];
                s.index = i;
                s.seed = seed;
                s.final_score = res.trace.final_score;
                s.edges = res.graph.edges();
                s.edge_count = s.edges.size();
                s.iterations = res.trace.steps.size();
                s.hit_iteration_cap = res.trace.hit_iteration_cap;
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.runs);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < cfg.runs; ++i) {
        if (!failures[i]) continue;
        const std::string prefix = "ensemble run " + std::to_string(i) + " failed: ";
        try {
            std::rethrow_exception(failures[i]);
        } catch (const ValidationError& e) {
            throw ValidationError(prefix + e.what());
        } catch (const std::exception& e) {
            throw Error(prefix + e.what());
        }
    }

    EnsembleResult out{EdgeFrequencyTable(d.variable_count(), cfg.runs), std::move(summaries)};
    for (const auto& s : out.runs) {
        for (Edge e : s.edges) out.table.add(e);
    }
    return out;
}

namespace {

// Edges of one directed cycle in `edges`, or empty if acyclic. Deterministic:
// DFS from the smallest node, children in ascending order.
std::vector<Edge> find_cycle(std::size_t n, const std::set<Edge>& edges) {
    std::vector<std::vector<NodeId>> children(n);
    for (Edge e : edges) children[e.from].push_back(e.to);

    std::vector<char> state(n, 0);
    std::vector<NodeId> parent(n, n);
    for (NodeId root = 0; root < n; ++root) {
        if (state[root]) continue;
        std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
        state[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < children[v].size()) {
                NodeId c = children[v][next++];
                if (state[c] == 1) {
                    std::vector<Edge> cycle{{v, c}};
                    for (NodeId x = v; x != c; x = parent[x]) cycle.push_back({parent[x], x});
                    return cycle;
                }
                if (state[c] == 0) {
                    state[c] = 1;
                    parent[c] = v;
                    stack.push_back({c, 0});
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

}  // namespace

AveragedGraph average_graph(const EdgeFrequencyTable& f, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ValidationError("threshold must lie in (0, 1], got " + std::to_string(threshold));
    }
    const std::size_t n = f.node_count();
    std::set<Edge> kept;
    for (const auto& [e, count] : f.counts()) {
        if (static_cast<double>(count) / static_cast<double>(f.runs()) >= threshold) kept.insert(e);
    }

    AveragedGraph out;
    for (auto cycle = find_cycle(n, kept); !cycle.empty(); cycle = find_cycle(n, kept)) {
        Edge victim = *std::min_element(cycle.begin(), cycle.end(), [&](Edge a, Edge b) {
            const auto ca = f.count(a), cb = f.count(b);
            return ca != cb ? ca < cb : a < b;
        });
        kept.erase(victim);
        out.dropped.push_back(victim);
    }

    std::vector<Edge> edges(kept.begin(), kept.end());
    out.graph = Dag(n, edges);
    for (Edge e : edges) out.frequency[e] = f.frequency(e);
    return out;
}

}  // namespace cgforge
