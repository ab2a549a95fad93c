#include "cgforge/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cgforge/error.hpp"

namespace cgforge {

namespace {

// Largest dense table count_family will materialise.
constexpr std::uint64_t kDenseCellLimit = std::uint64_t{1} << 24;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, NodeId child) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        throw ParentSetTooLargeError("parent configuration count overflows for child " +
                                     std::to_string(child));
    }
    return a * b;
}

std::vector<NodeId> canonical_parents(const Dataset& d, NodeId child, std::span<const NodeId> parents) {
    if (child >= d.variable_count()) {
        throw ValidationError("child node " + std::to_string(child) + " out of range");
    }
    std::vector<NodeId> out(parents.begin(), parents.end());
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw ValidationError("duplicate parent in family of node " + std::to_string(child));
    }
    for (NodeId p : out) {
        if (p == child) throw ValidationError("node " + std::to_string(child) + " listed as its own parent");
        if (p >= d.variable_count()) throw ValidationError("parent node " + std::to_string(p) + " out of range");
    }
    return out;
}

struct FamilyShape {
    std::uint64_t q = 1;
    std::uint64_t r = 0;
    std::uint64_t cells = 0;
};

FamilyShape shape_of(const Dataset& d, NodeId child, const std::vector<NodeId>& parents) {
    FamilyShape s;
    for (NodeId p : parents) s.q = checked_mul(s.q, d.variable(p).arity(), child);
    s.r = d.variable(child).arity();
    s.cells = checked_mul(s.q, s.r, child);
    return s;
}

// Cell index j * r + k for every row.
std::vector<std::uint64_t> cell_indices(const Dataset& d, NodeId child, const std::vector<NodeId>& parents) {
    std::vector<std::uint64_t> idx(d.row_count(), 0);
    for (NodeId p : parents) {
        const std::uint64_t a = d.variable(p).arity();
        auto col = d.column(p);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = idx[i] * a + col[i];
    }
    const std::uint64_t r = d.variable(child).arity();
    auto col = d.column(child);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = idx[i] * r + col[i];
    return idx;
}

// Accumulates the likelihood term over configs in ascending j, states in
// ascending k. Both counting routes feed it the same sequence.
class LikelihoodSum {
public:
    void add_config(std::span<const std::uint64_t> nonzero_counts) {
        std::uint64_t nj = 0;
        for (auto n : nonzero_counts) nj += n;
        if (nj == 0) return;
        const double dnj = static_cast<double>(nj);
        for (auto n : nonzero_counts) {
            if (n == 0) continue;
            const double dn = static_cast<double>(n);
            sum_ += dn * std::log(dn / dnj);
        }
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
};

double penalty(std::size_t n, const FamilyShape& s) {
    return std::log(static_cast<double>(n)) / 2.0 * static_cast<double>(s.q) *
           static_cast<double>(s.r - (s.r > 0 ? 1 : 0));
}

}  // namespace

std::size_t LocalScoreKeyHash::operator()(const LocalScoreKey& k) const noexcept {
    std::size_t h = std::hash<std::size_t>{}(k.child) * 0x9E3779B97F4A7C15ull;
    for (NodeId p : k.parents) h ^= std::hash<std::size_t>{}(p) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t ContingencyTable::marginal(std::size_t j) const {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < child_arity; ++k) s += count(j, k);
    return s;
}

std::uint64_t ContingencyTable::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ContingencyTable count_family(const Dataset& d, NodeId child, std::span<const NodeId> parents) {
    const auto sorted = canonical_parents(d, child, parents);
    const auto shape = shape_of(d, child, sorted);
    if (shape.cells > kDenseCellLimit) {
        throw ParentSetTooLargeError("family of node " + std::to_string(child) + " needs " +
                                     std::to_string(shape.cells) + " cells");
    }
    ContingencyTable t;
    t.child_arity = shape.r;
    t.configs = shape.q;
    t.counts.assign(shape.cells, 0);
    for (auto cell : cell_indices(d, child, sorted)) ++t.counts[cell];
    return t;
}

double local_bic(const Dataset& d, NodeId child, std::span<const NodeId> parents) {
    const std::size_t n = d.row_count();
    if (n == 0) throw EmptyDatasetError();
    const auto sorted = canonical_parents(d, child, parents);
    const auto shape = shape_of(d, child, sorted);
    const auto cells = cell_indices(d, child, sorted);
    const std::size_t r = shape.r;

    LikelihoodSum ll;
    if (shape.cells <= std::max<std::uint64_t>(std::uint64_t{1} << 16, 2 * n)) {
        std::vector<std::uint64_t> counts(shape.cells, 0);
        for (auto c : cells) ++counts[c];
        for (std::size_t j = 0; j < shape.q; ++j) {
            ll.add_config(std::span(counts).subspan(j * r, r));
        }
    } else {
        // Sparse route: only observed cells, visited in the same (j, k) order.
        auto sorted_cells = cells;
        std::sort(sorted_cells.begin(), sorted_cells.end());
        std::vector<std::uint64_t> run;
        std::size_t i = 0;
        while (i < sorted_cells.size()) {
            const std::uint64_t j = sorted_cells[i] / r;
            run.clear();
            while (i < sorted_cells.size() && sorted_cells[i] / r == j) {
                std::size_t k = i;
                while (k < sorted_cells.size() && sorted_cells[k] == sorted_cells[i]) ++k;
                run.push_back(k - i);
                i = k;
            }
            ll.add_config(run);
        }
    }
    return ll.value() - penalty(n, shape);
}

double ScoreCache::local(const Dataset& d, NodeId child, std::span<const NodeId> parents) {
    if (bound_ == nullptr) {
        bound_ = &d;
    } else if (bound_ != &d) {
        throw std::logic_error("ScoreCache used with a different dataset than the one it was built for");
    }
    LocalScoreKey key{child, canonical_parents(d, child, parents)};
    if (auto it = entries_.find(key); it != entries_.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    const double s = local_bic(d, child, key.parents);
    entries_.emplace(std::move(key), s);
    return s;
}

double local_bic(const Dataset& d, NodeId child, std::span<const NodeId> parents, ScoreCache& cache) {
    return cache.local(d, child, parents);
}

double total_bic(const Dataset& d, const Dag& g) {
    if (g.node_count() != d.variable_count()) {
        throw ValidationError("graph has " + std::to_string(g.node_count()) + " nodes but dataset has " +
                              std::to_string(d.variable_count()) + " variables");
    }
    double total = 0.0;
    for (NodeId v = 0; v < g.node_count(); ++v) total += local_bic(d, v, g.parents(v));
    return total;
}

double total_bic(const Dataset& d, const Dag& g, ScoreCache& cache) {
    if (g.node_count() != d.variable_count()) {
        throw ValidationError("graph has " + std::to_string(g.node_count()) + " nodes but dataset has " +
                              std::to_string(d.variable_count()) + " variables");
    }
    double total = 0.0;
    for (NodeId v = 0; v < g.node_count(); ++v) total += cache.local(d, v, g.parents(v));
    return total;
}

double delta_score(const Dataset& d, const Dag& g, const Move& move, ScoreCache& cache) {
    const Edge e = move.edge;
    if (e.from >= g.node_count() || e.to >= g.node_count() || e.from == e.to) {
        throw ValidationError("illegal " + to_string(move) + ": invalid endpoints");
    }
    auto with = [](const std::vector<NodeId>& ps, NodeId x) {
        std::vector<NodeId> out = ps;
        out.insert(std::lower_bound(out.begin(), out.end(), x), x);
        return out;
    };
    auto without = [](const std::vector<NodeId>& ps, NodeId x) {
        std::vector<NodeId> out = ps;
        out.erase(std::find(out.begin(), out.end(), x));
        return out;
    };

    const auto& pa_to = g.parents(e.to);
    switch (move.kind) {
        case MoveKind::add:
            if (g.has_edge(e)) throw ValidationError("illegal " + to_string(move) + ": edge already present");
            if (g.has_edge(e.to, e.from)) {
                throw ValidationError("illegal " + to_string(move) + ": opposite edge present");
            }
            if (g.would_create_cycle(e)) throw ValidationError("illegal " + to_string(move) + ": creates a cycle");
            return cache.local(d, e.to, with(pa_to, e.from)) - cache.local(d, e.to, pa_to);
        case MoveKind::remove:
            if (!g.has_edge(e)) throw ValidationError("illegal " + to_string(move) + ": edge not present");
            return cache.local(d, e.to, without(pa_to, e.from)) - cache.local(d, e.to, pa_to);
        case MoveKind::reverse: {
            if (!g.has_edge(e)) throw ValidationError("illegal " + to_string(move) + ": edge not present");
            if (g.reversal_creates_cycle(e)) {
                throw ValidationError("illegal " + to_string(move) + ": reversal creates a cycle");
            }
            const auto& pa_from = g.parents(e.from);
            const double child_side = cache.local(d, e.to, without(pa_to, e.from)) - cache.local(d, e.to, pa_to);
            const double parent_side = cache.local(d, e.from, with(pa_from, e.to)) - cache.local(d, e.from, pa_from);
            return child_side + parent_side;
        }
    }
    throw ValidationError("unknown move kind");
}

}  // namespace cgforge
