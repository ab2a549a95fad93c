#include "cgforge/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "cgforge/error.hpp"
#include "cgforge/rng.hpp"

namespace cgforge {

std::optional<State> Variable::state_index(std::string_view label) const {
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) return std::nullopt;
    return static_cast<State>(it - states.begin());
}

Dataset::Dataset(std::vector<Variable> variables, std::vector<std::vector<State>> columns,
                 std::size_t row_count)
    : variables_(std::move(variables)), columns_(std::move(columns)), row_count_(row_count) {
    if (variables_.size() != columns_.size()) {
        throw ValidationError("dataset has " + std::to_string(variables_.size()) +
                              " variables but " + std::to_string(columns_.size()) + " columns");
    }
    std::unordered_set<std::string> names;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        const Variable& v = variables_[i];
        if (!names.insert(v.name).second) {
            throw ValidationError("duplicate variable name '" + v.name + "'");
        }
        if (v.tier < 1) {
            throw ValidationError("variable '" + v.name + "' has tier " + std::to_string(v.tier) +
                                  " (must be >= 1)");
        }
        std::unordered_set<std::string> labels(v.states.begin(), v.states.end());
        if (labels.size() != v.states.size()) {
            throw ValidationError("variable '" + v.name + "' has duplicate state labels");
        }
        if (columns_[i].size() != row_count_) {
            throw ValidationError("column '" + v.name + "' has " +
                                  std::to_string(columns_[i].size()) + " rows, expected " +
                                  std::to_string(row_count_));
        }
        const auto arity = v.arity();
        for (State s : columns_[i]) {
            if (s >= arity) {
                throw ValidationError("column '" + v.name + "' holds state " + std::to_string(s) +
                                      " outside arity " + std::to_string(arity));
            }
        }
    }
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name == name) return i;
    }
    return std::nullopt;
}

const std::string& Dataset::label(std::size_t var, std::size_t row) const {
    return variables_.at(var).states.at(columns_.at(var).at(row));
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
    std::vector<Variable> vars;
    std::vector<std::vector<State>> cols;
    vars.reserve(indices.size());
    cols.reserve(indices.size());
    for (std::size_t i : indices) {
        vars.push_back(variables_.at(i));
        cols.push_back(columns_.at(i));
    }
    return Dataset(std::move(vars), std::move(cols), row_count_);
}

Dataset Dataset::with_tiers(std::span<const int> tiers) const {
    if (tiers.size() != variables_.size()) {
        throw ValidationError("tier list length does not match variable count");
    }
    Dataset copy = *this;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        if (tiers[i] < 1) {
            throw ValidationError("variable '" + variables_[i].name + "' has tier " +
                                  std::to_string(tiers[i]) + " (must be >= 1)");
        }
        copy.variables_[i].tier = tiers[i];
    }
    return copy;
}

Dataset drop_columns(const Dataset& d, const std::set<std::string>& names) {
    std::string unknown;
    for (const auto& n : names) {
        if (!d.index_of(n)) unknown += (unknown.empty() ? "" : ", ") + n;
    }
    if (!unknown.empty()) throw ValidationError("unknown column(s) to drop: " + unknown);

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d.variable_count(); ++i) {
        if (!names.contains(d.variable(i).name)) keep.push_back(i);
    }
    return d.select(keep);
}

Dataset bootstrap_sample(const Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.row_count();
    if (n == 0) throw EmptyDatasetError();

    Rng rng(seed);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));

    std::vector<std::vector<State>> cols(d.variable_count());
    for (std::size_t v = 0; v < d.variable_count(); ++v) {
        auto src = d.column(v);
        auto& dst = cols[v];
        dst.resize(n);
        for (std::size_t i = 0; i < n; ++i) dst[i] = src[rows[i]];
    }
    return Dataset(d.variables(), std::move(cols), n);
}

}  // namespace cgforge
