#ifndef CGFORGE_DATASET_HPP
#define CGFORGE_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cgforge {

using State = std::uint32_t;

// A categorical variable. `states` fixes the encoding: state index i <-> states[i].
struct Variable {
    std::string name;
    std::vector<std::string> states;
    int tier = 1;  // 1 = most upstream

    std::size_t arity() const { return states.size(); }
    std::optional<State> state_index(std::string_view label) const;

    friend bool operator==(const Variable&, const Variable&) = default;
};

// Column-major table of encoded observations. Immutable once built.
class Dataset {
public:
    Dataset() = default;

    // Throws ValidationError if columns are ragged, codes exceed arity, or
    // variable metadata is malformed (duplicate names/labels, tier < 1).
    Dataset(std::vector<Variable> variables, std::vector<std::vector<State>> columns,
            std::size_t row_count);

    std::size_t variable_count() const { return variables_.size(); }
    std::size_t row_count() const { return row_count_; }

    const std::vector<Variable>& variables() const { return variables_; }
    const Variable& variable(std::size_t i) const { return variables_.at(i); }
    std::span<const State> column(std::size_t i) const { return columns_.at(i); }

    std::optional<std::size_t> index_of(std::string_view name) const;
    const std::string& label(std::size_t var, std::size_t row) const;

    // Copy keeping only the listed variables, in the listed order.
    Dataset select(std::span<const std::size_t> indices) const;
    // Copy with tiers replaced; tiers.size() must equal variable_count().
    Dataset with_tiers(std::span<const int> tiers) const;

private:
    std::vector<Variable> variables_;
    std::vector<std::vector<State>> columns_;
    std::size_t row_count_ = 0;
};

// Removes the named variables. Throws ValidationError listing unknown names.
Dataset drop_columns(const Dataset& d, const std::set<std::string>& names);

// N rows drawn uniformly with replacement; deterministic in `seed`.
// Throws EmptyDatasetError when d has no rows.
Dataset bootstrap_sample(const Dataset& d, std::uint64_t seed);

}  // namespace cgforge

#endif  // CGFORGE_DATASET_HPP
