#ifndef CGFORGE_DISCRETIZE_HPP
#define CGFORGE_DISCRETIZE_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cgforge/dataset.hpp"

namespace cgforge {

// k strictly increasing thresholds -> k+1 half-open bins [c_{i-1}, c_i).
struct ExplicitCuts {
    std::vector<double> cuts;
};

// Bins split at empirical quantiles; values equal to a cut fall in the lower bin.
struct QuantileBins {
    int bins = 4;
};

// Relabels raw values; values missing from the map keep their own label.
struct ValueMap {
    std::map<std::string, std::string> mapping;
};

// Every category seen fewer than min_count times becomes merged_label.
struct RareMerge {
    std::size_t min_count = 1;
    std::string merged_label = "other";
};

struct DiscretizationRule {
    std::string variable;
    std::variant<ExplicitCuts, QuantileBins, ValueMap, RareMerge> kind;

    void validate() const;  // throws ValidationError
};

struct EncodedColumn {
    Variable variable;
    std::vector<State> codes;
};

// Applies `rule` to a raw column. Numeric rules throw EncodingError on a
// non-numeric cell. Cut and quantile bins keep bin order as state order.
EncodedColumn discretize(std::span<const std::string> raw, const DiscretizationRule& rule);

}  // namespace cgforge

#endif  // CGFORGE_DISCRETIZE_HPP
