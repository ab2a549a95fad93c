#ifndef CGFORGE_CSV_HPP
#define CGFORGE_CSV_HPP

#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgforge/dataset.hpp"

namespace cgforge {

struct DiscretizationRule;

// Raw string cells as read from a CSV file, column-major.
struct RawTable {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> columns;
    std::size_t row_count = 0;

    std::optional<std::size_t> index_of(std::string_view name) const;
};

// RFC 4180 reader: header row of unique names, optional quoting, CRLF or LF.
// Ragged rows raise ParseError citing the 1-based data row; empty cells are
// missing values and are rejected.
RawTable read_csv(std::istream& in);

RawTable drop_columns(const RawTable& t, const std::set<std::string>& names);

// Encodes every column. Columns with a rule are discretized by it; the rest
// take the sorted distinct values as states, or the states of the matching
// schema variable when a schema is given.
Dataset encode(const RawTable& t, std::span<const DiscretizationRule> rules = {},
               std::optional<std::span<const Variable>> schema = std::nullopt);

// read_csv + encode without rules.
Dataset load_csv(std::istream& in, std::optional<std::span<const Variable>> schema = std::nullopt);

}  // namespace cgforge

#endif  // CGFORGE_CSV_HPP
