#ifndef CGFORGE_PIPELINE_HPP
#define CGFORGE_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cgforge/csv.hpp"
#include "cgforge/dataset.hpp"
#include "cgforge/discretize.hpp"
#include "cgforge/document.hpp"
#include "cgforge/ensemble.hpp"
#include "cgforge/search.hpp"

namespace cgforge {

// One JSON file describing the whole procedure:
//
//   {
//     "data": "interactions.csv",
//     "drop": ["date", "time"],
//     "discretize": [{"column": "duration", "kind": "cuts", "cuts": [7, 30]},
//                    {"column": "views", "kind": "quantile", "bins": 4},
//                    {"column": "os", "kind": "map", "map": {"iOS": "apple"}},
//                    {"column": "city", "kind": "rare", "min_count": 50, "label": "other"}],
//     "tiers": {"age": 1, "tab": 2, "duration": 3, "is_click": 5},
//     "targets": ["is_click"],
//     "required": [["age", "tab"]],
//     "forbidden": [],
//     "runs": 100, "threshold": 0.9, "seed": 0, "workers": 0,
//     "out": "results",
//     "colors": {"1": "blue", "2": "green", "3": "red", "4": "red"}
//   }
//
// Relative paths resolve against the config file's directory.
struct PipelineConfig {
    std::filesystem::path data;
    std::vector<std::string> drop;
    std::vector<DiscretizationRule> discretize;
    std::map<std::string, int> tiers;
    std::vector<std::string> targets;
    std::vector<std::pair<std::string, std::string>> required;
    std::vector<std::pair<std::string, std::string>> forbidden;
    EnsembleConfig ensemble;
    std::filesystem::path out = "out";
    std::optional<TierColors> colors;
    std::string digest;  // of the config bytes

    // Checks the config on its own (targets nonempty and in the highest tier,
    // no reference to a dropped column, numeric ranges).
    void validate() const;
};

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// FNV-1a 64, rendered as "fnv1a64:<16 hex digits>".
std::string digest_bytes(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

struct PreparedData {
    Dataset data;  // learning variables only, tiers set
    ConstraintSet constraints;
    std::vector<std::string> warnings;
    std::string data_digest;
};

// drop -> discretize -> encode -> tiers/constraints. Validates every name
// against the CSV header before any learning. Variables left with a single
// state are excluded with a warning.
PreparedData prepare_data(const PipelineConfig& cfg, std::string_view csv_bytes);
PreparedData prepare_data(const PipelineConfig& cfg);

struct PipelineResult {
    FrequencyDocument frequencies;
    GraphDocument full;
    GraphDocument blanket;
    std::vector<std::string> warnings;
};

PipelineResult run_pipeline(const PipelineConfig& cfg);

// Files written by `run`: frequencies.json, graph.json, graph.dot, mb.json, mb.dot.
void write_pipeline_outputs(const PipelineResult& r, const PipelineConfig& cfg, const std::filesystem::path& dir);

}  // namespace cgforge

#endif  // CGFORGE_PIPELINE_HPP
