#ifndef CGFORGE_DOCUMENT_HPP
#define CGFORGE_DOCUMENT_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cgforge/dataset.hpp"
#include "cgforge/ensemble.hpp"
#include "cgforge/graph.hpp"

namespace cgforge {

inline constexpr std::string_view kSchemaVersion = "cgforge/1";

struct Provenance {
    std::string config_digest;
    std::string data_digest;
    std::uint64_t seed = 0;
    std::size_t runs = 0;
    double threshold = 0.0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct DocumentNode {
    std::string name;
    int tier = 1;

    friend bool operator==(const DocumentNode&, const DocumentNode&) = default;
};

struct DocumentEdge {
    std::string from;
    std::string to;
    std::optional<double> frequency;

    friend bool operator==(const DocumentEdge&, const DocumentEdge&) = default;
};

// A learned graph with names, tiers and provenance. Edges reference nodes by name.
struct GraphDocument {
    std::vector<DocumentNode> nodes;
    std::vector<DocumentEdge> edges;
    std::vector<std::string> targets;
    std::vector<DocumentEdge> dropped;  // edges removed by cycle repair
    Provenance provenance;

    // Throws ValidationError on duplicate names, unknown endpoints, bad tiers,
    // frequencies outside [0, 1], or cycles.
    void validate() const;
    Dag to_dag() const;
    std::optional<std::size_t> index_of(std::string_view name) const;

    friend bool operator==(const GraphDocument&, const GraphDocument&) = default;
};

GraphDocument make_document(std::span<const Variable> variables, const AveragedGraph& averaged,
                            const Provenance& provenance, std::vector<std::string> targets = {});
GraphDocument make_document(std::span<const Variable> variables, const Dag& g, const Provenance& provenance,
                            std::vector<std::string> targets = {});

// Restriction of the document to its targets plus their Markov blankets.
GraphDocument mb_document(const GraphDocument& doc, const std::vector<std::string>& targets);

std::string export_json(const GraphDocument& doc);
// Throws ParseError (with location) on malformed text, ValidationError on
// schema or graph violations.
GraphDocument import_json(std::string_view text);

// Ensemble edge counts together with node metadata and per-run summaries.
struct FrequencyDocument {
    std::vector<DocumentNode> nodes;
    EdgeFrequencyTable table;
    std::vector<RunSummary> runs;
    Provenance provenance;

    friend bool operator==(const FrequencyDocument&, const FrequencyDocument&) = default;
};

std::string export_frequencies_json(const FrequencyDocument& doc);
FrequencyDocument import_frequencies_json(std::string_view text);

// Node fill color per tier; tiers absent from the map are left unfilled.
using TierColors = std::map<int, std::string>;

// tier 1 blue, tier 2 green, tiers 3-4 red, with `highest_tier` uncolored.
TierColors default_tier_colors(int highest_tier);

// DOT digraph in document order. Edges carry their frequency as a label.
std::string export_dot(const GraphDocument& doc, const TierColors& colors);
std::string export_dot(const GraphDocument& doc);

}  // namespace cgforge

#endif  // CGFORGE_DOCUMENT_HPP
