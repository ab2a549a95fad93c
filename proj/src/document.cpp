#include "cgforge/document.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

#include "cgforge/error.hpp"

namespace cgforge {

using ojson = nlohmann::ordered_json;

namespace {

ojson provenance_json(const Provenance& p) {
    return ojson{{"config_digest", p.config_digest},
                 {"data_digest", p.data_digest},
                 {"seed", p.seed},
                 {"runs", p.runs},
                 {"threshold", p.threshold}};
}

ojson nodes_json(const std::vector<DocumentNode>& nodes) {
    ojson out = ojson::array();
    for (const auto& n : nodes) out.push_back({{"name", n.name}, {"tier", n.tier}});
    return out;
}

ojson edges_json(const std::vector<DocumentEdge>& edges) {
    ojson out = ojson::array();
    for (const auto& e : edges) {
        ojson j{{"from", e.from}, {"to", e.to}};
        if (e.frequency) j["frequency"] = *e.frequency;
        out.push_back(std::move(j));
    }
    return out;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson parse(std::string_view text) {
    try {
        return ojson::parse(text.begin(), text.end());
    } catch (const ojson::parse_error& e) {
        throw ParseError(std::string("malformed document: ") + e.what());
    }
}

// Reads `key` from object `j` as T; converts library type errors to ours.
template <class T>
T field(const ojson& j, const char* key, std::string_view where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(std::string(where) + ": missing field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const ojson::exception& e) {
        throw ValidationError(std::string(where) + ": field '" + key + "' has the wrong type");
    }
}

void check_header(const ojson& j, std::string_view kind) {
    if (!j.is_object()) throw ValidationError("document root must be an object");
    const auto schema = field<std::string>(j, "schema", "document");
    if (schema != kSchemaVersion) {
        throw ValidationError("unsupported schema '" + schema + "', expected '" + std::string(kSchemaVersion) + "'");
    }
    const auto k = field<std::string>(j, "kind", "document");
    if (k != kind) throw ValidationError("document kind is '" + k + "', expected '" + std::string(kind) + "'");
}

Provenance read_provenance(const ojson& j) {
    const ojson& p = j.contains("provenance") ? j.at("provenance") : ojson::object();
    Provenance out;
    out.config_digest = field<std::string>(p, "config_digest", "provenance");
    out.data_digest = field<std::string>(p, "data_digest", "provenance");
    out.seed = field<std::uint64_t>(p, "seed", "provenance");
    out.runs = field<std::size_t>(p, "runs", "provenance");
    out.threshold = field<double>(p, "threshold", "provenance");
    return out;
}

std::vector<DocumentNode> read_nodes(const ojson& j) {
    std::vector<DocumentNode> out;
    const auto& arr = j.at("nodes");
    if (!arr.is_array()) throw ValidationError("'nodes' must be an array");
    for (const auto& n : arr) {
        out.push_back({field<std::string>(n, "name", "node"), field<int>(n, "tier", "node")});
    }
    return out;
}

std::vector<DocumentEdge> read_edges(const ojson& j, const char* key) {
    std::vector<DocumentEdge> out;
    if (!j.contains(key)) return out;
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw ValidationError(std::string("'") + key + "' must be an array");
    for (const auto& e : arr) {
        DocumentEdge d{field<std::string>(e, "from", "edge"), field<std::string>(e, "to", "edge"), std::nullopt};
        if (e.contains("frequency")) d.frequency = field<double>(e, "frequency", "edge");
        out.push_back(std::move(d));
    }
    return out;
}

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_frequency(double f) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, f, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

}  // namespace

std::optional<std::size_t> GraphDocument::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name == name) return i;
    }
    return std::nullopt;
}

void GraphDocument::validate() const {
    std::set<std::string> names;
    for (const auto& n : nodes) {
        if (n.name.empty()) throw ValidationError("document node with empty name");
        if (!names.insert(n.name).second) throw ValidationError("duplicate node '" + n.name + "'");
        if (n.tier < 1) throw ValidationError("node '" + n.name + "' has tier " + std::to_string(n.tier));
    }
    auto check = [&](const DocumentEdge& e) {
        for (const auto* end : {&e.from, &e.to}) {
            if (!names.contains(*end)) {
                throw ValidationError("edge " + e.from + "->" + e.to + " references unknown node '" + *end + "'");
            }
        }
        if (e.frequency && !(*e.frequency >= 0.0 && *e.frequency <= 1.0)) {
            throw ValidationError("edge " + e.from + "->" + e.to + " has frequency outside [0, 1]");
        }
    };
    for (const auto& e : edges) check(e);
    for (const auto& e : dropped) check(e);
    for (const auto& t : targets) {
        if (!names.contains(t)) throw ValidationError("target '" + t + "' is not a node");
    }
    (void)to_dag();
}

Dag GraphDocument::to_dag() const {
    std::vector<Edge> es;
    for (const auto& e : edges) {
        auto u = index_of(e.from), v = index_of(e.to);
        if (!u || !v) throw ValidationError("edge " + e.from + "->" + e.to + " references an unknown node");
        es.push_back({*u, *v});
    }
    try {
        return Dag(nodes.size(), es);
    } catch (const StructuralError& err) {
        throw ValidationError(std::string("document edges are not a DAG: ") + err.what());
    }
}

GraphDocument make_document(std::span<const Variable> variables, const Dag& g, const Provenance& provenance,
                            std::vector<std::string> targets) {
    GraphDocument doc;
    for (const auto& v : variables) doc.nodes.push_back({v.name, v.tier});
    for (Edge e : g.edges()) doc.edges.push_back({variables[e.from].name, variables[e.to].name, std::nullopt});
    doc.targets = std::move(targets);
    doc.provenance = provenance;
    return doc;
}

GraphDocument make_document(std::span<const Variable> variables, const AveragedGraph& averaged,
                            const Provenance& provenance, std::vector<std::string> targets) {
    GraphDocument doc = make_document(variables, averaged.graph, provenance, std::move(targets));
    for (auto& e : doc.edges) {
        const Edge ix{*doc.index_of(e.from), *doc.index_of(e.to)};
        e.frequency = averaged.frequency.at(ix);
    }
    for (Edge e : averaged.dropped) doc.dropped.push_back({variables[e.from].name, variables[e.to].name, std::nullopt});
    return doc;
}

GraphDocument mb_document(const GraphDocument& doc, const std::vector<std::string>& targets) {
    NodeSet ids;
    for (const auto& t : targets) {
        auto i = doc.index_of(t);
        if (!i) throw ValidationError("Markov blanket target '" + t + "' is not a node of the graph");
        ids.insert(*i);
    }
    const auto sub = mb_subgraph(doc.to_dag(), ids);

    GraphDocument out;
    out.provenance = doc.provenance;
    out.targets = targets;
    std::set<std::string> kept;
    for (NodeId i : sub.original) {
        out.nodes.push_back(doc.nodes[i]);
        kept.insert(doc.nodes[i].name);
    }
    for (const auto& e : doc.edges) {
        if (kept.contains(e.from) && kept.contains(e.to)) out.edges.push_back(e);
    }
    return out;
}

std::string export_json(const GraphDocument& doc) {
    ojson j{{"schema", kSchemaVersion}, {"kind", "graph"}};
    j["nodes"] = nodes_json(doc.nodes);
    j["edges"] = edges_json(doc.edges);
    j["targets"] = doc.targets;
    j["dropped_edges"] = edges_json(doc.dropped);
    j["provenance"] = provenance_json(doc.provenance);
    return dump(j);
}

GraphDocument import_json(std::string_view text) {
    const ojson j = parse(text);
    check_header(j, "graph");
    GraphDocument doc;
    doc.nodes = read_nodes(j);
    doc.edges = read_edges(j, "edges");
    doc.dropped = read_edges(j, "dropped_edges");
    if (j.contains("targets")) doc.targets = field<std::vector<std::string>>(j, "targets", "document");
    doc.provenance = read_provenance(j);
    doc.validate();
    return doc;
}

std::string export_frequencies_json(const FrequencyDocument& doc) {
    const auto& nodes = doc.nodes;
    ojson j{{"schema", kSchemaVersion}, {"kind", "edge-frequencies"}};
    j["nodes"] = nodes_json(nodes);
    j["runs"] = doc.table.runs();
    ojson counts = ojson::array();
    for (const auto& [e, c] : doc.table.counts()) {
        counts.push_back({{"from", nodes.at(e.from).name}, {"to", nodes.at(e.to).name}, {"count", c}});
    }
    j["counts"] = std::move(counts);
    ojson runs = ojson::array();
    for (const auto& r : doc.runs) {
        ojson edges = ojson::array();
        for (Edge e : r.edges) edges.push_back({nodes.at(e.from).name, nodes.at(e.to).name});
        runs.push_back({{"index", r.index},
                        {"seed", r.seed},
                        {"final_score", r.final_score},
                        {"iterations", r.iterations},
                        {"hit_iteration_cap", r.hit_iteration_cap},
                        {"edges", std::move(edges)}});
    }
    j["run_summaries"] = std::move(runs);
    j["provenance"] = provenance_json(doc.provenance);
    return dump(j);
}

FrequencyDocument import_frequencies_json(std::string_view text) {
    const ojson j = parse(text);
    check_header(j, "edge-frequencies");
    FrequencyDocument doc;
    doc.nodes = read_nodes(j);
    GraphDocument names{doc.nodes, {}, {}, {}, {}};
    names.validate();
    auto lookup = [&](const std::string& name) {
        auto i = names.index_of(name);
        if (!i) throw ValidationError("frequency entry references unknown node '" + name + "'");
        return *i;
    };

    doc.table = EdgeFrequencyTable(doc.nodes.size(), field<std::size_t>(j, "runs", "document"));
    for (const auto& c : j.at("counts")) {
        doc.table.add({lookup(field<std::string>(c, "from", "count")), lookup(field<std::string>(c, "to", "count"))},
                      field<std::size_t>(c, "count", "count"));
    }
    if (j.contains("run_summaries")) {
        for (const auto& r : j.at("run_summaries")) {
            RunSummary s;
            s.index = field<std::size_t>(r, "index", "run");
            s.seed = field<std::uint64_t>(r, "seed", "run");
            s.final_score = field<double>(r, "final_score", "run");
            s.iterations = field<std::size_t>(r, "iterations", "run");
            s.hit_iteration_cap = field<bool>(r, "hit_iteration_cap", "run");
            for (const auto& e : field<std::vector<std::vector<std::string>>>(r, "edges", "run")) {
                if (e.size() != 2) throw ValidationError("run edge must be a [from, to] pair");
                s.edges.push_back({lookup(e[0]), lookup(e[1])});
            }
            s.edge_count = s.edges.size();
            doc.runs.push_back(std::move(s));
        }
    }
    doc.provenance = read_provenance(j);
    return doc;
}

TierColors default_tier_colors(int highest_tier) {
    TierColors c{{1, "blue"}, {2, "green"}, {3, "red"}, {4, "red"}};
    c.erase(highest_tier);
    return c;
}

std::string export_dot(const GraphDocument& doc) {
    int highest = 1;
    for (const auto& n : doc.nodes) highest = std::max(highest, n.tier);
    return export_dot(doc, default_tier_colors(highest));
}

std::string export_dot(const GraphDocument& doc, const TierColors& colors) {
    std::string out = "digraph cgforge {\n";
    for (const auto& n : doc.nodes) {
        out += "  " + dot_quote(n.name) + " [tier=" + std::to_string(n.tier);
        if (auto it = colors.find(n.tier); it != colors.end()) {
            out += ", style=filled, fillcolor=" + dot_quote(it->second);
        }
        if (std::find(doc.targets.begin(), doc.targets.end(), n.name) != doc.targets.end()) {
            out += ", peripheries=2";
        }
        out += "];\n";
    }
    for (const auto& e : doc.edges) {
        out += "  " + dot_quote(e.from) + " -> " + dot_quote(e.to);
        if (e.frequency) out += " [label=" + dot_quote(format_frequency(*e.frequency)) + "]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace cgforge
