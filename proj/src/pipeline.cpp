#include "cgforge/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cgforge/error.hpp"

namespace cgforge {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

template <class F>
auto in_stage(std::string_view stage, F&& f) {
    const std::string tag = "[" + std::string(stage) + "] ";
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(tag + e.what());
    } catch (const Error& e) {
        throw Error(tag + e.what());
    }
}

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("config key '" + key + "' has the wrong type");
    }
}

std::vector<std::pair<std::string, std::string>> edge_pairs(const json& j, const std::string& key) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : get_as<std::vector<std::vector<std::string>>>(j, key)) {
        if (e.size() != 2) throw ValidationError("config '" + key + "' entries must be [from, to] pairs");
        out.emplace_back(e[0], e[1]);
    }
    return out;
}

DiscretizationRule parse_rule(const json& r) {
    if (!r.is_object()) throw ValidationError("discretize entries must be objects");
    DiscretizationRule rule;
    rule.variable = get_as<std::string>(r, "column");
    const auto kind = get_as<std::string>(r, "kind");
    if (kind == "cuts") {
        rule.kind = ExplicitCuts{get_as<std::vector<double>>(r, "cuts")};
    } else if (kind == "quantile") {
        rule.kind = QuantileBins{get_as<int>(r, "bins")};
    } else if (kind == "map") {
        rule.kind = ValueMap{get_as<std::map<std::string, std::string>>(r, "map")};
    } else if (kind == "rare") {
        RareMerge m;
        m.min_count = get_as<std::size_t>(r, "min_count");
        if (r.contains("label")) m.merged_label = get_as<std::string>(r, "label");
        rule.kind = m;
    } else {
        throw ValidationError("unknown discretization kind '" + kind + "' for column '" + rule.variable + "'");
    }
    rule.validate();
    return rule;
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() || base.empty() ? p : base / p; }

}  // namespace

std::string digest_bytes(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

void PipelineConfig::validate() const {
    if (data.empty()) throw ValidationError("config needs 'data'");
    if (targets.empty()) throw ValidationError("config needs at least one target");
    if (tiers.empty()) throw ValidationError("config needs 'tiers'");
    ensemble.validate();

    const std::set<std::string> dropped(drop.begin(), drop.end());
    auto not_dropped = [&](const std::string& name, const std::string& where) {
        if (dropped.contains(name)) {
            throw ValidationError(where + " references dropped column '" + name + "'");
        }
    };
    int highest = 0;
    for (const auto& [name, tier] : tiers) {
        not_dropped(name, "tiers");
        if (tier < 1) throw ValidationError("tier of '" + name + "' must be >= 1");
        highest = std::max(highest, tier);
    }
    for (const auto& t : targets) {
        not_dropped(t, "targets");
        auto it = tiers.find(t);
        if (it == tiers.end()) throw ValidationError("target '" + t + "' has no tier");
        if (it->second != highest) {
            throw ValidationError("target '" + t + "' is in tier " + std::to_string(it->second) +
                                  ", not the highest tier " + std::to_string(highest));
        }
    }
    for (const auto& r : discretize) not_dropped(r.variable, "discretize");
    for (const auto* list : {&required, &forbidden}) {
        for (const auto& [a, b] : *list) {
            not_dropped(a, "edge constraints");
            not_dropped(b, "edge constraints");
        }
    }
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config root must be an object");

    static const std::set<std::string> known{"data", "drop",     "discretize", "tiers",   "targets",
                                             "required", "forbidden", "runs", "threshold", "seed",
                                             "workers", "max_iterations", "out", "colors"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ValidationError("unknown config key '" + key + "'");
    }

    PipelineConfig cfg;
    cfg.digest = digest_bytes(text);
    if (!j.contains("data")) throw ValidationError("config needs 'data'");
    cfg.data = resolve(base_dir, get_as<std::string>(j, "data"));
    if (j.contains("drop")) cfg.drop = get_as<std::vector<std::string>>(j, "drop");
    if (j.contains("discretize")) {
        if (!j["discretize"].is_array()) throw ValidationError("config 'discretize' must be an array");
        for (const auto& r : j["discretize"]) cfg.discretize.push_back(parse_rule(r));
    }
    if (j.contains("tiers")) cfg.tiers = get_as<std::map<std::string, int>>(j, "tiers");
    if (j.contains("targets")) cfg.targets = get_as<std::vector<std::string>>(j, "targets");
    if (j.contains("required")) cfg.required = edge_pairs(j, "required");
    if (j.contains("forbidden")) cfg.forbidden = edge_pairs(j, "forbidden");
    if (j.contains("runs")) cfg.ensemble.runs = get_as<std::size_t>(j, "runs");
    if (j.contains("threshold")) cfg.ensemble.threshold = get_as<double>(j, "threshold");
    if (j.contains("seed")) cfg.ensemble.base_seed = get_as<std::uint64_t>(j, "seed");
    if (j.contains("workers")) cfg.ensemble.workers = get_as<std::size_t>(j, "workers");
    if (j.contains("max_iterations") && !j["max_iterations"].is_null()) {
        cfg.ensemble.max_iterations = get_as<std::size_t>(j, "max_iterations");
    }
    cfg.out = resolve(base_dir, j.contains("out") ? get_as<std::string>(j, "out") : std::string("out"));
    if (j.contains("colors")) {
        TierColors colors;
        for (const auto& [tier, color] : get_as<std::map<std::string, std::string>>(j, "colors")) {
            try {
                std::size_t used = 0;
                int t = std::stoi(tier, &used);
                if (used != tier.size()) throw std::invalid_argument(tier);
                colors[t] = color;
            } catch (const std::logic_error&) {
                throw ValidationError("colors key '" + tier + "' is not a tier number");
            }
        }
        cfg.colors = std::move(colors);
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    return in_stage("config", [&] { return parse_config(read_file(path), path.parent_path()); });
}

PreparedData prepare_data(const PipelineConfig& cfg) {
    const std::string bytes = in_stage("ingest", [&] { return read_file(cfg.data); });
    return prepare_data(cfg, bytes);
}

PreparedData prepare_data(const PipelineConfig& cfg, std::string_view csv_bytes) {
    in_stage("config", [&] {
        cfg.validate();
        return 0;
    });
    PreparedData out;
    out.data_digest = digest_bytes(csv_bytes);

    RawTable raw = in_stage("ingest", [&] {
        std::istringstream in{std::string(csv_bytes)};
        return read_csv(in);
    });

    in_stage("validate", [&] {
        auto require_column = [&](const std::string& name, const std::string& where) {
            if (!raw.index_of(name)) throw ValidationError(where + " references unknown column '" + name + "'");
        };
        for (const auto& n : cfg.drop) require_column(n, "drop");
        for (const auto& [n, _] : cfg.tiers) require_column(n, "tiers");
        for (const auto& n : cfg.targets) require_column(n, "targets");
        for (const auto& r : cfg.discretize) require_column(r.variable, "discretize");
        for (const auto* list : {&cfg.required, &cfg.forbidden}) {
            for (const auto& [a, b] : *list) {
                require_column(a, "edge constraints");
                require_column(b, "edge constraints");
            }
        }
        const std::set<std::string> dropped(cfg.drop.begin(), cfg.drop.end());
        for (const auto& n : raw.names) {
            if (!dropped.contains(n) && !cfg.tiers.contains(n)) {
                throw ValidationError("column '" + n + "' has no tier; assign one or drop it");
            }
        }
        return 0;
    });

    raw = in_stage("drop", [&] { return drop_columns(raw, std::set<std::string>(cfg.drop.begin(), cfg.drop.end())); });
    Dataset encoded = in_stage("discretize", [&] { return encode(raw, cfg.discretize); });

    in_stage("constraints", [&] {
        std::vector<std::size_t> keep;
        std::vector<int> tiers;
        for (std::size_t i = 0; i < encoded.variable_count(); ++i) {
            const auto& v = encoded.variable(i);
            if (v.arity() < 2) {
                if (std::find(cfg.targets.begin(), cfg.targets.end(), v.name) != cfg.targets.end()) {
                    throw ValidationError("target '" + v.name + "' has a single observed state");
                }
                out.warnings.push_back("variable '" + v.name + "' has " + std::to_string(v.arity()) +
                                       " state(s) and is excluded from learning");
                continue;
            }
            keep.push_back(i);
            tiers.push_back(cfg.tiers.at(v.name));
        }
        out.data = encoded.select(keep).with_tiers(tiers);
        out.constraints = tiers_to_constraints(tiers);

        auto edge_of = [&](const std::pair<std::string, std::string>& p) {
            auto a = out.data.index_of(p.first), b = out.data.index_of(p.second);
            if (!a || !b) {
                throw ValidationError("edge constraint " + p.first + "->" + p.second +
                                      " involves a variable excluded from learning");
            }
            return Edge{*a, *b};
        };
        for (const auto& p : cfg.forbidden) out.constraints.forbidden.insert(edge_of(p));
        for (const auto& p : cfg.required) {
            const Edge e = edge_of(p);
            if (out.constraints.forbidden.contains(e)) {
                throw ValidationError("required edge " + p.first + "->" + p.second + " contradicts the tiers");
            }
            out.constraints.required.insert(e);
        }
        out.constraints.validate(out.data.variable_count());
        return 0;
    });
    return out;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    PreparedData prep = prepare_data(cfg);
    const Dataset& d = prep.data;

    auto ensemble = in_stage("learn", [&] { return learn_ensemble(d, prep.constraints, cfg.ensemble); });
    const Provenance prov{cfg.digest, prep.data_digest, cfg.ensemble.base_seed, cfg.ensemble.runs,
                          cfg.ensemble.threshold};

    PipelineResult r;
    r.warnings = std::move(prep.warnings);
    for (const auto& run : ensemble.runs) {
        if (run.hit_iteration_cap) {
            r.warnings.push_back("run " + std::to_string(run.index) + " stopped at the iteration cap");
        }
    }
    for (const auto& v : d.variables()) r.frequencies.nodes.push_back({v.name, v.tier});
    r.frequencies.table = std::move(ensemble.table);
    r.frequencies.runs = std::move(ensemble.runs);
    r.frequencies.provenance = prov;

    auto averaged = in_stage("average", [&] { return average_graph(r.frequencies.table, cfg.ensemble.threshold); });
    r.full = make_document(d.variables(), averaged, prov, cfg.targets);
    r.blanket = in_stage("mb", [&] { return mb_document(r.full, cfg.targets); });
    return r;
}

void write_pipeline_outputs(const PipelineResult& r, const PipelineConfig& cfg, const fs::path& dir) {
    const TierColors colors = cfg.colors ? *cfg.colors : TierColors{};
    auto dot = [&](const GraphDocument& doc) { return cfg.colors ? export_dot(doc, colors) : export_dot(doc); };
    write_file_atomic(dir / "frequencies.json", export_frequencies_json(r.frequencies));
    write_file_atomic(dir / "graph.json", export_json(r.full));
    write_file_atomic(dir / "graph.dot", dot(r.full));
    write_file_atomic(dir / "mb.json", export_json(r.blanket));
    write_file_atomic(dir / "mb.dot", dot(r.blanket));
}

}  // namespace cgforge
