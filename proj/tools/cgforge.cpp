// cgforge: learn averaged causal graphs from discrete data.
//
//   cgforge run --config pipeline.json [--seed N] [--runs R] [--threshold T] [--out DIR]
//   cgforge ingest --config pipeline.json [--out DIR]
//   cgforge learn --config pipeline.json [--seed N] [--runs R] [--out DIR]
//   cgforge average --frequencies frequencies.json [--threshold T] [--out DIR]
//   cgforge mb --graph graph.json [--targets a,b] [--out DIR]
//   cgforge export --graph graph.json [--format dot|json] [--config pipeline.json] [--out FILE]
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgforge/document.hpp"
#include "cgforge/ensemble.hpp"
#include "cgforge/error.hpp"
#include "cgforge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cgforge;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<double> threshold;
    std::optional<std::string> out;
};

PipelineConfig load_with_overrides(const std::string& path, const Overrides& o) {
    PipelineConfig cfg = load_config(path);
    if (o.seed) cfg.ensemble.base_seed = *o.seed;
    if (o.runs) cfg.ensemble.runs = *o.runs;
    if (o.threshold) cfg.ensemble.threshold = *o.threshold;
    if (o.out) cfg.out = *o.out;
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("[config] ") + e.what());
    }
    return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string to_csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

std::string dataset_csv(const Dataset& d) {
    std::string out;
    for (std::size_t v = 0; v < d.variable_count(); ++v) {
        out += (v ? "," : "") + to_csv_field(d.variable(v).name);
    }
    out += "\n";
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        for (std::size_t v = 0; v < d.variable_count(); ++v) {
            out += (v ? "," : "") + to_csv_field(d.label(v, r));
        }
        out += "\n";
    }
    return out;
}

int cmd_run(const std::string& config, const Overrides& o) {
    const auto cfg = load_with_overrides(config, o);
    const auto result = run_pipeline(cfg);
    print_warnings(result.warnings);
    write_pipeline_outputs(result, cfg, cfg.out);
    std::cout << "averaged graph: " << result.full.nodes.size() << " nodes, " << result.full.edges.size()
              << " edges; Markov blanket subgraph: " << result.blanket.nodes.size() << " nodes, "
              << result.blanket.edges.size() << " edges\n"
              << "outputs written to " << cfg.out.string() << "\n";
    return 0;
}

int cmd_ingest(const std::string& config, const Overrides& o) {
    const auto cfg = load_with_overrides(config, o);
    const auto prep = prepare_data(cfg);
    print_warnings(prep.warnings);
    write_file_atomic(cfg.out / "ingested.csv", dataset_csv(prep.data));
    std::cout << prep.data.row_count() << " rows\n";
    for (const auto& v : prep.data.variables()) {
        std::cout << "  " << v.name << "  tier " << v.tier << "  arity " << v.arity() << "\n";
    }
    return 0;
}

int cmd_learn(const std::string& config, const Overrides& o) {
    const auto cfg = load_with_overrides(config, o);
    const auto prep = prepare_data(cfg);
    print_warnings(prep.warnings);
    auto ensemble = learn_ensemble(prep.data, prep.constraints, cfg.ensemble);
    FrequencyDocument doc;
    for (const auto& v : prep.data.variables()) doc.nodes.push_back({v.name, v.tier});
    doc.table = std::move(ensemble.table);
    doc.runs = std::move(ensemble.runs);
    doc.provenance = {cfg.digest, prep.data_digest, cfg.ensemble.base_seed, cfg.ensemble.runs,
                      cfg.ensemble.threshold};
    write_file_atomic(cfg.out / "frequencies.json", export_frequencies_json(doc));
    std::cout << doc.table.counts().size() << " distinct edges over " << doc.table.runs() << " runs\n";
    return 0;
}

int cmd_average(const std::string& frequencies, std::optional<double> threshold,
                const std::vector<std::string>& targets, const std::string& out) {
    auto doc = import_frequencies_json(read_file(frequencies));
    if (threshold) doc.provenance.threshold = *threshold;
    const auto averaged = average_graph(doc.table, doc.provenance.threshold);

    std::vector<Variable> vars;
    for (const auto& n : doc.nodes) vars.push_back(Variable{n.name, {}, n.tier});
    const auto graph = make_document(vars, averaged, doc.provenance, targets);
    graph.validate();
    write_file_atomic(fs::path(out) / "graph.json", export_json(graph));
    for (const auto& e : graph.dropped) {
        std::cerr << "warning: cycle repair dropped " << e.from << "->" << e.to << "\n";
    }
    std::cout << graph.edges.size() << " edges at threshold " << doc.provenance.threshold << "\n";
    return 0;
}

int cmd_mb(const std::string& graph, const std::vector<std::string>& targets, const std::string& out) {
    const auto doc = import_json(read_file(graph));
    const auto& chosen = targets.empty() ? doc.targets : targets;
    if (chosen.empty()) throw ValidationError("no targets given and the graph document records none");
    const auto sub = mb_document(doc, chosen);
    write_file_atomic(fs::path(out) / "mb.json", export_json(sub));
    std::cout << sub.nodes.size() << " nodes, " << sub.edges.size() << " edges in the Markov blanket subgraph\n";
    return 0;
}

int cmd_export(const std::string& graph, const std::string& format, const std::string& config,
               const std::string& out) {
    const auto doc = import_json(read_file(graph));
    std::string text;
    if (format == "json") {
        text = export_json(doc);
    } else {
        std::optional<TierColors> colors;
        if (!config.empty()) colors = load_config(config).colors;
        text = colors ? export_dot(doc, *colors) : export_dot(doc);
    }
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_file_atomic(out, text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn averaged causal graphs from discrete observational data"};
    app.require_subcommand(1);

    std::string config, frequencies, graph, format = "dot", out_file;
    std::vector<std::string> targets;
    Overrides o;
    std::optional<double> avg_threshold;
    std::string avg_out = ".", mb_out = ".";
    std::vector<std::string> avg_targets;

    auto add_overrides = [&](CLI::App* sub, bool learning) {
        sub->add_option("--config", config, "pipeline config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory (overrides config)");
        if (learning) {
            sub->add_option("--seed", o.seed, "base seed");
            sub->add_option("--runs", o.runs, "number of ensemble runs")->check(CLI::PositiveNumber);
            sub->add_option("--threshold", o.threshold, "edge frequency threshold in (0, 1]");
        }
    };

    auto* run = app.add_subcommand("run", "full pipeline: ingest, learn, average, Markov blanket, export");
    add_overrides(run, true);
    auto* ingest = app.add_subcommand("ingest", "load, drop and discretize; write ingested.csv");
    add_overrides(ingest, false);
    auto* learn = app.add_subcommand("learn", "learn the bootstrap ensemble; write frequencies.json");
    add_overrides(learn, true);

    auto* average = app.add_subcommand("average", "threshold edge frequencies; write graph.json");
    average->add_option("--frequencies", frequencies, "frequencies.json")->required()->check(CLI::ExistingFile);
    average->add_option("--threshold", avg_threshold, "edge frequency threshold in (0, 1]");
    average->add_option("--targets", avg_targets, "target names recorded in graph.json")->delimiter(',');
    average->add_option("--out", avg_out, "output directory");

    auto* mb = app.add_subcommand("mb", "restrict a graph to the Markov blanket of targets; write mb.json");
    mb->add_option("--graph", graph, "graph.json")->required()->check(CLI::ExistingFile);
    mb->add_option("--targets", targets, "target names (default: targets recorded in the graph)")->delimiter(',');
    mb->add_option("--out", mb_out, "output directory");

    auto* exp = app.add_subcommand("export", "render a graph document as DOT or JSON");
    exp->add_option("--graph", graph, "graph.json")->required()->check(CLI::ExistingFile);
    exp->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
    exp->add_option("--config", config, "pipeline config supplying tier colors")->check(CLI::ExistingFile);
    exp->add_option("--out", out_file, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(config, o);
        if (*ingest) return cmd_ingest(config, o);
        if (*learn) return cmd_learn(config, o);
        if (*average) return cmd_average(frequencies, avg_threshold, avg_targets, avg_out);
        if (*mb) return cmd_mb(graph, targets, mb_out);
        if (*exp) return cmd_export(graph, format, config, out_file);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
