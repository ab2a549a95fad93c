#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>

#include <unistd.h>

#include "cgforge/error.hpp"
#include "cgforge/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace cgforge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("cgforge-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// X0 -> X2 <- X1, X2 -> X3, plus a constant column and an id column to drop.
std::string synthetic_csv() {
    testing::DiscreteNetwork net;
    net.graph = Dag(4, std::vector<Edge>{{0, 2}, {1, 2}, {2, 3}});
    net.arity = {2, 2, 2, 2};
    net.cpt = {{0.5, 0.5},
               {0.6, 0.4},
               {0.9, 0.1, 0.2, 0.8, 0.3, 0.7, 0.05, 0.95},
               {0.85, 0.15, 0.1, 0.9}};
    const auto d = testing::forward_sample(net, 2000, 11);
    std::string csv = "id,const," + testing::to_csv(d).substr(0, testing::to_csv(d).find('\n')) + "\n";
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        csv += std::to_string(r) + ",k";
        for (std::size_t v = 0; v < 4; ++v) csv += "," + d.label(v, r);
        csv += "\n";
    }
    return csv;
}

constexpr const char* kConfig = R"({
  "data": "data.csv",
  "drop": ["id"],
  "tiers": {"const": 1, "X0": 1, "X1": 1, "X2": 2, "X3": 3},
  "targets": ["X3"],
  "runs": 6,
  "threshold": 0.5,
  "seed": 3,
  "workers": 2
})";

}  // namespace


TEST_CASE("pipeline produces a full graph and a Markov blanket graph") {
    TempDir dir("pipe");
    write_file_atomic(dir.path / "data.csv", synthetic_csv());
    write_file_atomic(dir.path / "config.json", kConfig);

    const auto cfg = load_config(dir.path / "config.json");
    const auto r = run_pipeline(cfg);

    REQUIRE(r.full.nodes.size() == 4);  // const excluded
    REQUIRE(r.warnings.size() >= 1);
    CHECK(r.warnings[0].find("'const'") != std::string::npos);

    std::set<std::string> full_nodes;
    for (const auto& n : r.full.nodes) full_nodes.insert(n.name);
    for (const auto& n : r.blanket.nodes) CHECK(full_nodes.contains(n.name));
    CHECK(r.blanket.targets == std::vector<std::string>{"X3"});

    // tiers hold in the output
    for (const auto& e : r.full.edges) {
        CHECK(cfg.tiers.at(e.from) <= cfg.tiers.at(e.to));
    }
    CHECK(r.full.provenance.config_digest == digest_bytes(kConfig));
    CHECK(r.full.provenance.runs == 6);

    write_pipeline_outputs(r, cfg, dir.path / "out1");
    for (const char* f : {"frequencies.json", "graph.json", "graph.dot", "mb.json", "mb.dot"}) {
        CHECK(fs::exists(dir.path / "out1" / f));
    }
    CHECK(import_json(read_file(dir.path / "out1" / "graph.json")) == r.full);
    CHECK(import_frequencies_json(read_file(dir.path / "out1" / "frequencies.json")) == r.frequencies);
}

TEST_CASE("pipeline reruns are byte-identical") {
    TempDir dir("rerun");
    write_file_atomic(dir.path / "data.csv", synthetic_csv());
    write_file_atomic(dir.path / "config.json", kConfig);
    auto cfg = load_config(dir.path / "config.json");
    write_pipeline_outputs(run_pipeline(cfg), cfg, dir.path / "a");
    cfg.ensemble.workers = 1;
    write_pipeline_outputs(run_pipeline(cfg), cfg, dir.path / "b");
    for (const char* f : {"frequencies.json", "graph.json", "graph.dot", "mb.json", "mb.dot"}) {
        CHECK(read_file(dir.path / "a" / f) == read_file(dir.path / "b" / f));
    }
}

TEST_CASE("configuration problems surface before learning") {
    const std::string csv = synthetic_csv();
    auto cfg = parse_config(kConfig, "/nonexistent");

    SUBCASE("tier on a dropped column") {
        cfg.drop.push_back("X1");
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv), doctest::Contains("[config]"), ValidationError);
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv), doctest::Contains("dropped column 'X1'"), ValidationError);
    }
    SUBCASE("unknown column") {
        cfg.tiers["ghost"] = 2;
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv), doctest::Contains("[validate]"), ValidationError);
    }
    SUBCASE("column without tier") {
        cfg.tiers.erase("X2");
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv), doctest::Contains("'X2' has no tier"), ValidationError);
    }
    SUBCASE("target outside the highest tier") {
        cfg.targets = {"X2"};
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv), doctest::Contains("target 'X2'"), ValidationError);
    }
    SUBCASE("required edge against the tiers") {
        cfg.required = {{"X3", "X0"}};
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv), doctest::Contains("[constraints]"), ValidationError);
    }
    SUBCASE("ragged csv") {
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv + "1,k,s0\n"), doctest::Contains("[ingest]"), ValidationError);
    }
    SUBCASE("constant target") {
        cfg.tiers["const"] = 3;
        cfg.targets = {"const"};
        CHECK_THROWS_WITH_AS(prepare_data(cfg, csv), doctest::Contains("single observed state"), ValidationError);
    }
    SUBCASE("missing data file") {
        cfg.data = "/nonexistent/data.csv";
        CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("[ingest]"), Error);
    }
}

TEST_CASE("parse_config") {
    const auto cfg = parse_config(R"({
      "data": "d.csv",
      "discretize": [{"column": "a", "kind": "cuts", "cuts": [1, 2]},
                     {"column": "b", "kind": "quantile", "bins": 3},
                     {"column": "c", "kind": "map", "map": {"x": "y"}},
                     {"column": "e", "kind": "rare", "min_count": 4, "label": "misc"}],
      "tiers": {"a": 1, "b": 2},
      "targets": ["b"],
      "forbidden": [["a", "b"]],
      "max_iterations": 50,
      "colors": {"1": "gold"}
    })", "/base");
    CHECK(cfg.data == fs::path("/base/d.csv"));
    REQUIRE(cfg.discretize.size() == 4);
    CHECK(std::get<ExplicitCuts>(cfg.discretize[0].kind).cuts == std::vector<double>{1, 2});
    CHECK(std::get<QuantileBins>(cfg.discretize[1].kind).bins == 3);
    CHECK(std::get<RareMerge>(cfg.discretize[3].kind).merged_label == "misc");
    CHECK(cfg.forbidden.size() == 1);
    CHECK(cfg.ensemble.max_iterations == 50u);
    CHECK(cfg.ensemble.runs == 100);
    CHECK(cfg.ensemble.threshold == 0.9);
    REQUIRE(cfg.colors);
    CHECK(cfg.colors->at(1) == "gold");

    CHECK_THROWS_WITH_AS(parse_config(R"({"data": "d.csv", "tierz": {}})"), doctest::Contains("tierz"),
                         ValidationError);
    CHECK_THROWS_AS(parse_config("{\"data\": "), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"data": 3})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"data": "d", "discretize": [{"column": "a", "kind": "fuzzy"}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"data": "d", "runs": 0, "tiers": {"a": 1}, "targets": ["a"]})").validate(),
                    ValidationError);
}

TEST_CASE("digest_bytes") {
    CHECK(digest_bytes("") == "fnv1a64:cbf29ce484222325");
    CHECK(digest_bytes("a") == "fnv1a64:af63dc4c8601ec8c");
}
