#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cgforge/csv.hpp"
#include "cgforge/dataset.hpp"
#include "cgforge/discretize.hpp"
#include "cgforge/error.hpp"
#include "cgforge/rng.hpp"

using namespace cgforge;

namespace {

Dataset from_csv(const std::string& text) {
    std::istringstream in(text);
    return load_csv(in);
}

std::vector<std::string> decode(const Dataset& d, std::size_t var) {
    std::vector<std::string> out;
    for (std::size_t r = 0; r < d.row_count(); ++r) out.push_back(d.label(var, r));
    return out;
}

std::vector<std::string> numbers(int lo, int hi) {
    std::vector<std::string> out;
    for (int i = lo; i <= hi; ++i) out.push_back(std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("load_csv infers sorted states") {
    auto d = from_csv("a,b\n0,x\n1,x\n");
    CHECK(d.row_count() == 2);
    REQUIRE(d.variable_count() == 2);
    CHECK(d.variable(0).arity() == 2);
    CHECK(d.variable(1).arity() == 1);
    CHECK(d.variable(0).states == std::vector<std::string>{"0", "1"});
    CHECK(d.column(0)[1] == 1);
}

TEST_CASE("load_csv with empty data section keeps the header") {
    auto d = from_csv("a,b\n");
    CHECK(d.row_count() == 0);
    CHECK(d.variable_count() == 2);
    CHECK(d.variable(1).name == "b");
}

TEST_CASE("load_csv rejects ragged rows citing the row") {
    try {
        from_csv("a,b\n1,2,3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
    CHECK_THROWS_AS(from_csv("a,b\n1,2\n3\n"), ParseError);
}

TEST_CASE("load_csv rejects missing values") {
    CHECK_THROWS_AS(from_csv("a,b\n1,\n"), ParseError);
}

TEST_CASE("load_csv handles RFC 4180 quoting and CRLF") {
    auto d = from_csv("name,\"note\"\r\n\"Smith, J\",\"said \"\"hi\"\"\"\r\nLee,\"two\nlines\"\r\n");
    REQUIRE(d.row_count() == 2);
    CHECK(d.label(0, 0) == "Smith, J");
    CHECK(d.label(1, 0) == "said \"hi\"");
    CHECK(d.label(1, 1) == "two\nlines");
    CHECK_THROWS_AS(from_csv("a\n\"open\n"), ParseError);
    CHECK_THROWS_AS(from_csv("a,a\n1,2\n"), ParseError);
}

TEST_CASE("load_csv with a schema encodes against it") {
    std::vector<Variable> schema{{"a", {"lo", "hi"}, 1}, {"b", {"x", "y", "z"}, 2}};
    std::istringstream in("a,b\nhi,z\nlo,x\n");
    auto d = load_csv(in, std::span<const Variable>(schema));
    CHECK(d.variable(1).arity() == 3);
    CHECK(d.variable(1).tier == 2);
    CHECK(d.column(0)[0] == 1);
    CHECK(d.column(1)[0] == 2);

    std::istringstream bad("a,b\nhi,w\n");
    try {
        load_csv(bad, std::span<const Variable>(schema));
        FAIL("expected an encoding error");
    } catch (const EncodingError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("'w'") != std::string::npos);
        CHECK(msg.find("'b'") != std::string::npos);
    }
}

TEST_CASE("encoding round-trips through the state labels") {
    Rng rng(7);
    std::string text = "u,v\n";
    std::vector<std::string> u, v;
    for (int i = 0; i < 200; ++i) {
        u.push_back("u" + std::to_string(rng.below(5)));
        v.push_back(std::to_string(rng.below(12)));
        text += u.back() + "," + v.back() + "\n";
    }
    auto d = from_csv(text);
    CHECK(decode(d, 0) == u);
    CHECK(decode(d, 1) == v);
}

TEST_CASE("drop_columns") {
    auto d = from_csv("user,music_id,click\n1,a,0\n2,b,1\n3,c,1\n");
    auto dropped = drop_columns(d, {"music_id"});
    CHECK(dropped.variable_count() == 2);
    CHECK(dropped.row_count() == 3);
    CHECK(dropped.variable(0).name == "user");
    CHECK(dropped.variable(1).name == "click");

    auto same = drop_columns(d, {});
    CHECK(same.variables() == d.variables());

    try {
        drop_columns(d, {"ghost"});
        FAIL("expected an unknown-column error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
}

TEST_CASE("successive drops equal one combined drop") {
    auto d = from_csv("a,b,c,d,e\n1,2,3,4,5\n6,7,8,9,0\n");
    auto twice = drop_columns(drop_columns(d, {"b", "e"}), {"a"});
    auto once = drop_columns(d, {"a", "b", "e"});
    CHECK(twice.variables() == once.variables());
    for (std::size_t v = 0; v < once.variable_count(); ++v) {
        CHECK(std::ranges::equal(twice.column(v), once.column(v)));
    }
}

TEST_CASE("explicit cuts use half-open bins") {
    std::vector<std::string> raw{"5", "10", "15"};
    auto col = discretize(raw, {"x", ExplicitCuts{{10}}});
    CHECK(col.variable.states == std::vector<std::string>{"<10", "≥10"});
    CHECK(col.codes == std::vector<State>{0, 1, 1});

    auto three = discretize(std::vector<std::string>{"-1", "0", "2.5", "3", "99"}, {"x", ExplicitCuts{{0, 3}}});
    CHECK(three.variable.arity() == 3);
    CHECK(three.codes == std::vector<State>{0, 1, 1, 2, 2});
}

TEST_CASE("quantile bins on 1..100 give quartiles of 25") {
    auto col = discretize(numbers(1, 100), {"x", QuantileBins{4}});
    REQUIRE(col.variable.arity() == 4);
    std::vector<int> counts(4, 0);
    for (State s : col.codes) ++counts[s];
    CHECK(counts == std::vector<int>{25, 25, 25, 25});
    CHECK(col.codes[24] == 0);  // 25 ties into the lower bin
    CHECK(col.codes[25] == 1);
}

TEST_CASE("quantile bins are monotone in the raw value") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> raw;
        std::vector<double> values;
        const std::size_t n = 1 + rng.below(300);
        for (std::size_t i = 0; i < n; ++i) {
            double v = static_cast<double>(rng.below(40)) / 4.0;  // plenty of ties
            values.push_back(v);
            raw.push_back(std::to_string(v));
        }
        auto col = discretize(raw, {"x", QuantileBins{static_cast<int>(2 + rng.below(6))}});
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (values[i] <= values[j]) REQUIRE(col.codes[i] <= col.codes[j]);
            }
        }
    }
}

TEST_CASE("rare-merge pools infrequent categories") {
    std::vector<std::string> raw{"a", "a", "b", "a", "c", "a", "b", "a"};
    auto col = discretize(raw, {"x", RareMerge{3, "other"}});
    CHECK(col.variable.states == std::vector<std::string>{"a", "other"});
    CHECK(std::count(col.codes.begin(), col.codes.end(), 0u) == 5);
    CHECK(std::count(col.codes.begin(), col.codes.end(), 1u) == 3);
}

TEST_CASE("value-map relabels and passes unmapped values through") {
    std::vector<std::string> raw{"iOS", "android", "web"};
    auto col = discretize(raw, {"os", ValueMap{{{"iOS", "mobile"}, {"android", "mobile"}}}});
    CHECK(col.variable.states == std::vector<std::string>{"mobile", "web"});
    CHECK(col.codes == std::vector<State>{0, 0, 1});
}

TEST_CASE("numeric rules reject non-numeric values") {
    try {
        discretize(std::vector<std::string>{"1", "abc"}, {"x", QuantileBins{2}});
        FAIL("expected an encoding error");
    } catch (const EncodingError& e) {
        CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }
    CHECK_THROWS_AS(discretize(std::vector<std::string>{"1e"}, {"x", ExplicitCuts{{1}}}), EncodingError);
}

TEST_CASE("discretization rules validate their parameters") {
    CHECK_THROWS_AS(discretize(std::vector<std::string>{"1"}, {"x", ExplicitCuts{{2, 1}}}), ValidationError);
    CHECK_THROWS_AS(discretize(std::vector<std::string>{"1"}, {"x", ExplicitCuts{{1, 1}}}), ValidationError);
    CHECK_THROWS_AS(discretize(std::vector<std::string>{"1"}, {"x", QuantileBins{1}}), ValidationError);
    CHECK_THROWS_AS(discretize(std::vector<std::string>{"1"}, {"x", RareMerge{0, "o"}}), ValidationError);
}

TEST_CASE("encode applies rules per column") {
    std::istringstream in("age,city\n12,rome\n40,rome\n70,oslo\n");
    auto raw = read_csv(in);
    std::vector<DiscretizationRule> rules{{"age", ExplicitCuts{{18, 65}}}};
    auto d = encode(raw, rules);
    CHECK(d.variable(0).arity() == 3);
    CHECK(d.column(0)[2] == 2);
    CHECK(d.variable(1).states == std::vector<std::string>{"oslo", "rome"});

    std::vector<DiscretizationRule> bad{{"ghost", QuantileBins{2}}};
    CHECK_THROWS_AS(encode(raw, bad), ValidationError);
}

TEST_CASE("bootstrap_sample is deterministic and draws existing rows") {
    Rng rng(11);
    std::vector<std::vector<State>> cols(2, std::vector<State>(500));
    for (std::size_t i = 0; i < 500; ++i) {
        cols[0][i] = static_cast<State>(i % 7);
        cols[1][i] = static_cast<State>(rng.below(3));
    }
    Dataset d({{"a", {"0", "1", "2", "3", "4", "5", "6"}, 1}, {"b", {"x", "y", "z"}, 2}}, cols, 500);

    auto s1 = bootstrap_sample(d, 42);
    auto s2 = bootstrap_sample(d, 42);
    auto s3 = bootstrap_sample(d, 43);
    CHECK(std::ranges::equal(s1.column(0), s2.column(0)));
    CHECK(std::ranges::equal(s1.column(1), s2.column(1)));
    CHECK_FALSE(std::ranges::equal(s1.column(1), s3.column(1)));

    std::set<std::pair<State, State>> rows;
    for (std::size_t i = 0; i < 500; ++i) rows.insert({d.column(0)[i], d.column(1)[i]});
    for (std::size_t i = 0; i < 500; ++i) CHECK(rows.contains({s1.column(0)[i], s1.column(1)[i]}));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = bootstrap_sample(d, seed);
        CHECK(s.row_count() == d.row_count());
        CHECK(s.variables() == d.variables());
    }
}

TEST_CASE("bootstrap_sample of an empty dataset fails") {
    Dataset d({{"a", {"0", "1"}, 1}}, {{}}, 0);
    CHECK_THROWS_AS(bootstrap_sample(d, 1), EmptyDatasetError);
}

TEST_CASE("bootstrap resamples cover about 1 - 1/e of the rows") {
    // Oracle: E[distinct fraction] = 1 - (1 - 1/N)^N -> 1 - 1/e = 0.632...
    constexpr std::size_t n = 10000;
    std::vector<State> ids(n);
    Variable id{"id", {}, 1};
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = static_cast<State>(i);
        id.states.push_back(std::to_string(i));
    }
    Dataset d({id}, {ids}, n);
    double total = 0.0;
    std::vector<char> seen(n);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto s = bootstrap_sample(d, seed);
        std::fill(seen.begin(), seen.end(), 0);
        std::size_t distinct = 0;
        for (State x : s.column(0)) {
            if (!seen[x]) {
                seen[x] = 1;
                ++distinct;
            }
        }
        total += static_cast<double>(distinct) / n;
    }
    CHECK(std::abs(total / 1000.0 - 0.63212) < 0.02);
}

TEST_CASE("Dataset constructor validates its invariants") {
    CHECK_THROWS_AS(Dataset({{"a", {"0"}, 1}}, {{0, 1}}, 2), ValidationError);
    CHECK_THROWS_AS(Dataset({{"a", {"0", "1"}, 1}}, {{0}}, 2), ValidationError);
    CHECK_THROWS_AS(Dataset({{"a", {"0", "0"}, 1}}, {{0}}, 1), ValidationError);
    CHECK_THROWS_AS(Dataset({{"a", {"0"}, 0}}, {{0}}, 1), ValidationError);
    CHECK_THROWS_AS(Dataset({{"a", {"0"}, 1}, {"a", {"0"}, 1}}, {{0}, {0}}, 1), ValidationError);
}
