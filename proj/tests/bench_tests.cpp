#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rplan/bench.hpp"
#include "rplan/errors.hpp"

using namespace rplan;

namespace {

Scenario two_goal_scenario() {
    Scenario sc;
    sc.name = "two-goal";
    sc.rows = sc.cols = 4;
    sc.formula = "F a && F b";
    sc.seed = 7;
    sc.placements = {{"a", 2}, {"b", 2}};
    sc.gamma_grid = {0.0, 3.0};
    sc.heuristics = {HeuristicKind::Zero, HeuristicKind::Proposed};
    return sc;
}

std::string csv_of(std::span<const RunRecord> records, bool timing) {
    std::ostringstream out;
    write_records_csv(records, out, timing);
    return out.str();
}

} // namespace

TEST_SUITE("bench") {

TEST_CASE("heuristic names round-trip") {
    for (HeuristicKind k : {HeuristicKind::Zero, HeuristicKind::Proposed,
                            HeuristicKind::InfoOnDemand, HeuristicKind::InfoPrecomputed})
        CHECK(heuristic_from_name(heuristic_name(k)) == k);
    CHECK_THROWS_AS(heuristic_from_name("astar"), ParseError);
}

TEST_CASE("scenario files parse into every field") {
    std::istringstream in(R"({
      "name": "demo",
      "grid": {"rows": 5, "cols": 6},
      "edge_weight": 2.5,
      "formula": "F a && F b",
      "rules": ["sub a -> b penalty 5"],
      "seed": 11,
      "placements": {"a": 3, "b": 1},
      "labels": [{"row": 0, "col": 1, "aps": "a;b"}],
      "gamma_grid": [0, 15],
      "lambda": 0.5,
      "heuristics": ["zero", "proposed", "info", "info-pre"],
      "dmin": "weighted"
    })");
    const Scenario sc = load_scenario(in);
    CHECK(sc.name == "demo");
    CHECK(sc.rows == 5);
    CHECK(sc.cols == 6);
    CHECK(sc.edge_weight == 2.5);
    CHECK(sc.formula == "F a && F b");
    REQUIRE(sc.rules.size() == 1);
    CHECK(sc.seed == 11);
    REQUIRE(sc.placements.size() == 2);
    CHECK(sc.placements[0].first == "a");
    CHECK(sc.placements[0].second == 3);
    REQUIRE(sc.fixed_labels.size() == 1);
    CHECK(sc.fixed_labels[0].first.first == 0);
    CHECK(sc.fixed_labels[0].first.second == 1);
    CHECK(sc.fixed_labels[0].second == "a;b");
    CHECK(sc.gamma_grid == std::vector<double>{0.0, 15.0});
    CHECK(sc.lambda == 0.5);
    REQUIRE(sc.heuristics.size() == 4);
    CHECK(sc.dmin == DminMode::Weighted);
}

TEST_CASE("scenario files reject mistakes loudly") {
    auto load = [](const char* text) {
        std::istringstream in(text);
        return load_scenario(in);
    };
    // A typo in a key must not be silently ignored.
    CHECK_THROWS_WITH_AS(load(R"({"name":"x","formula":"F a",
                                  "grid":{"rows":2,"cols":2},"gama_grid":[0]})"),
                         "scenario: unknown key 'gama_grid'", ParseError);
    CHECK_THROWS_AS(load(R"({"formula":"F a","grid":{"rows":2,"cols":2}})"), ParseError);
    CHECK_THROWS_AS(load(R"({"name":"x","formula":"F a"})"), ParseError); // no world
    CHECK_THROWS_AS(load(R"({"name":"x","formula":"F a",
                             "grid":{"rows":2,"cols":2},
                             "graph":{"file":"g.csv"}})"),
                    ParseError); // two worlds
    CHECK_THROWS_AS(load(R"({"name":"x","formula":"F a",
                             "grid":{"rows":2,"cols":2},"gamma_grid":[]})"),
                    ParseError);
    CHECK_THROWS_AS(load(R"({"name":"x","formula":"F a",
                             "grid":{"rows":2,"cols":2},"heuristics":["warp"]})"),
                    ParseError);
    CHECK_THROWS_AS(load(R"({"name":"x","formula":"F a",
                             "grid":{"rows":2,"cols":2},"dmin":"guess"})"),
                    ParseError);
    CHECK_THROWS_AS(load(R"({"name":"x","formula":"F a",
                             "graph":{"file":"g.csv","format":"dot"}})"),
                    ParseError);
    CHECK_THROWS_AS(load("{]"), ParseError);
}

TEST_CASE("random placements are seeded, distinct, and never on the start cell") {
    ApInterner aps;
    const std::vector<std::pair<ApId, uint32_t>> placements = {{aps.intern("a"), 5},
                                                               {aps.intern("b"), 3}};
    const auto one = random_ap_assignment(6, 6, placements, 42);
    const auto two = random_ap_assignment(6, 6, placements, 42);
    REQUIRE(one.size() == two.size());
    for (size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].row == two[i].row);
        CHECK(one[i].col == two[i].col);
        CHECK(one[i].label == two[i].label);
    }

    size_t with_a = 0, with_b = 0;
    for (const GridLabel& gl : one) {
        CHECK_FALSE((gl.row == 0 && gl.col == 0)); // the start cell stays unlabeled
        with_a += gl.label.contains(aps.require("a"));
        with_b += gl.label.contains(aps.require("b"));
    }
    CHECK(with_a == 5); // cells are distinct per proposition
    CHECK(with_b == 3);

    const auto other = random_ap_assignment(6, 6, placements, 43);
    const bool same = one.size() == other.size() &&
                      std::equal(one.begin(), one.end(), other.begin(),
                                 [](const GridLabel& x, const GridLabel& y) {
                                     return x.row == y.row && x.col == y.col &&
                                            x.label == y.label;
                                 });
    CHECK_FALSE(same);

    const std::vector<std::pair<ApId, uint32_t>> greedy = {{aps.require("a"), 4}};
    CHECK_THROWS_AS(random_ap_assignment(2, 2, greedy, 1), DimensionError);
}

TEST_CASE("propositions landing on the same cell merge") {
    ApInterner aps;
    const std::vector<std::pair<ApId, uint32_t>> placements = {{aps.intern("a"), 1},
                                                               {aps.intern("b"), 1}};
    // A 1x2 grid leaves exactly one legal cell, so both must share it.
    const auto labels = random_ap_assignment(1, 2, placements, 9);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0].col == 1);
    CHECK(labels[0].label == aps.universe());
}

TEST_CASE("a scenario runs one record per combination, baseline first computed once") {
    const Scenario sc = two_goal_scenario();
    const auto records = run_scenario(sc);
    REQUIRE(records.size() == 3); // zero once, proposed at two gammas
    CHECK(records[0].heuristic == "zero");
    CHECK(records[1].heuristic == "proposed");
    CHECK(records[1].gamma == 0.0);
    CHECK(records[2].heuristic == "proposed");
    CHECK(records[2].gamma == 3.0);
    for (const RunRecord& r : records) {
        CHECK(r.scenario == "two-goal");
        CHECK(r.states == 16);
        CHECK(r.feasible);
        CHECK(r.nodes_explored > 0);
    }
    CHECK(records[1].cost_total == records[0].cost_total); // exact at gamma 0
    REQUIRE(records[0].delta.has_value());
    CHECK(*records[0].delta == 0.0);
    REQUIRE(records[1].delta.has_value());
    CHECK(*records[1].delta == 0.0);
    REQUIRE(records[2].delta.has_value());
    CHECK(*records[2].delta >= 0.0);
}

TEST_CASE("records do not depend on the worker count") {
    const Scenario sc = two_goal_scenario();
    const auto solo = run_scenario(sc, 1);
    const auto pooled = run_scenario(sc, 3);
    CHECK(csv_of(solo, false) == csv_of(pooled, false));
}

TEST_CASE("two runs render byte-identical tables without timing") {
    const Scenario sc = two_goal_scenario();
    const std::string first = csv_of(run_scenario(sc), false);
    const std::string second = csv_of(run_scenario(sc), false);
    CHECK(first == second);
    CHECK(first.find("runtime") == std::string::npos);

    const std::string timed = csv_of(run_scenario(sc), true);
    CHECK(timed.find("runtime") != std::string::npos);
    CHECK(timed.find("precompute") != std::string::npos);
}

TEST_CASE("infeasible tasks are recorded, not errors") {
    Scenario sc = two_goal_scenario();
    sc.formula = "F c"; // never placed
    const auto records = run_scenario(sc);
    REQUIRE_FALSE(records.empty());
    for (const RunRecord& r : records) {
        CHECK_FALSE(r.feasible);
        CHECK_FALSE(r.delta.has_value());
    }
    // Infeasible rows leave the cost columns empty.
    const std::string csv = csv_of(records, false);
    CHECK(csv.find(",0,,,,") != std::string::npos);
}

TEST_CASE("scaling sweeps stamp the state count into the name") {
    const Scenario sc = two_goal_scenario();
    const std::vector<uint32_t> sizes = {9, 16};
    const auto records = scaling_sweep(sc, sizes);
    REQUIRE(records.size() == 6);
    CHECK(records[0].scenario == "two-goal/n9");
    CHECK(records[0].states == 9);
    CHECK(records[3].scenario == "two-goal/n16");
    CHECK(records[3].states == 16);

    Scenario graph = sc;
    graph.rows = graph.cols = 0;
    graph.graph_file = "missing.csv";
    CHECK_THROWS_AS(scaling_sweep(graph, sizes), ParseError);
}

TEST_CASE("graph-file scenarios load from disk") {
    const char* path = "bench_graph_tmp.csv";
    {
        std::ofstream out(path);
        out << "0,1,1\n1,2,1\nlabels: 2=a\n";
    }
    Scenario sc;
    sc.name = "file-world";
    sc.graph_file = path;
    sc.formula = "F a";
    sc.heuristics = {HeuristicKind::Zero};
    const auto records = run_scenario(sc);
    std::remove(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].states == 3);
    CHECK(records[0].feasible);
    CHECK(records[0].cost_total == 2.0);
}

TEST_CASE("rendered tables stay aligned and complete") {
    const auto records = run_scenario(two_goal_scenario());
    const std::string table = render_records(records);
    CHECK(table.find("scenario") != std::string::npos);
    CHECK(table.find("two-goal") != std::string::npos);
    CHECK(table.find("runtime") != std::string::npos);
    size_t lines = 0;
    for (char c : table)
        lines += c == '\n';
    CHECK(lines == records.size() + 1);
}

} // TEST_SUITE
