#include <doctest.h>

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "rplan/errors.hpp"
#include "rplan/search.hpp"

using namespace rplan;

namespace {

/* Grid world under one formula and rule set.  Built in place: the formula
   store keeps a reference to the interner, so instances never move. */
struct World {
    ApInterner aps;
    FormulaStore st{aps};
    TransitionSystem ts;
    Formula f = 0;
    EditSystem es;
    std::optional<RelaxedAutomaton> a;
    HeuristicTable table;

    void init(uint32_t rows, uint32_t cols,
              std::initializer_list<std::pair<uint32_t, const char*>> cells,
              std::string_view formula, std::string_view rules = "") {
        std::vector<GridLabel> gl;
        for (const auto& [cell, names] : cells)
            gl.push_back(GridLabel{cell / cols, cell % cols, aps.intern_set(names)});
        ts = make_grid(rows, cols, gl);
        f = parse_formula(st, formula);
        es = build_edit_system(aps, parse_rules(rules), aps.universe());
        a.emplace(build_product(es, compile(st, f)));
        table = heuristic_table(*a);
    }

    std::optional<PlanResult> run(SearchConfig cfg = {}) { return plan(ts, *a, table, cfg); }

    bool check(const PlanResult& r, double lambda = 1.0, std::string* why = nullptr) {
        return check_result(st, f, es, ts, r, lambda, why);
    }
};

} // namespace

TEST_SUITE("search") {

TEST_CASE("shortest path to a single goal label") {
    World w;
    w.init(1, 3, {{2, "a"}}, "F a");
    const auto r = w.run();
    REQUIRE(r.has_value());
    CHECK(r->trajectory == std::vector<uint32_t>{0, 1, 2});
    CHECK(r->cost_total == 2.0);
    CHECK(r->cost_motion == 2.0);
    CHECK(r->cost_penalty == 0.0);
    REQUIRE(r->env_word.size() == 3);
    CHECK(r->env_word[2] == w.aps.intern_set("a"));
    CHECK(r->spec_word == r->env_word); // nothing was edited
    for (const EditOp& op : r->edit_ops)
        CHECK(op.weight == 0.0);
    CHECK(r->metrics.nodes_explored >= 1);
    CHECK(r->metrics.nodes_pushed >= r->metrics.nodes_explored);
    CHECK(w.check(*r));
}

TEST_CASE("the initial state's own label counts") {
    World w;
    w.init(1, 1, {{0, "a"}}, "F a");
    const auto r = w.run();
    REQUIRE(r.has_value());
    CHECK(r->trajectory == std::vector<uint32_t>{0});
    CHECK(r->cost_total == 0.0);
    CHECK(r->env_word == std::vector<Symbol>{w.aps.intern_set("a")});
    CHECK(w.check(*r));
}

TEST_CASE("waiting in place re-reads the label") {
    World w;
    w.init(1, 1, {{0, "a"}}, "a && X a");
    const auto r = w.run();
    REQUIRE(r.has_value());
    CHECK(r->trajectory == std::vector<uint32_t>{0, 0});
    CHECK(r->cost_total == 0.0);
    CHECK(r->env_word.size() == 2);
    CHECK(w.check(*r));
}

TEST_CASE("a task symbol can be dropped before the first label is read") {
    World w;
    w.init(1, 1, {{0, "a"}}, "e && X a", "del e penalty 2\n");
    const auto r = w.run();
    REQUIRE(r.has_value());
    CHECK(r->trajectory == std::vector<uint32_t>{0});
    CHECK(r->cost_motion == 0.0);
    CHECK(r->cost_penalty == 2.0);
    CHECK(r->cost_total == 2.0);
    const Symbol e = Symbol::single(w.aps.require("e"));
    const Symbol a = Symbol::single(w.aps.require("a"));
    CHECK(r->spec_word == std::vector<Symbol>{e, a});
    CHECK(r->env_word == std::vector<Symbol>{a});
    REQUIRE(r->edit_ops.size() == 2);
    CHECK_FALSE(r->edit_ops[0].out.has_value()); // the drop emits nothing
    CHECK(r->edit_ops[0].weight == 2.0);
    CHECK(w.check(*r));
}

TEST_CASE("edit penalties scale with lambda, motion does not") {
    World w;
    w.init(1, 2, {{1, "b"}}, "F a", "sub a -> b penalty 3\n");
    SearchConfig cfg;
    cfg.lambda = 2.0;
    const auto r = w.run(cfg);
    REQUIRE(r.has_value());
    CHECK(r->cost_motion == 1.0);
    CHECK(r->cost_penalty == 6.0); // 2 * 3, stored scaled
    CHECK(r->cost_total == 7.0);
    REQUIRE(r->edit_ops.size() == 2);
    CHECK(r->edit_ops[1].weight == 3.0); // the op itself stays unscaled
    const Symbol a = Symbol::single(w.aps.require("a"));
    const Symbol b = Symbol::single(w.aps.require("b"));
    CHECK(r->spec_word == std::vector<Symbol>{Symbol{}, a});
    CHECK(r->env_word == std::vector<Symbol>{Symbol{}, b});
    CHECK(w.check(*r, 2.0));
}

TEST_CASE("two goals force a routing choice") {
    World w;
    w.init(2, 3, {{2, "a"}, {3, "b"}}, "F a && F b");
    const auto r = w.run();
    REQUIRE(r.has_value());
    CHECK(r->cost_total == 4.0); // b first (1 move), then across to a (3 moves)
    CHECK(w.check(*r));

    SearchConfig zero;
    zero.heuristic = HeuristicKind::Zero;
    const auto rz = w.run(zero);
    REQUIRE(rz.has_value());
    CHECK(rz->cost_total == r->cost_total);
    CHECK(w.check(*rz));
}

TEST_CASE("an aggressive weight keeps results valid, possibly losing optimality") {
    World w;
    w.init(2, 3, {{2, "a"}, {3, "b"}}, "F a && F b");
    SearchConfig cfg;
    cfg.gamma = 5.0;
    const auto r = w.run(cfg);
    REQUIRE(r.has_value());
    CHECK(r->cost_total >= 4.0);
    CHECK(w.check(*r));
}

TEST_CASE("label-seeking heuristics find the same optimum here") {
    World w;
    w.init(1, 4, {{3, "a"}}, "F a");
    for (HeuristicKind k : {HeuristicKind::InfoOnDemand, HeuristicKind::InfoPrecomputed}) {
        SearchConfig cfg;
        cfg.heuristic = k;
        const auto r = w.run(cfg);
        REQUIRE(r.has_value());
        CHECK(r->cost_total == 3.0);
        CHECK(w.check(*r));
    }
}

TEST_CASE("unreachable tasks come back empty") {
    World w;
    w.init(1, 3, {{2, "a"}}, "F b"); // b never appears on the grid
    CHECK_FALSE(w.run().has_value());

    World dead;
    dead.init(1, 3, {{2, "a"}}, "!true"); // unsatisfiable outright
    CHECK_FALSE(dead.run().has_value());
}

TEST_CASE("node cap aborts runaway searches") {
    World w;
    w.init(1, 3, {{2, "a"}}, "F a");
    SearchConfig cfg;
    cfg.node_cap = 0;
    CHECK_THROWS_AS(w.run(cfg), NodeCapError);
}

TEST_CASE("trace records one row per expansion in pop order") {
    World w;
    w.init(1, 3, {{2, "a"}}, "F a");
    std::vector<TraceRow> rows;
    SearchConfig cfg;
    cfg.heuristic = HeuristicKind::Zero;
    cfg.trace = &rows;
    const auto r = w.run(cfg);
    REQUIRE(r.has_value());
    CHECK(rows.size() == r->metrics.nodes_explored);
    REQUIRE_FALSE(rows.empty());
    CHECK(rows.front().g == 0.0);
    CHECK(w.a->accepting(rows.back().q)); // the goal pop is the last row
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].h == 0.0);
        CHECK(rows[i].f == rows[i].g);
        if (i > 0)
            CHECK(rows[i].f >= rows[i - 1].f); // cheapest-first pops
    }
}

TEST_CASE("a verified result resists mutations") {
    World w;
    w.init(1, 3, {{2, "a"}}, "F a");
    const auto r = w.run();
    REQUIRE(r.has_value());
    std::string why;
    REQUIRE(w.check(*r, 1.0, &why));

    PlanResult bad = *r;
    bad.cost_total += 1.0;
    CHECK_FALSE(w.check(bad, 1.0, &why));
    CHECK(why == "total cost is not motion plus penalty");

    bad = *r;
    bad.trajectory = {0, 2};
    CHECK_FALSE(w.check(bad, 1.0, &why));

    bad = *r;
    bad.trajectory[0] = 1;
    CHECK_FALSE(w.check(bad, 1.0, &why));
    CHECK(why == "trajectory does not start at the initial state");

    bad = *r;
    bad.env_word.back() = Symbol{};
    CHECK_FALSE(w.check(bad, 1.0, &why));
    CHECK(why == "environment word does not match the trajectory labels");

    bad = *r;
    bad.spec_word.assign(bad.spec_word.size(), Symbol{});
    CHECK_FALSE(w.check(bad, 1.0, &why));
    CHECK(why == "specification word does not satisfy the formula");

    bad = *r;
    bad.edit_ops.back().weight = 7.0;
    CHECK_FALSE(w.check(bad, 1.0, &why));
    CHECK_FALSE(why.empty());

    bad = *r;
    bad.cost_penalty += 1.0;
    CHECK_FALSE(w.check(bad, 1.0, &why));
    CHECK(why == "penalty total does not match the edit run");
}

TEST_CASE("relaxation trades motion against penalties") {
    // Goal label 'a' is 6 moves away; its stand-in 'b' is adjacent.
    World w;
    w.init(1, 7, {{6, "a"}, {1, "b"}}, "F a", "sub a -> b penalty 2\n");
    const auto r = w.run();
    REQUIRE(r.has_value());
    CHECK(r->cost_total == 3.0); // one move plus the substitution
    CHECK(r->cost_motion == 1.0);
    CHECK(r->cost_penalty == 2.0);
    CHECK(w.check(*r));

    // A steep lambda makes the long walk the better deal.
    SearchConfig strict;
    strict.lambda = 10.0;
    const auto rs = w.run(strict);
    REQUIRE(rs.has_value());
    CHECK(rs->cost_total == 6.0);
    CHECK(rs->cost_penalty == 0.0);
    CHECK(w.check(*rs, 10.0));
}

} // TEST_SUITE
