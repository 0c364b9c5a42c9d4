#include <doctest.h>

#include <sstream>

#include "rplan/errors.hpp"
#include "rplan/wfse.hpp"

using namespace rplan;

namespace {

// Grocery-run setup: two wishes, two storefront stand-ins, one skip option.
struct Shop {
    ApInterner aps;
    Symbol bread = aps.intern_set("bread_s");
    Symbol ice = aps.intern_set("ice_cream_s");
    Symbol bakery = aps.intern_set("bread_bakery");
    Symbol shop = aps.intern_set("ice_cream_shop");
    EditSystem es = build_edit_system(aps,
                                      parse_rules("sub bread_s -> bread_bakery penalty 5\n"
                                                  "sub ice_cream_s -> ice_cream_shop penalty 7\n"
                                                  "del ice_cream_s penalty 12\n"),
                                      aps.universe());
    std::vector<Symbol> spec{bread, ice};
};

EditOp op(std::optional<Symbol> in, std::optional<Symbol> out, double w) {
    return EditOp{in, out, w};
}

} // namespace

TEST_SUITE("wfse") {

TEST_CASE("rule DSL parses") {
    const auto rules = parse_rules("# preferences\n"
                                   "\n"
                                   "sub a -> b penalty 5\n"
                                   "del e penalty 2.5\n");
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].kind == PreferenceRule::Kind::Substitute);
    CHECK(rules[0].from == "a");
    CHECK(rules[0].to == "b");
    CHECK(rules[0].penalty == 5.0);
    CHECK(rules[1].kind == PreferenceRule::Kind::Delete);
    CHECK(rules[1].from == "e");
    CHECK(rules[1].to.empty());
    CHECK(rules[1].penalty == 2.5);
    CHECK_FALSE(rules[1].member_delete);
    CHECK(parse_rules("").empty());
}

TEST_CASE("rule DSL rejects malformed lines with their line number") {
    CHECK_THROWS_WITH_AS(parse_rules("sub a b penalty 1\n"),
                         "rule line 1: expected 'sub <ap> -> <ap> penalty <number>'",
                         SyntaxError);
    CHECK_THROWS_WITH_AS(parse_rules("# fine\nswap a -> b penalty 1\n"),
                         "rule line 2: unknown rule 'swap'", SyntaxError);
    CHECK_THROWS_AS(parse_rules("del e penalty lots\n"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("del e penalty 2 extra\n"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("sub a -> b penalty 1 junk\n"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("del e penalty -3\n"), NegativeWeightError);
}

TEST_CASE("building the single-state transducer") {
    ApInterner aps;
    aps.intern_set("a;b;e");
    const auto rules = parse_rules("sub a -> b penalty 5\ndel e penalty 2\n");
    const EditSystem es = build_edit_system(aps, rules, aps.universe());
    CHECK(es.num_states == 1);
    CHECK(es.accepting == std::vector<char>{1});
    REQUIRE(es.transitions.size() == 3); // pass-through + two rules
    CHECK(es.transitions[0].label.kind == EditKind::PassThrough);
    CHECK(es.transitions[0].weight == 0.0);
    CHECK(es.transitions[1].label.kind == EditKind::Substitute);
    CHECK(es.transitions[2].label.kind == EditKind::Delete);
    CHECK(es.aps == aps.universe());
    CHECK(es.out[0].size() == 3);
}

TEST_CASE("rule propositions must exist and sit inside the universe") {
    ApInterner aps;
    aps.intern_set("a;b");
    const auto rules = parse_rules("sub a -> zz penalty 5\n");
    CHECK_THROWS_AS(build_edit_system(aps, rules, aps.universe()), UnknownApError);

    const auto ok = parse_rules("sub a -> b penalty 5\n");
    const Symbol narrow = Symbol::single(aps.require("a"));
    CHECK_THROWS_AS(build_edit_system(aps, ok, narrow), UnknownApError);

    PreferenceRule neg;
    neg.kind = PreferenceRule::Kind::Delete;
    neg.from = "a";
    neg.penalty = -1.0;
    CHECK_THROWS_AS(build_edit_system(aps, std::span(&neg, 1), aps.universe()),
                    NegativeWeightError);
}

TEST_CASE("a substitution may not map a proposition to itself") {
    ApInterner aps;
    aps.intern_set("a");
    const auto rules = parse_rules("sub a -> a penalty 5\n");
    CHECK_THROWS_AS(build_edit_system(aps, rules, aps.universe()), SyntaxError);
}

TEST_CASE("replaying edits on the shopping example") {
    Shop s;
    SUBCASE("both stops substituted") {
        const std::vector<EditOp> ops = {op(s.bread, s.bakery, 5), op(s.ice, s.shop, 7)};
        const auto [env, w] = apply_edits(s.es, s.spec, ops);
        CHECK(env == std::vector<Symbol>{s.bakery, s.shop});
        CHECK(w == 12.0);
    }
    SUBCASE("second stop dropped") {
        const std::vector<EditOp> ops = {op(s.bread, s.bakery, 5), op(s.ice, std::nullopt, 12)};
        const auto [env, w] = apply_edits(s.es, s.spec, ops);
        CHECK(env == std::vector<Symbol>{s.bakery});
        CHECK(w == 17.0);
    }
    SUBCASE("unedited word passes through free") {
        const std::vector<EditOp> ops = {op(s.bread, s.bread, 0), op(s.ice, s.ice, 0)};
        const auto [env, w] = apply_edits(s.es, s.spec, ops);
        CHECK(env == s.spec);
        CHECK(w == 0.0);
    }
}

TEST_CASE("edit runs that are not witnessed are rejected") {
    Shop s;
    // Input track diverges from the specification word.
    CHECK_THROWS_AS(apply_edits(s.es, s.spec, std::vector<EditOp>{op(s.ice, s.ice, 0)}),
                    InvalidEditRunError);
    // Input track too short.
    CHECK_THROWS_AS(apply_edits(s.es, s.spec, std::vector<EditOp>{op(s.bread, s.bread, 0)}),
                    InvalidEditRunError);
    // Wrong penalty on an otherwise fine substitution.
    CHECK_THROWS_AS(apply_edits(s.es, s.spec,
                                std::vector<EditOp>{op(s.bread, s.bakery, 6),
                                                    op(s.ice, s.ice, 0)}),
                    InvalidEditRunError);
    // Substituting a proposition no rule covers.
    CHECK_THROWS_AS(apply_edits(s.es, s.spec,
                                std::vector<EditOp>{op(s.bread, s.shop, 5),
                                                    op(s.ice, s.ice, 0)}),
                    InvalidEditRunError);
    // An op that is eps on both tracks.
    CHECK_THROWS_AS(apply_edits(s.es, s.spec,
                                std::vector<EditOp>{op(std::nullopt, std::nullopt, 0),
                                                    op(s.bread, s.bread, 0),
                                                    op(s.ice, s.ice, 0)}),
                    InvalidEditRunError);
}

TEST_CASE("exact versus member deletion") {
    ApInterner aps;
    const Symbol ab = aps.intern_set("a;b");
    PreferenceRule r;
    r.kind = PreferenceRule::Kind::Delete;
    r.from = "a";
    r.penalty = 2.0;

    const std::vector<Symbol> spec = {ab};
    const std::vector<EditOp> drop = {op(ab, std::nullopt, 2)};

    const EditSystem exact = build_edit_system(aps, std::span(&r, 1), aps.universe());
    CHECK_THROWS_AS(apply_edits(exact, spec, drop), InvalidEditRunError);

    r.member_delete = true;
    const EditSystem member = build_edit_system(aps, std::span(&r, 1), aps.universe());
    const auto [env, w] = apply_edits(member, spec, drop);
    CHECK(env.empty());
    CHECK(w == 2.0);
}

TEST_CASE("explicit transducer files") {
    ApInterner aps;
    std::istringstream in(R"({
      "states": 1, "initial": 0, "accepting": [0],
      "edits": [
        {"from": 0, "to": 0, "in": "pass", "out": "pass", "w": 0},
        {"from": 0, "to": 0, "in": "eps", "out": ["x"], "w": 3},
        {"from": 0, "to": 0, "in": ["y"], "out": "eps", "w": 4}
      ]
    })");
    const EditSystem es = load_wfse_json(aps, in);
    CHECK(es.num_states == 1);
    CHECK(es.transitions.size() == 3);
    CHECK(es.aps == aps.universe());

    // Inserting an unrequested symbol, then dropping the requested one.
    const Symbol x = Symbol::single(aps.require("x"));
    const Symbol y = Symbol::single(aps.require("y"));
    const std::vector<Symbol> spec = {y};
    const std::vector<EditOp> ops = {op(std::nullopt, x, 3), op(y, std::nullopt, 4)};
    const auto [env, w] = apply_edits(es, spec, ops);
    CHECK(env == std::vector<Symbol>{x});
    CHECK(w == 7.0);
}

TEST_CASE("runs must end in an accepting state") {
    ApInterner aps;
    std::istringstream in(R"({
      "states": 2, "initial": 0, "accepting": [1],
      "edits": [
        {"from": 0, "to": 0, "in": "pass", "out": "pass", "w": 0},
        {"from": 0, "to": 1, "in": ["a"], "out": ["b"], "w": 1},
        {"from": 1, "to": 1, "in": "pass", "out": "pass", "w": 0}
      ]
    })");
    const EditSystem es = load_wfse_json(aps, in);
    const Symbol a = Symbol::single(aps.require("a"));
    const Symbol b = Symbol::single(aps.require("b"));
    const std::vector<Symbol> spec = {a};
    CHECK_THROWS_AS(apply_edits(es, spec, std::vector<EditOp>{op(a, a, 0)}),
                    InvalidEditRunError);
    const auto [env, w] = apply_edits(es, spec, std::vector<EditOp>{op(a, b, 1)});
    CHECK(env == std::vector<Symbol>{b});
    CHECK(w == 1.0);
}

TEST_CASE("transducer file errors") {
    ApInterner aps;
    auto load = [&](const char* text) {
        std::istringstream in(text);
        return load_wfse_json(aps, in);
    };
    CHECK_THROWS_AS(load("{]"), ParseError);
    CHECK_THROWS_AS(load(R"({"states":1,"initial":0,"accepting":[0],"edits":[]})"),
                    ParseError); // no pass-through loop
    CHECK_THROWS_AS(load(R"({"states":0,"initial":0,"accepting":[],"edits":[]})"), ParseError);
    CHECK_THROWS_AS(load(R"({"states":1,"initial":0,"accepting":[4],"edits":[]})"), ParseError);
    CHECK_THROWS_AS(
        load(R"({"states":1,"initial":0,"accepting":[0],"edits":[
               {"from":0,"to":0,"in":"pass","out":"pass","w":0},
               {"from":0,"to":0,"in":"eps","out":"eps","w":1}]})"),
        ParseError); // eps on both tracks
    CHECK_THROWS_AS(
        load(R"({"states":1,"initial":0,"accepting":[0],"edits":[
               {"from":0,"to":0,"in":"pass","out":["a"],"w":0}]})"),
        ParseError); // pass must pair with pass
    CHECK_THROWS_AS(
        load(R"({"states":1,"initial":0,"accepting":[0],"edits":[
               {"from":0,"to":0,"in":"pass","out":"pass","w":0},
               {"from":0,"to":0,"in":["a"],"out":"eps","w":-2}]})"),
        NegativeWeightError);
    CHECK_THROWS_AS(
        load(R"({"states":1,"initial":0,"accepting":[0],"edits":[
               {"from":0,"to":0,"in":"pass","out":"pass","w":0},
               {"from":0,"to":2,"in":["a"],"out":"eps","w":1}]})"),
        ParseError); // endpoint out of range
}

} // TEST_SUITE
