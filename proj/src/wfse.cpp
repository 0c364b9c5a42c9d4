#include "rplan/wfse.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rplan/errors.hpp"

namespace rplan {

namespace {

void index_transitions(EditSystem& es) {
    es.out.assign(es.num_states, {});
    for (uint32_t t = 0; t < es.transitions.size(); ++t)
        es.out[es.transitions[t].from].push_back(t);
}

// Does this transition turn task symbol 'in' into environment symbol 'out'?
bool matches(const EditTransition& t, const std::optional<Symbol>& in,
             const std::optional<Symbol>& out) {
    switch (t.label.kind) {
    case EditKind::PassThrough:
        return in && out && *in == *out;
    case EditKind::Substitute:
        return in && out && in->contains(t.label.from_ap) &&
               *out == in->without(t.label.from_ap).with(t.label.to_ap);
    case EditKind::Delete:
        if (out || !in)
            return false;
        return t.label.member_delete ? in->contains(t.label.from_ap)
                                     : *in == Symbol::single(t.label.from_ap);
    case EditKind::Concrete:
        return in == t.label.in && out == t.label.out;
    }
    return false;
}

} // namespace

std::vector<PreferenceRule> parse_rules(std::string_view text) {
    std::vector<PreferenceRule> rules;
    std::istringstream lines{std::string(text)};
    std::string line;
    size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        std::istringstream toks(line);
        std::string head;
        if (!(toks >> head) || head[0] == '#')
            continue;
        auto fail = [&](const std::string& why) {
            throw SyntaxError("rule line " + std::to_string(line_no) + ": " + why);
        };
        PreferenceRule r;
        std::string kw, num;
        if (head == "sub") {
            r.kind = PreferenceRule::Kind::Substitute;
            std::string arrow;
            if (!(toks >> r.from >> arrow >> r.to >> kw >> num) || arrow != "->" ||
                kw != "penalty")
                fail("expected 'sub <ap> -> <ap> penalty <number>'");
        } else if (head == "del") {
            r.kind = PreferenceRule::Kind::Delete;
            if (!(toks >> r.from >> kw >> num) || kw != "penalty")
                fail("expected 'del <ap> penalty <number>'");
        } else {
            fail("unknown rule '" + head + "'");
        }
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), r.penalty);
        if (ec != std::errc{} || p != num.data() + num.size())
            fail("bad penalty '" + num + "'");
        if (r.penalty < 0.0)
            throw NegativeWeightError("rule line " + std::to_string(line_no) +
                                      ": negative penalty");
        std::string extra;
        if (toks >> extra)
            fail("trailing input '" + extra + "'");
        rules.push_back(std::move(r));
    }
    return rules;
}

EditSystem build_edit_system(const ApInterner& aps, std::span<const PreferenceRule> rules,
                             Symbol universe) {
    EditSystem es;
    es.num_states = 1;
    es.initial = 0;
    es.accepting = {1};
    es.transitions.push_back(EditTransition{0, 0, EditLabel{}, 0.0}); // pass-through

    auto resolve = [&](const std::string& name) {
        ApId id = aps.require(name);
        if (!universe.contains(id))
            throw UnknownApError("rule proposition '" + name +
                                 "' is outside the declared universe");
        return id;
    };
    for (const PreferenceRule& r : rules) {
        if (r.penalty < 0.0)
            throw NegativeWeightError("negative penalty on rule for '" + r.from + "'");
        EditLabel label;
        label.from_ap = resolve(r.from);
        es.aps = es.aps.with(label.from_ap);
        if (r.kind == PreferenceRule::Kind::Substitute) {
            label.kind = EditKind::Substitute;
            label.to_ap = resolve(r.to);
            if (label.to_ap == label.from_ap)
                throw SyntaxError("substitution rule maps '" + r.from + "' to itself");
            es.aps = es.aps.with(label.to_ap);
        } else {
            label.kind = EditKind::Delete;
            label.member_delete = r.member_delete;
        }
        es.transitions.push_back(EditTransition{0, 0, label, r.penalty});
    }
    index_transitions(es);
    return es;
}

namespace {

std::optional<Symbol> parse_track(ApInterner& aps, const nlohmann::json& v, bool& pass) {
    pass = false;
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "eps")
            return std::nullopt;
        if (s == "pass") {
            pass = true;
            return std::nullopt;
        }
        throw ParseError("edit track must be \"eps\", \"pass\", or a list of propositions");
    }
    Symbol sym;
    for (const auto& name : v)
        sym = sym.with(aps.intern(name.get<std::string>()));
    return sym;
}

} // namespace

EditSystem load_wfse_json(ApInterner& aps, std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    EditSystem es;
    try {
        es.num_states = j.at("states").get<uint32_t>();
        es.initial = j.at("initial").get<uint32_t>();
        if (es.num_states == 0 || es.initial >= es.num_states)
            throw ParseError("edit system needs at least one state and a valid initial");
        es.accepting.assign(es.num_states, 0);
        for (const auto& a : j.at("accepting")) {
            uint32_t id = a.get<uint32_t>();
            if (id >= es.num_states)
                throw ParseError("accepting state " + std::to_string(id) + " out of range");
            es.accepting[id] = 1;
        }
        for (const auto& e : j.at("edits")) {
            EditTransition t;
            t.from = e.at("from").get<uint32_t>();
            t.to = e.at("to").get<uint32_t>();
            if (t.from >= es.num_states || t.to >= es.num_states)
                throw ParseError("edit endpoint out of range");
            t.weight = e.at("w").get<double>();
            if (t.weight < 0.0)
                throw NegativeWeightError("negative edit weight in edit system file");
            bool in_pass = false, out_pass = false;
            std::optional<Symbol> in_sym = parse_track(aps, e.at("in"), in_pass);
            std::optional<Symbol> out_sym = parse_track(aps, e.at("out"), out_pass);
            if (in_pass != out_pass)
                throw ParseError("\"pass\" must appear on both tracks of an edit");
            if (in_pass) {
                t.label.kind = EditKind::PassThrough;
            } else {
                if (!in_sym && !out_sym)
                    throw ParseError("an edit may not be eps on both tracks");
                t.label.kind = EditKind::Concrete;
                t.label.in = in_sym;
                t.label.out = out_sym;
                if (in_sym)
                    es.aps = es.aps.unite(*in_sym);
                if (out_sym)
                    es.aps = es.aps.unite(*out_sym);
            }
            es.transitions.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad edit system JSON shape: ") + e.what());
    }
    bool has_pass_loop = false;
    for (const EditTransition& t : es.transitions)
        has_pass_loop |= t.label.kind == EditKind::PassThrough && t.from == es.initial &&
                         t.to == es.initial && t.weight == 0.0;
    if (!has_pass_loop)
        throw ParseError("edit system must keep unedited words acceptable: the initial "
                         "state needs a zero-weight in=\"pass\"/out=\"pass\" self-loop");
    index_transitions(es);
    return es;
}

EditSystem load_wfse_json(ApInterner& aps, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open edit system file: " + path);
    return load_wfse_json(aps, in);
}

std::pair<std::vector<Symbol>, double> apply_edits(const EditSystem& es,
                                                   std::span<const Symbol> spec_word,
                                                   std::span<const EditOp> ops) {
    // The input track must spell exactly the specification word.
    size_t pos = 0;
    for (const EditOp& op : ops) {
        if (!op.in && !op.out)
            throw InvalidEditRunError("edit op is eps on both tracks");
        if (op.in) {
            if (pos >= spec_word.size() || spec_word[pos] != *op.in)
                throw InvalidEditRunError("edit input track diverges from the specification word at "
                                          "position " + std::to_string(pos));
            ++pos;
        }
    }
    if (pos != spec_word.size())
        throw InvalidEditRunError("edit ops consume " + std::to_string(pos) + " of " +
                                  std::to_string(spec_word.size()) + " task symbols");

    // Replay against the transducer (set-of-states simulation).
    std::vector<char> cur(es.num_states, 0), nxt;
    cur[es.initial] = 1;
    for (size_t k = 0; k < ops.size(); ++k) {
        nxt.assign(es.num_states, 0);
        bool any = false;
        for (uint32_t z = 0; z < es.num_states; ++z) {
            if (!cur[z])
                continue;
            for (uint32_t tid : es.out[z]) {
                const EditTransition& t = es.transitions[tid];
                if (t.weight == ops[k].weight && matches(t, ops[k].in, ops[k].out)) {
                    nxt[t.to] = 1;
                    any = true;
                }
            }
        }
        if (!any)
            throw InvalidEditRunError("edit op " + std::to_string(k) +
                                      " matches no transducer transition");
        cur.swap(nxt);
    }
    bool accepted = false;
    for (uint32_t z = 0; z < es.num_states; ++z)
        accepted |= cur[z] && es.accepting[z];
    if (!accepted)
        throw InvalidEditRunError("edit run does not end in an accepting state");

    std::vector<Symbol> env;
    double total = 0.0;
    for (const EditOp& op : ops) {
        if (op.out)
            env.push_back(*op.out);
        total += op.weight;
    }
    return {std::move(env), total};
}

} // namespace rplan
