#include "rplan/result_io.hpp"

#include <ostream>

#include <json.hpp>

#include "rplan/errors.hpp"

namespace rplan {

namespace {

nlohmann::json symbol_json(Symbol s, const ApInterner& aps) {
    auto arr = nlohmann::json::array();
    for (ApId a : s.aps()) arr.push_back(aps.name(a));
    return arr;
}

nlohmann::json track_json(const std::optional<Symbol>& s, const ApInterner& aps) {
    return s ? symbol_json(*s, aps) : nlohmann::json(nullptr);
}

Symbol symbol_from_json(ApInterner& aps, const nlohmann::json& v) {
    Symbol s{};
    for (const auto& name : v) s = s.with(aps.intern(name.get<std::string>()));
    return s;
}

std::optional<Symbol> track_from_json(ApInterner& aps, const nlohmann::json& v) {
    if (v.is_null()) return std::nullopt;
    return symbol_from_json(aps, v);
}

} // namespace

void write_result_json(const PlanResult& r, const ApInterner& aps, std::ostream& out) {
    nlohmann::json j;
    j["trajectory"] = r.trajectory;
    auto words = [&](const std::vector<Symbol>& w) {
        auto arr = nlohmann::json::array();
        for (Symbol s : w) arr.push_back(symbol_json(s, aps));
        return arr;
    };
    j["env_word"] = words(r.env_word);
    j["spec_word"] = words(r.spec_word);
    auto ops = nlohmann::json::array();
    for (const EditOp& op : r.edit_ops)
        ops.push_back({{"in", track_json(op.in, aps)},
                       {"out", track_json(op.out, aps)},
                       {"w", op.weight}});
    j["edit_ops"] = ops;
    j["cost_total"] = r.cost_total;
    j["cost_motion"] = r.cost_motion;
    j["cost_penalty"] = r.cost_penalty;
    j["metrics"] = {{"nodes_explored", r.metrics.nodes_explored},
                    {"nodes_pushed", r.metrics.nodes_pushed},
                    {"runtime", r.metrics.runtime},
                    {"precompute", r.metrics.precompute_time}};
    out << j.dump(1) << "\n";
}

PlanResult read_result_json(ApInterner& aps, std::istream& in) {
    PlanResult r;
    try {
        nlohmann::json j;
        in >> j;
        r.trajectory = j.at("trajectory").get<std::vector<uint32_t>>();
        for (const auto& v : j.at("env_word")) r.env_word.push_back(symbol_from_json(aps, v));
        for (const auto& v : j.at("spec_word")) r.spec_word.push_back(symbol_from_json(aps, v));
        for (const auto& v : j.at("edit_ops"))
            r.edit_ops.push_back(EditOp{track_from_json(aps, v.at("in")),
                                        track_from_json(aps, v.at("out")),
                                        v.at("w").get<double>()});
        r.cost_total = j.at("cost_total").get<double>();
        r.cost_motion = j.at("cost_motion").get<double>();
        r.cost_penalty = j.at("cost_penalty").get<double>();
        if (j.contains("metrics")) {
            const auto& m = j["metrics"];
            r.metrics.nodes_explored = m.value("nodes_explored", size_t{0});
            r.metrics.nodes_pushed = m.value("nodes_pushed", size_t{0});
            r.metrics.runtime = m.value("runtime", 0.0);
            r.metrics.precompute_time = m.value("precompute", 0.0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("plan result: ") + e.what());
    }
    return r;
}

} // namespace rplan
