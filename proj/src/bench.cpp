#include "rplan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rplan/dfa.hpp"
#include "rplan/errors.hpp"
#include "rplan/formula.hpp"
#include "rplan/product.hpp"

namespace rplan {

namespace {

std::string fmt_num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// Unbiased draw from [0, n); plain modulo would skew small remainders.
uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

} // namespace

const char* heuristic_name(HeuristicKind k) {
    switch (k) {
    case HeuristicKind::Proposed: return "proposed";
    case HeuristicKind::Zero: return "zero";
    case HeuristicKind::InfoOnDemand: return "info";
    case HeuristicKind::InfoPrecomputed: return "info-pre";
    }
    return "?";
}

HeuristicKind heuristic_from_name(const std::string& name) {
    if (name == "proposed") return HeuristicKind::Proposed;
    if (name == "zero") return HeuristicKind::Zero;
    if (name == "info") return HeuristicKind::InfoOnDemand;
    if (name == "info-pre") return HeuristicKind::InfoPrecomputed;
    throw ParseError("unknown heuristic '" + name +
                     "' (expected zero, proposed, info or info-pre)");
}

Scenario load_scenario(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    Scenario sc;
    try {
        static const std::vector<std::string> known = {
            "name",       "grid",   "graph",      "edge_weight", "formula", "rules",
            "seed",       "placements", "labels", "gamma_grid",  "lambda",  "heuristics",
            "dmin"};
        for (const auto& item : j.items())
            if (std::find(known.begin(), known.end(), item.key()) == known.end())
                throw ParseError("scenario: unknown key '" + item.key() + "'");
        sc.name = j.at("name").get<std::string>();
        sc.formula = j.at("formula").get<std::string>();
        if (j.contains("grid")) {
            sc.rows = j["grid"].at("rows").get<uint32_t>();
            sc.cols = j["grid"].at("cols").get<uint32_t>();
        }
        if (j.contains("edge_weight")) sc.edge_weight = j["edge_weight"].get<double>();
        if (j.contains("graph")) {
            sc.graph_file = j["graph"].at("file").get<std::string>();
            const std::string fmt = j["graph"].value("format", "csv");
            if (fmt == "csv")
                sc.graph_format = GraphFormat::EdgeListCsv;
            else if (fmt == "json")
                sc.graph_format = GraphFormat::Json;
            else
                throw ParseError("scenario: unknown graph format '" + fmt + "'");
        }
        if (j.contains("rules"))
            for (const auto& r : j["rules"]) sc.rules.push_back(r.get<std::string>());
        sc.seed = j.value("seed", uint64_t{0});
        if (j.contains("placements"))
            for (const auto& item : j["placements"].items())
                sc.placements.emplace_back(item.key(), item.value().get<uint32_t>());
        if (j.contains("labels"))
            for (const auto& l : j["labels"])
                sc.fixed_labels.push_back({{l.at("row").get<uint32_t>(),
                                            l.at("col").get<uint32_t>()},
                                           l.at("aps").get<std::string>()});
        if (j.contains("gamma_grid")) {
            sc.gamma_grid.clear();
            for (const auto& g : j["gamma_grid"]) sc.gamma_grid.push_back(g.get<double>());
        }
        sc.lambda = j.value("lambda", 1.0);
        if (j.contains("heuristics")) {
            sc.heuristics.clear();
            for (const auto& h : j["heuristics"])
                sc.heuristics.push_back(heuristic_from_name(h.get<std::string>()));
        }
        if (j.contains("dmin")) {
            const std::string m = j["dmin"].get<std::string>();
            if (m == "hops")
                sc.dmin = DminMode::Hops;
            else if (m == "weighted")
                sc.dmin = DminMode::Weighted;
            else
                throw ParseError("scenario: unknown dmin mode '" + m + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (sc.name.empty()) throw ParseError("scenario: empty name");
    if ((sc.rows > 0) == !sc.graph_file.empty())
        throw ParseError("scenario: need exactly one of 'grid' or 'graph'");
    if (sc.gamma_grid.empty()) throw ParseError("scenario: empty gamma_grid");
    if (sc.heuristics.empty()) throw ParseError("scenario: empty heuristics");
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    return load_scenario(in);
}

std::vector<GridLabel> random_ap_assignment(
    uint32_t rows, uint32_t cols, std::span<const std::pair<ApId, uint32_t>> placements,
    uint64_t seed) {
    const uint64_t cells = uint64_t{rows} * cols;
    std::mt19937_64 rng(seed);
    std::map<uint32_t, Symbol> merged;
    for (const auto& [ap, count] : placements) {
        if (uint64_t{count} + 1 > cells)
            throw DimensionError("cannot place " + std::to_string(count) + " cells on a " +
                                 std::to_string(rows) + "x" + std::to_string(cols) + " grid");
        std::vector<uint32_t> pool;
        pool.reserve(cells - 1);
        for (uint64_t c = 1; c < cells; ++c) pool.push_back(static_cast<uint32_t>(c));
        for (uint32_t i = 0; i < count; ++i) {
            const uint64_t k = i + bounded(rng, pool.size() - i);
            std::swap(pool[i], pool[k]);
            merged[pool[i]] = merged[pool[i]].with(ap);
        }
    }
    std::vector<GridLabel> out;
    out.reserve(merged.size());
    for (const auto& [cell, label] : merged)
        out.push_back(GridLabel{cell / cols, cell % cols, label});
    return out;
}

namespace {

struct Instance {
    ApInterner aps;
    std::optional<TransitionSystem> ts;
    std::optional<RelaxedAutomaton> automaton;
    HeuristicTable table;
    double precompute = 0.0;
};

Instance build_instance(const Scenario& sc) {
    Instance inst;
    FormulaStore store(inst.aps);
    const Formula f = parse_formula(store, sc.formula);
    std::string rule_text;
    for (const std::string& r : sc.rules) {
        rule_text += r;
        rule_text += '\n';
    }
    const std::vector<PreferenceRule> rules = parse_rules(rule_text);
    for (const PreferenceRule& r : rules) {
        inst.aps.intern(r.from);
        if (r.kind == PreferenceRule::Kind::Substitute) inst.aps.intern(r.to);
    }
    if (sc.rows > 0) {
        std::vector<std::pair<ApId, uint32_t>> placed;
        for (const auto& [name, count] : sc.placements)
            placed.emplace_back(inst.aps.intern(name), count);
        std::map<uint32_t, Symbol> merged;
        for (const GridLabel& gl :
             random_ap_assignment(sc.rows, sc.cols, placed, sc.seed))
            merged[gl.row * sc.cols + gl.col] = gl.label;
        for (const auto& [cell, ap_names] : sc.fixed_labels) {
            const uint32_t id = cell.first * sc.cols + cell.second;
            merged[id] = merged[id].unite(inst.aps.intern_set(ap_names));
        }
        std::vector<GridLabel> labels;
        for (const auto& [cell, label] : merged)
            labels.push_back(GridLabel{cell / sc.cols, cell % sc.cols, label});
        inst.ts = make_grid(sc.rows, sc.cols, labels, sc.edge_weight);
    } else {
        inst.ts = load_graph(inst.aps, sc.graph_file, sc.graph_format);
    }
    EditSystem es = build_edit_system(inst.aps, rules, inst.aps.universe());
    SpecDfa dfa = compile(store, f);
    const auto t0 = std::chrono::steady_clock::now();
    inst.automaton = build_product(std::move(es), std::move(dfa));
    inst.table = heuristic_table(*inst.automaton, sc.dmin, sc.lambda);
    inst.precompute =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return inst;
}

} // namespace

std::vector<RunRecord> run_scenario(const Scenario& sc, unsigned jobs) {
    const Instance inst = build_instance(sc);

    std::vector<std::pair<HeuristicKind, double>> combos;
    for (HeuristicKind h : sc.heuristics) {
        if (h == HeuristicKind::Zero)
            combos.emplace_back(h, 0.0); // gamma plays no role: run once
        else
            for (double g : sc.gamma_grid) combos.emplace_back(h, g);
    }

    std::vector<RunRecord> records(combos.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= combos.size() || failed.load()) return;
            try {
                SearchConfig cfg;
                cfg.heuristic = combos[i].first;
                cfg.gamma = combos[i].second;
                cfg.lambda = sc.lambda;
                const auto res = plan(*inst.ts, *inst.automaton, inst.table, cfg);
                RunRecord& r = records[i];
                r.scenario = sc.name;
                r.heuristic = heuristic_name(combos[i].first);
                r.gamma = combos[i].second;
                r.states = inst.ts->num_states();
                r.precompute = inst.precompute;
                if (res) {
                    r.feasible = true;
                    r.cost_total = res->cost_total;
                    r.cost_motion = res->cost_motion;
                    r.cost_penalty = res->cost_penalty;
                    r.nodes_explored = res->metrics.nodes_explored;
                    r.nodes_pushed = res->metrics.nodes_pushed;
                    r.runtime = res->metrics.runtime;
                } else {
                    r.feasible = false;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) std::rethrow_exception(error);

    const RunRecord* zero = nullptr;
    for (const RunRecord& r : records)
        if (r.heuristic == heuristic_name(HeuristicKind::Zero)) {
            zero = &r;
            break;
        }
    if (zero && zero->feasible)
        for (RunRecord& r : records)
            if (r.feasible)
                r.delta = zero->cost_total == 0.0
                              ? (r.cost_total == 0.0 ? 0.0
                                                     : std::numeric_limits<double>::infinity())
                              : (r.cost_total - zero->cost_total) / zero->cost_total;
    return records;
}

std::vector<RunRecord> scaling_sweep(const Scenario& base, std::span<const uint32_t> sizes,
                                     unsigned jobs) {
    if (base.rows == 0) throw ParseError("scaling sweep needs a grid scenario");
    std::vector<RunRecord> all;
    for (uint32_t n : sizes) {
        const uint32_t side = static_cast<uint32_t>(std::llround(std::sqrt(double(n))));
        if (side == 0) throw DimensionError("scaling sweep size too small");
        Scenario sc = base;
        sc.rows = sc.cols = side;
        sc.name = base.name + "/n" + std::to_string(side * side);
        auto records = run_scenario(sc, jobs);
        all.insert(all.end(), records.begin(), records.end());
    }
    return all;
}

namespace {

std::vector<std::string> record_row(const RunRecord& r, bool include_timing) {
    std::vector<std::string> row = {
        r.scenario,
        r.heuristic,
        fmt_num(r.gamma),
        std::to_string(r.states),
        r.feasible ? "1" : "0",
        r.feasible ? fmt_num(r.cost_total) : "",
        r.feasible ? fmt_num(r.cost_motion) : "",
        r.feasible ? fmt_num(r.cost_penalty) : "",
        std::to_string(r.nodes_explored),
        std::to_string(r.nodes_pushed),
        r.delta ? fmt_num(*r.delta) : "",
    };
    if (include_timing) {
        row.push_back(fmt_num(r.runtime));
        row.push_back(fmt_num(r.precompute));
    }
    return row;
}

std::vector<std::string> record_header(bool include_timing) {
    std::vector<std::string> h = {"scenario",     "heuristic",    "gamma",       "states",
                                  "feasible",     "cost_total",   "cost_motion", "cost_penalty",
                                  "nodes_explored", "nodes_pushed", "delta"};
    if (include_timing) {
        h.push_back("runtime");
        h.push_back("precompute");
    }
    return h;
}

} // namespace

void write_records_csv(std::span<const RunRecord> records, std::ostream& out,
                       bool include_timing) {
    auto emit = [&](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    };
    emit(record_header(include_timing));
    for (const RunRecord& r : records) emit(record_row(r, include_timing));
}

std::string render_records(std::span<const RunRecord> records) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back(record_header(true));
    for (const RunRecord& r : records) rows.push_back(record_row(r, true));
    std::vector<size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << "  ";
            out << row[i];
            if (i + 1 < row.size()) out << std::string(width[i] - row[i].size(), ' ');
        }
        out << '\n';
    }
    return out.str();
}

} // namespace rplan
