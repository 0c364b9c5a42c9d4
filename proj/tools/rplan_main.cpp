#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "rplan/bench.hpp"
#include "rplan/dfa.hpp"
#include "rplan/errors.hpp"
#include "rplan/formula.hpp"
#include "rplan/oracle.hpp"
#include "rplan/product.hpp"
#include "rplan/result_io.hpp"
#include "rplan/search.hpp"
#include "rplan/ts.hpp"
#include "rplan/wfse.hpp"

namespace {

using namespace rplan;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

std::string fmt_num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// Shared pipeline options for plan/validate.
struct PipelineArgs {
    std::string env_file;
    std::string env_format = "csv";
    std::string formula;
    std::string rules_file;
    std::vector<std::string> rule_lines;
    double lambda = 1.0;
};

struct Pipeline {
    ApInterner aps;
    std::unique_ptr<FormulaStore> store;
    Formula formula = 0;
    std::optional<TransitionSystem> ts;
    std::optional<EditSystem> es;
    std::optional<RelaxedAutomaton> automaton; // built on demand
};

GraphFormat parse_format(const std::string& f) {
    if (f == "csv") return GraphFormat::EdgeListCsv;
    if (f == "json") return GraphFormat::Json;
    throw ParseError("unknown graph format '" + f + "' (expected csv or json)");
}

std::vector<PreferenceRule> gather_rules(const PipelineArgs& args) {
    std::string text;
    if (!args.rules_file.empty()) {
        std::ifstream in(args.rules_file);
        if (!in) throw ParseError("cannot open rules file '" + args.rules_file + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
        text += '\n';
    }
    for (const std::string& line : args.rule_lines) {
        text += line;
        text += '\n';
    }
    return parse_rules(text);
}

Pipeline build_pipeline(const PipelineArgs& args) {
    Pipeline p;
    p.store = std::make_unique<FormulaStore>(p.aps);
    p.formula = parse_formula(*p.store, args.formula);
    const auto rules = gather_rules(args);
    for (const PreferenceRule& r : rules) {
        p.aps.intern(r.from);
        if (r.kind == PreferenceRule::Kind::Substitute) p.aps.intern(r.to);
    }
    p.ts = load_graph(p.aps, args.env_file, parse_format(args.env_format));
    p.es = build_edit_system(p.aps, rules, p.aps.universe());
    return p;
}

size_t node_cap_from_env(size_t fallback) {
    const char* env = std::getenv("RPLAN_NODE_CAP");
    if (!env || !*env) return fallback;
    size_t v = 0;
    const char* end = env + std::string_view(env).size();
    auto [p, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || p != end || v == 0)
        throw ParseError(std::string("bad RPLAN_NODE_CAP value '") + env + "'");
    return v;
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw ParseError("cannot open output file '" + path + "'");
    return file;
}

int cmd_compile(const std::string& formula_text, const std::vector<std::string>& rule_lines,
                const std::string& rules_file, const std::string& dump,
                const std::string& out_path) {
    PipelineArgs args;
    args.formula = formula_text;
    args.rules_file = rules_file;
    args.rule_lines = rule_lines;

    ApInterner aps;
    FormulaStore store(aps);
    const Formula f = parse_formula(store, formula_text);
    const auto rules = gather_rules(args);
    for (const PreferenceRule& r : rules) {
        aps.intern(r.from);
        if (r.kind == PreferenceRule::Kind::Substitute) aps.intern(r.to);
    }
    SpecDfa dfa = compile(store, f);
    size_t transitions = 0;
    for (const DfaState& s : dfa.states) transitions += s.succ.size();
    std::cout << "formula: " << print_formula(store, f) << "\n";
    std::cout << "automaton: " << dfa.num_states() << " states, " << transitions
              << " guarded transitions, alphabet " << aps.format(dfa.alphabet) << "\n";

    if (!dump.empty() && dump != "automaton" && dump != "product")
        throw ParseError("unknown dump kind '" + dump + "' (expected automaton or product)");
    std::ofstream file;
    if (dump == "automaton") {
        std::ostream& out = open_or_stdout(out_path, file);
        for (uint32_t s = 0; s < dfa.num_states(); ++s) {
            const DfaState& st = dfa.states[s];
            out << "state " << s << (s == dfa.initial ? " (initial)" : "")
                << (st.accepting ? " (accepting)" : "") << ": " << st.obligation << "\n";
        }
    } else if (dump == "product" || !rules.empty()) {
        EditSystem es = build_edit_system(aps, rules, aps.universe());
        RelaxedAutomaton a = build_product(std::move(es), std::move(dfa));
        std::cout << "product: " << a.num_states() << " states\n";
        if (dump == "product") {
            std::ostream& out = open_or_stdout(out_path, file);
            rplan::dump(a, aps, out);
        }
    }
    return kExitOk;
}

int cmd_plan(const PipelineArgs& args, const std::string& heuristic, double gamma,
             const std::string& dmin_mode, size_t node_cap_flag, const std::string& out_path,
             const std::string& trace_path) {
    Pipeline p = build_pipeline(args);
    SpecDfa dfa = compile(*p.store, p.formula);
    p.automaton = build_product(std::move(*p.es), std::move(dfa));

    DminMode mode;
    if (dmin_mode == "hops")
        mode = DminMode::Hops;
    else if (dmin_mode == "weighted")
        mode = DminMode::Weighted;
    else
        throw ParseError("unknown dmin mode '" + dmin_mode + "'");
    const HeuristicTable table = heuristic_table(*p.automaton, mode, args.lambda);

    SearchConfig cfg;
    cfg.heuristic = heuristic_from_name(heuristic);
    cfg.gamma = gamma;
    cfg.lambda = args.lambda;
    cfg.node_cap = node_cap_flag > 0 ? node_cap_flag : node_cap_from_env(cfg.node_cap);
    std::vector<TraceRow> trace;
    if (!trace_path.empty()) cfg.trace = &trace;

    const auto res = plan(*p.ts, *p.automaton, table, cfg);

    if (!trace_path.empty()) {
        std::ofstream tf(trace_path);
        if (!tf) throw ParseError("cannot open trace file '" + trace_path + "'");
        tf << "x,q,g,h,f\n";
        for (const TraceRow& row : trace)
            tf << row.x << ',' << row.q << ',' << fmt_num(row.g) << ',' << fmt_num(row.h)
               << ',' << fmt_num(row.f) << "\n";
    }
    if (!res) {
        std::cerr << "no feasible plan\n";
        return kExitInfeasible;
    }
    std::ofstream file;
    write_result_json(*res, p.aps, open_or_stdout(out_path, file));
    std::cerr << "cost " << fmt_num(res->cost_total) << " (motion " << fmt_num(res->cost_motion)
              << ", penalty " << fmt_num(res->cost_penalty) << "), explored "
              << res->metrics.nodes_explored << ", pushed " << res->metrics.nodes_pushed
              << ", " << fmt_num(res->metrics.runtime) << "s\n";
    return kExitOk;
}

int cmd_bench(const std::string& scenario_path, unsigned jobs, const std::string& csv_path,
              bool no_timing, const std::vector<uint32_t>& sizes) {
    const Scenario sc = load_scenario(scenario_path);
    const std::vector<RunRecord> records =
        sizes.empty() ? run_scenario(sc, jobs)
                      : scaling_sweep(sc, std::span<const uint32_t>(sizes), jobs);
    std::cout << render_records(records);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw ParseError("cannot open csv file '" + csv_path + "'");
        write_records_csv(records, out, !no_timing);
    }
    return kExitOk;
}

int cmd_validate(const PipelineArgs& args, const std::string& result_path) {
    Pipeline p = build_pipeline(args);
    std::ifstream in(result_path);
    if (!in) throw ParseError("cannot open result file '" + result_path + "'");
    const PlanResult r = read_result_json(p.aps, in);
    std::string why;
    if (!check_result(*p.store, p.formula, *p.es, *p.ts, r, args.lambda, &why)) {
        std::cout << "FAIL: " << why << "\n";
        return kExitInfeasible;
    }
    std::cout << "PASS\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-cost planning with preference-based task relaxation"};
    app.require_subcommand(1);

    // compile
    auto* compile_cmd = app.add_subcommand("compile", "compile a formula, report automaton size");
    std::string c_formula, c_dump, c_out, c_rules_file;
    std::vector<std::string> c_rules;
    compile_cmd->add_option("--formula", c_formula, "task formula")->required();
    compile_cmd->add_option("--rule", c_rules, "preference rule line (repeatable)");
    compile_cmd->add_option("--rules", c_rules_file, "preference rules file");
    compile_cmd->add_option("--dump", c_dump, "dump 'automaton' or 'product' detail");
    compile_cmd->add_option("--out", c_out, "dump target file (default stdout)");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "plan a minimum-cost satisfying trajectory");
    PipelineArgs p_args;
    std::string p_heuristic = "proposed", p_dmin = "hops", p_out, p_trace;
    double p_gamma = 0.0;
    size_t p_cap = 0;
    plan_cmd->add_option("--env", p_args.env_file, "environment graph file")->required();
    plan_cmd->add_option("--format", p_args.env_format, "graph format: csv or json");
    plan_cmd->add_option("--formula", p_args.formula, "task formula")->required();
    plan_cmd->add_option("--rules", p_args.rules_file, "preference rules file");
    plan_cmd->add_option("--rule", p_args.rule_lines, "preference rule line (repeatable)");
    plan_cmd->add_option("--gamma", p_gamma, "heuristic scale");
    plan_cmd->add_option("--lambda", p_args.lambda, "penalty scale");
    plan_cmd->add_option("--heuristic", p_heuristic, "zero, proposed, info or info-pre");
    plan_cmd->add_option("--dmin", p_dmin, "automaton distance mode: hops or weighted");
    plan_cmd->add_option("--node-cap", p_cap, "expansion cap (overrides RPLAN_NODE_CAP)");
    plan_cmd->add_option("--out", p_out, "write the plan JSON here (default stdout)");
    plan_cmd->add_option("--trace", p_trace, "write the expansion log CSV here");

    // bench / sweep
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark scenario");
    std::string b_scenario, b_csv;
    unsigned b_jobs = 1;
    bool b_no_timing = false;
    bench_cmd->add_option("--scenario", b_scenario, "scenario JSON file")->required();
    bench_cmd->add_option("--jobs", b_jobs, "worker threads");
    bench_cmd->add_option("--csv", b_csv, "also write records as CSV");
    bench_cmd->add_flag("--no-timing", b_no_timing, "omit timing columns from the CSV");

    auto* sweep_cmd = app.add_subcommand("sweep", "re-run a grid scenario at several sizes");
    std::string s_scenario, s_csv;
    unsigned s_jobs = 1;
    bool s_no_timing = false;
    std::vector<uint32_t> s_sizes;
    sweep_cmd->add_option("--scenario", s_scenario, "scenario JSON file")->required();
    sweep_cmd->add_option("--sizes", s_sizes, "target state counts")->required()->delimiter(',');
    sweep_cmd->add_option("--jobs", s_jobs, "worker threads");
    sweep_cmd->add_option("--csv", s_csv, "also write records as CSV");
    sweep_cmd->add_flag("--no-timing", s_no_timing, "omit timing columns from the CSV");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "re-check a stored plan result");
    PipelineArgs v_args;
    std::string v_result;
    val_cmd->add_option("--env", v_args.env_file, "environment graph file")->required();
    val_cmd->add_option("--format", v_args.env_format, "graph format: csv or json");
    val_cmd->add_option("--formula", v_args.formula, "task formula")->required();
    val_cmd->add_option("--rules", v_args.rules_file, "preference rules file");
    val_cmd->add_option("--rule", v_args.rule_lines, "preference rule line (repeatable)");
    val_cmd->add_option("--lambda", v_args.lambda, "penalty scale");
    val_cmd->add_option("--result", v_result, "plan result JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (compile_cmd->parsed()) return cmd_compile(c_formula, c_rules, c_rules_file, c_dump, c_out);
        if (plan_cmd->parsed())
            return cmd_plan(p_args, p_heuristic, p_gamma, p_dmin, p_cap, p_out, p_trace);
        if (bench_cmd->parsed()) return cmd_bench(b_scenario, b_jobs, b_csv, b_no_timing, {});
        if (sweep_cmd->parsed()) return cmd_bench(s_scenario, s_jobs, s_csv, s_no_timing, s_sizes);
        if (val_cmd->parsed()) return cmd_validate(v_args, v_result);
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
