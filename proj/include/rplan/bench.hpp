#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rplan/search.hpp"
#include "rplan/ts.hpp"
#include "rplan/wfse.hpp"

namespace rplan {

/* One benchmark setup: an environment (generated grid or graph file), a
   task formula, preference rules, and the gamma/heuristic combinations to
   plan with.  Loaded from JSON; see the README for the exact schema. */
struct Scenario {
    std::string name;
    uint32_t rows = 0, cols = 0; // grid mode when rows > 0
    double edge_weight = 1.0;
    std::string graph_file;      // graph mode otherwise
    GraphFormat graph_format = GraphFormat::EdgeListCsv;
    std::string formula;
    std::vector<std::string> rules; // preference-rule lines
    uint64_t seed = 0;
    std::vector<std::pair<std::string, uint32_t>> placements; // AP -> random cell count
    std::vector<std::pair<std::pair<uint32_t, uint32_t>, std::string>> fixed_labels;
    std::vector<double> gamma_grid{0.0};
    double lambda = 1.0;
    std::vector<HeuristicKind> heuristics{HeuristicKind::Zero, HeuristicKind::Proposed};
    DminMode dmin = DminMode::Hops;
};

Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

// One planning run inside a scenario.  delta compares cost_total against the
// scenario's plain cheapest-first run, when one was requested.
struct RunRecord {
    std::string scenario;
    std::string heuristic;
    double gamma = 0.0;
    uint32_t states = 0; // graph size
    bool feasible = false;
    double cost_total = 0.0;
    double cost_motion = 0.0;
    double cost_penalty = 0.0;
    size_t nodes_explored = 0;
    size_t nodes_pushed = 0;
    double runtime = 0.0;        // seconds inside plan()
    double precompute = 0.0;     // seconds building product + distance table
    std::optional<double> delta; // (cost - cost_zero) / cost_zero
};

/* Runs every (heuristic, gamma) combination of the scenario; the plain
   cheapest-first baseline runs once (gamma ignored).  jobs > 1 spreads runs
   over worker threads; record order and contents (timing aside) do not
   depend on the worker count. */
std::vector<RunRecord> run_scenario(const Scenario& sc, unsigned jobs = 1);

/* Re-runs the scenario at several grid sizes (side = round(sqrt(n))),
   appending all records; scenario names get a "/n<states>" suffix. */
std::vector<RunRecord> scaling_sweep(const Scenario& base, std::span<const uint32_t> sizes,
                                     unsigned jobs = 1);

/* CSV with a fixed column set; timing columns (runtime, precompute) are
   dropped when include_timing is false so two runs of the same scenario
   produce byte-identical tables. */
void write_records_csv(std::span<const RunRecord> records, std::ostream& out,
                       bool include_timing = true);

// Aligned text table for terminal display (always includes timing).
std::string render_records(std::span<const RunRecord> records);

/* Chooses 'count' distinct random cells per proposition (the initial cell
   (0,0) is never used); draws are independent across propositions and cells
   chosen twice merge their labels.  Same seed, same placement, on every
   platform. */
std::vector<GridLabel> random_ap_assignment(
    uint32_t rows, uint32_t cols, std::span<const std::pair<ApId, uint32_t>> placements,
    uint64_t seed);

const char* heuristic_name(HeuristicKind k);
HeuristicKind heuristic_from_name(const std::string& name);

} // namespace rplan
