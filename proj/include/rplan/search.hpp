#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rplan/product.hpp"
#include "rplan/ts.hpp"

namespace rplan {

enum class HeuristicKind {
    Proposed,        // gamma * remaining automaton distance (from the table)
    Zero,            // plain cheapest-first over the implicit product
    InfoOnDemand,    // graph distance to the nearest useful label, computed lazily
    InfoPrecomputed, // same value class, from per-proposition tables built up front
};

struct TraceRow {
    uint32_t x = 0;
    uint32_t q = 0;
    double g = 0, h = 0, f = 0;
};

struct SearchConfig {
    HeuristicKind heuristic = HeuristicKind::Proposed;
    double gamma = 0.0;
    double lambda = 1.0;          // scales edit weights against motion cost
    size_t node_cap = 20'000'000; // expansions before NodeCapError
    std::vector<TraceRow>* trace = nullptr; // optional pop log
};

struct SearchMetrics {
    size_t nodes_explored = 0; // distinct nodes expanded (closed)
    size_t nodes_pushed = 0;   // queue insertions
    double runtime = 0.0;      // seconds spent inside plan()
    double precompute_time = 0.0; // table builds, filled in by callers that time them
};

/* A finished plan.  The environment word is exactly the label sequence of
   the trajectory (first state included); the specification word is the one
   the formula reads; edit_ops replays one transducer run between the two.
   cost_total == cost_motion + cost_penalty always holds exactly. */
struct PlanResult {
    std::vector<uint32_t> trajectory;
    std::vector<Symbol> env_word;
    std::vector<Symbol> spec_word;
    std::vector<EditOp> edit_ops;
    double cost_total = 0.0;
    double cost_motion = 0.0;
    double cost_penalty = 0.0;
    SearchMetrics metrics;
};

/* Minimum-cost path planning over the implicit product of the graph and the
   relaxed specification automaton.  Nodes are expanded cheapest f = g + h
   first (ties: lower h, then insertion order); a node is expanded at most
   once; the first expanded accepting node yields the plan.  Waiting in
   place and internal automaton moves (dropped task symbols) are explored
   alongside motion, so relaxation and routing trade off in one search.

   Returns nullopt when no accepting node is reachable (infeasible task).
   Throws NodeCapError past cfg.node_cap expansions. */
std::optional<PlanResult> plan(const TransitionSystem& ts, const RelaxedAutomaton& a,
                               const HeuristicTable& htable, const SearchConfig& cfg = {});

/* Re-derives every PlanResult invariant through the independent slow paths
   (trajectory edges + labels, formula evaluation on the specification word, edit
   replay, cost re-summation).  On failure returns false and, if 'why' is
   given, a one-line reason. */
bool check_result(FormulaStore& store, Formula f, const EditSystem& es,
                  const TransitionSystem& ts, const PlanResult& r, double lambda,
                  std::string* why = nullptr);

} // namespace rplan
