#include "rplan/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "rplan/errors.hpp"
#include "rplan/formula.hpp"

namespace rplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/* Node key: bit 63 marks the pre-consumption layer (the agent stands on its
   initial state but has not yet read its label), bits 32..62 the graph
   state, bits 0..31 the automaton state. */
constexpr uint64_t kPreBit = uint64_t{1} << 63;

uint64_t node_key(bool pre, uint32_t x, uint32_t q) {
    return (pre ? kPreBit : 0) | (uint64_t{x} << 32) | q;
}
uint32_t key_x(uint64_t k) { return static_cast<uint32_t>((k >> 32) & 0x7FFFFFFFu); }
uint32_t key_q(uint64_t k) { return static_cast<uint32_t>(k); }
bool key_pre(uint64_t k) { return (k & kPreBit) != 0; }

struct NodeRec {
    double g = 0.0;
    uint64_t parent = 0;
    double w_edit = 0.0; // unscaled transducer weight of the arriving edge
    double w_move = 0.0; // motion weight of the arriving edge
    Symbol in{};         // task symbol consumed by the arriving edge
    bool has_in = false;
    uint8_t kind = 0;    // 0 root, 1 label consumed, 2 internal (nothing emitted)
    bool moved = false;  // kind 1 only: a graph edge was traversed
    bool closed = false;
};

struct QEntry {
    double f = 0.0;
    double h = 0.0;
    uint64_t seq = 0;
    uint64_t key = 0;
};

struct QWorse {
    bool operator()(const QEntry& a, const QEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.h != b.h) return a.h > b.h;
        return a.seq > b.seq;
    }
};

} // namespace

std::optional<PlanResult> plan(const TransitionSystem& ts, const RelaxedAutomaton& a,
                               const HeuristicTable& htable, const SearchConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (ts.num_states() > 0x7FFFFFFFu)
        throw CapacityError("graph too large for the node encoding");

    const uint32_t Q = a.num_states();
    const auto& labels = ts.distinct_labels();
    const size_t L = labels.size();
    const std::vector<double>& dmin = htable.dmin;

    // Environment-symbol moves, memoized per (automaton state, label class).
    std::vector<char> env_done(static_cast<size_t>(Q) * L, 0);
    std::vector<std::vector<EnvStep>> env_cache(static_cast<size_t>(Q) * L);
    auto env_at = [&](uint32_t q, uint32_t cls) -> const std::vector<EnvStep>& {
        const size_t i = static_cast<size_t>(q) * L + cls;
        if (!env_done[i]) {
            a.env_steps(q, labels[cls], env_cache[i]);
            env_done[i] = 1;
        }
        return env_cache[i];
    };

    /* Label-seeking heuristic state.  A label class is useful at q when
       reading it can lower the remaining automaton distance; standing at x
       the estimate is the cheapest graph distance to any state carrying a
       useful class.  An internal move that lowers the distance (or q already
       accepting) makes the estimate 0. */
    const bool info = cfg.heuristic == HeuristicKind::InfoOnDemand ||
                      cfg.heuristic == HeuristicKind::InfoPrecomputed;
    std::vector<char> useful_done(info ? Q : 0, 0);
    std::vector<char> useful_zero(info ? Q : 0, 0);
    std::vector<std::vector<uint32_t>> useful_cls(info ? Q : 0);
    auto useful_at = [&](uint32_t q) {
        if (useful_done[q]) return;
        useful_done[q] = 1;
        if (a.accepting(q)) {
            useful_zero[q] = 1;
            return;
        }
        if (dmin[q] == kInf) return; // dead: no class helps
        for (const EpsStep& s : a.eps_steps(q)) {
            if (dmin[s.to] < dmin[q]) {
                useful_zero[q] = 1;
                return;
            }
        }
        for (uint32_t cls = 0; cls < L; ++cls) {
            for (const EnvStep& s : env_at(q, cls)) {
                if (dmin[s.to] < dmin[q]) {
                    useful_cls[q].push_back(cls);
                    break;
                }
            }
        }
    };

    // On-demand mode: exact distance to each label class, one table per class.
    std::vector<char> dist_done(cfg.heuristic == HeuristicKind::InfoOnDemand ? L : 0, 0);
    std::vector<std::vector<double>> dist_cls(dist_done.size());
    auto dist_class = [&](uint32_t cls) -> const std::vector<double>& {
        if (!dist_done[cls]) {
            std::vector<uint32_t> targets;
            for (uint32_t x = 0; x < ts.num_states(); ++x)
                if (ts.label_class(x) == cls) targets.push_back(x);
            dist_cls[cls] = multi_source_distance(ts, targets);
            dist_done[cls] = 1;
        }
        return dist_cls[cls];
    };

    /* Precomputed mode: one table per proposition (distance to any state
       whose label carries it), built up front; a class estimate is the max
       over its propositions, a lower bound on the exact class distance. */
    std::vector<std::vector<double>> dist_ap(kMaxAps);
    if (cfg.heuristic == HeuristicKind::InfoPrecomputed) {
        Symbol used{};
        for (const Symbol& l : labels) used = used.unite(l);
        for (ApId ap : used.aps()) {
            std::vector<uint32_t> targets;
            for (uint32_t x = 0; x < ts.num_states(); ++x)
                if (ts.label(x).contains(ap)) targets.push_back(x);
            dist_ap[ap] = multi_source_distance(ts, targets);
        }
    }

    auto heur = [&](uint32_t x, uint32_t q) -> double {
        switch (cfg.heuristic) {
        case HeuristicKind::Zero:
            return 0.0;
        case HeuristicKind::Proposed:
            return dmin[q] == kInf ? kInf : cfg.gamma * dmin[q];
        default:
            break;
        }
        useful_at(q);
        if (useful_zero[q]) return 0.0;
        if (useful_cls[q].empty()) return kInf;
        double best = kInf;
        for (uint32_t cls : useful_cls[q]) {
            double d;
            if (cfg.heuristic == HeuristicKind::InfoOnDemand) {
                d = dist_class(cls)[x];
            } else {
                d = 0.0;
                for (ApId ap : labels[cls].aps()) d = std::max(d, dist_ap[ap][x]);
            }
            best = std::min(best, d);
        }
        return best;
    };

    std::unordered_map<uint64_t, NodeRec> recs;
    recs.reserve(1024);
    std::priority_queue<QEntry, std::vector<QEntry>, QWorse> pq;
    SearchMetrics metrics;
    uint64_t seq = 0;

    auto push = [&](uint64_t key, double h) {
        pq.push(QEntry{recs[key].g + h, h, seq++, key});
        ++metrics.nodes_pushed;
    };

    // Arriving edge bookkeeping for one successor; skips dominated paths.
    auto relax = [&](uint64_t key, double g2, uint64_t parent, double w_move, double w_edit,
                     const std::optional<Symbol>& in, uint8_t kind, bool moved) {
        auto [it, fresh] = recs.try_emplace(key);
        NodeRec& r = it->second;
        if (!fresh && (r.closed || r.g <= g2)) return;
        r.g = g2;
        r.parent = parent;
        r.w_move = w_move;
        r.w_edit = w_edit;
        r.has_in = in.has_value();
        r.in = in.value_or(Symbol{});
        r.kind = kind;
        r.moved = moved;
        const double h = heur(key_x(key), key_q(key));
        if (h == kInf) return; // provably cannot reach acceptance
        push(key, h);
    };

    const uint32_t x0 = ts.initial();
    const uint64_t root = node_key(true, x0, a.initial());
    recs.try_emplace(root);
    {
        const double h = heur(x0, a.initial());
        if (h != kInf) push(root, h);
    }

    std::optional<uint64_t> goal;
    while (!pq.empty()) {
        const QEntry e = pq.top();
        pq.pop();
        NodeRec& r = recs.at(e.key);
        if (r.closed) continue; // a cheaper copy was expanded already
        r.closed = true;
        ++metrics.nodes_explored;
        if (metrics.nodes_explored > cfg.node_cap)
            throw NodeCapError("search expanded more than " + std::to_string(cfg.node_cap) +
                               " nodes");
        const uint32_t x = key_x(e.key);
        const uint32_t q = key_q(e.key);
        const bool pre = key_pre(e.key);
        if (cfg.trace) cfg.trace->push_back(TraceRow{x, q, r.g, e.h, e.f});
        if (!pre && a.accepting(q)) {
            goal = e.key;
            break;
        }
        const double g = r.g;
        for (const EpsStep& s : a.eps_steps(q)) {
            relax(node_key(pre, x, s.to), g + cfg.lambda * s.weight, e.key, 0.0, s.weight,
                  s.task_in, 2, false);
        }
        if (pre) {
            // Read the initial state's label without moving.
            for (const EnvStep& s : env_at(q, ts.label_class(x))) {
                relax(node_key(false, x, s.to), g + cfg.lambda * s.weight, e.key, 0.0, s.weight,
                      s.task_in, 1, false);
            }
        } else {
            for (const TsEdge& edge : ts.out(x)) {
                for (const EnvStep& s : env_at(q, ts.label_class(edge.dst))) {
                    const uint64_t key2 = node_key(false, edge.dst, s.to);
                    const double cost = edge.weight + cfg.lambda * s.weight;
                    if (key2 == e.key && cost == 0.0) continue; // no-op successor
                    relax(key2, g + cost, e.key, edge.weight, s.weight, s.task_in, 1, true);
                }
            }
        }
    }

    if (!goal) {
        metrics.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
        return std::nullopt;
    }

    std::vector<uint64_t> chain;
    for (uint64_t k = *goal;;) {
        chain.push_back(k);
        const NodeRec& r = recs.at(k);
        if (r.kind == 0) break;
        k = r.parent;
    }
    std::reverse(chain.begin(), chain.end());

    PlanResult res;
    res.trajectory.push_back(x0);
    for (size_t i = 1; i < chain.size(); ++i) {
        const NodeRec& r = recs.at(chain[i]);
        const uint32_t x = key_x(chain[i]);
        if (r.kind == 1) {
            if (r.moved) res.trajectory.push_back(x);
            const Symbol out = ts.label(x);
            res.env_word.push_back(out);
            res.edit_ops.push_back(EditOp{r.has_in ? std::optional<Symbol>(r.in) : std::nullopt,
                                       out, r.w_edit});
            if (r.has_in) res.spec_word.push_back(r.in);
            res.cost_motion += r.w_move;
            res.cost_penalty += cfg.lambda * r.w_edit;
        } else {
            res.edit_ops.push_back(EditOp{r.in, std::nullopt, r.w_edit});
            res.spec_word.push_back(r.in);
            res.cost_penalty += cfg.lambda * r.w_edit;
        }
    }
    res.cost_total = res.cost_motion + res.cost_penalty;
    metrics.runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.metrics = metrics;
    return res;
}

bool check_result(FormulaStore& store, Formula f, const EditSystem& es,
                  const TransitionSystem& ts, const PlanResult& r, double lambda,
                  std::string* why) {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    if (r.trajectory.empty()) return fail("empty trajectory");
    if (r.trajectory.front() != ts.initial())
        return fail("trajectory does not start at the initial state");
    double motion = 0.0;
    try {
        motion = trajectory_weight(ts, r.trajectory);
    } catch (const Error& e) {
        return fail(e.what());
    }
    if (motion != r.cost_motion) return fail("motion cost does not match the trajectory");
    if (output_word(ts, r.trajectory) != r.env_word)
        return fail("environment word does not match the trajectory labels");
    if (!evaluate(store, f, std::span<const Symbol>(r.spec_word)))
        return fail("specification word does not satisfy the formula");
    try {
        auto [env2, raw] = apply_edits(es, r.spec_word, r.edit_ops);
        (void)raw;
        if (env2 != r.env_word) return fail("edit run output differs from the environment word");
    } catch (const Error& e) {
        return fail(e.what());
    }
    double penalty = 0.0;
    for (const EditOp& op : r.edit_ops) penalty += lambda * op.weight;
    if (penalty != r.cost_penalty) return fail("penalty total does not match the edit run");
    if (r.cost_total != r.cost_motion + r.cost_penalty)
        return fail("total cost is not motion plus penalty");
    return true;
}

} // namespace rplan
