#include "rplan/product.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <unordered_map>

#include "rplan/errors.hpp"

namespace rplan {

static constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

/* Visits one representative task symbol per automaton-state input class:
   state s only distinguishes symbols by its care set, so enumerating those
   projections (plus a forced member, for family transitions that require
   one) covers every task symbol the transition could read. */
template <typename Fn>
void for_each_input_class(const SpecDfa& dfa, uint32_t s, std::optional<ApId> forced, Fn&& fn) {
    const DfaState& st = dfa.states[s];
    const auto k = static_cast<uint32_t>(st.care.size());
    int forced_bit = -1;
    if (forced)
        for (uint32_t i = 0; i < k; ++i)
            if (st.care[i] == *forced)
                forced_bit = static_cast<int>(i);
    for (uint32_t v = 0; v < (uint32_t{1} << k); ++v) {
        if (forced_bit >= 0 && !((v >> forced_bit) & 1))
            continue;
        Symbol rep;
        for (uint32_t i = 0; i < k; ++i)
            if ((v >> i) & 1)
                rep = rep.with(st.care[i]);
        if (forced)
            rep = rep.with(*forced);
        fn(rep, st.succ[v]);
    }
}

} // namespace

RelaxedAutomaton build_product(EditSystem es, SpecDfa dfa, const ProductOptions& opt) {
    RelaxedAutomaton a;
    a.es_ = std::move(es);
    a.dfa_ = std::move(dfa);
    const EditSystem& E = a.es_;
    const SpecDfa& D = a.dfa_;

    auto key = [](uint32_t z, uint32_t s) { return (uint64_t{z} << 32) | s; };
    auto state_of = [&](uint32_t z, uint32_t s) {
        auto it = a.index_.find(key(z, s));
        if (it != a.index_.end())
            return it->second;
        if (a.states_.size() >= opt.state_cap)
            throw CapacityError("product exceeds state cap of " + std::to_string(opt.state_cap));
        auto id = static_cast<uint32_t>(a.states_.size());
        a.index_.emplace(key(z, s), id);
        a.states_.emplace_back(z, s);
        return id;
    };

    a.initial_ = state_of(E.initial, D.initial);
    std::map<std::pair<uint32_t, uint32_t>, double> summary;
    auto relax = [&](uint32_t from, uint32_t to, double w) {
        auto [it, fresh] = summary.try_emplace({from, to}, w);
        if (!fresh && w < it->second)
            it->second = w;
    };

    for (uint32_t q = 0; q < a.states_.size(); ++q) {
        auto [z, s] = a.states_[q];
        std::vector<EpsStep> eps_here;
        std::set<std::pair<uint32_t, uint32_t>> eps_seen; // (transducer id, target)
        auto add_eps = [&](uint32_t tid, uint32_t to, double w, Symbol task_in) {
            if (to == q) // dropping a task symbol without progress is never useful
                return;
            if (!eps_seen.emplace(tid, to).second)
                return;
            eps_here.push_back(EpsStep{to, w, task_in, tid});
            relax(q, to, w);
        };

        for (uint32_t tid : E.out[z]) {
            const EditTransition& t = E.transitions[tid];
            switch (t.label.kind) {
            case EditKind::PassThrough:
                for_each_input_class(D, s, std::nullopt, [&](Symbol, uint32_t s2) {
                    relax(q, state_of(t.to, s2), t.weight);
                });
                break;
            case EditKind::Substitute:
                for_each_input_class(D, s, t.label.from_ap, [&](Symbol, uint32_t s2) {
                    relax(q, state_of(t.to, s2), t.weight);
                });
                break;
            case EditKind::Delete:
                if (t.label.member_delete) {
                    for_each_input_class(D, s, t.label.from_ap, [&](Symbol rep, uint32_t s2) {
                        add_eps(tid, state_of(t.to, s2), t.weight, rep);
                    });
                } else {
                    Symbol in = Symbol::single(t.label.from_ap);
                    add_eps(tid, state_of(t.to, D.step(s, in)), t.weight, in);
                }
                break;
            case EditKind::Concrete: {
                uint32_t s2 = t.label.in ? D.step(s, *t.label.in) : s;
                uint32_t q2 = state_of(t.to, s2);
                if (t.label.out)
                    relax(q, q2, t.weight);
                else
                    add_eps(tid, q2, t.weight, *t.label.in);
                break;
            }
            }
        }
        a.eps_.push_back(std::move(eps_here));
    }

    a.accepting_.resize(a.states_.size());
    for (uint32_t q = 0; q < a.states_.size(); ++q) {
        auto [z, s] = a.states_[q];
        a.accepting_[q] = E.accepting[z] && D.states[s].accepting ? 1 : 0;
    }
    a.summary_.reserve(summary.size());
    for (const auto& [ft, w] : summary)
        a.summary_.push_back(SummaryEdge{ft.first, ft.second, w});

    /* A zero-weight cycle of internal moves would let runs shed arbitrarily
       many task symbols for free; reject such systems outright. */
    std::vector<int> color(a.states_.size(), 0);
    std::vector<std::pair<uint32_t, size_t>> stack;
    for (uint32_t start = 0; start < a.states_.size(); ++start) {
        if (color[start])
            continue;
        stack.assign(1, {start, 0});
        color[start] = 1;
        while (!stack.empty()) {
            auto& [q, i] = stack.back();
            const auto& steps = a.eps_[q];
            size_t j = i;
            while (j < steps.size() && steps[j].weight != 0.0)
                ++j;
            if (j >= steps.size()) {
                color[q] = 2;
                stack.pop_back();
                continue;
            }
            i = j + 1;
            uint32_t to = steps[j].to;
            if (color[to] == 1)
                throw EpsCycleError("zero-weight cycle of internal moves through product "
                                    "state " + std::to_string(to));
            if (color[to] == 0) {
                color[to] = 1;
                stack.emplace_back(to, 0);
            }
        }
    }
    return a;
}

void RelaxedAutomaton::env_steps(uint32_t q, Symbol env, std::vector<EnvStep>& out) const {
    auto [z, s] = states_[q];
    auto id_of = [&](uint32_t z2, uint32_t s2) {
        return index_.at((uint64_t{z2} << 32) | s2); // materialized at build
    };
    for (uint32_t tid : es_.out[z]) {
        const EditTransition& t = es_.transitions[tid];
        switch (t.label.kind) {
        case EditKind::PassThrough:
            out.push_back(EnvStep{id_of(t.to, dfa_.step(s, env)), t.weight, env, tid});
            break;
        case EditKind::Substitute:
            /* Inverse of s -> s\{a} u {b}: only environment symbols carrying
               b and not a can arise, and the task symbol is then forced. */
            if (env.contains(t.label.to_ap) && !env.contains(t.label.from_ap)) {
                Symbol in = env.without(t.label.to_ap).with(t.label.from_ap);
                out.push_back(EnvStep{id_of(t.to, dfa_.step(s, in)), t.weight, in, tid});
            }
            break;
        case EditKind::Delete:
            break; // emits nothing; handled as an internal move
        case EditKind::Concrete:
            if (t.label.out && *t.label.out == env) {
                uint32_t s2 = t.label.in ? dfa_.step(s, *t.label.in) : s;
                out.push_back(EnvStep{id_of(t.to, s2), t.weight, t.label.in, tid});
            }
            break;
        }
    }
}

HeuristicTable heuristic_table(const RelaxedAutomaton& a, DminMode mode, double lambda) {
    const uint32_t n = a.num_states();
    using Rev = std::vector<std::vector<std::pair<uint32_t, double>>>;

    /* Remaining distance counts reads of at most one proposition: a combined
       symbol like {a,b} discharges several obligations in one transition, but
       environments reveal goals one location at a time, and pricing each
       outstanding obligation separately is what makes the estimate steer.
       States that provably need richer symbols fall back to the unrestricted
       skeleton, so an infinite entry still means "cannot reach acceptance". */
    Rev restricted(n + 1);
    {
        std::vector<Symbol> reads = {Symbol{}};
        for (ApId p : a.alphabet().aps())
            reads.push_back(Symbol::single(p));
        std::vector<EnvStep> buf;
        for (uint32_t q = 0; q < n; ++q) {
            for (Symbol sigma : reads) {
                buf.clear();
                a.env_steps(q, sigma, buf);
                for (const EnvStep& e : buf)
                    restricted[e.to].emplace_back(q, e.weight);
            }
            for (const EpsStep& e : a.eps_steps(q))
                restricted[e.to].emplace_back(q, e.weight);
        }
    }
    Rev full(n + 1);
    for (const SummaryEdge& e : a.summary())
        full[e.to].emplace_back(e.from, e.weight);

    auto solve = [&](const Rev& rev) {
        std::vector<double> d(n + 1, kInf);
        d[n] = 0.0;
        if (mode == DminMode::Hops) {
            // The links behind accepting states are free: seed those at zero too.
            std::queue<uint32_t> bfs;
            bfs.push(n);
            for (uint32_t q = 0; q < n; ++q)
                if (a.accepting(q)) {
                    d[q] = 0.0;
                    bfs.push(q);
                }
            while (!bfs.empty()) {
                uint32_t q = bfs.front();
                bfs.pop();
                for (auto [p, w] : rev[q])
                    if (d[p] == kInf) {
                        d[p] = d[q] + 1.0;
                        bfs.push(p);
                    }
            }
        } else {
            using Item = std::pair<double, uint32_t>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            pq.emplace(0.0, n);
            for (uint32_t q = 0; q < n; ++q)
                if (a.accepting(q)) {
                    d[q] = 0.0;
                    pq.emplace(0.0, q);
                }
            while (!pq.empty()) {
                auto [c, q] = pq.top();
                pq.pop();
                if (c > d[q])
                    continue;
                for (auto [p, w] : rev[q]) {
                    double nd = c + lambda * w;
                    if (nd < d[p]) {
                        d[p] = nd;
                        pq.emplace(nd, p);
                    }
                }
            }
        }
        return d;
    };

    HeuristicTable table;
    table.mode = mode;
    table.dmin = solve(restricted);
    const std::vector<double> unrestricted = solve(full);
    for (uint32_t q = 0; q <= n; ++q)
        if (table.dmin[q] == kInf)
            table.dmin[q] = unrestricted[q];
    return table;
}

std::vector<std::pair<std::vector<Symbol>, double>>
accepted_env_words(const RelaxedAutomaton& a, size_t max_len) {
    std::vector<ApId> aps = a.alphabet().aps();
    if (aps.size() > 12)
        throw CapacityError("environment-word enumeration over " +
                            std::to_string(aps.size()) + " propositions");
    std::vector<Symbol> alphabet;
    alphabet.reserve(size_t{1} << aps.size());
    for (uint64_t m = 0; m < (uint64_t{1} << aps.size()); ++m) {
        Symbol s;
        for (size_t i = 0; i < aps.size(); ++i)
            if ((m >> i) & 1)
                s = s.with(aps[i]);
        alphabet.push_back(s);
    }
    std::sort(alphabet.begin(), alphabet.end());

    const uint32_t n = a.num_states();
    std::vector<std::pair<std::vector<Symbol>, double>> out;
    std::vector<Symbol> word;
    std::vector<EnvStep> buf;

    auto eps_close = [&](std::vector<double>& d) {
        using Item = std::pair<double, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (uint32_t q = 0; q < n; ++q)
            if (d[q] < kInf)
                pq.emplace(d[q], q);
        while (!pq.empty()) {
            auto [c, q] = pq.top();
            pq.pop();
            if (c > d[q])
                continue;
            for (const EpsStep& e : a.eps_steps(q))
                if (c + e.weight < d[e.to]) {
                    d[e.to] = c + e.weight;
                    pq.emplace(d[e.to], e.to);
                }
        }
    };

    auto rec = [&](auto&& self, const std::vector<double>& frontier) -> void {
        double best = kInf;
        for (uint32_t q = 0; q < n; ++q)
            if (a.accepting(q))
                best = std::min(best, frontier[q]);
        if (best < kInf) {
            if (out.size() >= 5'000'000)
                throw CapacityError("environment-word enumeration emitted too many words");
            out.emplace_back(word, best);
        }
        if (word.size() == max_len)
            return;
        for (Symbol sigma : alphabet) {
            std::vector<double> next(n, kInf);
            bool any = false;
            for (uint32_t q = 0; q < n; ++q) {
                if (frontier[q] == kInf)
                    continue;
                buf.clear();
                a.env_steps(q, sigma, buf);
                for (const EnvStep& e : buf) {
                    any = true;
                    next[e.to] = std::min(next[e.to], frontier[q] + e.weight);
                }
            }
            if (!any)
                continue;
            eps_close(next);
            word.push_back(sigma);
            self(self, next);
            word.pop_back();
        }
    };

    std::vector<double> init(n, kInf);
    init[a.initial()] = 0.0;
    eps_close(init);
    rec(rec, init);

    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.first.size() != y.first.size())
            return x.first.size() < y.first.size();
        for (size_t i = 0; i < x.first.size(); ++i)
            if (x.first[i].bits() != y.first[i].bits())
                return x.first[i].bits() < y.first[i].bits();
        return false;
    });
    return out;
}

void dump(const RelaxedAutomaton& a, const ApInterner& aps, std::ostream& out) {
    out << "product: " << a.num_states() << " states (+1 virtual final), initial q"
        << a.initial() << "\n";
    for (uint32_t q = 0; q < a.num_states(); ++q) {
        auto [z, s] = a.parts(q);
        out << "  q" << q << " = (z" << z << ", s" << s << ")  obligation: "
            << a.dfa().states[s].obligation << (a.accepting(q) ? "  [accepting]" : "") << "\n";
        for (const EpsStep& e : a.eps_steps(q))
            out << "    --drop " << aps.format(e.task_in) << " w=" << e.weight << "--> q"
                << e.to << "\n";
    }
    out << "summary edges (min weight over concrete moves):\n";
    for (const SummaryEdge& e : a.summary())
        out << "  q" << e.from << " -> q" << e.to << "  w=" << e.weight << "\n";
}

} // namespace rplan
