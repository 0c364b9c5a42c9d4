#include "rplan/oracle.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>

#include "rplan/errors.hpp"

namespace rplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Forward reading of one transducer transition against concrete tracks.
bool edge_matches(const EditTransition& t, const std::optional<Symbol>& in,
                  const std::optional<Symbol>& out) {
    const EditLabel& el = t.label;
    switch (el.kind) {
    case EditKind::PassThrough:
        return in && out && *in == *out;
    case EditKind::Substitute:
        return in && out && in->contains(el.from_ap) &&
               *out == in->without(el.from_ap).with(el.to_ap);
    case EditKind::Delete:
        if (!in || out) return false;
        return el.member_delete ? in->contains(el.from_ap) : *in == Symbol::single(el.from_ap);
    case EditKind::Concrete:
        return el.in == in && el.out == out;
    }
    return false;
}

std::vector<Symbol> all_symbols(Symbol aps, size_t ap_cap) {
    const auto ids = aps.aps();
    if (ids.size() > ap_cap)
        throw CapacityError("too many propositions for exhaustive enumeration: " +
                            std::to_string(ids.size()));
    std::vector<Symbol> sigma;
    sigma.reserve(size_t{1} << ids.size());
    for (uint64_t m = 0; m < (uint64_t{1} << ids.size()); ++m) {
        Symbol s{};
        for (size_t i = 0; i < ids.size(); ++i)
            if (m & (uint64_t{1} << i)) s = s.with(ids[i]);
        sigma.push_back(s);
    }
    std::sort(sigma.begin(), sigma.end());
    return sigma;
}

} // namespace

std::optional<double> explicit_optimum(const TransitionSystem& ts, const EditSystem& es,
                                       const SpecDfa& dfa, double lambda, size_t state_cap) {
    Symbol universe = dfa.alphabet.unite(es.aps);
    for (uint32_t x = 0; x < ts.num_states(); ++x) universe = universe.unite(ts.label(x));
    const std::vector<Symbol> sigma = all_symbols(universe, 12);

    const uint64_t Z = es.num_states;
    const uint64_t S = dfa.states.size();
    // Key: bit 63 set = initial label not yet read (graph state is implicitly
    // the initial one); otherwise ((x * Z) + z) * S + s.
    constexpr uint64_t kPre = uint64_t{1} << 63;
    auto pre_key = [&](uint32_t z, uint32_t s) { return kPre | (uint64_t{z} * S + s); };
    auto full_key = [&](uint32_t x, uint32_t z, uint32_t s) {
        return (uint64_t{x} * Z + z) * S + s;
    };

    std::unordered_map<uint64_t, double> dist;
    using Item = std::pair<double, uint64_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    auto relax = [&](uint64_t key, double g) {
        auto [it, fresh] = dist.try_emplace(key, g);
        if (!fresh) {
            if (it->second <= g) return;
            it->second = g;
        } else if (dist.size() > state_cap) {
            throw CapacityError("reference search exceeded " + std::to_string(state_cap) +
                                " states");
        }
        pq.push({g, key});
    };

    relax(pre_key(es.initial, dfa.initial), 0.0);
    while (!pq.empty()) {
        auto [g, key] = pq.top();
        pq.pop();
        if (g > dist.at(key)) continue; // superseded entry
        const bool pre = (key & kPre) != 0;
        uint64_t rest = key & ~kPre;
        const uint32_t s = static_cast<uint32_t>(rest % S);
        rest /= S;
        const uint32_t z = static_cast<uint32_t>(rest % Z);
        const uint32_t x = pre ? ts.initial() : static_cast<uint32_t>(rest / Z);
        if (!pre && es.accepting[z] && dfa.states[s].accepting) return g;

        // Dropped symbols: transducer moves, agent and word stay put.
        for (uint32_t tid : es.out[z]) {
            const EditTransition& t = es.transitions[tid];
            for (Symbol in : sigma) {
                if (!edge_matches(t, in, std::nullopt)) continue;
                const uint64_t key2 = pre ? pre_key(t.to, dfa.step(s, in))
                                          : full_key(x, t.to, dfa.step(s, in));
                relax(key2, g + lambda * t.weight);
            }
        }
        // Reading a label: from the pre layer the initial state's own, else
        // the label of each successor state (self-loops included).
        auto consume = [&](uint32_t x2, double w_move) {
            const Symbol out = ts.label(x2);
            for (uint32_t tid : es.out[z]) {
                const EditTransition& t = es.transitions[tid];
                for (Symbol in : sigma)
                    if (edge_matches(t, in, out))
                        relax(full_key(x2, t.to, dfa.step(s, in)),
                              g + (w_move + lambda * t.weight));
                if (edge_matches(t, std::nullopt, out))
                    relax(full_key(x2, t.to, s), g + (w_move + lambda * t.weight));
            }
        };
        if (pre) {
            consume(x, 0.0);
        } else {
            for (const TsEdge& e : ts.out(x)) consume(e.dst, e.weight);
        }
    }
    return std::nullopt;
}

std::vector<std::pair<std::vector<Symbol>, double>>
enumerate_relaxations(FormulaStore& store, Formula f, const EditSystem& es, Symbol aps,
                      size_t max_len, size_t insert_slack) {
    const std::vector<Symbol> sigma = all_symbols(aps, 12);
    std::vector<std::pair<std::vector<Symbol>, double>> result;

    std::vector<Symbol> word, task;
    double best = kInf;

    // Replays runs over the fixed environment word: i symbols produced so
    // far, transducer at z, 'used' symbols dropped, weight w accumulated.
    auto dfs = [&](auto&& self, size_t i, uint32_t z, size_t used, double w) -> void {
        if (w >= best) return; // weights are nonnegative: cannot improve
        if (i == word.size() && es.accepting[z] &&
            evaluate(store, f, std::span<const Symbol>(task)))
            best = w;
        if (i < word.size()) {
            const Symbol out = word[i];
            for (uint32_t tid : es.out[z]) {
                const EditTransition& t = es.transitions[tid];
                for (Symbol in : sigma) {
                    if (!edge_matches(t, in, out)) continue;
                    task.push_back(in);
                    self(self, i + 1, t.to, used, w + t.weight);
                    task.pop_back();
                }
                if (edge_matches(t, std::nullopt, out))
                    self(self, i + 1, t.to, used, w + t.weight);
            }
        }
        if (used < insert_slack) {
            for (uint32_t tid : es.out[z]) {
                const EditTransition& t = es.transitions[tid];
                for (Symbol in : sigma) {
                    if (!edge_matches(t, in, std::nullopt)) continue;
                    task.push_back(in);
                    self(self, i, t.to, used + 1, w + t.weight);
                    task.pop_back();
                }
            }
        }
    };

    // Odometer over environment words, shortest first.
    auto run_word = [&]() {
        best = kInf;
        task.clear();
        dfs(dfs, 0, es.initial, 0, 0.0);
        if (best < kInf) result.emplace_back(word, best);
    };
    for (size_t len = 0; len <= max_len; ++len) {
        word.assign(len, sigma.front());
        std::vector<size_t> idx(len, 0);
        while (true) {
            run_word();
            size_t p = len;
            while (p > 0 && ++idx[p - 1] == sigma.size()) {
                idx[p - 1] = 0;
                word[p - 1] = sigma[0];
                --p;
            }
            if (p == 0) break;
            word[p - 1] = sigma[idx[p - 1]];
        }
    }

    std::sort(result.begin(), result.end(), [](const auto& x, const auto& y) {
        if (x.first.size() != y.first.size()) return x.first.size() < y.first.size();
        for (size_t i = 0; i < x.first.size(); ++i)
            if (x.first[i].bits() != y.first[i].bits()) return x.first[i].bits() < y.first[i].bits();
        return false;
    });
    return result;
}

} // namespace rplan
