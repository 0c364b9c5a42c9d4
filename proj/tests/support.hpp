#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rplan/formula.hpp"
#include "rplan/ts.hpp"
#include "rplan/wfse.hpp"

namespace testsup {

using namespace rplan;

// Unbiased draw from [0, n); keeps seeded runs identical everywhere.
inline uint64_t draw(std::mt19937_64& rng, uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

/* Random co-safe formula over the given propositions, biased toward
   reach-style shapes so a fair share of sampled tasks is satisfiable. */
inline Formula random_formula(FormulaStore& st, std::mt19937_64& rng,
                              std::span<const ApId> aps, int depth) {
    const uint64_t pick = draw(rng, depth <= 0 ? 3 : 10);
    switch (pick) {
    case 0: return st.atom(aps[draw(rng, aps.size())]);
    case 1: return st.natom(aps[draw(rng, aps.size())]);
    case 2: return st.tru();
    case 3:
    case 4:
        return st.conj({random_formula(st, rng, aps, depth - 1),
                        random_formula(st, rng, aps, depth - 1)});
    case 5:
        return st.disj({random_formula(st, rng, aps, depth - 1),
                        random_formula(st, rng, aps, depth - 1)});
    case 6: return st.next(random_formula(st, rng, aps, depth - 1));
    case 7:
    case 8: return st.eventually(random_formula(st, rng, aps, depth - 1));
    default:
        return st.until(random_formula(st, rng, aps, depth - 1),
                        random_formula(st, rng, aps, depth - 1));
    }
}

inline std::vector<Symbol> subsets(std::span<const ApId> aps) {
    std::vector<Symbol> sigma;
    sigma.reserve(size_t{1} << aps.size());
    for (uint64_t m = 0; m < (uint64_t{1} << aps.size()); ++m) {
        Symbol s{};
        for (size_t i = 0; i < aps.size(); ++i)
            if (m & (uint64_t{1} << i)) s = s.with(aps[i]);
        sigma.push_back(s);
    }
    return sigma;
}

inline std::vector<Symbol> random_word(std::mt19937_64& rng, std::span<const ApId> aps,
                                       size_t len) {
    std::vector<Symbol> w(len);
    for (Symbol& s : w) {
        Symbol sym{};
        for (ApId a : aps)
            if (draw(rng, 2)) sym = sym.with(a);
        s = sym;
    }
    return w;
}

// Every word over 'sigma' of length 0..max_len, shortest first.
template <class Fn>
inline void for_each_word(std::span<const Symbol> sigma, size_t max_len, Fn&& fn) {
    std::vector<Symbol> word;
    for (size_t len = 0; len <= max_len; ++len) {
        word.assign(len, sigma[0]);
        std::vector<size_t> idx(len, 0);
        while (true) {
            fn(std::span<const Symbol>(word));
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
}

/* Up to max_rules random substitution/deletion preferences: sources drawn
   from 'from', substitution targets from 'to', integer penalties 1..9. */
inline std::vector<PreferenceRule> random_rules(std::mt19937_64& rng,
                                                std::span<const std::string> from,
                                                std::span<const std::string> to,
                                                size_t max_rules) {
    std::vector<PreferenceRule> rules;
    const size_t n = draw(rng, max_rules + 1);
    for (size_t i = 0; i < n; ++i) {
        PreferenceRule r;
        r.from = from[draw(rng, from.size())];
        r.penalty = double(1 + draw(rng, 9));
        if (draw(rng, 2) == 0) {
            r.kind = PreferenceRule::Kind::Delete;
        } else {
            r.kind = PreferenceRule::Kind::Substitute;
            r.to = to[draw(rng, to.size())];
            if (r.to == r.from) r.kind = PreferenceRule::Kind::Delete;
        }
        rules.push_back(std::move(r));
    }
    return rules;
}

} // namespace testsup
