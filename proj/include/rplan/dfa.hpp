#pragma once

#include <span>
#include <string>
#include <vector>

#include "rplan/formula.hpp"

namespace rplan {

struct CompileOptions {
    size_t state_cap = 1'000'000; // distinct obligations before CapacityError
    int care_cap = 20;            // propositions one state may inspect
};

/* Deterministic automaton over finite words, compiled from a formula by
   progression: each state is a canonical residual obligation, and a state
   accepts iff its obligation already holds on the empty continuation.

   A state only branches on the propositions occurring in its own obligation
   (its care set); a full symbol is projected onto that set when stepping, so
   the alphabet is never expanded to all label sets. */
struct DfaState {
    std::vector<ApId> care;     // ascending proposition ids inspected here
    std::vector<uint32_t> succ; // size 2^|care|, indexed by projected symbol
    bool accepting = false;
    std::string obligation;     // rendered residual formula (for dumps/tests)
};

struct SpecDfa {
    std::vector<DfaState> states;
    uint32_t initial = 0;
    Symbol alphabet; // propositions of the source formula

    [[nodiscard]] uint32_t step(uint32_t s, Symbol sym) const {
        const DfaState& st = states[s];
        uint32_t idx = 0;
        for (size_t i = 0; i < st.care.size(); ++i)
            idx |= static_cast<uint32_t>(sym.contains(st.care[i])) << i;
        return st.succ[idx];
    }

    [[nodiscard]] bool accepts(std::span<const Symbol> word) const {
        uint32_t s = initial;
        for (Symbol sym : word)
            s = step(s, sym);
        return states[s].accepting;
    }

    [[nodiscard]] size_t num_states() const { return states.size(); }
};

// Compiles f (already in negation normal form by construction).
SpecDfa compile(FormulaStore& store, Formula f, const CompileOptions& opt = {});

} // namespace rplan
