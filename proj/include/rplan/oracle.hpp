#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rplan/dfa.hpp"
#include "rplan/formula.hpp"
#include "rplan/ts.hpp"
#include "rplan/wfse.hpp"

namespace rplan {

/* Cost of the cheapest accepted run, found the slow way: the full
   (graph state, transducer state, automaton state) space is materialized and
   searched cheapest-first, matching every transducer transition against
   every concrete symbol by its forward definition.  Deliberately shares no
   machinery with the implicit product or the planner; used as a reference
   result.  nullopt: no accepted run exists.  Throws CapacityError when the
   symbol universe or the reached state count gets out of hand. */
std::optional<double> explicit_optimum(const TransitionSystem& ts, const EditSystem& es,
                                       const SpecDfa& dfa, double lambda,
                                       size_t state_cap = 2'000'000);

/* Every environment word over subsets of 'aps' up to max_len, paired with
   the cheapest unscaled edit weight over transducer runs whose input word
   satisfies the formula.  Brute force against evaluate(): words are
   enumerated outright, runs are replayed transition by transition, at most
   insert_slack symbols may be dropped per word.  Sorted by length, then by
   the symbol bit patterns. */
std::vector<std::pair<std::vector<Symbol>, double>>
enumerate_relaxations(FormulaStore& store, Formula f, const EditSystem& es, Symbol aps,
                      size_t max_len, size_t insert_slack = 8);

} // namespace rplan
