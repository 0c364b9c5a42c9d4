#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rplan/dfa.hpp"
#include "rplan/wfse.hpp"

namespace rplan {

struct ProductOptions {
    size_t state_cap = 1'000'000;
};

/* One move of the relaxed specification automaton while the environment
   emits 'env' (the label observed at the state being entered): the task-side
   track reads 'task_in' (nullopt when the symbol was an unasked-for extra). */
struct EnvStep {
    uint32_t to = 0;
    double weight = 0.0;              // transducer weight, unscaled
    std::optional<Symbol> task_in;
    uint32_t es_tid = 0;              // transducer transition id
};

/* An internal move: a task symbol is consumed and dropped, the environment
   emits nothing, the agent does not move. */
struct EpsStep {
    uint32_t to = 0;
    double weight = 0.0;
    Symbol task_in;
    uint32_t es_tid = 0;
};

// (from, to, min weight) over all concrete moves between two product states;
// the skeleton used for distance-to-acceptance computations and dumps.
struct SummaryEdge {
    uint32_t from = 0;
    uint32_t to = 0;
    double weight = 0.0;
};

/* Product of an edit transducer and a task automaton: states are reachable
   (transducer state, automaton state) pairs; moves pair an edit with the
   automaton reading the edit's task-side symbol.  Transitions stay symbolic:
   env_steps() matches a concrete environment symbol on demand, so nothing
   is ever enumerated over the full label-set alphabet.

   A virtual final state (id == num_states()) sits behind every accepting
   state at zero weight; it only exists for distance computations. */
class RelaxedAutomaton {
public:
    [[nodiscard]] uint32_t num_states() const { return static_cast<uint32_t>(states_.size()); }
    [[nodiscard]] uint32_t initial() const { return initial_; }
    [[nodiscard]] uint32_t virtual_final() const { return num_states(); }
    [[nodiscard]] bool accepting(uint32_t q) const { return accepting_[q] != 0; }
    [[nodiscard]] std::pair<uint32_t, uint32_t> parts(uint32_t q) const { return states_[q]; }

    // All internal (nothing-emitted) moves out of q.
    [[nodiscard]] const std::vector<EpsStep>& eps_steps(uint32_t q) const { return eps_[q]; }

    // All moves out of q that consume environment symbol 'env'; appends to out.
    void env_steps(uint32_t q, Symbol env, std::vector<EnvStep>& out) const;

    [[nodiscard]] const std::vector<SummaryEdge>& summary() const { return summary_; }
    [[nodiscard]] const EditSystem& es() const { return es_; }
    [[nodiscard]] const SpecDfa& dfa() const { return dfa_; }
    [[nodiscard]] Symbol alphabet() const { return dfa_.alphabet.unite(es_.aps); }

private:
    friend RelaxedAutomaton build_product(EditSystem es, SpecDfa dfa, const ProductOptions&);

    EditSystem es_;
    SpecDfa dfa_;
    std::unordered_map<uint64_t, uint32_t> index_;      // (z, s) -> state id
    std::vector<std::pair<uint32_t, uint32_t>> states_; // (z, s)
    std::vector<char> accepting_;
    std::vector<std::vector<EpsStep>> eps_;
    std::vector<SummaryEdge> summary_;
    uint32_t initial_ = 0;
};

/* Materializes the reachable product.  CapacityError past opt.state_cap;
   EpsCycleError if a cycle of zero-weight internal moves exists (such a
   system could drop unboundedly many task symbols for free). */
RelaxedAutomaton build_product(EditSystem es, SpecDfa dfa, const ProductOptions& opt = {});

enum class DminMode { Hops, Weighted };

/* Remaining distance from each product state (last entry: virtual final) to
   acceptance: transition count (Hops, default) or summed lambda-scaled
   transducer weight (Weighted).  Unreachable states get +inf. */
struct HeuristicTable {
    std::vector<double> dmin;
    DminMode mode = DminMode::Hops;
};

HeuristicTable heuristic_table(const RelaxedAutomaton& a, DminMode mode = DminMode::Hops,
                               double lambda = 1.0);

/* Every environment word up to max_len over the product's own propositions,
   with the cheapest accepting-run weight.  Sorted by length, then by the
   symbols' bit patterns.  Exhaustive — test-scale inputs only. */
std::vector<std::pair<std::vector<Symbol>, double>>
accepted_env_words(const RelaxedAutomaton& a, size_t max_len);

// Human-readable listing of states and summary transitions (not a stable format).
void dump(const RelaxedAutomaton& a, const ApInterner& aps, std::ostream& out);

} // namespace rplan
