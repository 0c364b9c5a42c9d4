#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rplan/ap.hpp"

namespace rplan {

/* Task formulas over finite words.

   Grammar (surface syntax):  f := 'true' | ap | '!' f | f '&&' f | f '||' f
                                 | 'X' f | 'F' f | f 'U' f | '(' f ')'
   Binding, tightest first:  ! X F  >  U (right-assoc)  >  &&  >  ||.

   Negation is pushed to the atoms at construction time; a negation that
   lands on X/F/U raises CoSafetyError.  Stored formulas are therefore in
   negation normal form with n-ary, sorted, deduplicated And/Or nodes, and
   structurally identical formulas share one node id (hash-consing), so
   equality of ids is equality of canonical forms. */

enum class Op : uint8_t {
    True,
    False, // arises from normalization ("!true") and progression
    Atom,
    NotAtom,
    Next,
    Eventually,
    Until,
    And,
    Or,
};

using Formula = uint32_t; // node id within a FormulaStore

struct FormulaNode {
    Op op;
    ApId ap = 0;                    // Atom / NotAtom
    std::vector<Formula> children;  // And/Or: >= 2, sorted; Until: {lhs, rhs}
    Symbol atoms;                   // propositions occurring in the subtree
};

class FormulaStore {
public:
    explicit FormulaStore(ApInterner& aps) : aps_(aps) {}

    Formula tru();
    Formula fls();
    Formula atom(ApId a);
    Formula natom(ApId a);
    Formula next(Formula f);
    Formula eventually(Formula f);
    Formula until(Formula f, Formula g);
    Formula conj(std::vector<Formula> cs);
    Formula disj(std::vector<Formula> cs);

    // Structural negation; CoSafetyError if it reaches a temporal operator.
    Formula negate(Formula f);

    [[nodiscard]] const FormulaNode& node(Formula f) const { return nodes_[f]; }
    [[nodiscard]] size_t size() const { return nodes_.size(); }
    [[nodiscard]] ApInterner& aps() { return aps_; }
    [[nodiscard]] const ApInterner& aps() const { return aps_; }

    /* True iff f holds on the empty word: temporal subterms count as false
       and the remaining propositional skeleton must be a tautology. */
    bool empty_sat(Formula f);

private:
    Formula mk(Op op, ApId ap, std::vector<Formula> cs);
    bool structural_less(Formula a, Formula b) const;
    friend struct FormulaKeyOps;

    ApInterner& aps_;
    std::vector<FormulaNode> nodes_;
    std::unordered_map<uint64_t, std::vector<Formula>> buckets_; // hash -> candidate ids
    std::vector<int8_t> esat_; // memo for empty_sat, -1 = unknown
};

// Parses surface syntax, interning propositions.  SyntaxError / CoSafetyError.
Formula parse_formula(FormulaStore& store, std::string_view text);

// Minimal-parentheses rendering; parse(print(f)) reproduces f in the same store.
std::string print_formula(const FormulaStore& store, Formula f);

/* Reference semantics on a finite word (sequence of label sets):
     ap      at i  iff i < |w| and ap in w[i]
     !ap     at i  iff i < |w| and ap not in w[i]
     X f     at i  iff i+1 < |w| and f at i+1
     f U g   at i  iff exists j in [i,|w|): g at j and f at all of [i,j)
     F f     == true U f
   The empty word satisfies exactly the propositional tautologies (empty_sat).
   This evaluator is deliberately direct — it is the yardstick the compiled
   automata are tested against. */
bool evaluate(FormulaStore& store, Formula f, std::span<const Symbol> word);

} // namespace rplan
