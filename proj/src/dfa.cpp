#include "rplan/dfa.hpp"

#include <algorithm>
#include <unordered_map>
#include <utility>

#include "rplan/errors.hpp"

namespace rplan {

namespace {

/* One progression step: the residual obligation after reading sigma.
   Only the membership of sigma's propositions in the node's own atom set
   matters, so enumerating a state's care set covers the whole alphabet.
   'memo' is valid for a single sigma; obligations share subtrees heavily,
   so caching keeps one step linear in the obligation's node count. */
Formula progress(FormulaStore& st, Formula g, Symbol sigma,
                 std::unordered_map<Formula, Formula>& memo) {
    if (auto it = memo.find(g); it != memo.end())
        return it->second;
    const FormulaNode n = st.node(g); // copy: recursive calls may grow the store
    Formula out = g;
    switch (n.op) {
    case Op::True:
    case Op::False:
        out = g;
        break;
    case Op::Atom:
        out = sigma.contains(n.ap) ? st.tru() : st.fls();
        break;
    case Op::NotAtom:
        out = sigma.contains(n.ap) ? st.fls() : st.tru();
        break;
    case Op::And: {
        std::vector<Formula> cs;
        cs.reserve(n.children.size());
        for (Formula c : n.children)
            cs.push_back(progress(st, c, sigma, memo));
        out = st.conj(std::move(cs));
        break;
    }
    case Op::Or: {
        std::vector<Formula> cs;
        cs.reserve(n.children.size());
        for (Formula c : n.children)
            cs.push_back(progress(st, c, sigma, memo));
        out = st.disj(std::move(cs));
        break;
    }
    case Op::Next:
        /* The operand starts at the following position; "F true" records
           that such a position must exist even if the operand would hold
           on an empty continuation. */
        out = st.conj({n.children[0], st.eventually(st.tru())});
        break;
    case Op::Eventually:
        out = st.disj({progress(st, n.children[0], sigma, memo), g});
        break;
    case Op::Until:
        out = st.disj({progress(st, n.children[1], sigma, memo),
                       st.conj({progress(st, n.children[0], sigma, memo), g})});
        break;
    }
    memo.emplace(g, out);
    return out;
}

/* Reduced ordered BDD over opaque leaves.  Each literal and each temporal
   node is its own variable: over finite words 'a' and '!a' are independent
   strong constraints (both demand a first letter), so no complementation.
   Progression never invents leaves outside the original formula's closure,
   which keeps the variable universe — and hence the state space — finite. */
class SkeletonBdd {
public:
    static constexpr uint32_t kFalse = 0;
    static constexpr uint32_t kTrue = 1;

    SkeletonBdd() : nodes_{{UINT32_MAX, 0, 0}, {UINT32_MAX, 1, 1}} {}

    uint32_t leaf(uint32_t var) { return mk(var, kFalse, kTrue); }
    uint32_t conj(uint32_t a, uint32_t b) { return apply(true, a, b); }
    uint32_t disj(uint32_t a, uint32_t b) { return apply(false, a, b); }

private:
    struct Node {
        uint32_t var, lo, hi;
    };

    uint32_t mk(uint32_t var, uint32_t lo, uint32_t hi) {
        if (lo == hi)
            return lo;
        const uint64_t key = (uint64_t{lo} << 32) | hi;
        for (uint32_t id : unique_[key])
            if (nodes_[id].var == var)
                return id;
        auto id = static_cast<uint32_t>(nodes_.size());
        nodes_.push_back(Node{var, lo, hi});
        unique_[key].push_back(id);
        return id;
    }

    uint32_t apply(bool is_and, uint32_t a, uint32_t b) {
        if (a == b)
            return a;
        if (a > b)
            std::swap(a, b);
        if (is_and) {
            if (a == kFalse)
                return kFalse;
            if (a == kTrue)
                return b;
        } else {
            if (a == kFalse)
                return b;
            if (a == kTrue)
                return kTrue;
        }
        auto& memo = is_and ? and_memo_ : or_memo_;
        const uint64_t key = (uint64_t{a} << 32) | b;
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        const Node na = nodes_[a];
        const Node nb = nodes_[b];
        const uint32_t var = std::min(na.var, nb.var);
        const uint32_t alo = na.var == var ? na.lo : a;
        const uint32_t ahi = na.var == var ? na.hi : a;
        const uint32_t blo = nb.var == var ? nb.lo : b;
        const uint32_t bhi = nb.var == var ? nb.hi : b;
        const uint32_t lo = apply(is_and, alo, blo);
        const uint32_t hi = apply(is_and, ahi, bhi);
        const uint32_t out = mk(var, lo, hi);
        memo.emplace(key, out);
        return out;
    }

    std::vector<Node> nodes_;
    std::unordered_map<uint64_t, std::vector<uint32_t>> unique_;
    std::unordered_map<uint64_t, uint32_t> and_memo_, or_memo_;
};

} // namespace

SpecDfa compile(FormulaStore& store, Formula f, const CompileOptions& opt) {
    SpecDfa dfa;
    dfa.alphabet = store.node(f).atoms;
    dfa.initial = 0;

    /* States are memoized by the canonical form of the obligation's
       propositional skeleton, so syntactically different residuals of the
       same task share one state and the expansion always terminates. */
    SkeletonBdd bdd;
    std::unordered_map<Formula, uint32_t> skeleton;
    auto canon = [&](auto&& self, Formula g) -> uint32_t {
        if (auto it = skeleton.find(g); it != skeleton.end())
            return it->second;
        const FormulaNode& n = store.node(g);
        uint32_t out;
        switch (n.op) {
        case Op::True:
            out = SkeletonBdd::kTrue;
            break;
        case Op::False:
            out = SkeletonBdd::kFalse;
            break;
        case Op::And: {
            out = SkeletonBdd::kTrue;
            for (Formula c : n.children)
                out = bdd.conj(out, self(self, c));
            break;
        }
        case Op::Or: {
            out = SkeletonBdd::kFalse;
            for (Formula c : n.children)
                out = bdd.disj(out, self(self, c));
            break;
        }
        default:
            out = bdd.leaf(g);
            break;
        }
        skeleton.emplace(g, out);
        return out;
    };

    std::unordered_map<uint32_t, uint32_t> index; // canonical form -> state
    std::vector<Formula> obligations;
    auto state_of = [&](Formula g) {
        const uint32_t key = canon(canon, g);
        auto it = index.find(key);
        if (it != index.end())
            return it->second;
        if (obligations.size() >= opt.state_cap)
            throw CapacityError("automaton exceeds state cap of " +
                                std::to_string(opt.state_cap));
        auto id = static_cast<uint32_t>(obligations.size());
        index.emplace(key, id);
        obligations.push_back(g);
        return id;
    };

    state_of(f);
    std::unordered_map<Formula, Formula> step;
    for (uint32_t s = 0; s < obligations.size(); ++s) {
        Formula g = obligations[s];
        std::vector<ApId> care = store.node(g).atoms.aps();
        if (static_cast<int>(care.size()) > opt.care_cap)
            throw CapacityError("automaton state inspects " + std::to_string(care.size()) +
                                " propositions (cap " + std::to_string(opt.care_cap) + ")");
        std::vector<uint32_t> succ(size_t{1} << care.size());
        for (uint32_t v = 0; v < succ.size(); ++v) {
            Symbol sigma;
            for (size_t i = 0; i < care.size(); ++i)
                if ((v >> i) & 1)
                    sigma = sigma.with(care[i]);
            step.clear();
            succ[v] = state_of(progress(store, g, sigma, step));
        }
        dfa.states.push_back(DfaState{std::move(care), std::move(succ),
                                      store.empty_sat(g), print_formula(store, g)});
    }
    return dfa;
}

} // namespace rplan
