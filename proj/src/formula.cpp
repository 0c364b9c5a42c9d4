#include "rplan/formula.hpp"

#include <algorithm>
#include <cctype>

#include "rplan/errors.hpp"

namespace rplan {

// ---------------------------------------------------------------------------
// store

Formula FormulaStore::mk(Op op, ApId ap, std::vector<Formula> cs) {
    uint64_t h = mix64((uint64_t(op) << 32) ^ ap);
    for (Formula c : cs)
        h = mix64(h ^ c);
    std::vector<Formula>& bucket = buckets_[h];
    for (Formula cand : bucket) {
        const FormulaNode& n = nodes_[cand];
        if (n.op == op && n.ap == ap && n.children == cs)
            return cand;
    }
    Symbol atoms;
    if (op == Op::Atom || op == Op::NotAtom)
        atoms = Symbol::single(ap);
    else
        for (Formula c : cs)
            atoms = atoms.unite(nodes_[c].atoms);
    Formula id = static_cast<Formula>(nodes_.size());
    nodes_.push_back(FormulaNode{op, ap, std::move(cs), atoms});
    bucket.push_back(id);
    return id;
}

Formula FormulaStore::tru() { return mk(Op::True, 0, {}); }
Formula FormulaStore::fls() { return mk(Op::False, 0, {}); }
Formula FormulaStore::atom(ApId a) { return mk(Op::Atom, a, {}); }
Formula FormulaStore::natom(ApId a) { return mk(Op::NotAtom, a, {}); }

Formula FormulaStore::next(Formula f) {
    if (nodes_[f].op == Op::False)
        return f; // no next position can satisfy falsity
    return mk(Op::Next, 0, {f});
}

Formula FormulaStore::eventually(Formula f) {
    switch (nodes_[f].op) {
    case Op::False:
        return f;
    case Op::Eventually: // F F g == F g
        return f;
    default:
        return mk(Op::Eventually, 0, {f});
    }
}

Formula FormulaStore::until(Formula f, Formula g) {
    if (nodes_[g].op == Op::False)
        return fls();
    if (nodes_[g].op == Op::True) // f U true == "some position exists"
        return eventually(tru());
    if (nodes_[f].op == Op::True)
        return eventually(g);
    return mk(Op::Until, 0, {f, g});
}

bool FormulaStore::structural_less(Formula a, Formula b) const {
    if (a == b)
        return false;
    const FormulaNode& na = nodes_[a];
    const FormulaNode& nb = nodes_[b];
    if (na.op != nb.op)
        return na.op < nb.op;
    if (na.op == Op::Atom || na.op == Op::NotAtom)
        return na.ap < nb.ap;
    if (na.children.size() != nb.children.size())
        return na.children.size() < nb.children.size();
    for (size_t i = 0; i < na.children.size(); ++i) {
        if (na.children[i] == nb.children[i])
            continue;
        return structural_less(na.children[i], nb.children[i]);
    }
    return false;
}

Formula FormulaStore::conj(std::vector<Formula> cs) {
    std::vector<Formula> flat;
    for (Formula c : cs) {
        const FormulaNode& n = nodes_[c];
        if (n.op == Op::And)
            flat.insert(flat.end(), n.children.begin(), n.children.end());
        else if (n.op == Op::True)
            continue;
        else if (n.op == Op::False)
            return fls();
        else
            flat.push_back(c);
    }
    std::sort(flat.begin(), flat.end(), [&](Formula a, Formula b) { return structural_less(a, b); });
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    Symbol pos, neg;
    for (Formula c : flat) {
        if (nodes_[c].op == Op::Atom)
            pos = pos.with(nodes_[c].ap);
        else if (nodes_[c].op == Op::NotAtom)
            neg = neg.with(nodes_[c].ap);
    }
    if (!pos.intersect(neg).empty())
        return fls();
    /* "F true" only asserts that the word is nonempty; a conjunct that is
       already false on the empty word implies it, so drop the marker. */
    for (size_t i = 0; i < flat.size(); ++i) {
        const FormulaNode& n = nodes_[flat[i]];
        if (n.op != Op::Eventually || nodes_[n.children[0]].op != Op::True)
            continue;
        bool implied = false;
        for (size_t j = 0; j < flat.size() && !implied; ++j)
            implied = j != i && !empty_sat(flat[j]);
        if (implied)
            flat.erase(flat.begin() + static_cast<long>(i));
        break;
    }
    if (flat.empty())
        return tru();
    if (flat.size() == 1)
        return flat[0];
    return mk(Op::And, 0, std::move(flat));
}

Formula FormulaStore::disj(std::vector<Formula> cs) {
    std::vector<Formula> flat;
    for (Formula c : cs) {
        const FormulaNode& n = nodes_[c];
        if (n.op == Op::Or)
            flat.insert(flat.end(), n.children.begin(), n.children.end());
        else if (n.op == Op::False)
            continue;
        else if (n.op == Op::True)
            return tru();
        else
            flat.push_back(c);
    }
    std::sort(flat.begin(), flat.end(), [&](Formula a, Formula b) { return structural_less(a, b); });
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    Symbol pos, neg;
    for (Formula c : flat) {
        if (nodes_[c].op == Op::Atom)
            pos = pos.with(nodes_[c].ap);
        else if (nodes_[c].op == Op::NotAtom)
            neg = neg.with(nodes_[c].ap);
    }
    if (!pos.intersect(neg).empty())
        return tru();
    if (flat.empty())
        return fls();
    if (flat.size() == 1)
        return flat[0];
    return mk(Op::Or, 0, std::move(flat));
}

Formula FormulaStore::negate(Formula f) {
    const FormulaNode n = nodes_[f]; // copy: child calls may reallocate nodes_
    switch (n.op) {
    case Op::True:
        return fls();
    case Op::False:
        return tru();
    case Op::Atom:
        return natom(n.ap);
    case Op::NotAtom:
        return atom(n.ap);
    case Op::And: {
        std::vector<Formula> cs;
        cs.reserve(n.children.size());
        for (Formula c : n.children)
            cs.push_back(negate(c));
        return disj(std::move(cs));
    }
    case Op::Or: {
        std::vector<Formula> cs;
        cs.reserve(n.children.size());
        for (Formula c : n.children)
            cs.push_back(negate(c));
        return conj(std::move(cs));
    }
    default:
        throw CoSafetyError("negation applied to temporal subformula '" +
                            print_formula(*this, f) + "'");
    }
}

namespace {

bool prop_holds(const FormulaStore& st, Formula f, Symbol val) {
    const FormulaNode& n = st.node(f);
    switch (n.op) {
    case Op::True:
        return true;
    case Op::False:
        return false;
    case Op::Atom:
        return val.contains(n.ap);
    case Op::NotAtom:
        return !val.contains(n.ap);
    case Op::And:
        for (Formula c : n.children)
            if (!prop_holds(st, c, val))
                return false;
        return true;
    case Op::Or:
        for (Formula c : n.children)
            if (prop_holds(st, c, val))
                return true;
        return false;
    default: // temporal operators hold on no continuation of the empty word
        return false;
    }
}

} // namespace

bool FormulaStore::empty_sat(Formula f) {
    if (esat_.size() < nodes_.size())
        esat_.resize(nodes_.size(), -1);
    if (esat_[f] >= 0)
        return esat_[f] != 0;
    std::vector<ApId> atoms = nodes_[f].atoms.aps();
    if (atoms.size() > 20)
        throw CapacityError("empty-word tautology check over " +
                            std::to_string(atoms.size()) + " propositions");
    bool taut = true;
    for (uint64_t m = 0; taut && m < (uint64_t{1} << atoms.size()); ++m) {
        Symbol val;
        for (size_t i = 0; i < atoms.size(); ++i)
            if ((m >> i) & 1)
                val = val.with(atoms[i]);
        taut = prop_holds(*this, f, val);
    }
    esat_[f] = taut ? 1 : 0;
    return taut;
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Token {
    enum Kind { End, LP, RP, Not, AndOp, OrOp, KwTrue, KwX, KwF, KwU, Ident } kind;
    size_t pos;
    std::string text;
};

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '(') {
            out.push_back({Token::LP, i, "("});
            ++i;
        } else if (c == ')') {
            out.push_back({Token::RP, i, ")"});
            ++i;
        } else if (c == '!') {
            out.push_back({Token::Not, i, "!"});
            ++i;
        } else if (c == '&' || c == '|') {
            if (i + 1 >= s.size() || s[i + 1] != c)
                throw SyntaxError(std::string("expected '") + c + c + "' at offset " +
                                  std::to_string(i));
            out.push_back({c == '&' ? Token::AndOp : Token::OrOp, i, {c, c}});
            i += 2;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i + 1;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            std::string text(s.substr(i, j - i));
            Token::Kind k = text == "true" ? Token::KwTrue
                          : text == "X"    ? Token::KwX
                          : text == "F"    ? Token::KwF
                          : text == "U"    ? Token::KwU
                                           : Token::Ident;
            out.push_back({k, i, std::move(text)});
            i = j;
        } else {
            throw SyntaxError(std::string("unexpected character '") + c + "' at offset " +
                              std::to_string(i));
        }
    }
    out.push_back({Token::End, s.size(), ""});
    return out;
}

struct Parser {
    FormulaStore& store;
    const std::vector<Token>& toks;
    size_t k = 0;

    const Token& peek() const { return toks[k]; }

    Formula parse_or() {
        Formula l = parse_and();
        while (peek().kind == Token::OrOp) {
            ++k;
            Formula r = parse_and();
            l = store.disj({l, r});
        }
        return l;
    }

    Formula parse_and() {
        Formula l = parse_until();
        while (peek().kind == Token::AndOp) {
            ++k;
            Formula r = parse_until();
            l = store.conj({l, r});
        }
        return l;
    }

    Formula parse_until() { // right-associative
        Formula l = parse_unary();
        if (peek().kind == Token::KwU) {
            ++k;
            Formula r = parse_until();
            return store.until(l, r);
        }
        return l;
    }

    Formula parse_unary() {
        const Token& t = peek();
        switch (t.kind) {
        case Token::Not:
            ++k;
            return store.negate(parse_unary());
        case Token::KwX:
            ++k;
            return store.next(parse_unary());
        case Token::KwF:
            ++k;
            return store.eventually(parse_unary());
        case Token::KwTrue:
            ++k;
            return store.tru();
        case Token::Ident:
            ++k;
            return store.atom(store.aps().intern(t.text));
        case Token::LP: {
            ++k;
            Formula f = parse_or();
            if (peek().kind != Token::RP)
                throw SyntaxError("expected ')' at offset " + std::to_string(peek().pos));
            ++k;
            return f;
        }
        default:
            throw SyntaxError("expected formula at offset " + std::to_string(t.pos));
        }
    }
};

} // namespace

Formula parse_formula(FormulaStore& store, std::string_view text) {
    std::vector<Token> toks = lex(text);
    Parser p{store, toks};
    Formula f = p.parse_or();
    if (p.peek().kind != Token::End)
        throw SyntaxError("trailing input at offset " + std::to_string(p.peek().pos));
    return f;
}

// ---------------------------------------------------------------------------
// printer

namespace {

int prec(const FormulaNode& n) {
    switch (n.op) {
    case Op::Or:
        return 0;
    case Op::And:
        return 1;
    case Op::Until:
        return 2;
    case Op::Next:
    case Op::Eventually:
        return 3;
    default:
        return 4;
    }
}

void print_rec(const FormulaStore& st, Formula f, int min_prec, std::string& out) {
    const FormulaNode& n = st.node(f);
    bool paren = prec(n) < min_prec;
    if (paren)
        out += "(";
    switch (n.op) {
    case Op::True:
        out += "true";
        break;
    case Op::False:
        out += "!true";
        break;
    case Op::Atom:
        out += st.aps().name(n.ap);
        break;
    case Op::NotAtom:
        out += "!";
        out += st.aps().name(n.ap);
        break;
    case Op::Next:
        out += "X ";
        print_rec(st, n.children[0], 3, out);
        break;
    case Op::Eventually:
        out += "F ";
        print_rec(st, n.children[0], 3, out);
        break;
    case Op::Until:
        print_rec(st, n.children[0], 3, out);
        out += " U ";
        print_rec(st, n.children[1], 2, out);
        break;
    case Op::And:
        for (size_t i = 0; i < n.children.size(); ++i) {
            if (i)
                out += " && ";
            print_rec(st, n.children[i], 2, out);
        }
        break;
    case Op::Or:
        for (size_t i = 0; i < n.children.size(); ++i) {
            if (i)
                out += " || ";
            print_rec(st, n.children[i], 1, out);
        }
        break;
    }
    if (paren)
        out += ")";
}

} // namespace

std::string print_formula(const FormulaStore& store, Formula f) {
    std::string out;
    print_rec(store, f, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// reference evaluator

bool evaluate(FormulaStore& store, Formula f, std::span<const Symbol> word) {
    if (word.empty())
        return store.empty_sat(f);
    const size_t L = word.size();

    // Subtree node ids, ascending; ids are topological (children precede parents).
    thread_local std::vector<Formula> ids, stack;
    thread_local std::vector<uint8_t> seen;
    thread_local std::vector<uint32_t> dense;
    thread_local std::vector<uint8_t> val;
    if (seen.size() < store.size()) {
        seen.resize(store.size(), 0);
        dense.resize(store.size(), 0);
    }
    ids.clear();
    stack.assign(1, f);
    seen[f] = 1;
    while (!stack.empty()) {
        Formula id = stack.back();
        stack.pop_back();
        ids.push_back(id);
        for (Formula c : store.node(id).children)
            if (!seen[c]) {
                seen[c] = 1;
                stack.push_back(c);
            }
    }
    std::sort(ids.begin(), ids.end());
    for (size_t k = 0; k < ids.size(); ++k) {
        dense[ids[k]] = static_cast<uint32_t>(k);
        seen[ids[k]] = 0; // reset for the next call
    }

    val.assign(ids.size() * L, 0);
    auto cell = [&](Formula id, size_t i) -> uint8_t& { return val[dense[id] * L + i]; };

    for (size_t i = L; i-- > 0;) {
        for (size_t k = 0; k < ids.size(); ++k) {
            const FormulaNode& n = store.node(ids[k]);
            uint8_t v = 0;
            switch (n.op) {
            case Op::True:
                v = 1;
                break;
            case Op::False:
                v = 0;
                break;
            case Op::Atom:
                v = word[i].contains(n.ap);
                break;
            case Op::NotAtom:
                v = !word[i].contains(n.ap);
                break;
            case Op::And:
                v = 1;
                for (Formula c : n.children)
                    v = static_cast<uint8_t>(v & cell(c, i));
                break;
            case Op::Or:
                for (Formula c : n.children)
                    v = static_cast<uint8_t>(v | cell(c, i));
                break;
            case Op::Next:
                v = i + 1 < L ? cell(n.children[0], i + 1) : 0;
                break;
            case Op::Eventually:
                v = static_cast<uint8_t>(cell(n.children[0], i) |
                                         (i + 1 < L ? val[k * L + i + 1] : 0));
                break;
            case Op::Until:
                v = static_cast<uint8_t>(
                    cell(n.children[1], i) |
                    (cell(n.children[0], i) & (i + 1 < L ? val[k * L + i + 1] : 0)));
                break;
            }
            val[k * L + i] = v;
        }
    }
    return cell(f, 0) != 0;
}

} // namespace rplan
