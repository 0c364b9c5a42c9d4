#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rplan/errors.hpp"

namespace rplan {

using ApId = uint32_t;

// Hard cap so a set of propositions fits in one 64-bit mask.
inline constexpr ApId kMaxAps = 64;

/* A set of atomic propositions, i.e. one alphabet symbol.  State labels,
   word letters and guard care-sets are all Symbols over a shared interner. */
class Symbol {
public:
    constexpr Symbol() = default;
    constexpr explicit Symbol(uint64_t bits) : bits_(bits) {}

    static constexpr Symbol single(ApId a) { return Symbol(uint64_t{1} << a); }

    [[nodiscard]] constexpr bool contains(ApId a) const { return (bits_ >> a) & 1u; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] constexpr bool subset_of(Symbol s) const { return (bits_ & ~s.bits_) == 0; }
    [[nodiscard]] constexpr Symbol with(ApId a) const { return Symbol(bits_ | (uint64_t{1} << a)); }
    [[nodiscard]] constexpr Symbol without(ApId a) const { return Symbol(bits_ & ~(uint64_t{1} << a)); }
    [[nodiscard]] constexpr Symbol intersect(Symbol s) const { return Symbol(bits_ & s.bits_); }
    [[nodiscard]] constexpr Symbol unite(Symbol s) const { return Symbol(bits_ | s.bits_); }
    [[nodiscard]] constexpr uint64_t bits() const { return bits_; }
    [[nodiscard]] int count() const { return __builtin_popcountll(bits_); }

    [[nodiscard]] std::vector<ApId> aps() const {
        std::vector<ApId> out;
        for (uint64_t b = bits_; b != 0; b &= b - 1)
            out.push_back(static_cast<ApId>(__builtin_ctzll(b)));
        return out;
    }

    constexpr bool operator==(const Symbol&) const = default;
    constexpr bool operator<(const Symbol& o) const { return bits_ < o.bits_; }

private:
    uint64_t bits_ = 0;
};

/* Name <-> id table shared by formulas, transition systems and edit rules.
   Equality of propositions is equality of ids; the same name always interns
   to the same id. */
class ApInterner {
public:
    // Interns name, validating it as an identifier that is not a reserved word.
    ApId intern(std::string_view name);

    // Id for an already-interned name, or throws UnknownApError.
    [[nodiscard]] ApId require(std::string_view name) const;

    [[nodiscard]] bool known(std::string_view name) const { return ids_.count(std::string(name)) > 0; }
    [[nodiscard]] const std::string& name(ApId a) const { return names_.at(a); }
    [[nodiscard]] size_t size() const { return names_.size(); }

    // All interned propositions as one mask (the current universe).
    [[nodiscard]] Symbol universe() const;

    // Interns every proposition named in a "a;b;c" list ("" -> empty symbol).
    Symbol intern_set(std::string_view semicolon_list);

    // Renders {a,b} style; "{}" for the empty symbol.
    [[nodiscard]] std::string format(Symbol s) const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, ApId> ids_;
};

inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace rplan
