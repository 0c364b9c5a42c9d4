#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rplan/ap.hpp"

namespace rplan {

/* Weighted transducer between two finite words: the task-side word it reads
   (input track) and the environment-side word it emits (output track).
   Transition labels are families over label sets rather than enumerated
   pairs, so the alphabet is never expanded:

     PassThrough  (s, s)                any set s, weight 0
     Substitute   (s, s\{a} u {b})      for any s containing a
     Delete       (s, eps)              s = {a} (or any s containing a,
                                        when member_delete is set)
     Concrete     (in, out)             one explicit pair; either side may
                                        be eps, not both

   An eps on the output track consumes a task symbol while the environment
   emits nothing; an eps on the input track emits an extra environment
   symbol the task never asked for. */
enum class EditKind : uint8_t { PassThrough, Substitute, Delete, Concrete };

struct EditLabel {
    EditKind kind = EditKind::PassThrough;
    ApId from_ap = 0;
    ApId to_ap = 0;
    bool member_delete = false;
    std::optional<Symbol> in;  // Concrete only; nullopt = eps
    std::optional<Symbol> out; // Concrete only; nullopt = eps
};

struct EditTransition {
    uint32_t from = 0;
    uint32_t to = 0;
    EditLabel label;
    double weight = 0.0;
};

struct EditSystem {
    uint32_t num_states = 0;
    uint32_t initial = 0;
    std::vector<char> accepting;
    std::vector<EditTransition> transitions;
    std::vector<std::vector<uint32_t>> out; // transition ids grouped by 'from'
    Symbol aps;                             // propositions referenced anywhere
};

struct PreferenceRule {
    enum class Kind { Substitute, Delete } kind = Kind::Substitute;
    std::string from;
    std::string to; // empty for Delete
    double penalty = 0.0;
    bool member_delete = false;
};

/* Rule DSL, one rule per line ('#' comments, blank lines allowed):
     sub <ap> -> <ap> penalty <number>
     del <ap> penalty <number>            */
std::vector<PreferenceRule> parse_rules(std::string_view text);

/* Canonical single-state system: an accepting state with the zero-weight
   pass-through plus one family transition per rule.  Rule propositions must
   already be interned and inside 'universe' (UnknownApError otherwise);
   negative penalties raise NegativeWeightError. */
EditSystem build_edit_system(const ApInterner& aps, std::span<const PreferenceRule> rules,
                             Symbol universe);

/* Explicit transducer file:
     {"states": n, "initial": i, "accepting": [..],
      "edits": [{"from":..,"to":..,"in":[..]|"eps"|"pass",
                 "out":[..]|"eps"|"pass","w":..}, ...]}
   "pass" must appear on both tracks at once; the initial state must carry a
   zero-weight pass-through self-loop so unedited words are always accepted. */
EditSystem load_wfse_json(ApInterner& aps, std::istream& in);
EditSystem load_wfse_json(ApInterner& aps, const std::string& path);

/* One replayed transducer step; 'in' eps = emitted extra symbol,
   'out' eps = dropped task symbol. */
struct EditOp {
    std::optional<Symbol> in;
    std::optional<Symbol> out;
    double weight = 0.0;
};

/* Replays ops as an accepting run whose input track spells spec_word exactly;
   returns the emitted environment word and the summed edit weight.
   InvalidEditRunError if no such run exists. */
std::pair<std::vector<Symbol>, double> apply_edits(const EditSystem& es,
                                                   std::span<const Symbol> spec_word,
                                                   std::span<const EditOp> ops);

} // namespace rplan
