#pragma once

#include <stdexcept>
#include <string>

namespace rplan {

/* All library errors derive from Error so callers can catch one base.
   The CLI maps the two leaf families onto distinct exit codes:
   capacity overruns (CapacityError, NodeCapError) vs. everything else
   (malformed input of one kind or another). */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Formula or rule-DSL text that does not lex/parse; message carries a position.
class SyntaxError : public Error {
public:
    using Error::Error;
};

// Negation that lands on a temporal operator after being pushed inward.
class CoSafetyError : public Error {
public:
    using Error::Error;
};

// Structured input files (CSV/JSON) with bad shape; message carries line/field.
class ParseError : public Error {
public:
    using Error::Error;
};

// A rule or label references a proposition outside the declared universe.
class UnknownApError : public Error {
public:
    using Error::Error;
};

// Grid or placement dimensions that make no sense (zero size, out of range).
class DimensionError : public Error {
public:
    using Error::Error;
};

// Negative edge weight or edit penalty; rejected at load time.
class NegativeWeightError : public Error {
public:
    using Error::Error;
};

// A state sequence that does not follow transition-system edges.
class InvalidTrajectoryError : public Error {
public:
    using Error::Error;
};

// An edit sequence that is not a valid accepting run over the given word.
class InvalidEditRunError : public Error {
public:
    using Error::Error;
};

// A cycle of zero-weight internal (epsilon-output) moves; such a system
// would admit unboundedly long silent runs at no cost, so it is rejected.
class EpsCycleError : public Error {
public:
    using Error::Error;
};

// Construction blew a configured size cap (automaton states, propositions, ...).
class CapacityError : public Error {
public:
    using Error::Error;
};

// The search expanded more nodes than its configured cap.
class NodeCapError : public CapacityError {
public:
    using CapacityError::CapacityError;
};

} // namespace rplan
