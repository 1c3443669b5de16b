#pragma once

#include <stdexcept>

namespace bpv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Election parameters violate their own invariants.
struct ParamsError : Error { using Error::Error; };

// A vote intent breaks the electoral mode's cardinality bound or names an
// unknown candidate.
struct IntentError : Error { using Error::Error; };

// A caller broke an operation's precondition.
struct UsageError : Error { using Error::Error; };

// An operation belonging to a disabled protocol variant was invoked.
struct VariantError : Error { using Error::Error; };

// An operation ran at the wrong point of the election timeline.
struct TimingError : Error { using Error::Error; };

// Submission against a sealed registry.
struct SealedError : Error { using Error::Error; };

// Ballot box used outside its current state.
struct StateError : Error { using Error::Error; };

// Electoral roll is malformed (duplicate voter names).
struct RollError : Error { using Error::Error; };

// Scenario configuration violates a config invariant; the message names it.
struct ConfigError : Error { using Error::Error; };

// Scenario file text does not parse as the config format at all.
struct ConfigParseError : Error { using Error::Error; };

}  // namespace bpv
