#pragma once

#include <stdexcept>
#include <string>

namespace aperiodic {

// Error taxonomy shared by the library and the CLI exit codes:
// domain/contract -> 1, parse -> 2, budget -> 3.
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct contract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decimal rotation number too coarse to decide an interval membership.
struct ambiguity_error : domain_error {
    using domain_error::domain_error;
};

// Continued-fraction expansion terminated: the input was rational.
struct rationality_error : domain_error {
    using domain_error::domain_error;
};

} // namespace aperiodic
