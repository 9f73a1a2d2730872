#pragma once

#include <stdexcept>
#include <string>

namespace adeff {

// Bad arguments or malformed data supplied by the caller.
struct invalid_input : std::invalid_argument {
    explicit invalid_input(const std::string& msg) : std::invalid_argument(msg) {}
};

// The two-phase learner protocol was driven out of order.
struct protocol_violation : std::logic_error {
    explicit protocol_violation(const std::string& msg) : std::logic_error(msg) {}
};

// An internal invariant failed (e.g. the query ledger overran the budget).
// Not recoverable; the CLI maps this to its own exit code.
struct invariant_violation : std::logic_error {
    explicit invariant_violation(const std::string& msg) : std::logic_error(msg) {}
};

// Instance too large for exact enumeration.
struct infeasible_instance : invalid_input {
    explicit infeasible_instance(const std::string& msg) : invalid_input(msg) {}
};

} // namespace adeff
