#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kripke {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position)
        : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}

    [[nodiscard]] std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// Invalid frame data: cycle, non-linear past, missing root, unknown node.
class FrameError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A propositional letter or a variable without a value.
class UnboundError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation refused because its size estimate exceeds a configured limit.
class BudgetExceeded : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller-supplied data that violates an operation's precondition.
class PreconditionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An internal consistency check failed; indicates a bug rather than bad input.
class InternalCheckFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace kripke
