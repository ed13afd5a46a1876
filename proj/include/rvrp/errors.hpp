#pragma once

#include <stdexcept>
#include <string>

namespace rvrp {

// Bad user input: invalid parameters, malformed files, violated preconditions.
// The CLI maps this family to exit code 1.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A well-formed request that violates an assignment constraint (robot already
// assigned, edge already part of the initial assignment, ...).
struct constraint_error : input_error {
    using input_error::input_error;
};

// File parsing failure; message carries the 1-based line number.
struct parse_error : input_error {
    parse_error(const std::string& path, int line, const std::string& what)
        : input_error(path + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    int line_number;
};

// Structural validation failure, e.g. a graph that is not strongly connected.
struct validation_error : input_error {
    using input_error::input_error;
};

// Size guard tripped: the requested computation is refused, not attempted.
// The CLI maps this to exit code 2.
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rvrp
