#pragma once

#include <stdexcept>
#include <string>

namespace cpde {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Degenerate input for a metric or ratio (zero range, zero norm).
struct RangeError : std::domain_error {
    using std::domain_error::domain_error;
};

struct SingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A per-step linear solve failed and could not be recovered; carries the
// time-step index and which of the three systems broke.
struct SolveError : std::runtime_error {
    SolveError(const std::string& what, int step_index, const std::string& system)
        : std::runtime_error(what), step(step_index), system(system) {}
    int step;
    std::string system;
};

}  // namespace cpde
