// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace spacetime {

/// Invalid user input: bad configuration values, shapes or arguments.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver (singular factor, eigensolver failure, ...).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace spacetime
