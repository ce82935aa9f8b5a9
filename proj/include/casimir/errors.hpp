#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Base class for all errors raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid input (bad dimensions, violated preconditions, malformed config).
struct invalid_argument_error : error {
    using error::error;
};

// A static configuration has no stable canonical modes.
struct unstable_configuration_error : error {
    using error::error;
};

// Numerical process failed to converge (integration, root solving, quadrature).
struct numerical_error : error {
    using error::error;
};

}  // namespace casimir
