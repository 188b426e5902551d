#pragma once

#include <stdexcept>
#include <string>

namespace opfree {

// Error taxonomy mirrors the CLI exit codes: schema errors exit 2,
// numerical errors exit 3, I/O errors exit 4.

// Malformed or contract-violating input data (bad JSON shape, weights that
// do not sum to one, non-hermitian mean, ...).
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure while computing (breakdown, singularity, non-convergence).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A call outside an operation's domain (evaluation on the real axis,
// depth beyond the stored coefficients, ...).
struct DomainError : NumericError {
    using NumericError::NumericError;
};

// Fixed-point solver gave up; carries the last residual for diagnostics.
struct SolveError : NumericError {
    SolveError(const std::string& what, double residual_, std::size_t iterations_)
        : NumericError(what), residual(residual_), iterations(iterations_) {}
    double residual = 0.0;
    std::size_t iterations = 0;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace opfree
