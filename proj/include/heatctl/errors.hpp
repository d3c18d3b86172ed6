#pragma once

#include <stdexcept>
#include <string>

namespace heatctl {

// Error taxonomy shared by all modules.  The CLI maps each class to a
// distinct exit code so callers can tell bad input from numerical trouble.

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Mode index outside the basis index set (e.g. a zero Dirichlet component).
struct InvalidIndex : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

// Structurally valid input the implementation does not support
// (e.g. unbounded non-periodic set without a scan window).
struct UnsupportedInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A theorem hypothesis is violated (e.g. a_j > 2*pi*L on the torus).
struct HypothesisViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver breakdown despite regularization; carries a condition estimate.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what, double condition_estimate = 0.0)
        : std::runtime_error(what), condition(condition_estimate) {}
    double condition;
};

// A ratio whose denominator vanished at the working resolution.
struct IndeterminateRatio : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file; position is tracked as line/column when known.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line_no = 0, int column_no = 0)
        : std::runtime_error(what), line(line_no), column(column_no) {}
    int line;
    int column;
};

// A Gaussian-divergence family whose declared holes fail their certificate.
struct InvalidFamily : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace heatctl
