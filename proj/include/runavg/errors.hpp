#pragma once

#include <stdexcept>
#include <string>

namespace runavg {

/// Base class for all errors thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value (grid parameters, order caps, ladder shape, ...).
struct config_error : error {
    using error::error;
};

/// Malformed or non-finite input data (samples, CSV rows, sequences).
struct data_error : error {
    using error::error;
};

/// An operation was called on inputs that violate its stated preconditions.
struct precondition_error : error {
    using error::error;
};

/// Evaluation outside the mathematical domain (non-finite or negative time, s <= 0).
struct domain_error : error {
    using error::error;
};

/// A numeric result could not be produced to the required accuracy.
struct accuracy_error : error {
    using error::error;
};

/// The data covers too short a horizon to classify a trend either way.
/// Distinct from the Converged/Oscillating/Diverging verdicts.
struct inconclusive_error : error {
    using error::error;
};

} // namespace runavg
