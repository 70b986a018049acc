#pragma once

#include <stdexcept>
#include <string>

namespace srq {

// Base class for all srq failures surfaced to callers.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or corrupt response-map input (bad shape, non-finite values, parse failure).
struct IngestionError : Error {
    using Error::Error;
};

// Invalid configuration: out-of-range field, unknown key, empty decision mask.
struct ConfigError : Error {
    using Error::Error;
};

// A synthetic-map spec that cannot be satisfied on the requested grid.
struct GenerationError : Error {
    using Error::Error;
};

// Calibration precondition violated (missing class, empty grid).
struct CalibrationError : Error {
    using Error::Error;
};

// Rendering failure (unknown colormap, encoder error).
struct RenderError : Error {
    using Error::Error;
};

}  // namespace srq
