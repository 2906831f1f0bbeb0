#pragma once

#include <stdexcept>
#include <string>

namespace wavecomm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor or layer dimension mismatch.
struct ShapeError : Error {
    using Error::Error;
};

// Non-finite values or degenerate statistics (zero-norm input, single-element
// batchnorm channel, non-finite training loss).
struct NumericError : Error {
    using Error::Error;
};

// Malformed serialized data: bad magic, unsupported version, truncation.
struct FormatError : Error {
    using Error::Error;
};

// Checksum mismatch on otherwise well-formed data.
struct CorruptionError : FormatError {
    using FormatError::FormatError;
};

// Invalid run configuration (unknown key, out-of-range value, missing file).
struct ConfigError : Error {
    using Error::Error;
};

// Non-invertible affine pose.
struct GeometryError : Error {
    using Error::Error;
};

// Scenario generation failed to place objects within the retry cap.
struct PlacementError : Error {
    using Error::Error;
};

}  // namespace wavecomm
