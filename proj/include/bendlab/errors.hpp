#pragma once

#include <stdexcept>
#include <string>

namespace bendlab {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (unsupported wavelet order, bad grid, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// A precondition on a point or parameter was violated.
struct DomainError : Error {
    using Error::Error;
};

/// The raster is too coarse to resolve an atom at the requested scale.
struct ResolutionError : Error {
    ResolutionError(const std::string& what, int max_feasible_j)
        : Error(what), max_feasible_scale_index(max_feasible_j) {}
    int max_feasible_scale_index;
};

/// A decay curve could not be fitted (fewer than two usable points).
struct FitError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct FileNotFoundError : IoError {
    using IoError::IoError;
};

struct MalformedHeaderError : IoError {
    using IoError::IoError;
};

struct UnsupportedFormatError : IoError {
    using IoError::IoError;
};

/// Unknown or mismatched schema tag in a CSV/JSON document.
struct SchemaError : IoError {
    using IoError::IoError;
};

}  // namespace bendlab
