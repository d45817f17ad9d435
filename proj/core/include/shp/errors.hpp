#pragma once

#include <stdexcept>
#include <string>

namespace shp {

/// Malformed or inconsistent input data (files, sequences, configs).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver or sampler could not produce a usable result.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shp
