#pragma once

#include <stdexcept>
#include <string>

namespace reportrl {

// Malformed inputs: unreadable files, broken JSONL lines, schema violations.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite intermediates in the optimizer.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration; message enumerates every violation.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace reportrl
