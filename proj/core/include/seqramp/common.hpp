#pragma once

#include <stdexcept>
#include <string>

namespace seqramp {

// Raised for malformed input data: corpus files, checkpoints, reports.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for invalid user-facing configuration (bad flags, illegal
// objective/task combinations). Maps to exit code 1 in the CLI.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace seqramp
