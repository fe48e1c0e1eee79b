#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or axis mismatch between tensors / layers / circuits.
struct DimensionError : Error {
    using Error::Error;
};

// Pooled descriptor vector has (near-)zero norm and cannot be normalized.
struct DegenerateDescriptorError : Error {
    using Error::Error;
};

// NaN/Inf detected during an iterative computation; carries the iteration.
struct NumericError : Error {
    NumericError(const std::string& msg, long iter)
        : Error(msg + " (iteration " + std::to_string(iter) + ")"), iteration(iter) {}
    long iteration;
};

// Malformed input file; carries the byte offset of the failure.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::size_t byte_offset;
};

// Constraint-system construction or witness problems.
struct CircuitError : Error {
    using Error::Error;
};

// Bad configuration values (scales, thresholds, flags).
struct ConfigError : Error {
    using Error::Error;
};

// Transaction already known to the ledger/mempool.
struct DuplicateTxError : Error {
    using Error::Error;
};

}  // namespace ssc
