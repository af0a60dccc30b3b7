#pragma once

#include <stdexcept>
#include <string>

namespace specrank {

// Invalid or inconsistent input data (bad CSV, shape mismatch, contract
// violation by the caller). Maps to CLI exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical procedure failed (factorisation exhausted its jitter budget,
// iteration did not converge, reducible chain). Maps to CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace specrank
