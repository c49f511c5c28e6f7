#pragma once

#include <stdexcept>
#include <string>

namespace magbeam {

// Precondition on an argument or configuration value was not met.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Field evaluated at (or numerically on top of) the dipole source.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Fixed-point iteration ran away or produced non-finite values.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every cell of a calibration grid failed.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ContractViolation(message);
    }
}

}  // namespace magbeam
