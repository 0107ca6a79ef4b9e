#pragma once

#include <stdexcept>
#include <string>

namespace rdbc {

/// Argument outside the domain an evaluator supports (series bound, triangle ordering, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// q <= lambda/(2 epsilon): the controller cannot be synthesized.
class AssumptionViolation : public std::invalid_argument {
public:
    AssumptionViolation(double q, double threshold);

    double q() const noexcept { return q_; }
    double threshold() const noexcept { return threshold_; }

private:
    double q_;
    double threshold_;
};

/// A decay rate or similar parameter lies outside its admissible open interval.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A computation was requested before its precondition holds (e.g. modal truncation too short).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A runtime invariant failed during simulation.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rdbc
