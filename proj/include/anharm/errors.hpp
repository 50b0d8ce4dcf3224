// errors.hpp: exception types thrown by the anharm library.
//
// Two families: anything deriving from std::invalid_argument is a caller or
// configuration mistake; anything deriving from std::runtime_error is a
// numerical failure detected while computing.

#pragma once

#include <stdexcept>
#include <string>

namespace anharm {

// ---- argument / contract errors -------------------------------------------

class InvalidDimension : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidOperator : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Hamiltonian whose spectrum is not bounded below (attractive quartic term
// without a positive higher-order term).
class UnstableSpectrum : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ---- numerical failures ----------------------------------------------------

class TruncationOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedStatistic : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonUniqueSteadyState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace anharm
