#pragma once

#include <stdexcept>
#include <string>

namespace legfunnel {

/// Invalid model or controller coefficients.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a function (negative time, degenerate geometry, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Unreadable or inconsistent scenario / grid configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The tracking error left the performance funnel: |e| >= psi(t - t_k).
class FunnelViolation : public std::runtime_error {
public:
    FunnelViolation(double error, double psi, double elapsed);

    double error() const noexcept { return error_; }
    double psi() const noexcept { return psi_; }
    double elapsed() const noexcept { return elapsed_; }

private:
    double error_;
    double psi_;
    double elapsed_;
};

/// Non-finite state encountered while integrating.
class SimulationAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace legfunnel
