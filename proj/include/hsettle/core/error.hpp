#pragma once

#include <stdexcept>
#include <string>

namespace hsettle {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A generator could not place the requested particles inside the domain.
class ConfigurationInfeasible : public Error {
public:
    using Error::Error;
};

class PackingInfeasible : public Error {
public:
    using Error::Error;
};

/// Particle/cube geometry violates a structural requirement (e.g. B_i not inside Q_i).
class GeometryError : public Error {
public:
    using Error::Error;
};

class SingularEvaluation : public Error {
public:
    using Error::Error;
};

class DomainMismatch : public Error {
public:
    using Error::Error;
};

/// A numerical approximation did not reach its requested tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class IterativeFailure : public Error {
public:
    IterativeFailure(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Malformed experiment or configuration input. `field` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error("config field '" + field + "': " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace hsettle
