#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oamsec {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Zero-sized array or RIS grid.
class GeometryError : public Error {
public:
    using Error::Error;
};

// A transmitter and a receiver element share a position.
class SingularDistanceError : public Error {
public:
    using Error::Error;
};

// Malformed scenario, sweep spec or codebook parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    InfeasibleError(std::string constraint, const std::string& what)
        : Error(what), constraint_(std::move(constraint)) {}
    const std::string& constraint() const { return constraint_; }

private:
    std::string constraint_;
};

class RetractionError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& what, std::size_t completed_rows)
        : Error(what + " (" + std::to_string(completed_rows) + " rows written)"),
          completed_rows_(completed_rows) {}
    std::size_t completed_rows() const { return completed_rows_; }

private:
    std::size_t completed_rows_;
};

}  // namespace oamsec
