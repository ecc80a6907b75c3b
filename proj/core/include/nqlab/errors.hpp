#pragma once

#include <stdexcept>
#include <string>

namespace nqlab {

// Invalid input: out-of-range index, malformed spectrum, wrong parity, ...
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Discretization too coarse to resolve what was asked for.
class ResolutionError : public std::runtime_error {
public:
    explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

// Time stepping drifted (norm not conserved, dt too large for the drive).
class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Experiment configuration is inconsistent with the inputs it references.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature or root finding failed to converge.
class RefinementError : public std::runtime_error {
public:
    explicit RefinementError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nqlab
