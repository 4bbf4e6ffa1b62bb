#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace btdw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input parsed fine but violates an invariant (self-loop, index range, bad parameter).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Work refused because it would exceed a size guard.
class RefusedError : public Error {
public:
    using Error::Error;
};

/// Attenuation parameter outside the region where the centrality series converges.
/// `alpha_star` carries the spectral bound 1/rho(Z) when it could be estimated.
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::optional<double> alpha_star = std::nullopt)
        : Error(what), alpha_star_(alpha_star) {}

    std::optional<double> alpha_star() const noexcept { return alpha_star_; }

private:
    std::optional<double> alpha_star_;
};

/// A truncated power series failed to settle.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Dominant eigenpair missing, complex, defective or not consistently signed.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// A built-in test graph failed its closed-form self check.
class FixtureError : public Error {
public:
    using Error::Error;
};

}  // namespace btdw
