#pragma once

#include <stdexcept>
#include <string>

namespace eprifo {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Idler quadrature variance too small to divide by.
class DegenerateIdler : public Error {
public:
    using Error::Error;
};

class NonPositiveFrequency : public Error {
public:
    using Error::Error;
};

/// Requested filter bandwidth lies outside what the SRC phase can produce.
class UnreachableBandwidth : public Error {
public:
    using Error::Error;
};

class NoSolutionInRange : public Error {
public:
    NoSolutionInRange(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Configuration problem; carries the offending field and, when parsing, the line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what, int line = 0)
        : Error(format(field, what, line)), field_(field), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& what, int line)
    {
        std::string msg;
        if (line > 0) msg += "line " + std::to_string(line) + ": ";
        if (!field.empty()) msg += field + ": ";
        return msg + what;
    }
    std::string field_;
    int line_;
};

}  // namespace eprifo
