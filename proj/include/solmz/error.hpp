#pragma once

#include <stdexcept>
#include <string>

namespace solmz {

// All library failures derive from Error. The `kind()` tag is stable and is
// what the CLI prints in its single-line error report.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Resonance divergence of a(B) at B == B0, or an unreachable inverse.
class PoleError : public Error {
public:
    explicit PoleError(const std::string& what) : Error("pole", what) {}
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error("fit", what) {}
};

class ResolutionError : public Error {
public:
    explicit ResolutionError(const std::string& what) : Error("resolution", what) {}
};

// NaN, overflow or runaway self-focusing during real-time evolution.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double time)
        : Error("blow_up", what + " at t=" + std::to_string(time) + " s"), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("parse", line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

// Iterative solver gave up; the last iterate is kept for diagnosis.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, double x, double y)
        : Error("no_convergence", what), last_x_(x), last_y_(y) {}

    double last_x() const noexcept { return last_x_; }
    double last_y() const noexcept { return last_y_; }

private:
    double last_x_;
    double last_y_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

} // namespace solmz
