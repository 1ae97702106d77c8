#pragma once

#include <stdexcept>
#include <string>

namespace mound {

/// Invalid user input or configuration. Maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what, int line = 0)
        : std::runtime_error(what), field_(std::move(field)), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    /// 1-based source line, 0 when the value came from a flag or code.
    int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

/// A time-marching run produced heights below the clip tolerance or
/// otherwise left its valid state space. Maps to exit status 3.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(double time, const std::string& what)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Root finding or shooting failed to bracket / converge. Maps to exit status 4.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mound
