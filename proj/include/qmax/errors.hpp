#pragma once

#include <stdexcept>
#include <string>

namespace qmax {

/// Queue parameters outside their admissible domain (range or stability).
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A well-formed request the analytic layer has no formula for (e.g. c > 2).
class unsupported_model : public std::logic_error {
public:
    explicit unsupported_model(const std::string& what) : std::logic_error(what) {}
};

/// A numerical oracle did not settle under truncation doubling.
class tolerance_not_met : public std::runtime_error {
public:
    explicit tolerance_not_met(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qmax
