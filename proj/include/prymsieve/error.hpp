#pragma once

#include <stdexcept>
#include <string>

namespace prymsieve {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input (bad dimensions, invalid index, bad word letter, ...).
class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

/// A configured resource budget was exceeded. Always reported, never silently truncated.
class budget_error : public error {
public:
    explicit budget_error(const std::string& msg) : error(msg) {}
};

}  // namespace prymsieve
