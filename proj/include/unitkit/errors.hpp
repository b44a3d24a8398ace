#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace unitkit {

// Data/argument problems. The CLI maps these to exit code 3.
// `kind` is a stable machine-checkable tag ("LengthMismatch", "EmptyInput", ...).
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string kind, std::string detail)
        : std::runtime_error(detail.empty() ? kind : kind + ": " + detail),
          kind_(std::move(kind)),
          detail_(std::move(detail)) {}

    explicit ValidationError(std::string kind)
        : ValidationError(std::move(kind), std::string{}) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string kind_;
    std::string detail_;
};

// Filesystem/stream failures. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& detail) : std::runtime_error(detail) {}
};

}  // namespace unitkit
