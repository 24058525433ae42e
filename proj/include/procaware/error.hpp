#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace procaware {

/// Every failure raised by the library carries a stable kind token
/// ("MalformedRow", "UngroupedSensor", ...) so callers can dispatch on it
/// and the CLI can report `<stage>: <kind>`.
class Error : public std::runtime_error {
public:
    Error(std::string kind, std::string const& detail)
        : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}

    [[nodiscard]] std::string const& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Input-file errors that point at a line (1-based, header is line 1).
class ParseError : public Error {
public:
    ParseError(std::string kind, std::size_t line, std::string const& reason)
        : Error(std::move(kind), "line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::string const& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

}  // namespace procaware
