#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fodkit {

/// Failure categories raised by the toolkit. Each maps onto one CLI exit code.
enum class ErrorKind {
    invalid_order,
    invalid_argument,
    empty_input,
    insufficient_data,
    underdetermined_fit,
    singular_fit,
    degenerate_window,
    window_too_coarse,
    step_underflow,
    invalid_attenuation,
    gain_unreachable,
    iteration_refit,
    parse,
    io,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_order: return "invalid-order";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::underdetermined_fit: return "underdetermined-fit";
    case ErrorKind::singular_fit: return "singular-fit";
    case ErrorKind::degenerate_window: return "degenerate-window";
    case ErrorKind::window_too_coarse: return "window-too-coarse";
    case ErrorKind::step_underflow: return "step-underflow";
    case ErrorKind::invalid_attenuation: return "invalid-attenuation";
    case ErrorKind::gain_unreachable: return "gain-unreachable";
    case ErrorKind::iteration_refit: return "iteration-refit";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse failure carrying the 1-based line of the offending input.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace fodkit
