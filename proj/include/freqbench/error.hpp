#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace freqbench {

enum class ErrorKind {
    FileNotFound,
    IoError,
    MalformedRow,
    EmptyInput,
    EncodingError,
    InvalidSchema,
    UnknownAttribute,
    DuplicateAttribute,
    InvalidStrategy,
    MixedAttributes,
    NonPositiveBaseline,
    InsufficientSample,
    InsufficientTrials,
    StrategyIsSequential,
    DigestMismatch,
    InconsistentInputs,
    InvalidSpec,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `kind()` is the stable
/// discriminator; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> line = std::nullopt)
        : std::runtime_error(message), kind_(kind), line_(line) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// 1-based source line for MalformedRow, otherwise empty.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> line_;
};

} // namespace freqbench
