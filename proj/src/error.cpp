#include "freqbench/error.hpp"

namespace freqbench {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EncodingError: return "EncodingError";
    case ErrorKind::InvalidSchema: return "InvalidSchema";
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorKind::InvalidStrategy: return "InvalidStrategy";
    case ErrorKind::MixedAttributes: return "MixedAttributes";
    case ErrorKind::NonPositiveBaseline: return "NonPositiveBaseline";
    case ErrorKind::InsufficientSample: return "InsufficientSample";
    case ErrorKind::InsufficientTrials: return "InsufficientTrials";
    case ErrorKind::StrategyIsSequential: return "StrategyIsSequential";
    case ErrorKind::DigestMismatch: return "DigestMismatch";
    case ErrorKind::InconsistentInputs: return "InconsistentInputs";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    }
    return "Unknown";
}

} // namespace freqbench
