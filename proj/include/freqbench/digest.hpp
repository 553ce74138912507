#pragma once

#include "freqbench/counter.hpp"

#include <span>
#include <string>
#include <string_view>

namespace freqbench {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 over the canonical JSON array serialization of `tables`.
std::string counts_digest(std::span<const FrequencyTable> tables);

} // namespace freqbench
