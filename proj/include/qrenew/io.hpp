#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace qrenew {

/// Shortest round-trip decimal form; identical bytes on every run.
std::string format_double(double value);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

inline constexpr std::string_view kToolVersion = "qrenew 1.0.0";

}  // namespace qrenew
