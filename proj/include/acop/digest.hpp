#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace acop {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
/// Throws DataError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace acop
