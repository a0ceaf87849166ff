#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace plume {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);
/// Lower-case hex SHA-256 of a file's contents. Throws IoError when unreadable.
std::string sha256_file(const std::filesystem::path& file);

}  // namespace plume
