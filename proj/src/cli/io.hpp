#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace adaptchunk::cli {

std::string read_file(const std::filesystem::path& path);

// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, std::string_view content);

// Prints "warning: <what>" to stderr.
void warn(std::string_view what);

}  // namespace adaptchunk::cli
