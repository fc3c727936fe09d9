#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace argplan {

/// Whole-file read. Throws Error(IoError).
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`, so readers never
/// observe a partial file. Throws Error(IoError).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace argplan
