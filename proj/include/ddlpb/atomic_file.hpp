#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ddlpb {

// Writes content to a temporary sibling of `path` and renames it into
// place, creating missing parent directories. Readers observe either the old
// file or the complete new one. Throws IoError naming the path and cause; no
// temporary file is left behind on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Reads a whole file. Throws IoError when it cannot be opened or read.
std::string read_file(const std::filesystem::path& path);

}  // namespace ddlpb
