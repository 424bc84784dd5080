#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace nashq {

/// Writes `contents` to a sibling temp file and renames it over `path`, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Whole-file read; throws std::runtime_error if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// printf("%.17g"): 17 significant digits, '.' decimal separator.
std::string format_real(double value);

}  // namespace nashq
