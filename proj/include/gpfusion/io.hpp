#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gpfusion {

// Writes to "<path>.tmp" in the same directory, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// Fixed-point with `decimals` digits, locale independent.
std::string format_fixed(double value, int decimals);

}  // namespace gpfusion
