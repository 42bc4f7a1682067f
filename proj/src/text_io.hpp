#pragma once

// File and number-formatting helpers shared by the loaders and writers.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace semrel::text_io {

std::vector<std::string_view> split(std::string_view line, char sep);

// Opens for reading; ConfigError if the file is missing or unreadable.
std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);
void finish_output(std::ofstream& out, const std::filesystem::path& path);

// Shortest decimal that round-trips the double exactly.
std::string format_shortest(double value);
// printf "%.<digits>g".
std::string format_significant(double value, int digits);

}  // namespace semrel::text_io
