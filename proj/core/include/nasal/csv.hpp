#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace nasal {

/// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);

/// Split one CSV line on commas (no quoting; our formats never need it).
std::vector<std::string> split_csv_line(const std::string& line);

/// Open for writing or throw.
std::ofstream open_out(const std::string& path);

/// Open for reading or throw.
std::ifstream open_in(const std::string& path);

}  // namespace nasal
