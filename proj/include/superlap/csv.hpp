#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace superlap {

/// Writes a header and numeric rows with round-trip precision.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace superlap
