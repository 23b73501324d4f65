#ifndef EPIREP_CSV_HPP
#define EPIREP_CSV_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace epirep {

/// Shortest text that round-trips at 17 significant digits (printf "%.17g").
std::string format_double(double x);

/// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace epirep

#endif  // EPIREP_CSV_HPP
