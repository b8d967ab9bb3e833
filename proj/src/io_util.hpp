#ifndef FRACORDER_SRC_IO_UTIL_HPP
#define FRACORDER_SRC_IO_UTIL_HPP

#include <string>
#include <vector>

namespace fracorder::detail {

std::string read_text_file(const std::string& path);

/// Write to path.tmp, then rename over path.
void write_file_atomic(const std::string& path, const std::string& content);

std::vector<std::string> split_csv_line(const std::string& line);

/// Non-empty lines with trailing '\r' stripped.
std::vector<std::string> csv_lines(const std::string& text);

double parse_double(const std::string& field, const std::string& context);

/// 17 significant digits, lowercase scientific ("%.16e").
std::string format_double(double v);

}  // namespace fracorder::detail

#endif  // FRACORDER_SRC_IO_UTIL_HPP
