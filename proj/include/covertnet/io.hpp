#pragma once

#include <string>

namespace covertnet {

/// Whole-file read; throws InvalidInput when the file cannot be opened.
std::string read_file(const std::string& path);

/// Writes atomically enough for a single writer; creates parent directories.
void write_file(const std::string& path, const std::string& content);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace covertnet
