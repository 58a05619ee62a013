#pragma once

#include <string>
#include <vector>

namespace pmax {

// One positive-real-per-line CSV reader; an optional single header line is
// skipped. Any other non-numeric row raises std::runtime_error naming the
// offending line number.
std::vector<double> read_value_csv(const std::string& path);

// Writes a one-column CSV (header "value"), 17 significant digits.
void write_value_csv(const std::string& path, const std::vector<double>& values);

// Writes content to path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& content);

}  // namespace pmax
