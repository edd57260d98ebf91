// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hqmc::csv {

/// First line of every CSV artifact written by this library.
inline constexpr std::string_view kVersionLine = "# hermite-qmc v1";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Data rows of a CSV document; blank lines and lines starting with '#'
/// are skipped. Fields are trimmed of surrounding whitespace.
std::vector<std::vector<std::string>> parse_rows(const std::string& text);

double parse_double(const std::string& field);
unsigned long long parse_unsigned(const std::string& field);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace hqmc::csv
