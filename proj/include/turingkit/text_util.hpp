// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace turingkit {

/// Strips Unicode whitespace from both ends.
std::string_view trim(std::string_view text);
std::string_view trim_right(std::string_view text);
std::string ascii_lower(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view separator);
bool starts_with_icase(std::u32string_view text, std::u32string_view prefix);

/// Formats with 6 significant digits and parses back, so that JSON output of
/// the result is stable and diff-able.
double round_sig6(double value);
/// "%.6g" rendering.
std::string format_sig6(double value);
std::string hex64(unsigned long long value);

}  // namespace turingkit
