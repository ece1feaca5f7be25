// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/text_util.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>

#include "turingkit/unicode.hpp"

namespace turingkit {

namespace {

// Width in bytes of a whitespace codepoint starting at s[i], or 0.
std::size_t leading_space(std::string_view s) {
    if (s.empty()) return 0;
    const auto c = static_cast<unsigned char>(s[0]);
    if (c < 0x80) return unicode::is_whitespace(c) ? 1 : 0;
    std::size_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : (c & 0xF8) == 0xF0 ? 4 : 1;
    if (len > s.size()) return 0;
    auto cps = unicode::decode_utf8(s.substr(0, len));
    return (cps.size() == 1 && unicode::is_whitespace(cps[0])) ? len : 0;
}

std::size_t trailing_space(std::string_view s) {
    if (s.empty()) return 0;
    std::size_t start = s.size() - 1;
    while (start > 0 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80 && s.size() - start < 4) --start;
    const std::size_t len = s.size() - start;
    return leading_space(s.substr(start)) == len ? len : 0;
}

}  // namespace

std::string_view trim_right(std::string_view text) {
    while (std::size_t n = trailing_space(text)) text.remove_suffix(n);
    return text;
}

std::string_view trim(std::string_view text) {
    while (std::size_t n = leading_space(text)) text.remove_prefix(n);
    return trim_right(text);
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    return out;
}

std::vector<std::string> split(std::string_view text, char delimiter) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        std::size_t end = text.find(delimiter, start);
        parts.emplace_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += separator;
        out += parts[i];
    }
    return out;
}

bool starts_with_icase(std::u32string_view text, std::u32string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (unicode::to_lower(text[i]) != unicode::to_lower(prefix[i])) return false;
    return true;
}

std::string format_sig6(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    return fmt::format("{:.6g}", value);
}

double round_sig6(double value) {
    if (!std::isfinite(value)) return value;
    double r = std::strtod(format_sig6(value).c_str(), nullptr);
    return r == 0.0 ? 0.0 : r;  // drop negative zero
}

std::string hex64(unsigned long long value) { return fmt::format("{:016x}", value); }

}  // namespace turingkit
