// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "turingkit/error.hpp"
#include "turingkit/text_util.hpp"

namespace turingkit::jsonl {

/// Calls fn(object) for each non-blank line. Every line that fails to parse
/// or makes fn throw is collected; a ParseError listing them is thrown at the end.
template <typename Fn>
void for_each_object(std::string_view text, std::string_view source_name, Fn&& fn) {
    std::vector<LineIssue> issues;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            fn(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            issues.push_back({line_no, std::string("malformed JSON: ") + e.what()});
        } catch (const std::exception& e) {
            issues.push_back({line_no, e.what()});
        }
    }
    if (!issues.empty()) throw ParseError(std::string(source_name), std::move(issues));
}

inline std::string read_file(const std::filesystem::path& path, std::string_view what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + std::string(what) + " '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string required_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    if (!it->is_string()) throw std::invalid_argument(std::string("field \"") + key + "\" is not a string");
    return it->get<std::string>();
}

}  // namespace turingkit::jsonl
