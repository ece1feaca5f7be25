// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/error.hpp"

#include <sstream>

namespace turingkit {

namespace {

std::string describe(const std::string& path, const std::vector<LineIssue>& issues) {
    std::ostringstream out;
    out << path << ": " << issues.size() << " malformed line(s)";
    constexpr std::size_t kShown = 10;
    for (std::size_t i = 0; i < issues.size() && i < kShown; ++i) {
        out << "\n  line " << issues[i].line << ": " << issues[i].message;
    }
    if (issues.size() > kShown) out << "\n  ...";
    return out.str();
}

}  // namespace

ParseError::ParseError(std::string path, std::vector<LineIssue> issues)
    : Error(describe(path, issues)), path_(std::move(path)), issues_(std::move(issues)) {}

}  // namespace turingkit
