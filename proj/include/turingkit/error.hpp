// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace turingkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition on arguments (sizes, fractions, empty inputs).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A line-numbered problem found while reading an input file.
struct LineIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

/// Malformed or inconsistent input file; carries every offending line.
class ParseError : public Error {
public:
    ParseError(std::string path, std::vector<LineIssue> issues);

    const std::string& path() const noexcept { return path_; }
    const std::vector<LineIssue>& issues() const noexcept { return issues_; }

private:
    std::string path_;
    std::vector<LineIssue> issues_;
};

/// Embedding backend unavailable or returned a malformed result.
class EncoderError : public Error {
public:
    using Error::Error;
};

/// Toxicity scorer failure. Callers may catch this and fall back to the lexicon scorer.
class ScorerError : public Error {
public:
    using Error::Error;
};

/// Chat-completion endpoint failure (after retries) or unusable completion.
class EndpointError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or degenerate training data.
class TrainingError : public Error {
public:
    using Error::Error;
};

/// Configuration file problem; the message names the offending key path.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace turingkit
