// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "turingkit/error.hpp"

namespace turingkit::http {

/// Transport failure or non-2xx status. status == 0 means no response.
class HttpError : public Error {
public:
    HttpError(std::string message, int status) : Error(std::move(message)), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

struct Url {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 0;
    std::string path;  // begins with '/'

    static Url parse(std::string_view text);
    std::string origin() const;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// POSTs a JSON body and parses the JSON reply.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body, double timeout_seconds,
                         const Headers& headers = {});

/// Joins a base url and a path without doubling slashes.
std::string join_url(std::string_view base, std::string_view path);

}  // namespace turingkit::http
