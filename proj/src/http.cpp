// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "http.hpp"

#include <cmath>

#include "httplib.h"

namespace turingkit::http {

Url Url::parse(std::string_view text) {
    Url url;
    const auto scheme_end = text.find("://");
    if (scheme_end == std::string_view::npos) throw InvalidArgument("url '" + std::string(text) + "' has no scheme");
    url.scheme = std::string(text.substr(0, scheme_end));
    if (url.scheme != "http" && url.scheme != "https")
        throw InvalidArgument("unsupported url scheme '" + url.scheme + "'");
    std::string_view rest = text.substr(scheme_end + 3);
    const auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    url.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        url.host = std::string(authority.substr(0, colon));
        url.port = std::stoi(std::string(authority.substr(colon + 1)));
    } else {
        url.host = std::string(authority);
        url.port = url.scheme == "https" ? 443 : 80;
    }
    if (url.host.empty()) throw InvalidArgument("url '" + std::string(text) + "' has no host");
    return url;
}

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

std::string join_url(std::string_view base, std::string_view path) {
    std::string out(base);
    while (!out.empty() && out.back() == '/') out.pop_back();
    if (!path.empty() && path.front() != '/') out.push_back('/');
    out += path;
    return out;
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body, double timeout_seconds,
                         const Headers& headers) {
    const Url parsed = Url::parse(url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (parsed.scheme == "https") throw HttpError("https support not compiled in (url " + url + ")", 0);
#endif
    httplib::Client client(parsed.origin());
    const auto secs = static_cast<time_t>(timeout_seconds);
    const auto usecs = static_cast<time_t>((timeout_seconds - std::floor(timeout_seconds)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);
    auto res = client.Post(parsed.path, hdrs, body.dump(), "application/json");
    if (!res) throw HttpError("POST " + url + " failed: " + httplib::to_string(res.error()), 0);
    if (res->status < 200 || res->status >= 300)
        throw HttpError("POST " + url + " returned HTTP " + std::to_string(res->status), res->status);
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw HttpError("POST " + url + " returned invalid JSON: " + e.what(), res->status);
    }
}

}  // namespace turingkit::http
