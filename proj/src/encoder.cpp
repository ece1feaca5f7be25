// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/encoder.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "http.hpp"
#include "turingkit/error.hpp"
#include "turingkit/parallel.hpp"
#include "turingkit/rng.hpp"
#include "turingkit/text_util.hpp"
#include "turingkit/textfeat.hpp"
#include "turingkit/unicode.hpp"

namespace turingkit {

std::vector<Embedding> Encoder::embed_batch(std::span<const std::string> texts, std::size_t jobs) const {
    std::vector<Embedding> out(texts.size());
    parallel_for(texts.size(), supports_concurrency() ? jobs : 1, [&](std::size_t i) { out[i] = embed(texts[i]); });
    return out;
}

HashedEncoder::HashedEncoder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim == 0) throw InvalidArgument("HashedEncoder dimension must be positive");
}

std::string HashedEncoder::name() const {
    return "hashed-fallback:dim=" + std::to_string(dim_) + ",seed=" + std::to_string(seed_);
}

Embedding HashedEncoder::embed(std::string_view text) const {
    Embedding v(dim_, 0.0);
    const std::uint64_t basis = fnv1a64("turingkit-hash") ^ mix64(seed_);
    auto add = [&](std::u32string_view feature) {
        const std::uint64_t h = mix64(fnv1a64(unicode::encode_utf8(feature), basis));
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[h % dim_] += sign;
    };

    const std::u32string cps = unicode::to_lower(unicode::decode_utf8(text));
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && unicode::is_whitespace(cps[i])) ++i;
        std::size_t j = i;
        while (j < cps.size() && !unicode::is_whitespace(cps[j])) ++j;
        if (j > i) {
            std::u32string token = U" ";
            token.append(cps, i, j - i);
            token.push_back(U' ');
            add(std::u32string_view(token).substr(1, token.size() - 2));
            for (std::size_t k = 0; k + 3 <= token.size(); ++k) add(std::u32string_view(token).substr(k, 3));
        }
        i = j;
    }

    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

HttpEncoder::HttpEncoder(std::string url, std::size_t dimension, double timeout_seconds, std::size_t batch_size)
    : url_(std::move(url)), dim_(dimension), timeout_seconds_(timeout_seconds), batch_size_(std::max<std::size_t>(1, batch_size)) {
    if (http::Url::parse(url_).path == "/") url_ = http::join_url(url_, "/embed");
}

Embedding HttpEncoder::embed(std::string_view text) const {
    const std::string one(text);
    return embed_batch(std::span<const std::string>(&one, 1)).front();
}

std::vector<Embedding> HttpEncoder::embed_batch(std::span<const std::string> texts, std::size_t jobs) const {
    std::vector<Embedding> out(texts.size());
    const std::size_t n_batches = (texts.size() + batch_size_ - 1) / batch_size_;
    parallel_for(n_batches, jobs, [&](std::size_t b) {
        const std::size_t lo = b * batch_size_;
        const std::size_t hi = std::min(texts.size(), lo + batch_size_);
        nlohmann::json body{{"texts", std::vector<std::string>(texts.begin() + lo, texts.begin() + hi)}};
        nlohmann::json reply;
        try {
            reply = http::post_json(url_, body, timeout_seconds_);
        } catch (const Error& e) {
            throw EncoderError(std::string("encoder backend unavailable: ") + e.what());
        }
        auto it = reply.find("vectors");
        if (it == reply.end() || !it->is_array() || it->size() != hi - lo)
            throw EncoderError("encoder at " + url_ + " returned a malformed reply");
        for (std::size_t k = 0; k < hi - lo; ++k) {
            const auto& vec = (*it)[k];
            if (!vec.is_array() || vec.size() != dim_)
                throw EncoderError("encoder at " + url_ + " returned " + std::to_string(vec.is_array() ? vec.size() : 0) +
                                   " values for a " + std::to_string(dim_) + "-dimensional handle");
            Embedding e;
            e.reserve(dim_);
            for (const auto& x : vec) {
                if (!x.is_number()) throw EncoderError("encoder at " + url_ + " returned a non-numeric value");
                e.push_back(x.get<double>());
                if (!std::isfinite(e.back())) throw EncoderError("encoder at " + url_ + " returned a non-finite value");
            }
            out[lo + k] = std::move(e);
        }
    });
    return out;
}

WordVectorEncoder::WordVectorEncoder(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path);
    if (!in) throw EncoderError("model artifact missing: '" + path_ + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string word;
        if (!(fields >> word)) continue;
        std::vector<double> values;
        double x = 0;
        while (fields >> x) values.push_back(x);
        if (line_no == 1 && values.size() == 1) continue;  // word2vec "count dim" header
        if (values.empty()) throw EncoderError(path_ + ": line " + std::to_string(line_no) + " has no vector");
        if (dim_ == 0) dim_ = values.size();
        if (values.size() != dim_)
            throw EncoderError(path_ + ": line " + std::to_string(line_no) + " has dimension " +
                               std::to_string(values.size()) + ", expected " + std::to_string(dim_));
        vectors_.emplace(ascii_lower(word), std::move(values));
    }
    if (vectors_.empty()) throw EncoderError("model artifact '" + path_ + "' contains no vectors");
}

Embedding WordVectorEncoder::embed(std::string_view text) const {
    Embedding v(dim_, 0.0);
    std::size_t found = 0;
    for (const auto& w : textfeat::tokenize(text).words) {
        auto it = vectors_.find(w);
        if (it == vectors_.end()) continue;
        for (std::size_t k = 0; k < dim_; ++k) v[k] += it->second[k];
        ++found;
    }
    if (found > 0)
        for (double& x : v) x /= static_cast<double>(found);
    return v;
}

std::unique_ptr<Encoder> make_encoder(std::string_view spec) {
    if (spec.empty() || spec == "fallback") return std::make_unique<HashedEncoder>();
    if (spec.substr(0, 9) == "fallback:") {
        std::size_t dim = 0;
        auto rest = spec.substr(9);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), dim);
        if (ec != std::errc() || ptr != rest.data() + rest.size() || dim == 0)
            throw InvalidArgument("bad encoder spec '" + std::string(spec) + "'");
        return std::make_unique<HashedEncoder>(dim);
    }
    if (spec.substr(0, 7) == "http://" || spec.substr(0, 8) == "https://") {
        std::size_t dim = 384;
        std::string url(spec);
        if (auto hash = url.rfind('#'); hash != std::string::npos) {
            dim = std::stoul(url.substr(hash + 1));
            url.resize(hash);
        }
        return std::make_unique<HttpEncoder>(url, dim);
    }
    return std::make_unique<WordVectorEncoder>(std::filesystem::path(std::string(spec)));
}

}  // namespace turingkit
