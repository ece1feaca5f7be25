// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace turingkit {

using Embedding = std::vector<double>;

/// Sentence encoder. Embedding the same text twice yields the same vector,
/// and every vector has dimension() entries.
class Encoder {
public:
    virtual ~Encoder() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual Embedding embed(std::string_view text) const = 0;
    /// Whether embed may be called from several threads at once.
    virtual bool supports_concurrency() const { return true; }

    /// Embeds a batch, fanning out over up to `jobs` workers when supported.
    virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts, std::size_t jobs = 1) const;
};

/// Character n-gram feature hashing.
///
/// Features are the character trigrams of every lowercased whitespace token
/// padded with one space on each side, plus the token itself. Each feature is
/// hashed (FNV-1a 64 seeded with `seed`) into one of `dim` buckets with a sign
/// taken from the top hash bit; the result is L2-normalized. Text without
/// tokens maps to the zero vector.
class HashedEncoder final : public Encoder {
public:
    explicit HashedEncoder(std::size_t dim = 256, std::uint64_t seed = 0);

    std::string name() const override;
    std::size_t dimension() const override { return dim_; }
    Embedding embed(std::string_view text) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Remote encoder: POST <url> with {"texts": [str]} -> {"vectors": [[real]]}.
/// A url without a path gets "/embed" appended. Throws EncoderError on
/// transport failure, wrong vector count, or dimension mismatch.
class HttpEncoder final : public Encoder {
public:
    HttpEncoder(std::string url, std::size_t dimension, double timeout_seconds = 60.0, std::size_t batch_size = 64);

    std::string name() const override { return "http:" + url_; }
    std::size_t dimension() const override { return dim_; }
    Embedding embed(std::string_view text) const override;
    std::vector<Embedding> embed_batch(std::span<const std::string> texts, std::size_t jobs = 1) const override;

private:
    std::string url_;
    std::size_t dim_;
    double timeout_seconds_;
    std::size_t batch_size_;
};

/// Local model: static word vectors in GloVe/word2vec text format
/// ("word v1 ... vd" per line, optional "count dim" header), mean-pooled
/// over the tokenizer's word tokens. Throws EncoderError if the file is
/// missing or malformed.
class WordVectorEncoder final : public Encoder {
public:
    explicit WordVectorEncoder(const std::filesystem::path& path);

    std::string name() const override { return "word-vectors:" + path_; }
    std::size_t dimension() const override { return dim_; }
    Embedding embed(std::string_view text) const override;

private:
    std::string path_;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Builds an encoder from a spec string:
///   "fallback" | "fallback:<dim>"    -> HashedEncoder
///   "http(s)://...[#<dim>]"          -> HttpEncoder (default dim 384)
///   anything else                    -> WordVectorEncoder(path)
std::unique_ptr<Encoder> make_encoder(std::string_view spec);

}  // namespace turingkit
