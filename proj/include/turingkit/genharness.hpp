// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turingkit/corpus.hpp"
#include "turingkit/encoder.hpp"
#include "turingkit/error.hpp"
#include "turingkit/selector.hpp"

namespace turingkit::genharness {

enum class ConfigKind { BL, PE, PE_SE, PE_SE_CR };

/// "BL", "PE", "PE+SE", "PE+SE+CR".
std::string_view to_string(ConfigKind kind);
/// Accepts the names above, with '_' in place of '+', case-insensitive.
ConfigKind parse_config_kind(std::string_view text);
inline constexpr ConfigKind kAllConfigKinds[] = {ConfigKind::BL, ConfigKind::PE, ConfigKind::PE_SE,
                                                 ConfigKind::PE_SE_CR};

struct PromptConfig {
    ConfigKind kind = ConfigKind::BL;
    std::size_t n_style_examples = 10;
    std::size_t n_retrieved = 3;
};

struct RetryPolicy {
    std::size_t max_attempts = 4;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{8000};
};

struct ChatEndpoint {
    std::string base_url;  // http(s)://host[:port][/prefix] or fake://...
    std::string model_name;
    double temperature = 0.8;
    std::size_t max_tokens = 120;
    std::string auth_env;  // name of the environment variable holding the bearer token
    double timeout_seconds = 60.0;
    RetryPolicy retry;
    std::size_t max_concurrency = 4;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.8;
    std::size_t n = 1;
    std::size_t max_tokens = 120;
    std::uint64_t seed = 0;
};

struct Completion {
    std::string text;
    std::string finish_reason;
};

/// Transport failures throw http-level errors that RetryPolicy retries;
/// anything else derived from Error is treated as permanent.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::vector<Completion> complete(const ChatRequest& request) const = 0;
    virtual std::string name() const = 0;
};

/// Thrown by clients for failures worth retrying (no response, 429, 5xx).
class TransientError : public EndpointError {
public:
    using EndpointError::EndpointError;
};

/// Chat-completions wire protocol: POST <base>/chat/completions with
/// {"model", "messages", "temperature", "n", "max_tokens", "seed"}; reads
/// choices[].message.content and choices[].finish_reason.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(ChatEndpoint endpoint);
    std::vector<Completion> complete(const ChatRequest& request) const override;
    std::string name() const override { return url_; }

private:
    ChatEndpoint endpoint_;
    std::string url_;
    std::optional<std::string> token_;
};

/// Offline endpoint. Without a script it answers deterministically from the
/// prompt: persona requests get a summary of the most frequent words, reply
/// requests get a short sentence stitched from words of the message and of
/// any examples in the prompt. Scripted responses, when queued, are served
/// first in order.
///
/// Options for fake:// urls (query string): empty_every=K makes every K-th
/// completion empty; fail_first=K makes the first K calls fail transiently.
class FakeChatClient final : public ChatClient {
public:
    struct Options {
        std::size_t empty_every = 0;
        std::size_t fail_first = 0;
    };

    FakeChatClient() = default;
    explicit FakeChatClient(Options options) : options_(options) {}
    static std::unique_ptr<FakeChatClient> from_url(std::string_view url);

    void enqueue(std::vector<Completion> response);
    void enqueue_failure();

    std::vector<Completion> complete(const ChatRequest& request) const override;
    std::string name() const override { return "fake"; }

    std::size_t calls() const;
    std::vector<ChatRequest> requests() const;

private:
    Options options_;
    mutable std::mutex mutex_;
    mutable std::vector<std::optional<std::vector<Completion>>> script_;  // nullopt = transient failure
    mutable std::size_t script_pos_ = 0;
    mutable std::size_t calls_ = 0;
    mutable std::size_t completions_ = 0;
    mutable std::vector<ChatRequest> requests_;
};

/// fake:// urls give a FakeChatClient, everything else an HttpChatClient.
std::unique_ptr<ChatClient> make_chat_client(const ChatEndpoint& endpoint);

/// Sends a request, retrying transient failures with exponential backoff.
std::vector<Completion> complete_with_retry(const ChatClient& client, const ChatRequest& request,
                                            const RetryPolicy& policy);

inline constexpr std::string_view kPersonaTemplateVersion = "persona-v1";
inline constexpr std::string_view kPromptTemplateVersion = "prompt-v1";
inline constexpr std::size_t kPersonaSampleSize = 100;

/// Hash of the persona or prompt template text, cited in manifests.
std::string persona_template_hash();
std::string prompt_template_hash();

/// The persona-synthesis request for a user: min(sample_size, available)
/// training replies drawn with the seed. Throws InvalidArgument if the user
/// has no training replies.
ChatRequest persona_request(const corpus::Corpus& corpus, std::string_view user_id, const ChatEndpoint& endpoint,
                            std::size_t sample_size, std::uint64_t seed);

/// Runs persona_request and returns the trimmed completion. Throws
/// EndpointError on an empty completion or when retries run out.
std::string build_persona(const corpus::Corpus& corpus, std::string_view user_id, const ChatClient& client,
                          const ChatEndpoint& endpoint, std::uint64_t seed,
                          std::size_t sample_size = kPersonaSampleSize);

/// Per-user training replies with their embeddings.
class RetrievalIndex {
public:
    struct Entry {
        std::string reply_id;
        std::string text;
        Embedding embedding;
    };
    struct Hit {
        std::string reply_id;
        std::string text;
        double score = 0.0;
    };

    static RetrievalIndex build(const corpus::Corpus& corpus, const Encoder& encoder, std::size_t jobs = 1);

    void add(std::string user_id, Entry entry);
    const std::vector<Entry>* entries(std::string_view user_id) const;
    bool empty() const noexcept { return users_.empty(); }
    std::size_t dimension() const noexcept { return dim_; }
    const std::string& encoder_name() const noexcept { return encoder_name_; }

    /// Top-k entries by cosine to the query, in non-increasing score order
    /// (earlier entries first on ties), skipping excluded texts.
    std::vector<Hit> retrieve(std::string_view user_id, std::span<const double> query, std::size_t k,
                              const std::vector<std::string>& exclude_texts = {}) const;

private:
    std::map<std::string, std::vector<Entry>, std::less<>> users_;
    std::size_t dim_ = 0;
    std::string encoder_name_;
};

struct Prompt {
    std::string text;
    std::vector<std::string> style_reply_ids;
    std::vector<RetrievalIndex::Hit> retrieved;
    std::string template_hash;
};

/// Section markers, in prompt order.
inline constexpr std::string_view kTaskMarker = "### TASK";
inline constexpr std::string_view kPersonaMarker = "### PERSONA";
inline constexpr std::string_view kStyleMarker = "### STYLE EXAMPLES";
inline constexpr std::string_view kContextMarker = "### RELATED POSTS";
inline constexpr std::string_view kMessageMarker = "### MESSAGE";

/// Style examples for a user: up to n training replies, drawn once per
/// (seed, user) so every message of the user sees the same examples.
std::vector<const corpus::Reply*> style_examples(const corpus::Corpus& corpus, std::string_view user_id,
                                                 std::size_t n, std::uint64_t seed);

/// Assembles the prompt for one message. Throws InvalidArgument when the
/// configuration needs a persona the user lacks, or needs a retrieval index
/// and encoder that are missing or empty for the user.
Prompt build_prompt(const PromptConfig& config, const corpus::Corpus& corpus, std::string_view user_id,
                    std::string_view parent_text, const RetrievalIndex* index, const Encoder* encoder,
                    std::uint64_t seed);

struct RequestLog {
    std::size_t request = 0;
    std::size_t requested = 0;
    std::size_t returned = 0;
    std::size_t empty = 0;
    double latency_ms = 0.0;
    std::vector<std::string> finish_reasons;
};

struct Generation {
    std::vector<std::string> candidates;  // endpoint return order, trimmed, non-empty
    std::size_t attempted = 0;            // completions requested in total
    bool partial = false;                 // fewer than n after the over-provisioning budget
    std::vector<RequestLog> log;
};

/// Requests n completions, topping up with further requests until n
/// non-empty replies arrive or ceil(1.5 n) completions have been requested.
Generation generate_candidates(const ChatClient& client, const ChatEndpoint& endpoint, std::string_view prompt,
                               std::size_t n, std::uint64_t seed);

struct GenerationJob {
    std::string reply_id;
    std::string user_id;
    std::string parent_text;
};

struct BatchOptions {
    PromptConfig prompt;
    std::size_t n = 20;
    std::uint64_t seed = 0;
};

struct BatchResult {
    std::vector<selector::CandidateSet> sets;  // job order
    std::vector<Generation> generations;
    std::size_t partial_sets = 0;
};

/// Generates a candidate set per job, at most endpoint.max_concurrency in flight.
BatchResult generate_batch(const ChatClient& client, const ChatEndpoint& endpoint, const corpus::Corpus& corpus,
                           std::span<const GenerationJob> jobs, const BatchOptions& options,
                           const RetrievalIndex* index = nullptr, const Encoder* encoder = nullptr);

}  // namespace turingkit::genharness
