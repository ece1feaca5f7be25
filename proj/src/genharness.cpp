// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/genharness.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "http.hpp"
#include "turingkit/error.hpp"
#include "turingkit/parallel.hpp"
#include "turingkit/rng.hpp"
#include "turingkit/semsim.hpp"
#include "turingkit/text_util.hpp"
#include "turingkit/textfeat.hpp"

namespace turingkit::genharness {

using nlohmann::json;

std::string_view to_string(ConfigKind kind) {
    switch (kind) {
        case ConfigKind::BL: return "BL";
        case ConfigKind::PE: return "PE";
        case ConfigKind::PE_SE: return "PE+SE";
        case ConfigKind::PE_SE_CR: return "PE+SE+CR";
    }
    return "unknown";
}

ConfigKind parse_config_kind(std::string_view text) {
    std::string norm = ascii_lower(trim(text));
    std::replace(norm.begin(), norm.end(), '_', '+');
    if (norm == "bl") return ConfigKind::BL;
    if (norm == "pe") return ConfigKind::PE;
    if (norm == "pe+se") return ConfigKind::PE_SE;
    if (norm == "pe+se+cr") return ConfigKind::PE_SE_CR;
    throw InvalidArgument("unknown prompt configuration '" + std::string(text) + "' (expected BL, PE, PE+SE or PE+SE+CR)");
}

// ---------------------------------------------------------------------------
// Clients

HttpChatClient::HttpChatClient(ChatEndpoint endpoint)
    : endpoint_(std::move(endpoint)), url_(http::join_url(endpoint_.base_url, "/chat/completions")) {
    if (!endpoint_.auth_env.empty()) {
        const char* value = std::getenv(endpoint_.auth_env.c_str());
        if (value == nullptr || *value == '\0')
            throw ConfigError("environment variable " + endpoint_.auth_env + " named by endpoint.auth_env is not set");
        token_ = value;
    }
}

std::vector<Completion> HttpChatClient::complete(const ChatRequest& request) const {
    json messages = json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    json body{{"model", request.model},       {"messages", std::move(messages)},
              {"temperature", request.temperature}, {"n", request.n},
              {"max_tokens", request.max_tokens},   {"seed", request.seed}};
    http::Headers headers;
    if (token_) headers.emplace_back("Authorization", "Bearer " + *token_);
    json reply;
    try {
        reply = http::post_json(url_, body, endpoint_.timeout_seconds, headers);
    } catch (const http::HttpError& e) {
        if (e.status() == 0 || e.status() == 429 || e.status() >= 500) throw TransientError(e.what());
        throw EndpointError(e.what());
    }
    auto choices = reply.find("choices");
    if (choices == reply.end() || !choices->is_array())
        throw EndpointError("chat endpoint " + url_ + " returned no 'choices' array");
    std::vector<Completion> out;
    for (const auto& choice : *choices) {
        Completion c;
        if (auto msg = choice.find("message"); msg != choice.end() && msg->is_object()) {
            if (auto content = msg->find("content"); content != msg->end() && content->is_string())
                c.text = content->get<std::string>();
        }
        if (auto fr = choice.find("finish_reason"); fr != choice.end() && fr->is_string())
            c.finish_reason = fr->get<std::string>();
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

constexpr std::string_view kRepliesMarker = "### USER REPLIES";

std::string section(std::string_view text, std::string_view marker) {
    auto start = text.find(marker);
    if (start == std::string_view::npos) return {};
    start += marker.size();
    auto end = text.find("\n### ", start);
    return std::string(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
}

std::vector<std::string> content_words(std::string_view text) {
    std::vector<std::string> out;
    for (auto& w : textfeat::tokenize(text).words)
        if (w.size() >= 3) out.push_back(std::move(w));
    return out;
}

std::string fake_persona(std::string_view prompt) {
    std::map<std::string, std::size_t> freq;
    for (const auto& w : content_words(section(prompt, kRepliesMarker)))
        if (w.size() >= 4) ++freq[w];
    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> top;
    for (std::size_t i = 0; i < std::min<std::size_t>(5, ranked.size()); ++i) top.push_back(ranked[i].first);
    if (top.empty()) return "A quiet user who rarely posts.";
    return "An engaged user who writes short replies and often talks about " + join(top, ", ") + ".";
}

std::string fake_reply(std::string_view prompt, std::uint64_t seed, std::size_t index) {
    const auto message = content_words(section(prompt, kMessageMarker));
    auto context = content_words(section(prompt, kPersonaMarker));
    for (auto& w : content_words(section(prompt, kStyleMarker))) context.push_back(std::move(w));
    for (auto& w : content_words(section(prompt, kContextMarker))) context.push_back(std::move(w));
    Rng rng(derive_seed(seed ^ fnv1a64(prompt), index));
    const std::size_t length = 5 + rng.uniform_below(8);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < length; ++i) {
        const bool from_message = context.empty() || (!message.empty() && rng.bernoulli(0.5));
        if (from_message && !message.empty())
            words.push_back(rng.pick(message));
        else if (!context.empty())
            words.push_back(rng.pick(context));
    }
    if (words.empty()) words = {"sure", "thing"};
    std::string text = join(words, " ");
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    return text + (rng.bernoulli(0.2) ? "!" : ".");
}

}  // namespace

std::unique_ptr<FakeChatClient> FakeChatClient::from_url(std::string_view url) {
    Options options;
    const auto q = url.find('?');
    if (q != std::string_view::npos) {
        for (const auto& kv : split(url.substr(q + 1), '&')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("malformed fake endpoint option '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            std::size_t value = 0;
            try {
                value = std::stoul(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw ConfigError("fake endpoint option '" + key + "' needs an integer");
            }
            if (key == "empty_every")
                options.empty_every = value;
            else if (key == "fail_first")
                options.fail_first = value;
            else
                throw ConfigError("unknown fake endpoint option '" + key + "'");
        }
    }
    return std::make_unique<FakeChatClient>(options);
}

void FakeChatClient::enqueue(std::vector<Completion> response) {
    std::lock_guard lock(mutex_);
    script_.emplace_back(std::move(response));
}

void FakeChatClient::enqueue_failure() {
    std::lock_guard lock(mutex_);
    script_.emplace_back(std::nullopt);
}

std::vector<Completion> FakeChatClient::complete(const ChatRequest& request) const {
    std::lock_guard lock(mutex_);
    const std::size_t call = calls_++;
    requests_.push_back(request);
    if (script_pos_ < script_.size()) {
        const auto& step = script_[script_pos_++];
        if (!step) throw TransientError("fake endpoint: scripted transient failure");
        return *step;
    }
    if (call < options_.fail_first) throw TransientError("fake endpoint: transient failure " + std::to_string(call + 1));

    std::string prompt;
    for (const auto& m : request.messages) prompt += m.content + "\n";
    std::vector<Completion> out;
    if (prompt.find(kRepliesMarker) != std::string::npos) {
        out.push_back({fake_persona(prompt), "stop"});
        return out;
    }
    for (std::size_t i = 0; i < request.n; ++i) {
        ++completions_;
        if (options_.empty_every != 0 && completions_ % options_.empty_every == 0) {
            out.push_back({"", "content_filter"});
            continue;
        }
        out.push_back({fake_reply(prompt, request.seed, i), "stop"});
    }
    return out;
}

std::size_t FakeChatClient::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::vector<ChatRequest> FakeChatClient::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::unique_ptr<ChatClient> make_chat_client(const ChatEndpoint& endpoint) {
    if (endpoint.base_url.rfind("fake://", 0) == 0) return FakeChatClient::from_url(endpoint.base_url);
    return std::make_unique<HttpChatClient>(endpoint);
}

std::vector<Completion> complete_with_retry(const ChatClient& client, const ChatRequest& request,
                                            const RetryPolicy& policy) {
    const std::size_t attempts = std::max<std::size_t>(1, policy.max_attempts);
    auto backoff = policy.initial_backoff;
    for (std::size_t attempt = 1;; ++attempt) {
        try {
            return client.complete(request);
        } catch (const TransientError& e) {
            if (attempt >= attempts)
                throw EndpointError("chat endpoint " + client.name() + " failed after " + std::to_string(attempts) +
                                    " attempts: " + e.what());
            spdlog::warn("chat endpoint {}: {} (attempt {}/{}, retrying in {} ms)", client.name(), e.what(), attempt,
                         attempts, backoff.count());
            std::this_thread::sleep_for(backoff);
            backoff = std::min(policy.max_backoff, std::chrono::milliseconds(static_cast<long long>(
                                                       static_cast<double>(backoff.count()) * policy.multiplier)));
        }
    }
}

// ---------------------------------------------------------------------------
// Templates

namespace {

constexpr std::string_view kPersonaSystem = "You write concise persona descriptions of social media users.";
constexpr std::string_view kPersonaInstruction =
    "Read the replies below, all written by one {platform} user. Describe this user in one short paragraph: "
    "their interests, recurring opinions, tone, and writing style (reply length, punctuation, capitalization, "
    "emoji and hashtag use).";
constexpr std::string_view kTaskInstruction =
    "Write a concise, one-sentence reply to the message below, as a {platform} user would. "
    "Output only the reply text.";
constexpr std::string_view kPersonaPreamble = "You are the user described here. Reply in their voice.";
constexpr std::string_view kStylePreamble = "Prior replies written by this user:";
constexpr std::string_view kContextPreamble = "Earlier posts by this user related to the message:";

std::string fill_platform(std::string_view tmpl, const corpus::Platform& platform) {
    std::string out(tmpl);
    const std::string name = platform.name.empty() ? "social media" : platform.name;
    const auto pos = out.find("{platform}");
    if (pos != std::string::npos) out.replace(pos, 10, name);
    return out;
}

std::string one_line(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) out.push_back(c == '\n' || c == '\r' ? ' ' : c);
    return std::string(trim(out));
}

std::string version_tag(std::string_view version) { return "[" + std::string(version) + "]"; }

}  // namespace

std::string persona_template_hash() {
    std::string all = std::string(kPersonaTemplateVersion) + '\x1f' + std::string(kPersonaSystem) + '\x1f' +
                      std::string(kPersonaInstruction) + '\x1f' + std::string(kRepliesMarker);
    return hex64(fnv1a64(all));
}

std::string prompt_template_hash() {
    std::string all;
    for (std::string_view part : {kPromptTemplateVersion, kTaskMarker, kTaskInstruction, kPersonaMarker, kPersonaPreamble,
                                  kStyleMarker, kStylePreamble, kContextMarker, kContextPreamble, kMessageMarker}) {
        all += part;
        all += '\x1f';
    }
    return hex64(fnv1a64(all));
}

ChatRequest persona_request(const corpus::Corpus& corpus, std::string_view user_id, const ChatEndpoint& endpoint,
                            std::size_t sample_size, std::uint64_t seed) {
    const auto* user = corpus.find_user(user_id);
    if (user == nullptr) throw InvalidArgument("unknown user '" + std::string(user_id) + "'");
    const auto train = corpus.replies_of(user_id, corpus::Split::train);
    if (train.empty()) throw InvalidArgument("user '" + std::string(user_id) + "' has no training replies");

    Rng rng(derive_seed(seed, fnv1a64(user_id)));
    auto picks = rng.sample_indices(train.size(), std::min(sample_size, train.size()));
    std::sort(picks.begin(), picks.end());

    std::string content = version_tag(kPersonaTemplateVersion) + "\n" + fill_platform(kPersonaInstruction, user->platform) +
                          "\n" + std::string(kRepliesMarker) + "\n";
    for (std::size_t i : picks) content += "- " + one_line(train[i]->text) + "\n";

    ChatRequest request;
    request.model = endpoint.model_name;
    request.messages = {{"system", std::string(kPersonaSystem)}, {"user", std::move(content)}};
    request.temperature = endpoint.temperature;
    request.n = 1;
    request.max_tokens = std::max<std::size_t>(endpoint.max_tokens, 300);
    request.seed = seed;
    return request;
}

std::string build_persona(const corpus::Corpus& corpus, std::string_view user_id, const ChatClient& client,
                          const ChatEndpoint& endpoint, std::uint64_t seed, std::size_t sample_size) {
    const auto request = persona_request(corpus, user_id, endpoint, sample_size, seed);
    const auto completions = complete_with_retry(client, request, endpoint.retry);
    if (completions.empty() || trim(completions.front().text).empty())
        throw EndpointError("persona endpoint returned an empty completion for user '" + std::string(user_id) + "'");
    return std::string(trim(completions.front().text));
}

// ---------------------------------------------------------------------------
// Retrieval

RetrievalIndex RetrievalIndex::build(const corpus::Corpus& corpus, const Encoder& encoder, std::size_t jobs) {
    std::vector<const corpus::Reply*> train;
    std::vector<std::string> texts;
    for (const auto& r : corpus.replies())
        if (r.split == corpus::Split::train && r.source.human) {
            train.push_back(&r);
            texts.push_back(r.text);
        }
    auto vectors = encoder.embed_batch(texts, jobs);
    RetrievalIndex index;
    index.encoder_name_ = encoder.name();
    index.dim_ = encoder.dimension();
    for (std::size_t i = 0; i < train.size(); ++i)
        index.add(train[i]->user_id, Entry{train[i]->id, train[i]->text, std::move(vectors[i])});
    return index;
}

void RetrievalIndex::add(std::string user_id, Entry entry) {
    if (dim_ == 0) dim_ = entry.embedding.size();
    if (entry.embedding.size() != dim_)
        throw InvalidArgument("retrieval index entry '" + entry.reply_id + "' has dimension " +
                              std::to_string(entry.embedding.size()) + ", expected " + std::to_string(dim_));
    users_[std::move(user_id)].push_back(std::move(entry));
}

const std::vector<RetrievalIndex::Entry>* RetrievalIndex::entries(std::string_view user_id) const {
    auto it = users_.find(user_id);
    return it == users_.end() ? nullptr : &it->second;
}

std::vector<RetrievalIndex::Hit> RetrievalIndex::retrieve(std::string_view user_id, std::span<const double> query,
                                                          std::size_t k,
                                                          const std::vector<std::string>& exclude_texts) const {
    const auto* list = entries(user_id);
    if (list == nullptr || list->empty())
        throw InvalidArgument("retrieval index has no entries for user '" + std::string(user_id) + "'");
    std::vector<Hit> hits;
    for (const auto& e : *list) {
        if (std::find(exclude_texts.begin(), exclude_texts.end(), e.text) != exclude_texts.end()) continue;
        hits.push_back({e.reply_id, e.text, semsim::cosine(query, e.embedding)});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.score > b.score; });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

// ---------------------------------------------------------------------------
// Prompts

std::vector<const corpus::Reply*> style_examples(const corpus::Corpus& corpus, std::string_view user_id,
                                                 std::size_t n, std::uint64_t seed) {
    const auto train = corpus.replies_of(user_id, corpus::Split::train);
    Rng rng(derive_seed(derive_seed(seed, 0x57E1E), fnv1a64(user_id)));
    auto picks = rng.sample_indices(train.size(), std::min(n, train.size()));
    std::sort(picks.begin(), picks.end());
    std::vector<const corpus::Reply*> out;
    for (std::size_t i : picks) out.push_back(train[i]);
    return out;
}

Prompt build_prompt(const PromptConfig& config, const corpus::Corpus& corpus, std::string_view user_id,
                    std::string_view parent_text, const RetrievalIndex* index, const Encoder* encoder,
                    std::uint64_t seed) {
    const auto* user = corpus.find_user(user_id);
    if (user == nullptr) throw InvalidArgument("unknown user '" + std::string(user_id) + "'");
    const bool needs_persona = config.kind != ConfigKind::BL;
    const bool needs_style = config.kind == ConfigKind::PE_SE || config.kind == ConfigKind::PE_SE_CR;
    const bool needs_retrieval = config.kind == ConfigKind::PE_SE_CR;
    if (needs_persona && (!user->persona || trim(*user->persona).empty()))
        throw InvalidArgument("configuration " + std::string(to_string(config.kind)) + " needs a persona for user '" +
                              std::string(user_id) + "'; run the persona step first");
    if (needs_retrieval) {
        if (index == nullptr || encoder == nullptr)
            throw InvalidArgument("configuration PE+SE+CR needs a retrieval index and an encoder");
        const auto* list = index->entries(user_id);
        if (list == nullptr || list->empty())
            throw InvalidArgument("retrieval index is empty for user '" + std::string(user_id) + "'");
    }

    Prompt prompt;
    prompt.template_hash = prompt_template_hash();
    std::string& t = prompt.text;
    t += version_tag(kPromptTemplateVersion) + "\n";
    t += std::string(kTaskMarker) + "\n" + fill_platform(kTaskInstruction, user->platform) + "\n";
    if (needs_persona) t += std::string(kPersonaMarker) + "\n" + std::string(kPersonaPreamble) + "\n" + one_line(*user->persona) + "\n";

    std::vector<std::string> style_texts;
    if (needs_style) {
        t += std::string(kStyleMarker) + "\n" + std::string(kStylePreamble) + "\n";
        for (const auto* r : style_examples(corpus, user_id, config.n_style_examples, seed)) {
            t += "- " + one_line(r->text) + "\n";
            prompt.style_reply_ids.push_back(r->id);
            style_texts.push_back(r->text);
        }
    }
    if (needs_retrieval) {
        const Embedding query = encoder->embed(parent_text);
        prompt.retrieved = index->retrieve(user_id, query, config.n_retrieved, style_texts);
        t += std::string(kContextMarker) + "\n" + std::string(kContextPreamble) + "\n";
        for (const auto& hit : prompt.retrieved) t += "- " + one_line(hit.text) + "\n";
    }
    t += std::string(kMessageMarker) + "\n" + one_line(parent_text) + "\n";
    return prompt;
}

// ---------------------------------------------------------------------------
// Generation

Generation generate_candidates(const ChatClient& client, const ChatEndpoint& endpoint, std::string_view prompt,
                               std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("generate_candidates: n must be at least 1");
    const auto budget = static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(n)));
    Generation gen;
    for (std::size_t request_no = 0; gen.candidates.size() < n && gen.attempted < budget; ++request_no) {
        ChatRequest request;
        request.model = endpoint.model_name;
        request.messages = {{"user", std::string(prompt)}};
        request.temperature = endpoint.temperature;
        request.n = std::min(n - gen.candidates.size(), budget - gen.attempted);
        request.max_tokens = endpoint.max_tokens;
        request.seed = derive_seed(seed, request_no);
        gen.attempted += request.n;

        const auto start = std::chrono::steady_clock::now();
        const auto completions = complete_with_retry(client, request, endpoint.retry);
        RequestLog entry;
        entry.request = request_no;
        entry.requested = request.n;
        entry.returned = completions.size();
        entry.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        for (const auto& c : completions) {
            entry.finish_reasons.push_back(c.finish_reason);
            std::string text(trim(c.text));
            if (text.empty()) {
                ++entry.empty;
                continue;
            }
            if (gen.candidates.size() < n) gen.candidates.push_back(std::move(text));
        }
        spdlog::debug("chat request {}: requested={} returned={} empty={} latency_ms={:.1f}", request_no,
                      entry.requested, entry.returned, entry.empty, entry.latency_ms);
        if (request_no > 0)
            spdlog::info("over-provisioned request {} for {} more completion(s)", request_no, entry.requested);
        gen.log.push_back(std::move(entry));
    }
    gen.partial = gen.candidates.size() < n;
    if (gen.partial)
        spdlog::warn("only {} of {} non-empty completions after requesting {}", gen.candidates.size(), n, gen.attempted);
    return gen;
}

BatchResult generate_batch(const ChatClient& client, const ChatEndpoint& endpoint, const corpus::Corpus& corpus,
                           std::span<const GenerationJob> jobs, const BatchOptions& options,
                           const RetrievalIndex* index, const Encoder* encoder) {
    BatchResult result;
    result.sets.resize(jobs.size());
    result.generations.resize(jobs.size());
    const std::string config_id(to_string(options.prompt.kind));
    parallel_for(jobs.size(), endpoint.max_concurrency, [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto prompt = build_prompt(options.prompt, corpus, job.user_id, job.parent_text, index, encoder, options.seed);
        auto gen = generate_candidates(client, endpoint, prompt.text, options.n,
                                       derive_seed(options.seed, fnv1a64(job.reply_id)));
        result.sets[i] = selector::CandidateSet{job.reply_id, job.user_id, endpoint.model_name, config_id, gen.candidates};
        result.generations[i] = std::move(gen);
    });
    for (const auto& g : result.generations)
        if (g.partial) ++result.partial_sets;
    return result;
}

}  // namespace turingkit::genharness
