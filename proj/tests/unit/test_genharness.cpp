// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "turingkit/error.hpp"
#include "turingkit/genharness.hpp"
#include "turingkit/semsim.hpp"

using namespace turingkit;
using namespace turingkit::genharness;

namespace {

ChatEndpoint quick_endpoint(std::string url = "fake://") {
    ChatEndpoint e;
    e.base_url = std::move(url);
    e.model_name = "test-model";
    e.retry.initial_backoff = std::chrono::milliseconds(1);
    e.retry.max_backoff = std::chrono::milliseconds(4);
    return e;
}

std::size_t count_lines_starting(const std::string& text, std::string_view begin, std::string_view end,
                                 std::string_view prefix) {
    const auto from = text.find(begin);
    if (from == std::string::npos) return 0;
    auto to = text.find(end, from + begin.size());
    if (to == std::string::npos) to = text.size();
    std::size_t n = 0;
    std::size_t pos = from;
    while ((pos = text.find("\n" + std::string(prefix), pos)) != std::string::npos && pos < to) {
        ++n;
        ++pos;
    }
    return n;
}

std::vector<Completion> texts(std::initializer_list<const char*> values) {
    std::vector<Completion> out;
    for (const char* v : values) out.push_back({v, "stop"});
    return out;
}

corpus::Corpus user_with_train(std::size_t n_train) {
    return tk_test::synthetic_corpus({.users = 1, .train_per_user = n_train, .test_per_user = 2, .seed = 3});
}

}  // namespace

TEST_CASE("config kind names") {
    CHECK(to_string(ConfigKind::PE_SE_CR) == "PE+SE+CR");
    CHECK(parse_config_kind("pe_se") == ConfigKind::PE_SE);
    CHECK(parse_config_kind("PE+SE+CR") == ConfigKind::PE_SE_CR);
    CHECK_THROWS_AS(parse_config_kind("FT"), InvalidArgument);
    CHECK(ChatEndpoint{}.temperature == 0.8);
    CHECK(PromptConfig{}.n_style_examples == 10);
    CHECK(PromptConfig{}.n_retrieved == 3);
}

TEST_CASE("persona request samples at most one hundred replies") {
    const auto big = user_with_train(140);
    const auto req = persona_request(big, "u0", quick_endpoint(), kPersonaSampleSize, 5);
    REQUIRE(req.messages.size() == 2);
    CHECK(count_lines_starting(req.messages[1].content, "### USER REPLIES", "\n###", "- ") == 100);
    CHECK(persona_request(big, "u0", quick_endpoint(), 100, 5).messages[1].content == req.messages[1].content);
    CHECK(persona_request(big, "u0", quick_endpoint(), 100, 6).messages[1].content != req.messages[1].content);

    const auto small = user_with_train(7);
    const auto req7 = persona_request(small, "u0", quick_endpoint(), kPersonaSampleSize, 5);
    CHECK(count_lines_starting(req7.messages[1].content, "### USER REPLIES", "\n###", "- ") == 7);

    CHECK_THROWS_AS(persona_request(user_with_train(0), "u0", quick_endpoint(), 100, 5), InvalidArgument);
}

TEST_CASE("persona from the fake endpoint and empty completions") {
    const auto c = user_with_train(20);
    FakeChatClient fake;
    const auto persona = build_persona(c, "u0", fake, quick_endpoint(), 1);
    CHECK_FALSE(persona.empty());

    FakeChatClient empty;
    empty.enqueue(texts({"   "}));
    CHECK_THROWS_AS(build_persona(c, "u0", empty, quick_endpoint(), 1), EndpointError);
}

TEST_CASE("retry with backoff") {
    FakeChatClient fake;
    fake.enqueue_failure();
    fake.enqueue_failure();
    fake.enqueue(texts({"ok"}));
    ChatRequest req;
    const auto out = complete_with_retry(fake, req, quick_endpoint().retry);
    CHECK(out.size() == 1);
    CHECK(fake.calls() == 3);

    FakeChatClient dead({.empty_every = 0, .fail_first = 100});
    CHECK_THROWS_AS(complete_with_retry(dead, req, quick_endpoint().retry), EndpointError);
    CHECK(dead.calls() == 4);
}

TEST_CASE("over-provisioning covers empty completions") {
    FakeChatClient fake;
    std::vector<Completion> first;
    for (int i = 0; i < 20; ++i) first.push_back({i % 7 == 3 ? "" : "reply " + std::to_string(i), "stop"});
    REQUIRE(std::count_if(first.begin(), first.end(), [](const auto& c) { return c.text.empty(); }) == 3);
    fake.enqueue(first);
    fake.enqueue(texts({"x1", "x2", "x3"}));
    const auto gen = generate_candidates(fake, quick_endpoint(), "prompt", 20, 1);
    CHECK(gen.candidates.size() == 20);
    CHECK(gen.attempted == 23);
    CHECK_FALSE(gen.partial);
    REQUIRE(gen.log.size() == 2);
    CHECK(gen.log[0].empty == 3);
    CHECK(gen.log[1].requested == 3);
    CHECK(gen.candidates[0] == "reply 0");
    CHECK(gen.candidates.back() == "x3");
}

TEST_CASE("generation with healthy and flaky fake endpoints") {
    FakeChatClient healthy;
    const auto gen = generate_candidates(healthy, quick_endpoint(), "### MESSAGE\nhow was the game\n", 20, 1);
    CHECK(gen.candidates.size() == 20);
    CHECK(gen.attempted == 20);
    CHECK(healthy.requests()[0].temperature == 0.8);
    CHECK(healthy.requests()[0].n == 20);

    FakeChatClient one;
    CHECK(generate_candidates(one, quick_endpoint(), "p", 1, 1).candidates.size() == 1);

    auto flaky = FakeChatClient::from_url("fake://?empty_every=2");
    const auto partial = generate_candidates(*flaky, quick_endpoint(), "p", 20, 1);
    CHECK(partial.partial);
    CHECK(partial.attempted == 30);
    CHECK(partial.candidates.size() == 15);

    CHECK_THROWS_AS(FakeChatClient::from_url("fake://?bogus=1"), ConfigError);
    CHECK_THROWS_AS(generate_candidates(one, quick_endpoint(), "p", 0, 1), InvalidArgument);
}

TEST_CASE("baseline prompt holds only the task and the message") {
    const auto c = user_with_train(12);
    const auto p = build_prompt({ConfigKind::BL}, c, "u0", "Is it raining?", nullptr, nullptr, 1);
    CHECK(p.text.find(std::string(kTaskMarker)) != std::string::npos);
    CHECK(p.text.find(std::string(kMessageMarker) + "\nIs it raining?") != std::string::npos);
    CHECK(p.text.find(std::string(kPersonaMarker)) == std::string::npos);
    CHECK(p.text.find(std::string(kStyleMarker)) == std::string::npos);
    CHECK(p.text.find(std::string(kContextMarker)) == std::string::npos);
    CHECK(p.text.find("one-sentence") != std::string::npos);
    CHECK(p.template_hash == prompt_template_hash());
}

TEST_CASE("persona configurations need a persona") {
    const auto c = user_with_train(12);
    CHECK_THROWS_AS(build_prompt({ConfigKind::PE}, c, "u0", "x", nullptr, nullptr, 1), InvalidArgument);
    const auto with = c.with_personas({{"u0", "Loves football."}});
    const auto p = build_prompt({ConfigKind::PE}, with, "u0", "x", nullptr, nullptr, 1);
    CHECK(p.text.find("Loves football.") != std::string::npos);
    CHECK_THROWS_AS(build_prompt({ConfigKind::PE_SE_CR}, with, "u0", "x", nullptr, nullptr, 1), InvalidArgument);
}

TEST_CASE("style examples are exactly ten and stable per user") {
    const auto c = user_with_train(30).with_personas({{"u0", "p"}});
    const auto a = build_prompt({ConfigKind::PE_SE}, c, "u0", "first message", nullptr, nullptr, 4);
    CHECK(a.style_reply_ids.size() == 10);
    CHECK(count_lines_starting(a.text, std::string(kStyleMarker), "\n###", "- ") == 10);
    const auto b = build_prompt({ConfigKind::PE_SE}, c, "u0", "another message", nullptr, nullptr, 4);
    CHECK(b.style_reply_ids == a.style_reply_ids);
    CHECK(build_prompt({ConfigKind::PE_SE}, c, "u0", "first message", nullptr, nullptr, 4).text == a.text);

    const auto few = user_with_train(4).with_personas({{"u0", "p"}});
    CHECK(build_prompt({ConfigKind::PE_SE}, few, "u0", "m", nullptr, nullptr, 4).style_reply_ids.size() == 4);
}

TEST_CASE("retrieval puts the matching entry first") {
    const auto c = user_with_train(30).with_personas({{"u0", "p"}});
    HashedEncoder enc(128);
    auto index = RetrievalIndex::build(c, enc, 2);
    const std::string parent = "totally unique parent about sailing boats";
    index.add("u0", {"extra", parent, enc.embed(parent)});
    PromptConfig cfg{ConfigKind::PE_SE_CR};
    const auto p = build_prompt(cfg, c, "u0", parent, &index, &enc, 2);
    REQUIRE(p.retrieved.size() == 3);
    CHECK(p.retrieved[0].reply_id == "extra");
    for (std::size_t i = 1; i < p.retrieved.size(); ++i) CHECK(p.retrieved[i - 1].score >= p.retrieved[i].score);
    for (const auto& e : *index.entries("u0")) CHECK(p.retrieved[0].score >= semsim::cosine(enc.embed(parent), e.embedding));
    for (const auto& hit : p.retrieved)
        CHECK(std::find(p.style_reply_ids.begin(), p.style_reply_ids.end(), hit.reply_id) == p.style_reply_ids.end());

    CHECK_THROWS_AS(index.add("u0", {"bad", "x", Embedding(3, 1.0)}), InvalidArgument);
    RetrievalIndex empty;
    CHECK_THROWS_AS(build_prompt(cfg, c, "u0", parent, &empty, &enc, 2), InvalidArgument);
}

TEST_CASE("batch generation keeps job order") {
    const auto c = tk_test::synthetic_corpus({.users = 3, .train_per_user = 5, .test_per_user = 3});
    std::vector<GenerationJob> jobs;
    for (const auto& r : c.replies())
        if (r.split == corpus::Split::test) jobs.push_back({r.id, r.user_id, r.parent_text});
    FakeChatClient fake;
    BatchOptions opt;
    opt.n = 5;
    const auto result = generate_batch(fake, quick_endpoint(), c, jobs, opt);
    REQUIRE(result.sets.size() == jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        CHECK(result.sets[i].reply_id == jobs[i].reply_id);
        CHECK(result.sets[i].candidates.size() == 5);
        CHECK(result.sets[i].config_id == "BL");
        CHECK(result.sets[i].model_id == "test-model");
    }
    CHECK(result.partial_sets == 0);

    FakeChatClient fake2;
    CHECK(generate_batch(fake2, quick_endpoint(), c, jobs, opt).sets == result.sets);
}

TEST_CASE("http chat client speaks the completions protocol") {
    httplib::Server server;
    int calls = 0;
    std::string auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        auth = req.get_header_value("Authorization");
        if (calls == 1) {
            res.status = 503;
            return;
        }
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json choices = nlohmann::json::array();
        for (int i = 0; i < body["n"].get<int>(); ++i)
            choices.push_back({{"message", {{"role", "assistant"}, {"content", " hi " + std::to_string(i)}}},
                               {"finish_reason", "stop"}});
        res.set_content(nlohmann::json{{"choices", choices}}.dump(), "application/json");
    });
    server.Post("/v2/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("TK_TEST_TOKEN", "sekret", 1);
    auto endpoint = quick_endpoint("http://127.0.0.1:" + std::to_string(port) + "/v1");
    endpoint.auth_env = "TK_TEST_TOKEN";
    const auto client = make_chat_client(endpoint);
    const auto gen = generate_candidates(*client, endpoint, "prompt", 3, 1);
    CHECK(gen.candidates == std::vector<std::string>{"hi 0", "hi 1", "hi 2"});
    CHECK(calls == 2);
    CHECK(auth == "Bearer sekret");

    auto bad = quick_endpoint("http://127.0.0.1:" + std::to_string(port) + "/v2");
    HttpChatClient bad_client(bad);
    CHECK_THROWS_AS(complete_with_retry(bad_client, ChatRequest{}, bad.retry), EndpointError);

    endpoint.auth_env = "TK_TEST_UNSET_TOKEN_VAR";
    CHECK_THROWS_AS(HttpChatClient(endpoint), ConfigError);

    server.stop();
    t.join();
}

TEST_CASE("template hashes are stable") {
    CHECK(persona_template_hash() == persona_template_hash());
    CHECK(persona_template_hash() != prompt_template_hash());
    CHECK(persona_template_hash().size() == 16);
}
