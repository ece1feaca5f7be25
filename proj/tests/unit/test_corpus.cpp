// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "turingkit/corpus.hpp"
#include "turingkit/error.hpp"

using namespace turingkit;
using namespace turingkit::corpus;

namespace {

std::string record(const std::string& id, const std::string& user, const std::string& text,
                   const std::string& split = "train") {
    return R"({"id":")" + id + R"(","user_id":")" + user + R"(","platform":"twitter","parent_text":"p","text":")" +
           text + R"(","split":")" + split + R"(","source":"human"})";
}

Corpus corpus_with_test_counts(const std::vector<std::pair<std::string, std::size_t>>& users) {
    std::vector<Reply> replies;
    for (const auto& [user, n] : users) {
        for (std::size_t i = 0; i < n; ++i) {
            Reply r;
            r.id = user + "-" + std::to_string(i);
            r.user_id = user;
            r.text = "reply " + std::to_string(i);
            r.split = Split::test;
            replies.push_back(r);
        }
    }
    return Corpus::from_replies(std::move(replies));
}

}  // namespace

TEST_CASE("ingest three records from two users") {
    const std::string jsonl = record("1", "a", "hi") + "\n" + record("2", "b", "yo") + "\n" +
                              record("3", "a", "hey", "test") + "\n";
    const auto c = parse_corpus(jsonl);
    CHECK(c.replies().size() == 3);
    CHECK(c.users().size() == 2);
    CHECK(c.users()[0].user_id == "a");
    CHECK(c.users()[0].train_reply_ids == std::vector<std::string>{"1"});
    CHECK(c.users()[0].test_reply_ids == std::vector<std::string>{"3"});
    CHECK(c.platform().kind == Platform::Kind::twitter);
}

TEST_CASE("empty corpus file warns") {
    tk_test::TempDir dir;
    tk_test::spit(dir / "empty.jsonl", "");
    std::vector<std::string> warnings;
    const auto c = ingest_corpus(dir / "empty.jsonl", &warnings);
    CHECK(c.replies().empty());
    CHECK(c.users().empty());
    CHECK(warnings.size() == 1);
}

TEST_CASE("missing text field is reported with its line number") {
    const std::string bad = R"({"id":"2","user_id":"a","platform":"x","parent_text":"p","split":"train","source":"human"})";
    const std::string jsonl = record("1", "a", "hi") + "\n" + bad + "\n" + record("3", "a", "ok") + "\n";
    try {
        parse_corpus(jsonl, "fixture.jsonl");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.issues().size() == 1);
        CHECK(e.issues()[0].line == 2);
        CHECK(e.issues()[0].message.find("text") != std::string::npos);
        CHECK(std::string(e.what()).find("fixture.jsonl") != std::string::npos);
    }
}

TEST_CASE("blank human text and duplicate ids are rejected together") {
    const std::string jsonl = record("1", "a", "   ") + "\n" + record("2", "a", "fine") + "\n" +
                              record("2", "b", "again") + "\nnot json\n";
    try {
        parse_corpus(jsonl);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::vector<std::size_t> lines;
        for (const auto& issue : e.issues()) lines.push_back(issue.line);
        CHECK(lines == std::vector<std::size_t>{1, 3, 4});
    }
}

TEST_CASE("generated replies may be blank, and source round-trips") {
    const std::string gen = R"({"id":"g","user_id":"a","platform":"reddit","parent_text":"p","text":"","split":"test","source":{"model":"m1","config":"PE"}})";
    const auto c = parse_corpus(record("1", "a", "hi") + "\n" + gen + "\n");
    const Reply* r = c.find_reply("g");
    REQUIRE(r != nullptr);
    CHECK_FALSE(r->source.human);
    CHECK(r->source.model_id == "m1");
    CHECK(r->source.config_id == "PE");
}

TEST_CASE("ingest, serialize, ingest round-trips") {
    const auto original = tk_test::synthetic_corpus({.users = 6, .train_per_user = 4, .test_per_user = 3, .seed = 9});
    std::ostringstream out;
    write_corpus(original, out);
    const auto again = parse_corpus(out.str());
    CHECK(again.replies() == original.replies());
    CHECK(again.users() == original.users());

    std::ostringstream out2;
    write_corpus(again, out2);
    CHECK(out2.str() == out.str());
}

TEST_CASE("personas attach to known users only") {
    const auto c = tk_test::synthetic_corpus({.users = 2, .train_per_user = 2, .test_per_user = 1});
    const auto with = c.with_personas({{"u0", "likes dogs"}});
    CHECK(with.find_user("u0")->persona == std::optional<std::string>("likes dogs"));
    CHECK_FALSE(with.find_user("u1")->persona.has_value());
    CHECK_THROWS_AS(c.with_personas({{"ghost", "x"}}), InvalidArgument);

    tk_test::TempDir dir;
    std::ostringstream out;
    write_personas({{"u0", "a\nb"}, {"u1", "c"}}, out);
    tk_test::spit(dir / "p.jsonl", out.str());
    const auto back = read_personas(dir / "p.jsonl");
    CHECK(back.at("u0") == "a\nb");
    CHECK(back.size() == 2);
}

TEST_CASE("sample_eval_users applies the test-reply threshold") {
    const auto c = corpus_with_test_counts({{"A", 25}, {"B", 19}});
    const auto sample = sample_eval_users(c, 20, 20, std::nullopt, 3);
    REQUIRE(sample.size() == 1);
    CHECK(sample[0].user_id == "A");
    CHECK(sample[0].reply_ids.size() == 20);
    CHECK(std::set<std::string>(sample[0].reply_ids.begin(), sample[0].reply_ids.end()).size() == 20);
    for (const auto& id : sample[0].reply_ids) CHECK(c.find_reply(id)->user_id == "A");

    CHECK(sample_eval_users(c, 20, 20, std::nullopt, 3)[0].reply_ids == sample[0].reply_ids);
}

TEST_CASE("a user's sample does not depend on other users") {
    const auto alone = corpus_with_test_counts({{"A", 25}});
    const auto crowd = corpus_with_test_counts({{"C", 30}, {"A", 25}, {"D", 40}});
    const auto a1 = sample_eval_users(alone, 20, 20, std::nullopt, 11);
    const auto a2 = sample_eval_users(crowd, 20, 20, std::nullopt, 11);
    REQUIRE(a2.size() == 3);
    CHECK(a2[1].user_id == "A");
    CHECK(a2[1].reply_ids == a1[0].reply_ids);

    const auto capped = sample_eval_users(crowd, 20, 5, 2, 11);
    CHECK(capped.size() == 2);
}

TEST_CASE("balanced set sizes and preconditions") {
    const auto ai = tk_test::human_like_texts(120, 1);
    const auto pool = tk_test::as_pool(tk_test::human_like_texts(5000, 2));
    const auto set = build_balanced_set(ai, pool, 5);
    CHECK(set.items.size() == 240);
    CHECK(set.count(Label::ai) == 120);
    CHECK(set.count(Label::human) == 120);
    CHECK(build_balanced_set(ai, pool, 5) == set);

    std::set<std::string> human_sources;
    for (const auto& item : set.items)
        if (item.label == Label::human) human_sources.insert(item.source_id);
    CHECK(human_sources.size() == 120);

    const auto small = tk_test::as_pool(tk_test::human_like_texts(80, 2));
    CHECK_THROWS_AS(build_balanced_set(ai, small, 5), InvalidArgument);
}

TEST_CASE("balanced set labels are equal for random sizes") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n_ai = 1 + rng.uniform_below(60);
        const std::size_t n_pool = n_ai + rng.uniform_below(60);
        const auto set = build_balanced_set(tk_test::human_like_texts(n_ai, trial),
                                            tk_test::as_pool(tk_test::human_like_texts(n_pool, 1000 + trial)),
                                            rng.next());
        REQUIRE(set.count(Label::ai) == n_ai);
        REQUIRE(set.count(Label::human) == n_ai);
    }
}

TEST_CASE("stratified train/validation split") {
    const auto set = build_balanced_set(tk_test::human_like_texts(120, 1),
                                        tk_test::as_pool(tk_test::human_like_texts(300, 2)), 5);
    const auto [train, val] = split_train_val(set, 0.2, 8);
    CHECK(train.items.size() == 192);
    CHECK(val.items.size() == 48);
    CHECK(val.count(Label::ai) == 24);
    CHECK(val.count(Label::human) == 24);

    // Both halves keep the input's relative order.
    auto position = [&](const LabeledText& t) {
        return std::find(set.items.begin(), set.items.end(), t) - set.items.begin();
    };
    for (std::size_t i = 1; i < val.items.size(); ++i) CHECK(position(val.items[i - 1]) < position(val.items[i]));

    const auto four = build_balanced_set(tk_test::human_like_texts(2, 3),
                                         tk_test::as_pool(tk_test::human_like_texts(2, 4)), 1);
    const auto [t4, v4] = split_train_val(four, 0.5, 1);
    CHECK(t4.count(Label::ai) == 1);
    CHECK(t4.count(Label::human) == 1);
    CHECK(v4.count(Label::ai) == 1);
    CHECK(v4.count(Label::human) == 1);

    const auto ten = build_balanced_set(tk_test::human_like_texts(5, 3),
                                        tk_test::as_pool(tk_test::human_like_texts(5, 4)), 1);
    CHECK_THROWS_AS(split_train_val(ten, 0.999, 1), InvalidArgument);
    CHECK_THROWS_AS(split_train_val(ten, 0.0, 1), InvalidArgument);
}

TEST_CASE("platform names") {
    CHECK(Platform::parse("X").kind == Platform::Kind::twitter);
    CHECK(Platform::parse("Bluesky").name == "bluesky");
    CHECK(Platform::parse("mastodon").kind == Platform::Kind::other);
    CHECK(Platform::parse("mastodon").name == "mastodon");
}
