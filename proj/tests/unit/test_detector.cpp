// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include <catch_amalgamated.hpp>

#include <numeric>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "turingkit/detector.hpp"
#include "turingkit/error.hpp"
#include "turingkit/stats.hpp"

using namespace turingkit;
using namespace turingkit::detector;
using corpus::Label;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<textfeat::FeatureVector> planted_emoji(std::size_t n, std::vector<Label>& labels, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<textfeat::FeatureVector> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const bool ai = i % 2 == 0;
        auto values = textfeat::FeatureVector{}.to_array();
        for (auto& v : values) v = std::round(rng.uniform01() * 20);
        auto f = textfeat::FeatureVector::from_array(values);
        f.emoji_count = ai ? 3 + rng.uniform_below(3) : rng.uniform_below(3);
        rows.push_back(f);
        labels.push_back(ai ? Label::ai : Label::human);
    }
    return rows;
}

}  // namespace

TEST_CASE("embed through the detector") {
    HashedEncoder enc(64);
    CHECK(embed("abc", enc) == embed("abc", enc));
    CHECK(embed("", enc) == Embedding(64, 0.0));
}

TEST_CASE("run_turing_test result shape") {
    HashedEncoder enc(128);
    const auto ai = tk_test::human_like_texts(100, 1);
    const auto pool = tk_test::as_pool(tk_test::human_like_texts(200, 2));
    TuringTestOptions opt;
    const auto r = run_turing_test(ai, pool, enc, opt);
    CHECK(r.seeds == kDefaultSeeds);
    REQUIRE(r.per_seed_accuracy.size() == 3);
    CHECK(r.mean_accuracy == stats::mean(r.per_seed_accuracy));
    CHECK(r.n_train == 160);
    CHECK(r.n_val == 40);
    for (double a : r.per_seed_accuracy) {
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
    }
    CHECK(r.detector.find("embedding-head") == 0);

    opt.jobs = 3;
    CHECK(run_turing_test(ai, pool, enc, opt).per_seed_accuracy == r.per_seed_accuracy);
}

TEST_CASE("sentinel suffix is detected") {
    HashedEncoder enc(256);
    auto ai = tk_test::human_like_texts(200, 5);
    for (auto& t : ai) t += " zqxv";
    const auto pool = tk_test::as_pool(tk_test::human_like_texts(400, 6));
    CHECK(run_turing_test(ai, pool, enc).mean_accuracy >= 0.95);
}

TEST_CASE("embedding detector determinism and prediction") {
    HashedEncoder enc(64);
    const auto set = corpus::build_balanced_set(tk_test::human_like_texts(40, 1),
                                                tk_test::as_pool(tk_test::human_like_texts(40, 2)), 3);
    const auto a = train_embedding_detector(set, enc, 7);
    const auto b = train_embedding_detector(set, enc, 7);
    const auto& ha = std::get<EmbeddingHead>(a.kind);
    CHECK(ha.weights == std::get<EmbeddingHead>(b.kind).weights);
    CHECK(ha.weights.size() == 64);
    const double p = predict_proba(a, "hello", enc);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);

    DetectorModel zero{EmbeddingHead{Embedding(64, 0.0), 0.0, enc.name(), 0}};
    CHECK(predict_proba(zero, "anything at all", enc) == 0.5);
    CHECK_THROWS_AS(predict_proba(zero, "x", HashedEncoder(32)), InvalidArgument);

    const double acc = accuracy(a, set, enc);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
}

TEST_CASE("forest detector importances") {
    std::vector<Label> labels;
    const auto rows = planted_emoji(200, labels, 3);
    const auto [model, report] = train_forest_detector(rows, labels, {}, 5);
    CHECK(report.importances.size() == 19);
    double sum = 0;
    for (const auto& [name, v] : report.importances) sum += v;
    CHECK_THAT(sum, WithinAbs(1.0, 1e-9));
    REQUIRE(report.top_k.size() == 10);
    CHECK(report.top_k[0] == "emoji_count");
    const auto& forest = std::get<ForestHead>(model.kind);
    CHECK(forest.forest.n_trees() == 100);
    CHECK(forest.feature_schema.size() == 19);

    const auto [again, _] = train_forest_detector(rows, labels, {}, 5);
    for (const auto& row : rows) REQUIRE(predict_proba(again, row) == predict_proba(model, row));

    // Schema mismatch: a forest asked about text.
    CHECK_THROWS_AS(predict_proba(model, "text", HashedEncoder(8)), InvalidArgument);
}

TEST_CASE("forest detector preconditions") {
    std::vector<Label> labels;
    auto rows = planted_emoji(10, labels, 1);
    std::vector<Label> one_class(10, Label::ai);
    CHECK_THROWS_AS(train_forest_detector(rows, one_class), InvalidArgument);
    std::vector<Label> lonely(10, Label::ai);
    lonely[0] = Label::human;
    CHECK_THROWS_AS(train_forest_detector(rows, lonely), InvalidArgument);
    labels.pop_back();
    CHECK_THROWS_AS(train_forest_detector(rows, labels), InvalidArgument);
}

TEST_CASE("importance report helpers") {
    const std::vector<double> imp(19, 1.0 / 19);
    const auto r = make_importance_report(imp, 3);
    CHECK(r.top_k == std::vector<std::string>{"word_count", "char_count", "avg_word_length"});
    std::ostringstream out;
    write_importance_csv(out, r);
    CHECK(out.str().rfind("feature,importance\nword_count,0.0526316\n", 0) == 0);
}

TEST_CASE("external detector adapter") {
    httplib::Server server;
    std::size_t seen_items = 0;
    server.Post("/train_eval", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        seen_items = body["items"].size();
        const double acc = body["seed"].get<std::uint64_t>() == 42 ? 0.75 : 0.5;
        res.set_content(nlohmann::json{{"accuracy", acc}}.dump(), "application/json");
    });
    server.Post("/broken/train_eval", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"accuracy": 3})", "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string base = "http://127.0.0.1:" + std::to_string(port);

    const auto ai = tk_test::human_like_texts(20, 1);
    const auto pool = tk_test::as_pool(tk_test::human_like_texts(30, 2));
    const auto r = run_turing_test(ai, pool, ExternalDetector(base));
    CHECK(seen_items == 40);
    CHECK(r.per_seed_accuracy == std::vector<double>{0.5, 0.75, 0.5});
    CHECK_THAT(r.mean_accuracy, WithinAbs(1.75 / 3, 1e-15));
    CHECK(r.n_val == 8);

    CHECK_THROWS_AS(run_turing_test(ai, pool, ExternalDetector(base + "/broken")), EndpointError);
    server.stop();
    t.join();
    CHECK_THROWS_AS(run_turing_test(ai, pool, ExternalDetector(base, 1.0)), EndpointError);
}
