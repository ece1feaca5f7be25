// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include <catch_amalgamated.hpp>

#include <cmath>

#include <json.hpp>

#include "fixtures.hpp"
#include "turingkit/textfeat.hpp"

using namespace turingkit;

// Golden vectors come from tests/oracles/feature_oracle.py.
TEST_CASE("feature vectors match the reference implementation") {
    constexpr double kTolerance = 1e-12;
    const auto golden = nlohmann::json::parse(tk_test::slurp(std::string(TK_TEST_DATA_DIR) + "/feature_golden.json"));
    const auto& names = textfeat::FeatureVector::names();
    REQUIRE(golden["names"].size() == names.size());
    for (std::size_t i = 0; i < names.size(); ++i) REQUIRE(golden["names"][i].get<std::string>() == names[i]);

    const auto lexica = LexiconSet::builtin();
    REQUIRE(golden["cases"].size() == 25);
    for (const auto& c : golden["cases"]) {
        const auto text = c["text"].get<std::string>();
        const auto got = textfeat::extract_features(text, lexica).to_array();
        for (std::size_t i = 0; i < names.size(); ++i) {
            INFO("text: " << text << "\nfeature: " << names[i]);
            CHECK(std::abs(got[i] - c["features"][i].get<double>()) <= kTolerance);
        }
    }
}
