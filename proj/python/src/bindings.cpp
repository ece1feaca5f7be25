// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "turingkit/detector.hpp"
#include "turingkit/encoder.hpp"
#include "turingkit/error.hpp"
#include "turingkit/selector.hpp"
#include "turingkit/semsim.hpp"
#include "turingkit/stats.hpp"
#include "turingkit/textfeat.hpp"
#include "turingkit/topics.hpp"

namespace py = pybind11;
using namespace turingkit;

namespace {

const LexiconSet& lexica() {
    static const LexiconSet set = LexiconSet::builtin();
    return set;
}

py::dict features_dict(const textfeat::FeatureVector& f) {
    py::dict out;
    const auto values = f.to_array();
    const auto& names = textfeat::FeatureVector::names();
    for (std::size_t i = 0; i < values.size(); ++i) out[py::str(std::string(names[i]))] = values[i];
    return out;
}

std::vector<corpus::Reply> pool_of(const std::vector<std::string>& texts) {
    std::vector<corpus::Reply> pool;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        corpus::Reply r;
        r.id = "h" + std::to_string(i);
        r.user_id = "pool";
        r.text = texts[i];
        pool.push_back(std::move(r));
    }
    return pool;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "turingkit core: features, statistics, detection and selection";
    m.attr("__version__") = "0.1.0";

    // Translators run newest first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("feature_names", [] {
        std::vector<std::string> out;
        for (auto n : textfeat::FeatureVector::names()) out.emplace_back(n);
        return out;
    });
    m.def("extract_features", [](const std::string& text) { return features_dict(textfeat::extract_features(text, lexica())); },
          py::arg("text"), "The 19 stylometric features of one text, using the built-in lexicons.");
    m.def("tokenize", [](const std::string& text) {
        const auto ts = textfeat::tokenize(text);
        py::dict out;
        out["words"] = ts.words;
        out["sentences"] = ts.sentences;
        out["emojis"] = ts.emojis;
        out["mentions"] = ts.mentions;
        out["hashtags"] = ts.hashtags;
        out["urls"] = ts.urls;
        return out;
    }, py::arg("text"));
    m.def("sentiment_compound", [](const std::string& text) { return textfeat::sentiment_compound(text, lexica()); },
          py::arg("text"));

    m.def("wilcoxon_rank_sum", [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = stats::wilcoxon_rank_sum(a, b);
        py::dict out;
        out["u"] = r.u;
        out["p"] = r.p;
        out["exact"] = r.exact;
        out["degenerate"] = r.degenerate;
        return out;
    }, py::arg("a"), py::arg("b"));
    m.def("bh_fdr", [](const std::vector<double>& p, double alpha) {
        std::vector<std::pair<double, bool>> out;
        for (const auto& a : stats::bh_fdr(p, alpha)) out.emplace_back(a.p_adjusted, a.significant);
        return out;
    }, py::arg("p_values"), py::arg("alpha") = 0.05, "Benjamini-Hochberg (p_adjusted, significant) pairs in input order.");

    m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) { return semsim::cosine(a, b); });
    m.def("embed", [](const std::string& text, const std::string& encoder) { return make_encoder(encoder)->embed(text); },
          py::arg("text"), py::arg("encoder") = "fallback");

    m.def("run_turing_test",
          [](const std::vector<std::string>& ai, const std::vector<std::string>& human, const std::string& encoder,
             std::vector<std::uint64_t> seeds) {
              const auto enc = make_encoder(encoder);
              detector::TuringTestOptions opt;
              opt.seeds = std::move(seeds);
              const auto pool = pool_of(human);
              detector::DetectionResult r;
              {
                  py::gil_scoped_release release;
                  r = detector::run_turing_test(ai, pool, *enc, opt);
              }
              py::dict out;
              out["mean_accuracy"] = r.mean_accuracy;
              out["per_seed_accuracy"] = r.per_seed_accuracy;
              out["seeds"] = r.seeds;
              out["n_train"] = r.n_train;
              out["n_val"] = r.n_val;
              out["detector"] = r.detector;
              return out;
          },
          py::arg("ai_texts"), py::arg("human_texts"), py::arg("encoder") = "fallback",
          py::arg("seeds") = detector::kDefaultSeeds);

    m.def("divergence_report", [](const std::vector<std::string>& ai, const std::vector<std::string>& human, double alpha) {
        const auto report = topics::divergence_report(ai, human, topics::TopicLexicon::builtin_demo(), alpha);
        py::list rows;
        for (const auto& row : report.rows) {
            py::dict d;
            d["category"] = row.category;
            d["u"] = row.u_statistic;
            d["p_raw"] = row.p_raw;
            d["p_adjusted"] = row.p_adjusted;
            d["significant"] = row.significant;
            d["direction"] = std::string(topics::to_string(row.direction));
            rows.append(d);
        }
        return rows;
    }, py::arg("ai_texts"), py::arg("human_texts"), py::arg("alpha") = 0.05);

    m.def("select_cosine_optimal",
          [](const std::vector<std::string>& candidates, const std::string& reference, const std::string& encoder) {
              selector::CandidateSet set{"r", "u", "m", "BL", candidates};
              const auto o = selector::select_cosine_optimal(set, reference, *make_encoder(encoder));
              return py::make_tuple(o.chosen_index, o.per_candidate_scores);
          },
          py::arg("candidates"), py::arg("reference"), py::arg("encoder") = "fallback",
          "Index of the candidate closest to the reference, and every candidate's score.");

    m.def("main", [](std::vector<std::string> args) {
        args.insert(args.begin(), "turingkit");
        py::gil_scoped_release release;
        return cli::run(args);
    }, py::arg("args"), "Runs the command line in-process and returns its exit status.");
}
