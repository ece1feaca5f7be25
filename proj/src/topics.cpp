// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/topics.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "turingkit/error.hpp"
#include "turingkit/lexicon.hpp"
#include "turingkit/text_util.hpp"
#include "turingkit/textfeat.hpp"

namespace turingkit::topics {

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::ai_higher: return "ai_higher";
        case Direction::human_higher: return "human_higher";
        case Direction::none: break;
    }
    return "none";
}

TopicLexicon& TopicLexicon::add_category(std::string name, const std::vector<std::string>& terms) {
    if (name.empty()) throw InvalidArgument("topic category name is empty");
    for (const auto& c : categories_)
        if (c.name == name) throw InvalidArgument("duplicate topic category '" + name + "'");
    Category cat{std::move(name), {}, {}};
    for (const auto& raw : terms) {
        std::string term = ascii_lower(trim(raw));
        if (term.empty()) continue;
        if (term.back() == '*') {
            term.pop_back();
            if (!term.empty()) cat.prefixes.push_back(term);
        } else {
            cat.exact.push_back(term);
        }
    }
    if (cat.exact.empty() && cat.prefixes.empty())
        throw InvalidArgument("topic category '" + cat.name + "' has no terms");
    std::sort(cat.exact.begin(), cat.exact.end());
    categories_.push_back(std::move(cat));
    return *this;
}

TopicLexicon TopicLexicon::parse(std::string_view content, std::string_view source_name) {
    TopicLexicon lex;
    std::vector<LineIssue> issues;
    std::size_t line_no = 0;
    for (const auto& raw : split(content, '\n')) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view kTag = "# version:";
            if (line.substr(0, kTag.size()) == kTag) lex.version_ = std::string(trim(line.substr(kTag.size())));
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            issues.push_back({line_no, "expected 'category: term, term, ...'"});
            continue;
        }
        try {
            lex.add_category(std::string(trim(line.substr(0, colon))), split(line.substr(colon + 1), ','));
        } catch (const InvalidArgument& e) {
            issues.push_back({line_no, e.what()});
        }
    }
    if (!issues.empty()) throw ParseError(std::string(source_name), std::move(issues));
    if (lex.categories_.empty()) throw ParseError(std::string(source_name), {{0, "lexicon has no categories"}});
    return lex;
}

TopicLexicon TopicLexicon::load(const std::filesystem::path& path) { return parse(read_text_file(path), path.string()); }

TopicLexicon TopicLexicon::builtin_demo() {
    static const TopicLexicon cached = parse(builtin_lexicon_text("topics_demo"), "builtin:topics_demo");
    return cached;
}

bool TopicLexicon::matches(const Category& category, std::string_view token) const {
    if (std::binary_search(category.exact.begin(), category.exact.end(), token)) return true;
    return std::any_of(category.prefixes.begin(), category.prefixes.end(),
                       [&](const std::string& p) { return token.substr(0, p.size()) == p; });
}

TopicSignal topic_signals(std::string_view text, const TopicLexicon& lexicon) {
    const auto words = textfeat::tokenize(text).words;
    TopicSignal signal;
    signal.scores.reserve(lexicon.size());
    const double denom = static_cast<double>(std::max<std::size_t>(1, words.size()));
    for (const auto& cat : lexicon.categories()) {
        std::size_t hits = 0;
        for (const auto& w : words)
            if (lexicon.matches(cat, w)) ++hits;
        signal.scores.push_back(static_cast<double>(hits) / denom);
    }
    return signal;
}

std::size_t DivergenceReport::significant_count() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.significant; }));
}

DivergenceReport divergence_report(std::span<const TopicSignal> ai, std::span<const TopicSignal> human,
                                   const TopicLexicon& lexicon, double alpha) {
    if (ai.empty() || human.empty()) throw InvalidArgument("divergence_report requires non-empty AI and human sets");
    DivergenceReport report;
    report.alpha = alpha;
    std::vector<double> raw;
    const std::size_t m = lexicon.size();
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<double> a;
        std::vector<double> h;
        for (const auto& s : ai) a.push_back(s.scores.at(c));
        for (const auto& s : human) h.push_back(s.scores.at(c));
        const auto test = stats::wilcoxon_rank_sum(a, h);

        DivergenceRow row;
        row.category = lexicon.categories()[c].name;
        row.u_statistic = test.u;
        row.p_raw = test.p;
        row.degenerate = test.degenerate;
        row.n_ai = a.size();
        row.n_human = h.size();
        double diff = stats::median(a) - stats::median(h);
        if (diff == 0.0) diff = stats::mean(a) - stats::mean(h);
        row.direction = diff > 0 ? Direction::ai_higher : diff < 0 ? Direction::human_higher : Direction::none;
        report.rows.push_back(std::move(row));
        raw.push_back(test.p);
    }
    const auto adjusted = stats::bh_fdr(raw, alpha);
    for (std::size_t c = 0; c < m; ++c) {
        report.rows[c].p_adjusted = adjusted[c].p_adjusted;
        report.rows[c].significant = adjusted[c].significant;
    }
    return report;
}

DivergenceReport divergence_report(std::span<const std::string> ai_texts, std::span<const std::string> human_texts,
                                   const TopicLexicon& lexicon, double alpha) {
    std::vector<TopicSignal> ai;
    std::vector<TopicSignal> human;
    for (const auto& t : ai_texts) ai.push_back(topic_signals(t, lexicon));
    for (const auto& t : human_texts) human.push_back(topic_signals(t, lexicon));
    return divergence_report(ai, human, lexicon, alpha);
}

std::vector<CommonDivergence> top_k_common_divergent(const std::map<std::string, DivergenceReport>& reports,
                                                     std::size_t k) {
    if (reports.empty()) throw InvalidArgument("top_k_common_divergent requires at least one report");
    std::map<std::string, std::set<std::string>> flagged;
    for (const auto& [model, report] : reports)
        for (const auto& row : report.rows)
            if (row.significant) flagged[row.category].insert(model);

    std::vector<CommonDivergence> ranked;
    for (auto& [category, models] : flagged) ranked.push_back({category, {models.begin(), models.end()}});
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (x.models.size() != y.models.size()) return x.models.size() > y.models.size();
        return x.category < y.category;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

void write_divergence_csv(std::ostream& out, const DivergenceReport& report) {
    out << "category,u,p_raw,p_adjusted,significant,direction\n";
    for (const auto& r : report.rows) {
        out << r.category << ',' << format_sig6(r.u_statistic) << ',' << format_sig6(r.p_raw) << ','
            << format_sig6(r.p_adjusted) << ',' << (r.significant ? "true" : "false") << ',' << to_string(r.direction)
            << '\n';
    }
}

}  // namespace turingkit::topics
