// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/report.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>

#include "json.hpp"
#include "jsonl.hpp"
#include "turingkit/error.hpp"
#include "turingkit/stats.hpp"
#include "turingkit/text_util.hpp"

namespace turingkit::report {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

Config Config::parse(std::string_view text, std::string_view source_name) {
    Config cfg;
    cfg.source_ = std::string(source_name);
    std::vector<LineIssue> issues;
    std::map<std::string, std::size_t> first_line;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.push_back({line_no, "expected 'key = value'"});
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            issues.push_back({line_no, "empty key"});
            continue;
        }
        if (key.find_first_of(" \t") != std::string::npos) {
            issues.push_back({line_no, "key '" + key + "' contains whitespace"});
            continue;
        }
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        auto [it, inserted] = first_line.emplace(key, line_no);
        if (!inserted) {
            issues.push_back({line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")"});
            continue;
        }
        cfg.values_.emplace(key, std::move(value));
    }
    if (!issues.empty()) throw ParseError(cfg.source_, std::move(issues));
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    return parse(jsonl::read_file(path, "config file"), path.string());
}

const std::string* Config::find(std::string_view key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_[it->first] = true;
    return &it->second;
}

void Config::type_error(std::string_view key, std::string_view expected, std::string_view value) const {
    throw ConfigError(source_ + ": config key '" + std::string(key) + "': expected " + std::string(expected) +
                      ", got '" + std::string(value) + "'");
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

void Config::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
    const auto* v = find(key);
    return v ? *v : std::string(fallback);
}

std::string Config::require_string(std::string_view key) const {
    const auto* v = find(key);
    if (v == nullptr || v->empty())
        throw ConfigError(source_ + ": missing required config key '" + std::string(key) + "'");
    return *v;
}

std::int64_t Config::get_int(std::string_view key, std::int64_t fallback) const {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) type_error(key, "an integer", *v);
    return out;
}

double Config::get_double(std::string_view key, double fallback) const {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    double out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size() || !std::isfinite(out)) type_error(key, "a real number", *v);
    return out;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    const std::string s = ascii_lower(*v);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    type_error(key, "a boolean", *v);
}

std::vector<std::string> Config::get_list(std::string_view key, const std::vector<std::string>& fallback) const {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    std::vector<std::string> out;
    for (const auto& item : split(*v, ','))
        if (auto t = trim(item); !t.empty()) out.emplace_back(t);
    return out;
}

std::vector<std::uint64_t> Config::get_u64_list(std::string_view key, const std::vector<std::uint64_t>& fallback) const {
    const auto* v = find(key);
    if (v == nullptr) return fallback;
    std::vector<std::uint64_t> out;
    for (const auto& item : split(*v, ',')) {
        const auto t = trim(item);
        if (t.empty()) continue;
        std::uint64_t n = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
        if (ec != std::errc() || ptr != t.data() + t.size()) type_error(key, "a list of non-negative integers", *v);
        out.push_back(n);
    }
    return out;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

// ---------------------------------------------------------------------------
// Cells and deltas

std::string CellKey::stem() const {
    std::string out = model + "__" + config;
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '-';
    return out;
}

std::size_t ReportBundle::missing_count() const {
    std::size_t n = 0;
    auto count = [&](const auto& slots) {
        for (const auto& [k, slot] : slots)
            if (std::holds_alternative<Missing>(slot)) ++n;
    };
    count(detection);
    count(similarity);
    count(importances);
    count(divergence);
    count(selection);
    return n;
}

namespace {

constexpr std::string_view kLadder[] = {"BL", "PE", "PE+SE", "PE+SE+CR"};

json r6(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round_sig6(v);
}

json r6(const std::vector<double>& values) {
    json out = json::array();
    for (double v : values) out.push_back(r6(v));
    return out;
}

json cell_key_json(const CellKey& k) { return json{{"model", k.model}, {"config", k.config}, {"dataset", k.dataset}}; }

template <typename T, typename Fn>
json slots_json(const std::vector<CellKey>& cells, const std::map<CellKey, Slot<T>>& slots, Fn&& render) {
    json out = json::array();
    for (const auto& key : cells) {
        json entry = cell_key_json(key);
        auto it = slots.find(key);
        if (it == slots.end())
            entry["missing"] = "not computed";
        else if (const auto* m = std::get_if<Missing>(&it->second))
            entry["missing"] = m->reason;
        else
            entry["value"] = render(std::get<T>(it->second));
        out.push_back(std::move(entry));
    }
    return out;
}

json detection_json(const detector::DetectionResult& d) {
    return json{{"detector", d.detector},     {"mean_accuracy", r6(d.mean_accuracy)},
                {"per_seed_accuracy", r6(d.per_seed_accuracy)}, {"seeds", d.seeds},
                {"n_train", d.n_train},       {"n_val", d.n_val}};
}

json similarity_json(const semsim::SimilarityDistribution& s) {
    const double lo = s.scores.empty() ? 0.0 : *std::min_element(s.scores.begin(), s.scores.end());
    const double hi = s.scores.empty() ? 0.0 : *std::max_element(s.scores.begin(), s.scores.end());
    return json{{"n", s.n},           {"min", r6(lo)},  {"q1", r6(s.q1)}, {"median", r6(s.median)},
                {"q3", r6(s.q3)},     {"max", r6(hi)},  {"zero_vector_pairs", s.zero_vector_pairs.size()}};
}

json importance_json(const detector::FeatureImportanceReport& r) {
    json values = json::object();
    for (const auto& [name, v] : r.importances) values[name] = r6(v);
    return json{{"importances", std::move(values)}, {"top_k", r.top_k}};
}

json divergence_json(const topics::DivergenceReport& r) {
    std::size_t ai_higher = 0;
    std::size_t human_higher = 0;
    json rows = json::array();
    for (const auto& row : r.rows) {
        if (row.significant) (row.direction == topics::Direction::ai_higher ? ai_higher : human_higher) += 1;
        rows.push_back({{"category", row.category},
                        {"u", r6(row.u_statistic)},
                        {"p_raw", r6(row.p_raw)},
                        {"p_adjusted", r6(row.p_adjusted)},
                        {"significant", row.significant},
                        {"direction", std::string(topics::to_string(row.direction))}});
    }
    return json{{"alpha", r6(r.alpha)},
                {"significant", r.significant_count()},
                {"significant_ai_higher", ai_higher},
                {"significant_human_higher", human_higher},
                {"rows", std::move(rows)}};
}

json selection_json(const SelectionSummary& s) {
    json by_strategy = json::object();
    for (const auto& [name, d] : s.detection_by_strategy) by_strategy[name]["detection"] = detection_json(d);
    for (const auto& [name, d] : s.similarity_by_strategy) by_strategy[name]["similarity"] = similarity_json(d);
    return json{{"n_sets", s.n_sets},
                {"n_candidates", s.n_candidates},
                {"overlap", r6(s.overlap)},
                {"chance_overlap", r6(s.chance_overlap)},
                {"cosine_chosen", s.cosine_chosen},
                {"ml_chosen", s.ml_chosen},
                {"strategies", std::move(by_strategy)}};
}

json manifest_json(const RunManifest& m) {
    return json{{"run_id", m.run_id},
                {"created_at", m.created_at},
                {"corpus_hash", m.corpus_hash},
                {"dataset", m.dataset},
                {"lexicon_versions", m.lexicon_versions},
                {"encoder", m.encoder},
                {"seeds", m.seeds},
                {"config_kinds", m.config_kinds},
                {"template_hashes", m.template_hashes},
                {"parameters", m.parameters}};
}

}  // namespace

std::vector<StepDelta> emit_stepwise_deltas(const std::map<CellKey, double>& mean_accuracy) {
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> grouped;
    for (const auto& [key, acc] : mean_accuracy) grouped[{key.model, key.dataset}][key.config] = acc;
    std::vector<StepDelta> out;
    for (const auto& [md, by_config] : grouped) {
        for (std::size_t i = 0; i + 1 < std::size(kLadder); ++i) {
            auto from = by_config.find(std::string(kLadder[i]));
            auto to = by_config.find(std::string(kLadder[i + 1]));
            if (from == by_config.end() || to == by_config.end()) continue;
            out.push_back({md.first, md.second, from->first, to->first, to->second - from->second});
        }
    }
    if (out.empty())
        throw InvalidArgument("stepwise deltas need two adjacent configurations (BL, PE, PE+SE, PE+SE+CR) for the same model and dataset");
    return out;
}

std::vector<std::string> verify_bundle(const ReportBundle& bundle, double tolerance) {
    std::vector<std::string> problems;
    auto close = [&](double a, double b) { return std::abs(a - b) <= tolerance; };
    auto where = [](const CellKey& k) { return "[" + k.model + "/" + k.config + "/" + k.dataset + "] "; };
    std::set<CellKey> known(bundle.cells.begin(), bundle.cells.end());
    auto check_cells = [&](std::string_view what, const auto& slots) {
        for (const auto& k : bundle.cells)
            if (!slots.count(k)) problems.push_back(where(k) + std::string(what) + " cell absent instead of marked missing");
        for (const auto& [k, slot] : slots)
            if (!known.count(k)) problems.push_back(where(k) + std::string(what) + " cell not listed in cells");
    };
    check_cells("detection", bundle.detection);
    check_cells("similarity", bundle.similarity);
    check_cells("importance", bundle.importances);
    check_cells("divergence", bundle.divergence);
    check_cells("selection", bundle.selection);

    std::map<CellKey, double> accuracies;
    for (const auto& [k, slot] : bundle.detection) {
        const auto* d = std::get_if<detector::DetectionResult>(&slot);
        if (d == nullptr) continue;
        if (d->per_seed_accuracy.size() != d->seeds.size()) problems.push_back(where(k) + "seed count mismatch");
        if (d->per_seed_accuracy.empty()) {
            problems.push_back(where(k) + "no per-seed accuracies");
            continue;
        }
        if (!close(stats::mean(d->per_seed_accuracy), d->mean_accuracy))
            problems.push_back(where(k) + "mean accuracy does not match per-seed values");
        accuracies[k] = stats::mean(d->per_seed_accuracy);
    }
    for (const auto& [k, slot] : bundle.similarity) {
        const auto* s = std::get_if<semsim::SimilarityDistribution>(&slot);
        if (s == nullptr) continue;
        if (s->scores.size() != s->n) {
            problems.push_back(where(k) + "similarity n does not match the score list");
            continue;
        }
        if (s->scores.empty()) continue;
        const auto again = semsim::summarize(s->scores);
        if (!close(again.median, s->median) || !close(again.q1, s->q1) || !close(again.q3, s->q3))
            problems.push_back(where(k) + "similarity quartiles do not match the score list");
    }
    for (const auto& [k, slot] : bundle.importances) {
        const auto* r = std::get_if<detector::FeatureImportanceReport>(&slot);
        if (r == nullptr) continue;
        double sum = 0.0;
        std::vector<double> values;
        for (const auto& [name, v] : r->importances) {
            sum += v;
            values.push_back(v);
        }
        if (sum != 0.0 && !close(sum, 1.0)) problems.push_back(where(k) + "importances do not sum to 1");
        if (values.size() == textfeat::FeatureVector::kSize) {
            const auto again = detector::make_importance_report(values, r->top_k.size());
            if (again.top_k != r->top_k) problems.push_back(where(k) + "top-k features do not follow the importances");
        }
    }
    for (const auto& [k, slot] : bundle.divergence) {
        const auto* r = std::get_if<topics::DivergenceReport>(&slot);
        if (r == nullptr || r->rows.empty()) continue;
        std::vector<double> raw;
        for (const auto& row : r->rows) raw.push_back(row.p_raw);
        const auto adjusted = stats::bh_fdr(raw, r->alpha);
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (!close(adjusted[i].p_adjusted, r->rows[i].p_adjusted) || adjusted[i].significant != r->rows[i].significant)
                problems.push_back(where(k) + "category '" + r->rows[i].category + "' adjusted p does not match raw p");
    }
    for (const auto& [k, slot] : bundle.selection) {
        const auto* s = std::get_if<SelectionSummary>(&slot);
        if (s == nullptr) continue;
        if (s->cosine_chosen.size() != s->n_sets || s->ml_chosen.size() != s->n_sets || s->n_sets == 0) {
            problems.push_back(where(k) + "selection lists do not match n_sets");
            continue;
        }
        std::size_t same = 0;
        for (std::size_t i = 0; i < s->n_sets; ++i) same += s->cosine_chosen[i] == s->ml_chosen[i];
        if (!close(static_cast<double>(same) / static_cast<double>(s->n_sets), s->overlap))
            problems.push_back(where(k) + "overlap does not match chosen indices");
        if (s->n_candidates != 0 && !close(1.0 / static_cast<double>(s->n_candidates), s->chance_overlap))
            problems.push_back(where(k) + "chance overlap is not 1/N");
        for (const auto& [name, d] : s->detection_by_strategy)
            if (d.per_seed_accuracy.empty() || !close(stats::mean(d.per_seed_accuracy), d.mean_accuracy))
                problems.push_back(where(k) + name + " detection mean does not match per-seed values");
        for (const auto& [name, d] : s->similarity_by_strategy) {
            if (d.scores.size() != d.n || d.scores.empty()) {
                problems.push_back(where(k) + name + " similarity n does not match the score list");
                continue;
            }
            const auto again = semsim::summarize(d.scores);
            if (!close(again.median, d.median) || !close(again.q1, d.q1) || !close(again.q3, d.q3))
                problems.push_back(where(k) + name + " similarity quartiles do not match the score list");
        }
    }
    for (const auto& d : bundle.deltas) {
        auto from = accuracies.find(CellKey{d.model, d.from, d.dataset});
        auto to = accuracies.find(CellKey{d.model, d.to, d.dataset});
        if (from == accuracies.end() || to == accuracies.end())
            problems.push_back("delta " + d.from + "->" + d.to + " for " + d.model + " lacks detection results");
        else if (!close(to->second - from->second, d.delta))
            problems.push_back("delta " + d.from + "->" + d.to + " for " + d.model + " does not match accuracies");
    }
    return problems;
}

std::string bundle_to_json(const ReportBundle& b) {
    json cells = json::array();
    for (const auto& k : b.cells) cells.push_back(cell_key_json(k));
    json deltas = json::array();
    for (const auto& d : b.deltas)
        deltas.push_back({{"model", d.model}, {"dataset", d.dataset}, {"from", d.from}, {"to", d.to}, {"delta", r6(d.delta)}});
    json out{
        {"manifest", manifest_json(b.manifest)},
        {"cells", std::move(cells)},
        {"detection", slots_json(b.cells, b.detection, detection_json)},
        {"similarity", slots_json(b.cells, b.similarity, similarity_json)},
        {"importances", slots_json(b.cells, b.importances, importance_json)},
        {"divergence", slots_json(b.cells, b.divergence, divergence_json)},
        {"selection", slots_json(b.cells, b.selection, selection_json)},
        {"stepwise_deltas", std::move(deltas)},
        {"missing_cells", b.missing_count()},
        {"legend",
         {{"detection", "Validation accuracy of a human-vs-generated classifier; 0.5 is chance, so values near 0.5 "
                        "mean the generated replies pass as human."},
          {"stepwise_deltas", "Change in mean detection accuracy when a prompt component is added; negative means "
                              "harder to detect."},
          {"similarity", "Cosine similarity between each generated reply and the human reply to the same message."},
          {"selection", "Share of messages where cosine-optimal and ML-optimal selection pick the same candidate; "
                        "chance is 1/N."}}},
    };
    return out.dump(2) + "\n";
}

void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](std::string_view name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw Error("cannot write '" + (dir / name).string() + "'");
        return f;
    };
    open("bundle.json") << bundle_to_json(b);

    auto f = open("detection.csv");
    f << "model,config,dataset,mean_accuracy,per_seed_accuracy\n";
    for (const auto& [k, slot] : b.detection) {
        f << k.model << ',' << k.config << ',' << k.dataset << ',';
        if (const auto* d = std::get_if<detector::DetectionResult>(&slot)) {
            std::vector<std::string> parts;
            for (double a : d->per_seed_accuracy) parts.push_back(format_sig6(a));
            f << format_sig6(d->mean_accuracy) << ',' << join(parts, ";") << '\n';
        } else {
            f << "missing,\n";
        }
    }

    f = open("stepwise_deltas.csv");
    f << "model,dataset,from,to,delta\n";
    for (const auto& d : b.deltas) f << d.model << ',' << d.dataset << ',' << d.from << ',' << d.to << ',' << format_sig6(d.delta) << '\n';

    f = open("similarity_boxplot.csv");
    f << "model,config,dataset,n,min,q1,median,q3,max\n";
    for (const auto& [k, slot] : b.similarity) {
        f << k.model << ',' << k.config << ',' << k.dataset;
        if (const auto* s = std::get_if<semsim::SimilarityDistribution>(&slot); s && !s->scores.empty()) {
            const auto [lo, hi] = std::minmax_element(s->scores.begin(), s->scores.end());
            f << ',' << s->n << ',' << format_sig6(*lo) << ',' << format_sig6(s->q1) << ',' << format_sig6(s->median) << ','
              << format_sig6(s->q3) << ',' << format_sig6(*hi) << '\n';
        } else {
            f << ",missing,,,,,\n";
        }
    }

    f = open("importance_heatmap.csv");
    f << "model,config,dataset";
    for (auto name : textfeat::FeatureVector::names()) f << ',' << name;
    f << '\n';
    for (const auto& [k, slot] : b.importances) {
        f << k.model << ',' << k.config << ',' << k.dataset;
        if (const auto* r = std::get_if<detector::FeatureImportanceReport>(&slot)) {
            for (const auto& [name, v] : r->importances) f << ',' << format_sig6(v);
        } else {
            for (std::size_t i = 0; i < textfeat::FeatureVector::kSize; ++i) f << (i == 0 ? ",missing" : ",");
        }
        f << '\n';
    }

    f = open("divergence_counts.csv");
    f << "model,config,dataset,significant_ai_higher,significant_human_higher,categories\n";
    for (const auto& [k, slot] : b.divergence) {
        f << k.model << ',' << k.config << ',' << k.dataset << ',';
        if (const auto* r = std::get_if<topics::DivergenceReport>(&slot)) {
            std::size_t up = 0;
            std::size_t down = 0;
            for (const auto& row : r->rows)
                if (row.significant) (row.direction == topics::Direction::ai_higher ? up : down) += 1;
            f << up << ',' << down << ',' << r->rows.size() << '\n';
        } else {
            f << "missing,,\n";
        }
    }

    f = open("selection.csv");
    f << "model,config,dataset,n_sets,overlap,chance_overlap\n";
    for (const auto& [k, slot] : b.selection) {
        f << k.model << ',' << k.config << ',' << k.dataset << ',';
        if (const auto* s = std::get_if<SelectionSummary>(&slot))
            f << s->n_sets << ',' << format_sig6(s->overlap) << ',' << format_sig6(s->chance_overlap) << '\n';
        else
            f << "missing,,\n";
    }
}

// ---------------------------------------------------------------------------
// Raw artifacts

std::string manifest_to_json(const RunManifest& m) { return manifest_json(m).dump(2) + "\n"; }

RunManifest manifest_from_json(std::string_view text) {
    const json j = json::parse(text);
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.value("created_at", "");
    m.corpus_hash = j.value("corpus_hash", "");
    m.dataset = j.value("dataset", "");
    m.lexicon_versions = j.value("lexicon_versions", std::map<std::string, std::string>{});
    m.encoder = j.value("encoder", "");
    m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    m.config_kinds = j.value("config_kinds", std::vector<std::string>{});
    m.template_hashes = j.value("template_hashes", std::map<std::string, std::string>{});
    m.parameters = j.value("parameters", std::map<std::string, std::string>{});
    return m;
}

std::string detection_to_json(const detector::DetectionResult& d) {
    return json{{"detector", d.detector},
                {"mean_accuracy", d.mean_accuracy},
                {"per_seed_accuracy", d.per_seed_accuracy},
                {"seeds", d.seeds},
                {"n_train", d.n_train},
                {"n_val", d.n_val}}
               .dump(2) +
           "\n";
}

detector::DetectionResult detection_from_json(std::string_view text) {
    const json j = json::parse(text);
    detector::DetectionResult d;
    d.detector = j.value("detector", "");
    d.mean_accuracy = j.at("mean_accuracy").get<double>();
    d.per_seed_accuracy = j.at("per_seed_accuracy").get<std::vector<double>>();
    d.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    d.n_train = j.value("n_train", std::size_t{0});
    d.n_val = j.value("n_val", std::size_t{0});
    return d;
}

std::string similarity_to_json(const semsim::SimilarityDistribution& s, const std::vector<std::string>& pair_ids) {
    return json{{"n", s.n},
                {"median", s.median},
                {"q1", s.q1},
                {"q3", s.q3},
                {"scores", s.scores},
                {"pair_ids", pair_ids},
                {"zero_vector_pairs", s.zero_vector_pairs}}
               .dump(2) +
           "\n";
}

semsim::SimilarityDistribution similarity_from_json(std::string_view text) {
    const json j = json::parse(text);
    semsim::SimilarityDistribution s;
    s.scores = j.at("scores").get<std::vector<double>>();
    s.n = j.at("n").get<std::size_t>();
    s.median = j.at("median").get<double>();
    s.q1 = j.at("q1").get<double>();
    s.q3 = j.at("q3").get<double>();
    s.zero_vector_pairs = j.value("zero_vector_pairs", std::vector<std::size_t>{});
    return s;
}

std::string importances_to_json(const detector::FeatureImportanceReport& r) {
    json values = json::array();
    for (const auto& [name, v] : r.importances) values.push_back({{"feature", name}, {"importance", v}});
    return json{{"importances", std::move(values)}, {"top_k", r.top_k}}.dump(2) + "\n";
}

detector::FeatureImportanceReport importances_from_json(std::string_view text) {
    const json j = json::parse(text);
    detector::FeatureImportanceReport r;
    for (const auto& e : j.at("importances")) r.importances.emplace_back(e.at("feature").get<std::string>(), e.at("importance").get<double>());
    r.top_k = j.at("top_k").get<std::vector<std::string>>();
    return r;
}

std::string divergence_to_json(const topics::DivergenceReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"category", row.category},
                        {"u", row.u_statistic},
                        {"p_raw", row.p_raw},
                        {"p_adjusted", row.p_adjusted},
                        {"significant", row.significant},
                        {"direction", std::string(topics::to_string(row.direction))},
                        {"n_ai", row.n_ai},
                        {"n_human", row.n_human},
                        {"degenerate", row.degenerate}});
    return json{{"alpha", r.alpha}, {"rows", std::move(rows)}}.dump(2) + "\n";
}

topics::DivergenceReport divergence_from_json(std::string_view text) {
    const json j = json::parse(text);
    topics::DivergenceReport r;
    r.alpha = j.at("alpha").get<double>();
    for (const auto& e : j.at("rows")) {
        topics::DivergenceRow row;
        row.category = e.at("category").get<std::string>();
        row.u_statistic = e.at("u").get<double>();
        row.p_raw = e.at("p_raw").get<double>();
        row.p_adjusted = e.at("p_adjusted").get<double>();
        row.significant = e.at("significant").get<bool>();
        const auto dir = e.at("direction").get<std::string>();
        row.direction = dir == "ai_higher" ? topics::Direction::ai_higher
                        : dir == "human_higher" ? topics::Direction::human_higher
                                                : topics::Direction::none;
        row.n_ai = e.value("n_ai", std::size_t{0});
        row.n_human = e.value("n_human", std::size_t{0});
        row.degenerate = e.value("degenerate", false);
        r.rows.push_back(std::move(row));
    }
    return r;
}

SelectionSummary summarize_selection(std::span<const selector::SelectionOutcome> cosine,
                                     std::span<const selector::SelectionOutcome> ml) {
    SelectionSummary s;
    s.overlap = selector::overlap_rate(cosine, ml);
    s.n_sets = cosine.size();
    std::map<std::string, std::size_t> ml_by_id;
    for (const auto& o : ml) ml_by_id[o.reply_id] = o.chosen_index;
    std::set<std::size_t> sizes;
    for (const auto& o : cosine) {
        s.cosine_chosen.push_back(o.chosen_index);
        s.ml_chosen.push_back(ml_by_id.at(o.reply_id));
        sizes.insert(o.per_candidate_scores.size());
    }
    if (sizes.size() == 1 && *sizes.begin() > 0) {
        s.n_candidates = *sizes.begin();
        s.chance_overlap = 1.0 / static_cast<double>(s.n_candidates);
    }
    return s;
}

namespace {

json raw_detection(const detector::DetectionResult& d) { return json::parse(detection_to_json(d)); }
json raw_similarity(const semsim::SimilarityDistribution& d) { return json::parse(similarity_to_json(d, {})); }

}  // namespace

std::string selection_to_json(const SelectionSummary& s) {
    json strategies = json::object();
    for (const auto& [name, d] : s.detection_by_strategy) strategies[name]["detection"] = raw_detection(d);
    for (const auto& [name, d] : s.similarity_by_strategy) strategies[name]["similarity"] = raw_similarity(d);
    return json{{"n_sets", s.n_sets},
                {"n_candidates", s.n_candidates},
                {"overlap", s.overlap},
                {"chance_overlap", s.chance_overlap},
                {"cosine_chosen", s.cosine_chosen},
                {"ml_chosen", s.ml_chosen},
                {"strategies", std::move(strategies)}}
               .dump(2) +
           "\n";
}

SelectionSummary selection_from_json(std::string_view text) {
    const json j = json::parse(text);
    SelectionSummary s;
    s.n_sets = j.at("n_sets").get<std::size_t>();
    s.n_candidates = j.at("n_candidates").get<std::size_t>();
    s.overlap = j.at("overlap").get<double>();
    s.chance_overlap = j.at("chance_overlap").get<double>();
    s.cosine_chosen = j.at("cosine_chosen").get<std::vector<std::size_t>>();
    s.ml_chosen = j.at("ml_chosen").get<std::vector<std::size_t>>();
    const json strategies = j.value("strategies", json::object());
    for (const auto& [name, entry] : strategies.items()) {
        if (entry.contains("detection")) s.detection_by_strategy[name] = detection_from_json(entry["detection"].dump());
        if (entry.contains("similarity")) s.similarity_by_strategy[name] = similarity_from_json(entry["similarity"].dump());
    }
    return s;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace turingkit::report
