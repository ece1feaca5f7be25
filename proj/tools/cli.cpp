// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "turingkit/corpus.hpp"
#include "turingkit/detector.hpp"
#include "turingkit/encoder.hpp"
#include "turingkit/error.hpp"
#include "turingkit/genharness.hpp"
#include "turingkit/lexicon.hpp"
#include "turingkit/parallel.hpp"
#include "turingkit/report.hpp"
#include "turingkit/rng.hpp"
#include "turingkit/selector.hpp"
#include "turingkit/semsim.hpp"
#include "turingkit/text_util.hpp"
#include "turingkit/textfeat.hpp"
#include "turingkit/topics.hpp"

namespace turingkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kCommands[] = {"ingest", "persona", "generate", "detect", "semsim", "topics", "select", "report"};

struct Context {
    report::Config config;
    fs::path out;
    std::uint64_t seed = 42;
    std::string encoder_spec = "fallback";
    std::size_t jobs = 1;
    std::string input;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
    std::ostringstream buffer;
    fn(buffer);
    write_file(path, buffer.str());
}

fs::path upstream(const Context& ctx, const fs::path& relative, std::string_view producer) {
    const fs::path path = ctx.out / relative;
    if (!fs::exists(path))
        throw Error("missing upstream artifact '" + path.string() + "'; run 'turingkit " + std::string(producer) +
                    "' first");
    return path;
}

corpus::Corpus load_corpus(const Context& ctx) {
    return corpus::ingest_corpus(upstream(ctx, "corpus.jsonl", "ingest"));
}

report::RunManifest load_manifest(const Context& ctx) {
    return report::manifest_from_json(read_file(upstream(ctx, "manifest.json", "ingest")));
}

void save_manifest(const Context& ctx, const report::RunManifest& m) {
    write_file(ctx.out / "manifest.json", report::manifest_to_json(m));
}

LexiconSet load_lexica(const Context& ctx) {
    const auto dir = ctx.config.get_string("lexicon.dir", "");
    return dir.empty() ? LexiconSet::builtin() : LexiconSet::load(dir);
}

std::unique_ptr<textfeat::ToxicityScorer> load_toxicity(const Context& ctx, const LexiconSet& lexica) {
    const auto url = ctx.config.get_string("toxicity.url", "");
    if (!url.empty()) return std::make_unique<textfeat::HttpToxicityScorer>(url);
    return std::make_unique<textfeat::LexiconToxicityScorer>(lexica.toxicity);
}

topics::TopicLexicon load_topics(const Context& ctx) {
    const auto path = ctx.config.get_string("topics.lexicon", "");
    return path.empty() ? topics::TopicLexicon::builtin_demo() : topics::TopicLexicon::load(path);
}

std::vector<std::uint64_t> detect_seeds(const Context& ctx) {
    return ctx.config.get_u64_list("detect.seeds", detector::kDefaultSeeds);
}

std::size_t positive(const Context& ctx, std::string_view key, std::int64_t fallback) {
    const auto v = ctx.config.get_int(key, fallback);
    if (v < 1) throw ConfigError(ctx.config.source() + ": config key '" + std::string(key) + "': must be at least 1");
    return static_cast<std::size_t>(v);
}

genharness::ChatEndpoint load_endpoint(const Context& ctx, std::string_view prefix) {
    auto key = [&](std::string_view name) {
        const std::string own = std::string(prefix) + "." + std::string(name);
        return ctx.config.has(own) ? own : "endpoint." + std::string(name);
    };
    genharness::ChatEndpoint ep;
    ep.base_url = ctx.config.get_string(key("url"), "");
    if (ep.base_url.empty())
        throw ConfigError(ctx.config.source() + ": missing required config key '" + std::string(prefix) +
                          ".url' (or 'endpoint.url')");
    ep.model_name = ctx.config.get_string(key("model"), "default");
    ep.temperature = ctx.config.get_double(key("temperature"), 0.8);
    ep.max_tokens = positive(ctx, key("max_tokens"), 120);
    ep.auth_env = ctx.config.get_string(key("auth_env"), "");
    ep.timeout_seconds = ctx.config.get_double(key("timeout"), 60.0);
    ep.max_concurrency = positive(ctx, key("concurrency"), 4);
    ep.retry.max_attempts = positive(ctx, key("retries"), 4);
    ep.retry.initial_backoff = std::chrono::milliseconds(ctx.config.get_int(key("backoff_ms"), 250));
    return ep;
}

struct CellFile {
    report::CellKey key;
    std::vector<selector::CandidateSet> sets;
};

std::vector<CellFile> load_cells(const Context& ctx, const std::string& dataset) {
    const fs::path dir = upstream(ctx, "candidates", "generate");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no candidate files in '" + dir.string() + "'; run 'turingkit generate' first");
    std::vector<CellFile> cells;
    for (const auto& f : files) {
        auto sets = selector::read_candidate_sets(f);
        if (sets.empty()) {
            spdlog::warn("{}: no candidate sets, skipped", f.string());
            continue;
        }
        cells.push_back({report::CellKey{sets.front().model_id, sets.front().config_id, dataset}, std::move(sets)});
    }
    return cells;
}

std::vector<std::string> first_candidates(const std::vector<selector::CandidateSet>& sets) {
    std::vector<std::string> out;
    for (const auto& s : sets) out.push_back(s.candidates.front());
    return out;
}

std::vector<std::string> chosen_texts(const std::vector<selector::CandidateSet>& sets,
                                      const std::vector<selector::SelectionOutcome>& outcomes) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < sets.size(); ++i) out.push_back(sets[i].candidates.at(outcomes[i].chosen_index));
    return out;
}

std::vector<std::string> reference_texts(const corpus::Corpus& corpus, const std::vector<selector::CandidateSet>& sets) {
    selector::validate_candidate_sets(sets, corpus);
    std::vector<std::string> out;
    for (const auto& s : sets) out.push_back(corpus.find_reply(s.reply_id)->text);
    return out;
}

detector::TuringTestOptions turing_options(const Context& ctx) {
    detector::TuringTestOptions opt;
    opt.seeds = detect_seeds(ctx);
    opt.val_fraction = ctx.config.get_double("detect.val_fraction", detector::kDefaultValFraction);
    opt.jobs = ctx.jobs;
    return opt;
}

detector::DetectionResult detect_texts(const Context& ctx, const std::vector<std::string>& ai_texts,
                                       const std::vector<corpus::Reply>& pool, const Encoder& encoder) {
    const auto external = ctx.config.get_string("detect.external_url", "");
    if (!external.empty()) return detector::run_turing_test(ai_texts, pool, detector::ExternalDetector(external), turing_options(ctx));
    return detector::run_turing_test(ai_texts, pool, encoder, turing_options(ctx));
}

semsim::SimilarityDistribution similarity_of(const Context& ctx, const std::vector<std::string>& generated,
                                             const std::vector<std::string>& references, const Encoder& encoder) {
    std::vector<semsim::TextPair> pairs;
    for (std::size_t i = 0; i < generated.size(); ++i) pairs.push_back({generated[i], references[i]});
    return semsim::pairwise_similarity(pairs, encoder, ctx.jobs);
}

std::map<std::string, std::string> parse_versions(const std::string& versions) {
    std::map<std::string, std::string> out;
    for (const auto& part : split(versions, ';')) {
        const auto eq = part.find('=');
        if (eq != std::string::npos) out[part.substr(0, eq)] = part.substr(eq + 1);
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Context& ctx) {
    std::string input = ctx.input.empty() ? ctx.config.get_string("corpus.path", "") : ctx.input;
    if (input.empty()) throw ConfigError("ingest needs an input corpus: pass --input or set 'corpus.path'");
    const auto corpus = corpus::ingest_corpus(input);
    std::ostringstream canonical;
    corpus::write_corpus(corpus, canonical);
    write_file(ctx.out / "corpus.jsonl", canonical.str());

    const auto lexica = load_lexica(ctx);
    const auto topic_lexicon = load_topics(ctx);
    const auto encoder = make_encoder(ctx.encoder_spec);
    report::RunManifest m;
    m.corpus_hash = hex64(fnv1a64(canonical.str()));
    m.run_id = hex64(derive_seed(ctx.seed, fnv1a64(canonical.str()))).substr(0, 12);
    m.created_at = report::utc_timestamp();
    m.dataset = corpus.platform().name.empty() ? "unknown" : corpus.platform().name;
    m.lexicon_versions = parse_versions(lexica.versions());
    m.lexicon_versions["topics"] = topic_lexicon.version();
    m.encoder = encoder->name();
    m.seeds = detect_seeds(ctx);
    m.template_hashes = {{"persona", std::string(genharness::kPersonaTemplateVersion) + ":" + genharness::persona_template_hash()},
                         {"prompt", std::string(genharness::kPromptTemplateVersion) + ":" + genharness::prompt_template_hash()}};
    m.parameters["seed"] = std::to_string(ctx.seed);
    save_manifest(ctx, m);
    std::cout << "ingested " << corpus.replies().size() << " replies from " << corpus.users().size() << " users ("
              << m.dataset << ")\n";
    return 0;
}

int cmd_persona(const Context& ctx) {
    const auto corpus = load_corpus(ctx);
    auto manifest = load_manifest(ctx);
    const auto endpoint = load_endpoint(ctx, "persona");
    const auto client = genharness::make_chat_client(endpoint);
    const auto sample_size = positive(ctx, "persona.sample_size", static_cast<std::int64_t>(genharness::kPersonaSampleSize));

    std::vector<std::string> users;
    for (const auto& u : corpus.users()) {
        if (u.train_reply_ids.empty())
            spdlog::warn("user '{}' has no training replies; no persona", u.user_id);
        else
            users.push_back(u.user_id);
    }
    std::vector<std::string> personas(users.size());
    parallel_for(users.size(), endpoint.max_concurrency, [&](std::size_t i) {
        personas[i] = genharness::build_persona(corpus, users[i], *client, endpoint, ctx.seed, sample_size);
    });
    std::map<std::string, std::string> by_user;
    for (std::size_t i = 0; i < users.size(); ++i) by_user[users[i]] = personas[i];
    write_with(ctx.out / "personas.jsonl", [&](std::ostream& os) { corpus::write_personas(by_user, os); });

    manifest.parameters["persona.model"] = endpoint.model_name;
    manifest.parameters["persona.sample_size"] = std::to_string(sample_size);
    save_manifest(ctx, manifest);
    std::cout << "built " << by_user.size() << " personas\n";
    return 0;
}

int cmd_generate(const Context& ctx) {
    auto corpus = load_corpus(ctx);
    auto manifest = load_manifest(ctx);
    std::vector<genharness::ConfigKind> kinds;
    for (const auto& name : ctx.config.get_list("generate.configs", {"BL", "PE", "PE+SE", "PE+SE+CR"}))
        kinds.push_back(genharness::parse_config_kind(name));
    const bool needs_persona = std::any_of(kinds.begin(), kinds.end(), [](auto k) { return k != genharness::ConfigKind::BL; });
    if (needs_persona) corpus = corpus.with_personas(corpus::read_personas(upstream(ctx, "personas.jsonl", "persona")));

    const auto endpoint = load_endpoint(ctx, "generate");
    const auto client = genharness::make_chat_client(endpoint);
    const auto per_user = positive(ctx, "generate.per_user", 1);
    const auto min_test = positive(ctx, "generate.min_test_replies", static_cast<std::int64_t>(per_user));
    std::optional<std::size_t> max_users;
    if (ctx.config.has("generate.max_users")) max_users = positive(ctx, "generate.max_users", 1);
    const auto sample = corpus::sample_eval_users(corpus, min_test, per_user, max_users, ctx.seed);
    std::vector<genharness::GenerationJob> jobs;
    for (const auto& u : sample)
        for (const auto& id : u.reply_ids) jobs.push_back({id, u.user_id, corpus.find_reply(id)->parent_text});
    if (jobs.empty()) throw Error("no users with at least " + std::to_string(min_test) + " test replies");

    genharness::BatchOptions options;
    options.n = positive(ctx, "generate.n", 20);
    options.seed = ctx.seed;
    options.prompt.n_style_examples = positive(ctx, "generate.n_style_examples", 10);
    options.prompt.n_retrieved = positive(ctx, "generate.n_retrieved", 3);

    std::unique_ptr<Encoder> encoder;
    std::optional<genharness::RetrievalIndex> index;
    if (std::find(kinds.begin(), kinds.end(), genharness::ConfigKind::PE_SE_CR) != kinds.end()) {
        encoder = make_encoder(ctx.encoder_spec);
        index = genharness::RetrievalIndex::build(corpus, *encoder, ctx.jobs);
    }

    manifest.config_kinds.clear();
    for (auto kind : kinds) {
        options.prompt.kind = kind;
        const auto batch = genharness::generate_batch(*client, endpoint, corpus, jobs, options,
                                                      index ? &*index : nullptr, encoder.get());
        const report::CellKey key{endpoint.model_name, std::string(genharness::to_string(kind)), manifest.dataset};
        write_with(ctx.out / "candidates" / (key.stem() + ".jsonl"),
                   [&](std::ostream& os) { selector::write_candidate_sets(os, batch.sets); });
        write_with(ctx.out / "logs" / (key.stem() + ".generation.jsonl"), [&](std::ostream& os) {
            for (std::size_t i = 0; i < batch.sets.size(); ++i) {
                const auto& g = batch.generations[i];
                json requests = json::array();
                for (const auto& r : g.log)
                    requests.push_back({{"request", r.request},
                                        {"requested", r.requested},
                                        {"returned", r.returned},
                                        {"empty", r.empty},
                                        {"latency_ms", r.latency_ms},
                                        {"finish_reasons", r.finish_reasons}});
                os << json{{"reply_id", batch.sets[i].reply_id},
                           {"attempted", g.attempted},
                           {"partial", g.partial},
                           {"requests", std::move(requests)}}
                          .dump()
                   << '\n';
            }
        });
        if (batch.partial_sets > 0)
            spdlog::warn("{}: {} candidate set(s) are partial", key.stem(), batch.partial_sets);
        manifest.config_kinds.emplace_back(genharness::to_string(kind));
        std::cout << "generated " << batch.sets.size() << " candidate sets for " << key.model << " / " << key.config << "\n";
    }
    manifest.parameters["generate.model"] = endpoint.model_name;
    manifest.parameters["generate.n"] = std::to_string(options.n);
    manifest.parameters["generate.temperature"] = format_sig6(endpoint.temperature);
    manifest.parameters["generate.n_style_examples"] = std::to_string(options.prompt.n_style_examples);
    manifest.parameters["generate.n_retrieved"] = std::to_string(options.prompt.n_retrieved);
    save_manifest(ctx, manifest);
    return 0;
}

int cmd_detect(const Context& ctx) {
    const auto corpus = load_corpus(ctx);
    auto manifest = load_manifest(ctx);
    const auto encoder = make_encoder(ctx.encoder_spec);
    const auto lexica = load_lexica(ctx);
    const auto toxicity = load_toxicity(ctx, lexica);
    const auto pool = corpus.human_train_pool();
    ml::ForestOptions forest;
    forest.n_trees = positive(ctx, "detect.forest_trees", 100);
    const auto seeds = detect_seeds(ctx);

    for (const auto& cell : load_cells(ctx, manifest.dataset)) {
        const auto ai_texts = first_candidates(cell.sets);
        const auto result = detect_texts(ctx, ai_texts, pool, *encoder);
        write_file(ctx.out / "detection" / (cell.key.stem() + ".json"), report::detection_to_json(result));

        const auto set = corpus::build_balanced_set(ai_texts, pool, seeds.front());
        std::vector<textfeat::FeatureVector> features(set.items.size());
        std::vector<corpus::Label> labels;
        for (const auto& item : set.items) labels.push_back(item.label);
        parallel_for(set.items.size(), ctx.jobs,
                     [&](std::size_t i) { features[i] = textfeat::extract_features(set.items[i].text, lexica, *toxicity); });
        const auto [model, importance] = detector::train_forest_detector(features, labels, forest, seeds.front());
        write_file(ctx.out / "importance" / (cell.key.stem() + ".json"), report::importances_to_json(importance));
        write_with(ctx.out / "importance" / (cell.key.stem() + ".csv"),
                   [&](std::ostream& os) { detector::write_importance_csv(os, importance); });
        write_with(ctx.out / "features" / (cell.key.stem() + ".csv"),
                   [&](std::ostream& os) { textfeat::write_feature_csv(os, features); });
        std::cout << cell.key.model << " / " << cell.key.config << ": mean accuracy " << format_sig6(result.mean_accuracy)
                  << "\n";
    }
    manifest.encoder = encoder->name();
    manifest.seeds = seeds;
    manifest.parameters["detect.forest_trees"] = std::to_string(forest.n_trees);
    manifest.parameters["detect.forest"] = "max_features=sqrt(d);min_samples_leaf=1;max_depth=unlimited;bootstrap=true";
    manifest.parameters["detect.val_fraction"] = format_sig6(turing_options(ctx).val_fraction);
    manifest.parameters["toxicity"] = toxicity->name();
    save_manifest(ctx, manifest);
    return 0;
}

int cmd_semsim(const Context& ctx) {
    const auto corpus = load_corpus(ctx);
    auto manifest = load_manifest(ctx);
    const auto encoder = make_encoder(ctx.encoder_spec);
    for (const auto& cell : load_cells(ctx, manifest.dataset)) {
        const auto refs = reference_texts(corpus, cell.sets);
        const auto dist = similarity_of(ctx, first_candidates(cell.sets), refs, *encoder);
        std::vector<std::string> ids;
        for (const auto& s : cell.sets) ids.push_back(s.reply_id);
        write_file(ctx.out / "similarity" / (cell.key.stem() + ".json"), report::similarity_to_json(dist, ids));
        write_with(ctx.out / "similarity" / (cell.key.stem() + ".csv"),
                   [&](std::ostream& os) { semsim::write_scores_csv(os, ids, dist.scores); });
        std::cout << cell.key.model << " / " << cell.key.config << ": median similarity " << format_sig6(dist.median)
                  << "\n";
    }
    manifest.encoder = encoder->name();
    save_manifest(ctx, manifest);
    return 0;
}

int cmd_topics(const Context& ctx) {
    const auto corpus = load_corpus(ctx);
    auto manifest = load_manifest(ctx);
    const auto lexicon = load_topics(ctx);
    const double alpha = ctx.config.get_double("topics.alpha", 0.05);
    std::map<std::string, std::map<std::string, topics::DivergenceReport>> by_config;
    for (const auto& cell : load_cells(ctx, manifest.dataset)) {
        const auto refs = reference_texts(corpus, cell.sets);
        auto report = topics::divergence_report(first_candidates(cell.sets), refs, lexicon, alpha);
        write_file(ctx.out / "divergence" / (cell.key.stem() + ".json"), report::divergence_to_json(report));
        write_with(ctx.out / "divergence" / (cell.key.stem() + ".csv"),
                   [&](std::ostream& os) { topics::write_divergence_csv(os, report); });
        std::cout << cell.key.model << " / " << cell.key.config << ": " << report.significant_count()
                  << " significant categories\n";
        by_config[cell.key.config][cell.key.model] = std::move(report);
    }
    const auto k = positive(ctx, "topics.top_k", 10);
    for (const auto& [config, reports] : by_config) {
        const auto common = topics::top_k_common_divergent(reports, k);
        write_with(ctx.out / "divergence" / ("common__" + report::CellKey{"all", config, ""}.stem().substr(5) + ".csv"),
                   [&](std::ostream& os) {
                       os << "category,n_models,models\n";
                       for (const auto& c : common) os << c.category << ',' << c.models.size() << ',' << join(c.models, ";") << '\n';
                   });
    }
    manifest.parameters["topics.alpha"] = format_sig6(alpha);
    manifest.lexicon_versions["topics"] = lexicon.version();
    save_manifest(ctx, manifest);
    return 0;
}

int cmd_select(const Context& ctx) {
    const auto corpus = load_corpus(ctx);
    auto manifest = load_manifest(ctx);
    const auto encoder = make_encoder(ctx.encoder_spec);
    const auto lexica = load_lexica(ctx);
    const auto toxicity = load_toxicity(ctx, lexica);
    const auto pool = corpus.human_train_pool();
    selector::MlSelectionOptions ml_options;
    ml_options.n_folds = positive(ctx, "select.folds", static_cast<std::int64_t>(selector::kDefaultFolds));
    ml_options.forest.n_trees = positive(ctx, "select.forest_trees", 100);
    ml_options.jobs = ctx.jobs;
    ml_options.toxicity = toxicity.get();

    for (const auto& cell : load_cells(ctx, manifest.dataset)) {
        const auto refs = reference_texts(corpus, cell.sets);
        std::vector<selector::SelectionOutcome> cosine(cell.sets.size());
        parallel_for(cell.sets.size(), ctx.jobs, [&](std::size_t i) {
            cosine[i] = selector::select_cosine_optimal(cell.sets[i], refs[i], *encoder);
        });
        const auto ml = selector::select_ml_optimal(cell.sets, pool, ctx.seed, lexica, ml_options);
        if (ml.audit.leaks != 0)
            throw Error("fold audit found " + std::to_string(ml.audit.leaks) + " same-user leaks in " + cell.key.stem());
        std::vector<selector::SelectionOutcome> random;
        for (const auto& s : cell.sets) random.push_back(selector::select_random(s, ctx.seed));

        const auto dir = ctx.out / "selection";
        write_with(dir / (cell.key.stem() + ".cosine.jsonl"), [&](std::ostream& os) { selector::write_outcomes(os, cosine); });
        write_with(dir / (cell.key.stem() + ".ml.jsonl"),
                   [&](std::ostream& os) { selector::write_outcomes(os, ml.outcomes, &ml.feature_schema); });
        write_with(dir / (cell.key.stem() + ".random.jsonl"), [&](std::ostream& os) { selector::write_outcomes(os, random); });
        json folds = json::array();
        for (std::size_t f = 0; f < ml.audit.training_users.size(); ++f)
            folds.push_back({{"fold", f},
                             {"training_users", ml.audit.training_users[f]},
                             {"training_ai_examples", ml.audit.training_ai_examples[f]}});
        write_file(dir / (cell.key.stem() + ".audit.json"),
                   json{{"fold_of_user", ml.audit.fold_of_user},
                        {"folds", std::move(folds)},
                        {"human_examples", ml.audit.human_examples},
                        {"leaks", ml.audit.leaks}}
                           .dump(2) +
                       "\n");

        auto summary = report::summarize_selection(cosine, ml.outcomes);
        const std::pair<std::string, const std::vector<selector::SelectionOutcome>*> strategies[] = {
            {"random", &random}, {"cosine_optimal", &cosine}, {"ml_optimal", &ml.outcomes}};
        for (const auto& [name, outcomes] : strategies) {
            const auto texts = chosen_texts(cell.sets, *outcomes);
            summary.detection_by_strategy[name] = detect_texts(ctx, texts, pool, *encoder);
            summary.similarity_by_strategy[name] = similarity_of(ctx, texts, refs, *encoder);
        }
        write_file(dir / (cell.key.stem() + ".summary.json"), report::selection_to_json(summary));
        std::cout << cell.key.model << " / " << cell.key.config << ": overlap " << format_sig6(summary.overlap)
                  << " (chance " << format_sig6(summary.chance_overlap) << ")\n";
    }
    manifest.parameters["select.folds"] = std::to_string(ml_options.n_folds);
    manifest.parameters["select.forest_trees"] = std::to_string(ml_options.forest.n_trees);
    manifest.parameters["select.feature_schema"] = join(
        [] {
            std::vector<std::string> names;
            for (auto n : textfeat::FeatureVector::names()) names.emplace_back(n);
            return names;
        }(),
        ";");
    manifest.parameters["toxicity"] = toxicity->name();
    save_manifest(ctx, manifest);
    return 0;
}

template <typename T, typename Parse>
report::Slot<T> load_slot(const fs::path& path, Parse&& parse) {
    if (!fs::exists(path)) {
        spdlog::warn("missing artifact '{}'; cell marked missing", path.string());
        return report::Missing{"no artifact at " + path.filename().string()};
    }
    return parse(read_file(path));
}

int cmd_report(const Context& ctx) {
    report::ReportBundle bundle;
    bundle.manifest = load_manifest(ctx);
    std::map<report::CellKey, double> accuracies;
    for (const auto& cell : load_cells(ctx, bundle.manifest.dataset)) {
        const auto& k = cell.key;
        const auto stem = k.stem();
        bundle.cells.push_back(k);
        bundle.detection[k] = load_slot<detector::DetectionResult>(ctx.out / "detection" / (stem + ".json"), report::detection_from_json);
        bundle.similarity[k] = load_slot<semsim::SimilarityDistribution>(ctx.out / "similarity" / (stem + ".json"), report::similarity_from_json);
        bundle.importances[k] = load_slot<detector::FeatureImportanceReport>(ctx.out / "importance" / (stem + ".json"), report::importances_from_json);
        bundle.divergence[k] = load_slot<topics::DivergenceReport>(ctx.out / "divergence" / (stem + ".json"), report::divergence_from_json);
        bundle.selection[k] = load_slot<report::SelectionSummary>(ctx.out / "selection" / (stem + ".summary.json"), report::selection_from_json);
        if (const auto* d = std::get_if<detector::DetectionResult>(&bundle.detection[k])) accuracies[k] = d->mean_accuracy;
    }
    try {
        bundle.deltas = report::emit_stepwise_deltas(accuracies);
    } catch (const InvalidArgument& e) {
        spdlog::warn("no stepwise deltas: {}", e.what());
    }
    const auto problems = report::verify_bundle(bundle);
    if (!problems.empty()) {
        for (const auto& p : problems) spdlog::error("{}", p);
        throw Error("report does not recompute from raw artifacts (" + std::to_string(problems.size()) + " problem(s))");
    }
    report::write_bundle(bundle, ctx.out / "report");
    const auto missing = bundle.missing_count();
    if (missing > 0) spdlog::warn("report has {} missing cell(s)", missing);
    std::cout << "report written to " << (ctx.out / "report").string() << " (" << bundle.cells.size() << " cells, "
              << missing << " missing)\n";
    return 0;
}

std::string usage() {
    return "usage: turingkit <command> [--config PATH] [--out DIR] [--seed N] [--encoder SPEC] [--jobs N]\n"
           "commands: ingest, persona, generate, detect, semsim, topics, select, report\n";
}

void setup_logging(bool verbose) {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_color_mt("turingkit");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
    });
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
}

}  // namespace

int run(const std::vector<std::string>& args) {
    if (args.size() < 2 || std::find(std::begin(kCommands), std::end(kCommands), args[1]) == std::end(kCommands)) {
        if (args.size() >= 2 && (args[1] == "--help" || args[1] == "-h")) {
            std::cout << usage();
            return 0;
        }
        std::cerr << (args.size() < 2 ? "missing command\n" : "unknown command '" + args[1] + "'\n") << usage();
        return 2;
    }

    CLI::App app{"Human-likeness evaluation for generated replies", "turingkit"};
    std::string config_path;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::string encoder;
    std::string input;
    bool verbose = false;
    app.add_option("--config", config_path, "Run configuration (key = value)");
    app.add_option("--out", out, "Artifact directory");
    app.add_option("--seed", seed, "Run seed");
    app.add_option("--encoder", encoder, "Encoder: fallback[:dim], http(s)://url[#dim], or a word-vector file");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--input", input, "Input corpus (ingest)");
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_option("command", "Command")->required();

    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 wants reversed, without argv[0]
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help() << usage();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << usage();
        return 2;
    }
    setup_logging(verbose);

    try {
        Context ctx;
        if (!config_path.empty()) ctx.config = report::Config::load(config_path);
        ctx.out = out;
        ctx.seed = seed ? *seed : static_cast<std::uint64_t>(ctx.config.get_int("seed", 42));
        ctx.encoder_spec = !encoder.empty() ? encoder : ctx.config.get_string("encoder", "fallback");
        ctx.jobs = jobs ? *jobs : positive(ctx, "jobs", 1);
        ctx.input = input;
        fs::create_directories(ctx.out);

        const auto& command = args[1];
        const auto start = std::chrono::steady_clock::now();
        int status = 0;
        if (command == "ingest") status = cmd_ingest(ctx);
        else if (command == "persona") status = cmd_persona(ctx);
        else if (command == "generate") status = cmd_generate(ctx);
        else if (command == "detect") status = cmd_detect(ctx);
        else if (command == "semsim") status = cmd_semsim(ctx);
        else if (command == "topics") status = cmd_topics(ctx);
        else if (command == "select") status = cmd_select(ctx);
        else status = cmd_report(ctx);
        for (const auto& key : ctx.config.unused_keys())
            spdlog::debug("config key '{}' not used by '{}'", key, command);
        spdlog::debug("{} finished in {:.2f} s", command,
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        return status;
    } catch (const ParseError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace turingkit::cli
