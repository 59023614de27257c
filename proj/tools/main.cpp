// wordgeom: measure word-embedding spaces as geometric objects.
//
// One subcommand per procedure: train embeddings, query geometry, build and
// project cultural dimensions, scan an antonym lexicon, attach resampled
// confidence intervals, validate against survey data, and emit decade
// series / cross-corpus comparisons as CSV, JSON, or SVG.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "wordgeom/pipeline.hpp"

using namespace wordgeom;
using nlohmann::ordered_json;

namespace {

struct EmbeddingArgs {
    std::string path;
    std::string format = "word2vec-binary";
    bool case_fold = false;
    std::size_t max_vocab = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--embedding", path, "Embedding file")->required();
        cmd->add_option("--embedding-format", format,
                        "word2vec-binary | word2vec-text | glove-text");
        cmd->add_flag("--case-fold", case_fold,
                      "Lowercase tokens on load (first occurrence wins)");
        cmd->add_option("--max-vocab", max_vocab,
                        "Keep only the first N vocabulary entries");
    }

    Embedding load() const {
        LoadOptions options;
        options.case_fold = case_fold;
        if (max_vocab > 0) options.max_vocab = max_vocab;
        return load_embedding(path, format_from_string(format), options);
    }

    Embedding load_normalized() const { return normalize(load()); }
};

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + out_path + " for writing");
    out << text;
}

void emit_report(const SeriesReport& report, const std::string& format,
                 const std::string& out_path) {
    emit(render_to_string(report, render_format_from_string(format)),
         out_path);
}

std::vector<std::string> split_words(const std::vector<std::string>& args) {
    std::vector<std::string> words;
    for (const auto& arg : args) {
        std::size_t start = 0;
        while (start <= arg.size()) {
            auto comma = arg.find(',', start);
            std::string w = arg.substr(
                start, comma == std::string::npos ? comma : comma - start);
            if (!w.empty()) words.push_back(w);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    return words;
}

Corpus load_corpus_file(const std::string& path, bool weighted) {
    return weighted ? load_weighted_corpus(path) : load_plain_corpus(path);
}

ordered_json dimension_json(const CulturalDimension& dim) {
    ordered_json j;
    j["name"] = dim.name;
    j["vector"] = dim.vector;
    auto used = ordered_json::array();
    for (const auto& p : dim.pairs_used)
        used.push_back(ordered_json::array({p.first, p.second}));
    j["pairs_used"] = used;
    auto skipped = ordered_json::array();
    for (const auto& s : dim.pairs_skipped)
        skipped.push_back(ordered_json{
            {"pair", ordered_json::array({s.pair.first, s.pair.second})},
            {"reason", s.reason}});
    j["pairs_skipped"] = skipped;
    return j;
}

// scale spec argument: "gender=path/to/gender.json" with an optional
// ":+1" / ":-1" orientation suffix.
std::tuple<std::string, DimensionSpec, int> parse_scale_arg(
    const std::string& arg) {
    auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--scale", "expected scale=specfile[:+1|-1]");
    std::string scale = arg.substr(0, eq);
    std::string rest = arg.substr(eq + 1);
    int orientation = +1;
    auto colon = rest.rfind(':');
    if (colon != std::string::npos &&
        (rest.substr(colon) == ":+1" || rest.substr(colon) == ":-1")) {
        orientation = rest.substr(colon) == ":+1" ? +1 : -1;
        rest = rest.substr(0, colon);
    }
    return {scale, load_dimension_spec(rest), orientation};
}


// Every verb accepts --seed and --threads for interface uniformity; verbs
// that are pure deterministic reads ignore them.
void attach_inert_seed_threads(CLI::App* cmd) {
    auto* seed = cmd->add_option("--seed", "RNG seed (no effect: this verb is deterministic)");
    seed->expected(1);
    auto* threads = cmd->add_option("--threads", "Worker threads (no effect: this verb is single-pass)");
    threads->expected(1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cultural-dimension analysis of word embedding spaces"};
    app.require_subcommand(1);

    // ---- train ----------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "Train word2vec embeddings");
    train_cmd->set_config("--config");
    struct {
        std::string corpus, out, context_out;
        std::string format = "word2vec-binary";
        bool weighted = false;
        TrainingConfig config;
        std::string arch = "sgns";
        bool no_dynamic_window = false;
    } train_args;
    train_cmd->add_option("--corpus", train_args.corpus, "Training corpus")
        ->required();
    train_cmd->add_flag("--weighted", train_args.weighted,
                        "Corpus lines are \"tokens<TAB>count\"");
    train_cmd->add_option("--out", train_args.out, "Output embedding file")
        ->required();
    train_cmd->add_option("--context-out", train_args.context_out,
                          "Also save the context matrix here");
    train_cmd->add_option("--format", train_args.format,
                          "Output format (word2vec-binary | word2vec-text | "
                          "glove-text)");
    train_cmd->add_option("--dim", train_args.config.dim, "Vector size");
    train_cmd->add_option("--window", train_args.config.window,
                          "Context window");
    train_cmd->add_option("--arch", train_args.arch, "sgns | cbow");
    train_cmd->add_option("--negative", train_args.config.negative,
                          "Negative samples per target");
    train_cmd->add_option("--epochs", train_args.config.epochs, "Epochs");
    train_cmd->add_option("--min-count", train_args.config.min_count,
                          "Minimum token count");
    train_cmd->add_option("--subsample", train_args.config.subsample_t,
                          "Frequent-word downsampling threshold (0 disables)");
    train_cmd->add_option("--lr", train_args.config.initial_lr,
                          "Initial learning rate");
    train_cmd->add_option("--seed", train_args.config.seed, "RNG seed");
    train_cmd->add_option("--threads", train_args.config.workers,
                          "Worker threads (1 = deterministic)");
    train_cmd->add_flag("--no-dynamic-window", train_args.no_dynamic_window,
                        "Use the full window instead of a uniform shrink");

    // ---- neighbors / analogy --------------------------------------------
    auto* neighbors_cmd =
        app.add_subcommand("neighbors", "Nearest neighbors by cosine");
    neighbors_cmd->set_config("--config");
    EmbeddingArgs neighbors_emb;
    neighbors_emb.attach(neighbors_cmd);
    struct {
        std::string word;
        std::size_t count = 10;
        std::vector<std::string> exclude;
        std::string format = "json";
        std::string out;
    } neighbors_args;
    neighbors_cmd->add_option("--word", neighbors_args.word)->required();
    neighbors_cmd->add_option("--count", neighbors_args.count);
    neighbors_cmd->add_option("--exclude", neighbors_args.exclude,
                              "Additional tokens to exclude");
    neighbors_cmd->add_option("--format", neighbors_args.format,
                              "csv | json");
    neighbors_cmd->add_option("--out", neighbors_args.out);
    attach_inert_seed_threads(neighbors_cmd);

    auto* analogy_cmd =
        app.add_subcommand("analogy", "3CosAdd analogy: a : b :: c : ?");
    analogy_cmd->set_config("--config");
    EmbeddingArgs analogy_emb;
    analogy_emb.attach(analogy_cmd);
    struct {
        std::string a, b, c;
        std::string out;
        std::string format = "text";
    } analogy_args;
    analogy_cmd->add_option("--a", analogy_args.a)->required();
    analogy_cmd->add_option("--b", analogy_args.b)->required();
    analogy_cmd->add_option("--c", analogy_args.c)->required();
    analogy_cmd->add_option("--out", analogy_args.out);
    analogy_cmd->add_option("--format", analogy_args.format, "text | json");
    attach_inert_seed_threads(analogy_cmd);

    // ---- dim ------------------------------------------------------------
    auto* dim_cmd =
        app.add_subcommand("dim", "Cultural-dimension operations");
    dim_cmd->require_subcommand(1);

    auto* dim_build = dim_cmd->add_subcommand("build", "Build a dimension");
    dim_build->set_config("--config");
    EmbeddingArgs dim_build_emb;
    dim_build_emb.attach(dim_build);
    struct {
        std::string spec, out;
        std::string format = "json";
        bool strict = false;
        bool per_pair_normalize = false;
    } dim_build_args;
    dim_build->add_option("--spec", dim_build_args.spec, "Dimension spec JSON")
        ->required();
    dim_build->add_flag("--strict", dim_build_args.strict,
                        "Error on missing pair words instead of skipping");
    dim_build->add_option("--out", dim_build_args.out);
    dim_build->add_flag("--per-pair-normalize", dim_build_args.per_pair_normalize,
                        "Normalize each pair difference before averaging");
    dim_build->add_option("--format", dim_build_args.format, "json");
    attach_inert_seed_threads(dim_build);

    auto* dim_project =
        dim_cmd->add_subcommand("project", "Project words onto a dimension");
    dim_project->set_config("--config");
    EmbeddingArgs dim_project_emb;
    dim_project_emb.attach(dim_project);
    struct {
        std::string spec, format = "json", out;
        std::vector<std::string> words;
        bool all = false;
    } dim_project_args;
    dim_project->add_option("--spec", dim_project_args.spec)->required();
    dim_project->add_option("--words", dim_project_args.words,
                            "Words to project (comma or space separated)");
    dim_project->add_flag("--all", dim_project_args.all,
                          "Project the whole vocabulary");
    dim_project->add_option("--format", dim_project_args.format, "csv | json");
    dim_project->add_option("--out", dim_project_args.out);
    attach_inert_seed_threads(dim_project);

    auto* dim_angle =
        dim_cmd->add_subcommand("angle", "Angle between two dimensions");
    dim_angle->set_config("--config");
    EmbeddingArgs dim_angle_emb;
    dim_angle_emb.attach(dim_angle);
    struct {
        std::string spec_a, spec_b, out;
        std::string format = "json";
    } dim_angle_args;
    dim_angle->add_option("--spec-a", dim_angle_args.spec_a)->required();
    dim_angle->add_option("--spec-b", dim_angle_args.spec_b)->required();
    dim_angle->add_option("--out", dim_angle_args.out);
    dim_angle->add_option("--format", dim_angle_args.format, "json");
    attach_inert_seed_threads(dim_angle);

    auto* dim_variance = dim_cmd->add_subcommand(
        "variance", "Variance explained by a dimension");
    dim_variance->set_config("--config");
    EmbeddingArgs dim_variance_emb;
    dim_variance_emb.attach(dim_variance);
    struct {
        std::string spec, out;
        std::string format = "json";
        bool uncentered = false;
        bool top_component = false;
        unsigned threads = 1;
    } dim_variance_args;
    dim_variance->add_option("--spec", dim_variance_args.spec);
    dim_variance->add_flag("--uncentered", dim_variance_args.uncentered,
                           "Skip centering the rows");
    dim_variance->add_flag("--top-component", dim_variance_args.top_component,
                           "Also report the top principal component");
    dim_variance->add_option("--threads", dim_variance_args.threads);
    dim_variance->add_option("--out", dim_variance_args.out);
    dim_variance->add_option("--format", dim_variance_args.format, "json");
    dim_variance->add_option("--seed",
                             "RNG seed (no effect: power iteration uses a "
                             "fixed start vector)")
        ->expected(1);

    // ---- scan ------------------------------------------------------------
    auto* scan_cmd = app.add_subcommand(
        "scan", "Rank antonym-lexicon dimensions nearest a focal dimension");
    scan_cmd->set_config("--config");
    EmbeddingArgs scan_emb;
    scan_emb.attach(scan_cmd);
    struct {
        std::string spec, lexicon, format = "json", out;
        std::size_t top_n = 0;
        std::size_t top_k = 10;
    } scan_args;
    scan_cmd->add_option("--spec", scan_args.spec, "Focal dimension spec")
        ->required();
    scan_cmd->add_option("--lexicon", scan_args.lexicon, "Antonym TSV")
        ->required();
    scan_cmd->add_option("--top-n", scan_args.top_n,
                         "Keep pairs within the N most frequent words");
    scan_cmd->add_option("--top-k", scan_args.top_k, "Pairs to report");
    scan_cmd->add_option("--format", scan_args.format, "csv | json");
    scan_cmd->add_option("--out", scan_args.out);
    attach_inert_seed_threads(scan_cmd);

    // ---- ci ---------------------------------------------------------------
    auto* ci_cmd = app.add_subcommand(
        "ci", "Confidence intervals by retraining on resampled corpora");
    ci_cmd->require_subcommand(1);
    struct CiArgs {
        std::string corpus, plan, out, variant;
        bool weighted = false;
        std::uint64_t seed = 0;
        bool seed_set = false;
        unsigned threads = 0;
    };
    auto attach_ci = [](CLI::App* cmd, CiArgs& args) {
        cmd->set_config("--config");
        cmd->add_option("--corpus", args.corpus)->required();
        cmd->add_flag("--weighted", args.weighted);
        cmd->add_option("--plan", args.plan, "Resampling plan JSON")
            ->required();
        cmd->add_option("--seed", args.seed, "Override the plan's base_seed")
            ->each([&args](const std::string&) { args.seed_set = true; });
        cmd->add_option("--threads", args.threads,
                        "Override the plan's trainer workers");
        cmd->add_option("--out", args.out);
    };
    auto* ci_bootstrap =
        ci_cmd->add_subcommand("bootstrap", "Resample records with replacement");
    CiArgs ci_bootstrap_args;
    attach_ci(ci_bootstrap, ci_bootstrap_args);
    auto* ci_subsample = ci_cmd->add_subcommand(
        "subsample", "Partition records into disjoint subcorpora");
    CiArgs ci_subsample_args;
    attach_ci(ci_subsample, ci_subsample_args);
    ci_subsample->add_option("--variant", ci_subsample_args.variant,
                             "as_written | quantile_standard");

    // ---- validate ----------------------------------------------------------
    auto* validate_cmd = app.add_subcommand(
        "validate", "Survey correlation and pairwise classification");
    validate_cmd->set_config("--config");
    EmbeddingArgs validate_emb;
    validate_emb.attach(validate_cmd);
    struct {
        std::string responses, demographics, population;
        std::vector<std::string> scales;
        double alpha = 0.01;
        std::string format = "json", out;
    } validate_args;
    validate_cmd->add_option("--responses", validate_args.responses)
        ->required();
    validate_cmd->add_option("--demographics", validate_args.demographics)
        ->required();
    validate_cmd->add_option("--population", validate_args.population)
        ->required();
    validate_cmd
        ->add_option("--scale", validate_args.scales,
                     "scale=specfile[:+1|-1], repeatable")
        ->required();
    validate_cmd->add_option("--alpha", validate_args.alpha,
                             "Significance gate for pairwise ordering");
    validate_cmd->add_option("--format", validate_args.format, "csv | json");
    validate_cmd->add_option("--out", validate_args.out);
    attach_inert_seed_threads(validate_cmd);

    // ---- series -------------------------------------------------------------
    auto* series_cmd =
        app.add_subcommand("series", "Per-label diachronic series");
    series_cmd->require_subcommand(1);
    struct SeriesArgs {
        std::string set, plan, format = "json", out;
        std::uint64_t seed = 0;
        bool seed_set = false;
        unsigned threads = 0;
    };
    auto attach_series = [](CLI::App* cmd, SeriesArgs& args) {
        cmd->set_config("--config");
        cmd->add_option("--set", args.set, "Embedding-set manifest JSON")
            ->required();
        cmd->add_option("--plan", args.plan,
                        "Resampling plan JSON (labels with a corpus get CIs)");
        cmd->add_option("--seed", args.seed, "Override the plan's base_seed")
            ->each([&args](const std::string&) { args.seed_set = true; });
        cmd->add_option("--threads", args.threads,
                        "Override the plan's trainer workers");
        cmd->add_option("--format", args.format, "csv | json | svg");
        cmd->add_option("--out", args.out);
    };
    auto* series_project =
        series_cmd->add_subcommand("project", "Projection per label");
    SeriesArgs series_project_args;
    struct {
        std::string spec;
        std::vector<std::string> words;
    } series_project_extra;
    attach_series(series_project, series_project_args);
    series_project->add_option("--spec", series_project_extra.spec)
        ->required();
    series_project->add_option("--words", series_project_extra.words)
        ->required();

    auto* series_angle =
        series_cmd->add_subcommand("angle", "Dimension angle per label");
    SeriesArgs series_angle_args;
    struct {
        std::string spec_a, spec_b;
    } series_angle_extra;
    attach_series(series_angle, series_angle_args);
    series_angle->add_option("--spec-a", series_angle_extra.spec_a)
        ->required();
    series_angle->add_option("--spec-b", series_angle_extra.spec_b)
        ->required();

    // ---- compare -------------------------------------------------------------
    auto* compare_cmd = app.add_subcommand(
        "compare", "Paired projections across two embeddings");
    compare_cmd->set_config("--config");
    struct {
        std::string embedding_a, embedding_b;
        std::string label_a = "a", label_b = "b";
        std::string format_a = "word2vec-binary", format_b = "word2vec-binary";
        std::string corpus_a, corpus_b;
        bool weighted = false;
        std::string spec, plan, format = "json", out;
        std::vector<std::string> words;
        std::uint64_t seed = 0;
        bool seed_set = false;
        unsigned threads = 0;
    } compare_args;
    compare_cmd->add_option("--embedding-a", compare_args.embedding_a)
        ->required();
    compare_cmd->add_option("--embedding-b", compare_args.embedding_b)
        ->required();
    compare_cmd->add_option("--label-a", compare_args.label_a);
    compare_cmd->add_option("--label-b", compare_args.label_b);
    compare_cmd->add_option("--embedding-format-a", compare_args.format_a);
    compare_cmd->add_option("--embedding-format-b", compare_args.format_b);
    compare_cmd->add_option("--corpus-a", compare_args.corpus_a);
    compare_cmd->add_option("--corpus-b", compare_args.corpus_b);
    compare_cmd->add_flag("--weighted", compare_args.weighted);
    compare_cmd->add_option("--spec", compare_args.spec)->required();
    compare_cmd->add_option("--words", compare_args.words)->required();
    compare_cmd->add_option("--plan", compare_args.plan);
    compare_cmd->add_option("--seed", compare_args.seed)
        ->each([&](const std::string&) { compare_args.seed_set = true; });
    compare_cmd->add_option("--threads", compare_args.threads,
                            "Override the plan's trainer workers");
    compare_cmd->add_option("--format", compare_args.format,
                            "csv | json | svg");
    compare_cmd->add_option("--out", compare_args.out);

    // ---- names ------------------------------------------------------------
    auto* names_cmd = app.add_subcommand(
        "names", "Name-gender classification audit with a label lag");
    names_cmd->set_config("--config");
    struct {
        std::string set, names, spec, format = "json", out;
        std::size_t lag = 2;
    } names_args;
    names_cmd->add_option("--set", names_args.set)->required();
    names_cmd->add_option("--names", names_args.names,
                          "CSV label,name,recorded_sex")
        ->required();
    names_cmd->add_option("--spec", names_args.spec,
                          "Gender dimension spec JSON")
        ->required();
    names_cmd->add_option("--lag", names_args.lag,
                          "Labels between name cohort and text");
    names_cmd->add_option("--format", names_args.format, "csv | json | svg");
    names_cmd->add_option("--out", names_args.out);
    attach_inert_seed_threads(names_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            train_args.config.architecture =
                architecture_from_string(train_args.arch);
            train_args.config.dynamic_window = !train_args.no_dynamic_window;
            Corpus corpus =
                load_corpus_file(train_args.corpus, train_args.weighted);
            ModelState state = train(corpus, train_args.config);
            save_embedding(state.input, train_args.out,
                           format_from_string(train_args.format));
            if (!train_args.context_out.empty())
                save_embedding(context_vectors(state), train_args.context_out,
                               format_from_string(train_args.format));
            ordered_json j;
            j["vocabulary"] = state.input.size();
            j["dim"] = state.input.dim();
            j["records"] = corpus.record_count();
            j["epoch_loss"] = state.epoch_loss;
            j["out"] = train_args.out;
            j["config"] = {
                {"corpus", train_args.corpus},
                {"weighted", train_args.weighted},
                {"dim", train_args.config.dim},
                {"window", train_args.config.window},
                {"architecture", train_args.arch},
                {"negative", train_args.config.negative},
                {"epochs", train_args.config.epochs},
                {"min_count", train_args.config.min_count},
                {"subsample_t", train_args.config.subsample_t},
                {"initial_lr", train_args.config.initial_lr},
                {"seed", train_args.config.seed},
                {"workers", train_args.config.workers},
                {"dynamic_window", train_args.config.dynamic_window},
            };
            std::cout << j.dump(2) << "\n";
        } else if (*neighbors_cmd) {
            Embedding emb = neighbors_emb.load_normalized();
            std::unordered_set<std::string> exclude(
                neighbors_args.exclude.begin(), neighbors_args.exclude.end());
            exclude.insert(neighbors_args.word);
            auto hits = nearest_neighbors(emb, emb.vector(neighbors_args.word),
                                          neighbors_args.count, exclude);
            if (neighbors_args.format == "csv") {
                std::string csv = "token,cosine\n";
                char buf[64];
                for (const auto& h : hits) {
                    std::snprintf(buf, sizeof(buf), "%.17g", h.cosine);
                    csv += h.token + "," + buf + "\n";
                }
                emit(csv, neighbors_args.out);
            } else {
                auto j = ordered_json::array();
                for (const auto& h : hits)
                    j.push_back({{"token", h.token}, {"cosine", h.cosine}});
                emit(j.dump(2), neighbors_args.out);
            }
        } else if (*analogy_cmd) {
            Embedding emb = analogy_emb.load_normalized();
            std::string answer =
                analogy(emb, analogy_args.a, analogy_args.b, analogy_args.c);
            if (analogy_args.format == "json") {
                ordered_json j;
                j["answer"] = answer;
                emit(j.dump(2), analogy_args.out);
            } else {
                emit(answer + "\n", analogy_args.out);
            }
        } else if (*dim_build) {
            Embedding emb = dim_build_emb.load_normalized();
            DimensionSpec spec = load_dimension_spec(dim_build_args.spec);
            auto dim = build_dimension(
                emb, spec.pairs,
                dim_build_args.strict ? OnMissing::error : OnMissing::skip,
                spec.name,
                dim_build_args.per_pair_normalize
                    ? PairCombine::mean_normalized_differences
                    : PairCombine::mean_raw_differences);
            emit(dimension_json(dim).dump(2), dim_build_args.out);
        } else if (*dim_project) {
            Embedding emb = dim_project_emb.load_normalized();
            DimensionSpec spec = load_dimension_spec(dim_project_args.spec);
            auto dim =
                build_dimension(emb, spec.pairs, OnMissing::skip, spec.name);
            std::vector<std::string> words =
                split_words(dim_project_args.words);
            if (dim_project_args.all) {
                words.clear();
                for (std::size_t i = 0; i < emb.size(); ++i)
                    words.push_back(emb.token_at(i));
            }
            if (words.empty())
                throw std::runtime_error("no words given (use --words or --all)");
            if (dim_project_args.format == "csv") {
                std::string csv = "word,projection\n";
                char buf[64];
                for (const auto& w : words) {
                    std::snprintf(buf, sizeof(buf), "%.17g",
                                  project(emb, w, dim));
                    csv += w + "," + buf + "\n";
                }
                emit(csv, dim_project_args.out);
            } else {
                auto j = ordered_json::array();
                for (const auto& w : words)
                    j.push_back(
                        {{"word", w}, {"projection", project(emb, w, dim)}});
                emit(j.dump(2), dim_project_args.out);
            }
        } else if (*dim_angle) {
            Embedding emb = dim_angle_emb.load_normalized();
            DimensionSpec sa = load_dimension_spec(dim_angle_args.spec_a);
            DimensionSpec sb = load_dimension_spec(dim_angle_args.spec_b);
            auto da = build_dimension(emb, sa.pairs, OnMissing::skip, sa.name);
            auto db = build_dimension(emb, sb.pairs, OnMissing::skip, sb.name);
            auto angle = dimension_angle(da, db);
            ordered_json j;
            j["cosine"] = angle.cosine;
            j["degrees"] = angle.degrees;
            emit(j.dump(2), dim_angle_args.out);
        } else if (*dim_variance) {
            Embedding emb = dim_variance_emb.load_normalized();
            ordered_json j;
            if (!dim_variance_args.spec.empty()) {
                DimensionSpec spec =
                    load_dimension_spec(dim_variance_args.spec);
                auto dim = build_dimension(emb, spec.pairs, OnMissing::skip,
                                           spec.name);
                j["dimension"] = spec.name;
                j["variance_explained"] = variance_explained(
                    emb, dim, !dim_variance_args.uncentered);
            }
            if (dim_variance_args.top_component ||
                dim_variance_args.spec.empty())
                j["top_component_variance"] = top_component_variance(
                    emb, 1e-7, 10000, dim_variance_args.threads);
            emit(j.dump(2), dim_variance_args.out);
        } else if (*scan_cmd) {
            Embedding emb = scan_emb.load_normalized();
            DimensionSpec spec = load_dimension_spec(scan_args.spec);
            auto focal =
                build_dimension(emb, spec.pairs, OnMissing::skip, spec.name);
            AntonymLexicon lex = load_antonym_lexicon(scan_args.lexicon);
            if (scan_args.top_n > 0)
                lex = filter_lexicon(lex, emb, scan_args.top_n);
            auto result =
                scan_nearest_dimensions(emb, focal, lex, scan_args.top_k);
            if (scan_args.format == "csv") {
                std::string csv = "first,second,cosine\n";
                char buf[64];
                for (const auto& r : result.ranked) {
                    std::snprintf(buf, sizeof(buf), "%.17g", r.cosine);
                    csv += r.pair.first + "," + r.pair.second + "," + buf +
                           "\n";
                }
                emit(csv, scan_args.out);
            } else {
                ordered_json j;
                auto ranked = ordered_json::array();
                for (const auto& r : result.ranked)
                    ranked.push_back({{"first", r.pair.first},
                                      {"second", r.pair.second},
                                      {"cosine", r.cosine}});
                j["ranked"] = ranked;
                j["pairs_dropped"] = result.pairs_dropped;
                j["lexicon"] = lex.provenance;
                emit(j.dump(2), scan_args.out);
            }
        } else if (*ci_bootstrap || *ci_subsample) {
            CiArgs& args =
                *ci_bootstrap ? ci_bootstrap_args : ci_subsample_args;
            ResamplingPlan plan = ResamplingPlan::load(args.plan);
            plan.mode = *ci_bootstrap ? ResamplingMode::bootstrap
                                      : ResamplingMode::subsample;
            if (args.seed_set) plan.base_seed = args.seed;
            if (args.threads > 0) plan.trainer.workers = args.threads;
            if (!args.variant.empty()) {
                if (args.variant == "as_written")
                    plan.variant = SubsampleVariant::as_written;
                else if (args.variant == "quantile_standard")
                    plan.variant = SubsampleVariant::quantile_standard;
                else
                    throw std::runtime_error("unknown variant \"" +
                                             args.variant + "\"");
            }
            Corpus corpus = load_corpus_file(args.corpus, args.weighted);
            ConfidenceInterval ci = *ci_bootstrap
                                        ? bootstrap_ci(corpus, plan)
                                        : subsample_ci(corpus, plan);
            ordered_json j = ordered_json::parse(ci.to_json());
            j["plan"] = ordered_json::parse(plan.to_json());
            j["corpus"] = args.corpus;
            emit(j.dump(2), args.out);
        } else if (*validate_cmd) {
            Embedding emb = validate_emb.load_normalized();
            ValidationInputs inputs;
            inputs.responses_csv = validate_args.responses;
            inputs.demographics_csv = validate_args.demographics;
            inputs.population_csv = validate_args.population;
            inputs.alpha = validate_args.alpha;
            for (const auto& arg : validate_args.scales)
                inputs.scales.push_back(parse_scale_arg(arg));
            ValidationReport report = validation_report(inputs, emb);
            report.metadata["embedding"] = validate_emb.path;
            if (validate_args.format == "csv")
                emit(report.to_csv(), validate_args.out);
            else
                emit(report.to_json().dump(2), validate_args.out);
        } else if (*series_project || *series_angle) {
            SeriesArgs& args =
                *series_project ? series_project_args : series_angle_args;
            EmbeddingSet set = EmbeddingSet::load(args.set);
            std::optional<ResamplingPlan> plan;
            if (!args.plan.empty()) {
                plan = ResamplingPlan::load(args.plan);
                if (args.seed_set) plan->base_seed = args.seed;
                if (args.threads > 0) plan->trainer.workers = args.threads;
            }
            SeriesReport report;
            if (*series_project) {
                DimensionSpec spec =
                    load_dimension_spec(series_project_extra.spec);
                report = projection_series(
                    set, spec, split_words(series_project_extra.words), plan);
            } else {
                DimensionSpec sa =
                    load_dimension_spec(series_angle_extra.spec_a);
                DimensionSpec sb =
                    load_dimension_spec(series_angle_extra.spec_b);
                report = angle_series(set, sa, sb, plan);
            }
            emit_report(report, args.format, args.out);
        } else if (*compare_cmd) {
            EmbeddingSetEntry a{compare_args.label_a, compare_args.embedding_a,
                                format_from_string(compare_args.format_a),
                                {},
                                compare_args.weighted};
            EmbeddingSetEntry b{compare_args.label_b, compare_args.embedding_b,
                                format_from_string(compare_args.format_b),
                                {},
                                compare_args.weighted};
            if (!compare_args.corpus_a.empty())
                a.corpus_path = compare_args.corpus_a;
            if (!compare_args.corpus_b.empty())
                b.corpus_path = compare_args.corpus_b;
            std::optional<ResamplingPlan> plan;
            if (!compare_args.plan.empty()) {
                plan = ResamplingPlan::load(compare_args.plan);
                if (compare_args.seed_set) plan->base_seed = compare_args.seed;
                if (compare_args.threads > 0)
                    plan->trainer.workers = compare_args.threads;
            }
            DimensionSpec spec = load_dimension_spec(compare_args.spec);
            SeriesReport report = cross_corpus_compare(
                a, b, spec, split_words(compare_args.words), plan);
            emit_report(report, compare_args.format, compare_args.out);
        } else if (*names_cmd) {
            EmbeddingSet set = EmbeddingSet::load(names_args.set);
            auto names = load_names(names_args.names);
            DimensionSpec spec = load_dimension_spec(names_args.spec);
            SeriesReport report =
                name_gender_audit(set, names, names_args.lag, spec);
            emit_report(report, names_args.format, names_args.out);
        }
    } catch (const std::exception& e) {
        std::cerr << "wordgeom: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
