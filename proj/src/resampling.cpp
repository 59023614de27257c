#include "wordgeom/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wordgeom {

namespace {

using nlohmann::ordered_json;

ordered_json dimension_spec_to_json(const DimensionSpec& spec) {
    ordered_json j;
    j["name"] = spec.name;
    auto pairs = ordered_json::array();
    for (const auto& p : spec.pairs)
        pairs.push_back(ordered_json::array({p.first, p.second}));
    j["pairs"] = pairs;
    return j;
}

DimensionSpec dimension_spec_from_json(const nlohmann::json& j) {
    return parse_dimension_spec(j.dump());
}

CulturalDimension build_from_spec(const Embedding& emb,
                                  const DimensionSpec& spec) {
    // Resampled vocabularies can lose a pair word; that makes the statistic
    // undefined for the replicate, so missing words are fatal here and the
    // caller records the failure.
    return build_dimension(emb, spec.pairs, OnMissing::error, spec.name);
}

std::string mode_to_string(ResamplingMode mode) {
    return mode == ResamplingMode::bootstrap ? "bootstrap" : "subsample";
}

Corpus select_records(const Corpus& corpus,
                      const std::vector<std::size_t>& indices) {
    Corpus out;
    out.records.reserve(indices.size());
    for (auto i : indices) out.records.push_back(corpus.records[i]);
    return out;
}

void run_replicates(
    const ResamplingPlan& plan, const ReplicateStatistic& statistic,
    const std::function<Corpus(std::size_t rep)>& make_corpus,
    ConfidenceInterval& ci) {
    std::size_t failures = 0;
    for (std::size_t rep = 1; rep <= plan.replicates; ++rep) {
        ReplicateOutcome outcome;
        outcome.index = rep;
        std::uint64_t seed = plan.base_seed + rep;
        try {
            Corpus replicate = make_corpus(rep);
            outcome.value = statistic(replicate, seed);
        } catch (const std::exception& e) {
            outcome.error = e.what();
            ++failures;
        }
        ci.replicates.push_back(std::move(outcome));
    }
    if (failures * 10 > plan.replicates) {
        std::string detail;
        for (const auto& r : ci.replicates)
            if (!r.error.empty())
                detail += "\n  replicate " + std::to_string(r.index) + ": " +
                          r.error;
        throw std::runtime_error(
            "more than 10% of replicates failed (" + std::to_string(failures) +
            "/" + std::to_string(plan.replicates) + "):" + detail);
    }
}

std::vector<double> completed_values(const ConfidenceInterval& ci) {
    std::vector<double> values;
    for (const auto& r : ci.replicates)
        if (r.value) values.push_back(*r.value);
    return values;
}

}  // namespace

StatisticSpec StatisticSpec::parse(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    StatisticSpec spec;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "cosine") {
        spec.kind = Kind::cosine;
        spec.word_a = j.at("a").get<std::string>();
        spec.word_b = j.at("b").get<std::string>();
    } else if (kind == "projection") {
        spec.kind = Kind::projection;
        spec.word_a = j.at("word").get<std::string>();
        spec.dimension_a = dimension_spec_from_json(j.at("dimension"));
    } else if (kind == "dimension_angle") {
        spec.kind = Kind::dimension_angle;
        spec.dimension_a = dimension_spec_from_json(j.at("a"));
        spec.dimension_b = dimension_spec_from_json(j.at("b"));
    } else if (kind == "projection_difference") {
        spec.kind = Kind::projection_difference;
        spec.word_a = j.at("word_a").get<std::string>();
        spec.word_b = j.at("word_b").get<std::string>();
        spec.dimension_a = dimension_spec_from_json(j.at("dimension"));
    } else if (kind == "constant") {
        spec.kind = Kind::constant;
        spec.value = j.at("value").get<double>();
    } else {
        throw std::runtime_error("unknown statistic kind \"" + kind + "\"");
    }
    return spec;
}

std::string StatisticSpec::to_json() const {
    ordered_json j;
    switch (kind) {
        case Kind::cosine:
            j["kind"] = "cosine";
            j["a"] = word_a;
            j["b"] = word_b;
            break;
        case Kind::projection:
            j["kind"] = "projection";
            j["word"] = word_a;
            j["dimension"] = dimension_spec_to_json(dimension_a);
            break;
        case Kind::dimension_angle:
            j["kind"] = "dimension_angle";
            j["a"] = dimension_spec_to_json(dimension_a);
            j["b"] = dimension_spec_to_json(dimension_b);
            break;
        case Kind::projection_difference:
            j["kind"] = "projection_difference";
            j["word_a"] = word_a;
            j["word_b"] = word_b;
            j["dimension"] = dimension_spec_to_json(dimension_a);
            break;
        case Kind::constant:
            j["kind"] = "constant";
            j["value"] = value;
            break;
    }
    return j.dump();
}

double statistic_eval(const Embedding& emb, const StatisticSpec& spec) {
    switch (spec.kind) {
        case StatisticSpec::Kind::constant:
            return spec.value;
        case StatisticSpec::Kind::cosine:
            return cosine(emb.vector(spec.word_a), emb.vector(spec.word_b));
        default:
            break;
    }
    Embedding unit = emb.normalized() ? emb : normalize(emb);
    switch (spec.kind) {
        case StatisticSpec::Kind::projection:
            return project(unit, spec.word_a,
                           build_from_spec(unit, spec.dimension_a));
        case StatisticSpec::Kind::dimension_angle:
            return dimension_angle(build_from_spec(unit, spec.dimension_a),
                                   build_from_spec(unit, spec.dimension_b))
                .cosine;
        case StatisticSpec::Kind::projection_difference: {
            auto dim = build_from_spec(unit, spec.dimension_a);
            return project(unit, spec.word_a, dim) -
                   project(unit, spec.word_b, dim);
        }
        default:
            throw std::logic_error("unreachable");
    }
}

void ResamplingPlan::validate() const {
    trainer.validate();
    auto matches = [&](std::size_t reps, double lvl) {
        return replicates == reps && std::abs(level - lvl) < 1e-12;
    };
    if (!matches(20, 0.90) && !matches(40, 0.95) && !matches(200, 0.99))
        throw std::invalid_argument(
            "replicates/level must pair as 20/0.90, 40/0.95 or 200/0.99");
}

ResamplingPlan ResamplingPlan::parse(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    ResamplingPlan plan;
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "bootstrap")
        plan.mode = ResamplingMode::bootstrap;
    else if (mode == "subsample")
        plan.mode = ResamplingMode::subsample;
    else
        throw std::runtime_error("unknown mode \"" + mode + "\"");
    plan.replicates = j.at("replicates").get<std::size_t>();
    plan.level = j.at("level").get<double>();
    plan.base_seed = j.at("base_seed").get<std::uint64_t>();
    plan.statistic = StatisticSpec::parse(j.at("statistic").dump());
    if (j.contains("variant")) {
        std::string v = j["variant"].get<std::string>();
        if (v == "as_written")
            plan.variant = SubsampleVariant::as_written;
        else if (v == "quantile_standard")
            plan.variant = SubsampleVariant::quantile_standard;
        else
            throw std::runtime_error("unknown variant \"" + v + "\"");
    }
    if (j.contains("trainer")) {
        const auto& t = j["trainer"];
        auto& c = plan.trainer;
        c.dim = t.value("dim", c.dim);
        c.window = t.value("window", c.window);
        if (t.contains("architecture"))
            c.architecture =
                architecture_from_string(t["architecture"].get<std::string>());
        c.negative = t.value("negative", c.negative);
        c.epochs = t.value("epochs", c.epochs);
        c.min_count = t.value("min_count", c.min_count);
        c.subsample_t = t.value("subsample_t", c.subsample_t);
        c.initial_lr = t.value("initial_lr", c.initial_lr);
        c.workers = t.value("workers", c.workers);
        c.dynamic_window = t.value("dynamic_window", c.dynamic_window);
    }
    plan.validate();
    return plan;
}

ResamplingPlan ResamplingPlan::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ResamplingPlan::to_json() const {
    ordered_json j;
    j["mode"] = mode_to_string(mode);
    j["replicates"] = replicates;
    j["level"] = level;
    j["base_seed"] = base_seed;
    j["trainer"] = {
        {"dim", trainer.dim},
        {"window", trainer.window},
        {"architecture",
         trainer.architecture == Architecture::cbow ? "cbow" : "sgns"},
        {"negative", trainer.negative},
        {"epochs", trainer.epochs},
        {"min_count", trainer.min_count},
        {"subsample_t", trainer.subsample_t},
        {"initial_lr", trainer.initial_lr},
        {"workers", trainer.workers},
        {"dynamic_window", trainer.dynamic_window},
    };
    j["statistic"] = nlohmann::json::parse(statistic.to_json());
    if (mode == ResamplingMode::subsample)
        j["variant"] = variant == SubsampleVariant::as_written
                           ? "as_written"
                           : "quantile_standard";
    return j.dump(2);
}

std::string ConfidenceInterval::to_json() const {
    ordered_json j;
    j["estimate"] = estimate;
    j["lower"] = lower;
    j["upper"] = upper;
    j["mode"] = mode_to_string(mode);
    j["level"] = level;
    auto values = ordered_json::array();
    auto failures = ordered_json::array();
    for (const auto& r : replicates) {
        if (r.value)
            values.push_back(*r.value);
        else
            failures.push_back(
                {{"replicate", r.index}, {"error", r.error}});
    }
    j["replicate_values"] = values;
    j["failures"] = failures;
    return j.dump(2);
}

std::vector<std::size_t> bootstrap_indices(std::size_t record_count,
                                           std::uint64_t seed) {
    if (record_count == 0) throw std::invalid_argument("empty corpus");
    SplitMix64 rng(seed);
    std::vector<std::size_t> indices(record_count);
    for (auto& i : indices)
        i = static_cast<std::size_t>(rng.next_below(record_count));
    return indices;
}

std::vector<std::vector<std::size_t>> subsample_partition(
    std::size_t record_count, std::size_t groups, std::uint64_t seed) {
    if (groups == 0 || record_count < groups)
        throw std::invalid_argument(
            "need at least one record per subsample group");
    std::vector<std::size_t> order(record_count);
    for (std::size_t i = 0; i < record_count; ++i) order[i] = i;
    SplitMix64 rng(seed);
    for (std::size_t i = record_count - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<std::vector<std::size_t>> parts(groups);
    std::size_t base = record_count / groups;
    std::size_t extra = record_count % groups;
    std::size_t at = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        std::size_t take = base + (g < extra ? 1 : 0);
        parts[g].assign(order.begin() + at, order.begin() + at + take);
        at += take;
    }

    std::size_t min_size = parts.back().size(), max_size = parts[0].size();
    if (max_size - min_size > 1 || at != record_count)
        throw std::logic_error("subsample partition sizes differ by > 1");
    return parts;
}

std::pair<double, double> bootstrap_interval(std::vector<double> values) {
    if (values.size() < 3)
        throw std::invalid_argument(
            "too few completed replicates for order-statistic bounds");
    std::sort(values.begin(), values.end());
    return {values[1], values[values.size() - 2]};
}

std::pair<double, double> subsample_interval(
    double full_statistic, std::uint64_t total_records,
    const std::vector<std::pair<std::uint64_t, double>>& subsamples,
    SubsampleVariant variant) {
    if (subsamples.size() < 3)
        throw std::invalid_argument(
            "too few completed subsamples for order-statistic bounds");
    std::vector<double> errors;
    errors.reserve(subsamples.size());
    for (const auto& [tau_k, s_k] : subsamples)
        errors.push_back(std::sqrt(static_cast<double>(tau_k)) *
                         (s_k - full_statistic));
    std::sort(errors.begin(), errors.end());
    double b_low = errors[1];
    double b_high = errors[errors.size() - 2];
    double root_tau = std::sqrt(static_cast<double>(total_records));

    double lower = full_statistic - b_high / root_tau;
    double upper = variant == SubsampleVariant::as_written
                       ? full_statistic + b_low / root_tau
                       : full_statistic - b_low / root_tau;
    if (lower > upper) std::swap(lower, upper);
    return {lower, upper};
}

ReplicateStatistic trained_statistic(const ResamplingPlan& plan) {
    StatisticSpec spec = plan.statistic;
    TrainingConfig config = plan.trainer;
    return [spec, config](const Corpus& corpus, std::uint64_t seed) {
        if (spec.kind == StatisticSpec::Kind::constant) return spec.value;
        TrainingConfig c = config;
        c.seed = seed;
        ModelState state = train(corpus, c);
        // normalized here so the single- and multi-statistic paths agree
        // bit for bit
        return statistic_eval(normalize(std::move(state.input)), spec);
    };
}

ConfidenceInterval bootstrap_ci(const Corpus& corpus,
                                const ResamplingPlan& plan,
                                const ReplicateStatistic& statistic) {
    plan.validate();
    if (plan.mode != ResamplingMode::bootstrap)
        throw std::invalid_argument("plan mode is not bootstrap");
    if (corpus.records.empty()) throw std::invalid_argument("empty corpus");
    ReplicateStatistic fn = statistic ? statistic : trained_statistic(plan);

    ConfidenceInterval ci;
    ci.mode = ResamplingMode::bootstrap;
    ci.level = plan.level;
    ci.estimate = fn(corpus, plan.base_seed);

    std::size_t tau = corpus.record_count();
    run_replicates(plan, fn,
                   [&](std::size_t rep) {
                       return select_records(
                           corpus, bootstrap_indices(tau, plan.base_seed + rep));
                   },
                   ci);

    auto [lower, upper] = bootstrap_interval(completed_values(ci));
    ci.lower = lower;
    ci.upper = upper;
    return ci;
}

ConfidenceInterval subsample_ci(const Corpus& corpus,
                                const ResamplingPlan& plan,
                                const ReplicateStatistic& statistic) {
    plan.validate();
    if (plan.mode != ResamplingMode::subsample)
        throw std::invalid_argument("plan mode is not subsample");
    if (corpus.record_count() < plan.replicates)
        throw std::invalid_argument(
            "corpus has fewer records than subsample groups");
    ReplicateStatistic fn = statistic ? statistic : trained_statistic(plan);

    ConfidenceInterval ci;
    ci.mode = ResamplingMode::subsample;
    ci.level = plan.level;
    ci.estimate = fn(corpus, plan.base_seed);

    auto parts = subsample_partition(corpus.record_count(), plan.replicates,
                                     plan.base_seed);
    run_replicates(plan, fn,
                   [&](std::size_t rep) {
                       return select_records(corpus, parts[rep - 1]);
                   },
                   ci);

    std::vector<std::pair<std::uint64_t, double>> completed;
    for (const auto& r : ci.replicates)
        if (r.value)
            completed.emplace_back(parts[r.index - 1].size(), *r.value);
    auto [lower, upper] = subsample_interval(
        ci.estimate, corpus.record_count(), completed, plan.variant);
    ci.lower = lower;
    ci.upper = upper;
    return ci;
}

std::vector<MultiCiOutcome> resample_ci_multi(
    const Corpus& corpus, const ResamplingPlan& plan,
    const std::vector<StatisticSpec>& statistics) {
    plan.validate();
    if (statistics.empty()) return {};
    if (corpus.records.empty()) throw std::invalid_argument("empty corpus");
    const bool is_bootstrap = plan.mode == ResamplingMode::bootstrap;
    const std::size_t tau = corpus.record_count();
    if (!is_bootstrap && tau < plan.replicates)
        throw std::invalid_argument(
            "corpus has fewer records than subsample groups");

    // Normalized once here so the per-statistic evaluations don't each
    // copy the matrix.
    auto train_at = [&](const Corpus& c, std::uint64_t seed) {
        TrainingConfig config = plan.trainer;
        config.seed = seed;
        return normalize(train(c, config).input);
    };

    std::vector<MultiCiOutcome> out(statistics.size());
    std::vector<ConfidenceInterval> cis(statistics.size());
    std::vector<bool> estimate_ok(statistics.size(), false);

    Embedding full = train_at(corpus, plan.base_seed);
    for (std::size_t s = 0; s < statistics.size(); ++s) {
        cis[s].mode = plan.mode;
        cis[s].level = plan.level;
        try {
            cis[s].estimate = statistic_eval(full, statistics[s]);
            estimate_ok[s] = true;
        } catch (const std::exception& e) {
            out[s].error = std::string("full-sample statistic failed: ") +
                           e.what();
        }
    }

    std::vector<std::vector<std::size_t>> parts;
    if (!is_bootstrap)
        parts = subsample_partition(tau, plan.replicates, plan.base_seed);

    std::vector<std::size_t> part_sizes(plan.replicates, 0);
    for (std::size_t rep = 1; rep <= plan.replicates; ++rep) {
        std::uint64_t seed = plan.base_seed + rep;
        Corpus replicate =
            is_bootstrap
                ? select_records(corpus, bootstrap_indices(tau, seed))
                : select_records(corpus, parts[rep - 1]);
        part_sizes[rep - 1] = replicate.record_count();

        std::optional<Embedding> emb;
        std::string train_error;
        try {
            emb = train_at(replicate, seed);
        } catch (const std::exception& e) {
            train_error = e.what();
        }
        for (std::size_t s = 0; s < statistics.size(); ++s) {
            if (!estimate_ok[s]) continue;
            ReplicateOutcome outcome;
            outcome.index = rep;
            if (emb) {
                try {
                    outcome.value = statistic_eval(*emb, statistics[s]);
                } catch (const std::exception& e) {
                    outcome.error = e.what();
                }
            } else {
                outcome.error = train_error;
            }
            cis[s].replicates.push_back(std::move(outcome));
        }
    }

    for (std::size_t s = 0; s < statistics.size(); ++s) {
        if (!estimate_ok[s]) continue;
        std::size_t failures = 0;
        for (const auto& r : cis[s].replicates)
            if (!r.value) ++failures;
        if (failures * 10 > plan.replicates) {
            out[s].error = std::to_string(failures) + "/" +
                           std::to_string(plan.replicates) +
                           " replicates failed";
            continue;
        }
        try {
            if (is_bootstrap) {
                auto [lower, upper] =
                    bootstrap_interval(completed_values(cis[s]));
                cis[s].lower = lower;
                cis[s].upper = upper;
            } else {
                std::vector<std::pair<std::uint64_t, double>> completed;
                for (const auto& r : cis[s].replicates)
                    if (r.value)
                        completed.emplace_back(part_sizes[r.index - 1],
                                               *r.value);
                auto [lower, upper] = subsample_interval(
                    cis[s].estimate, tau, completed, plan.variant);
                cis[s].lower = lower;
                cis[s].upper = upper;
            }
            out[s].ci = std::move(cis[s]);
        } catch (const std::exception& e) {
            out[s].error = e.what();
        }
    }
    return out;
}

}  // namespace wordgeom
