#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wordgeom/dimension.hpp"
#include "wordgeom/trainer.hpp"

namespace wordgeom {

enum class ResamplingMode { bootstrap, subsample };
enum class SubsampleVariant { as_written, quantile_standard };

// Statistic vocabulary evaluated on a (re)trained embedding.
struct StatisticSpec {
    enum class Kind {
        cosine,                 // cosine(word a, word b)
        projection,             // projection of `word` onto `dimension`
        dimension_angle,        // cosine between two induced dimensions
        projection_difference,  // projection(word_a) - projection(word_b)
        constant,               // fixed value; diagnostics and stubs
    };
    Kind kind = Kind::constant;
    std::string word_a, word_b;
    DimensionSpec dimension_a, dimension_b;
    double value = 0.0;

    static StatisticSpec parse(const std::string& json_text);
    std::string to_json() const;
};

double statistic_eval(const Embedding& emb, const StatisticSpec& spec);

struct ResamplingPlan {
    ResamplingMode mode = ResamplingMode::bootstrap;
    std::size_t replicates = 20;
    double level = 0.90;
    std::uint64_t base_seed = 1;
    TrainingConfig trainer;
    StatisticSpec statistic;
    SubsampleVariant variant = SubsampleVariant::as_written;

    // Enforces the replicate-count/level pairing: 20 for 90%, 40 for 95%,
    // 200 for 99%.
    void validate() const;

    static ResamplingPlan parse(const std::string& json_text);
    static ResamplingPlan load(const std::string& path);
    std::string to_json() const;
};

struct ReplicateOutcome {
    std::size_t index = 0;  // 1-based
    std::optional<double> value;
    std::string error;  // set when the statistic was undefined
};

struct ConfidenceInterval {
    double estimate = 0.0;  // full-sample statistic
    double lower = 0.0;
    double upper = 0.0;
    ResamplingMode mode = ResamplingMode::bootstrap;
    double level = 0.90;
    std::vector<ReplicateOutcome> replicates;

    std::string to_json() const;
};

// Seeded draw rules, exposed so an independent reimplementation can verify
// them. Replicate k (1-based) uses seed base_seed + k for both the draw and
// the trainer; the full-sample pass uses base_seed itself.
std::vector<std::size_t> bootstrap_indices(std::size_t record_count,
                                           std::uint64_t seed);
std::vector<std::vector<std::size_t>> subsample_partition(
    std::size_t record_count, std::size_t groups, std::uint64_t seed);

// Order-statistic bounds over completed replicate values: 2nd smallest and
// (m-1)th smallest, per the 20/40/200-replicate conventions.
std::pair<double, double> bootstrap_interval(std::vector<double> values);

// B_k = sqrt(tau_k) * (s_k - s_bar). The as_written variant reproduces the
// printed bounds [s - B_(m-1)/sqrt(tau), s + B_(2)/sqrt(tau)] verbatim;
// quantile_standard uses [s - B_(m-1)/sqrt(tau), s - B_(2)/sqrt(tau)].
// Either way bounds are post-sorted so lower <= upper.
std::pair<double, double> subsample_interval(
    double full_statistic, std::uint64_t total_records,
    const std::vector<std::pair<std::uint64_t, double>>& subsamples,
    SubsampleVariant variant);

// Evaluates the plan's statistic on one (re)sampled corpus; the default
// trains an embedding with the plan's trainer config at the given seed.
// Tests substitute stubs.
using ReplicateStatistic =
    std::function<double(const Corpus& corpus, std::uint64_t seed)>;

ReplicateStatistic trained_statistic(const ResamplingPlan& plan);

ConfidenceInterval bootstrap_ci(const Corpus& corpus,
                                const ResamplingPlan& plan,
                                const ReplicateStatistic& statistic = {});
ConfidenceInterval subsample_ci(const Corpus& corpus,
                                const ResamplingPlan& plan,
                                const ReplicateStatistic& statistic = {});

struct MultiCiOutcome {
    std::optional<ConfidenceInterval> ci;
    std::string error;  // set when the statistic could not be bounded
};

// Batch variant for series over many words: trains one embedding per
// replicate and evaluates every statistic on it, so the training cost is
// paid once rather than once per statistic.
std::vector<MultiCiOutcome> resample_ci_multi(
    const Corpus& corpus, const ResamplingPlan& plan,
    const std::vector<StatisticSpec>& statistics);

}  // namespace wordgeom
