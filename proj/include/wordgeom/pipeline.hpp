#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordgeom/resampling.hpp"
#include "wordgeom/validation.hpp"

namespace wordgeom {

struct EmbeddingSetEntry {
    std::string label;
    std::string embedding_path;
    EmbeddingFormat format = EmbeddingFormat::word2vec_binary;
    std::optional<std::string> corpus_path;  // enables CIs
    bool weighted_corpus = false;
};

// Ordered labels (decades, countries) mapped to embedding files.
struct EmbeddingSet {
    std::vector<EmbeddingSetEntry> entries;

    static EmbeddingSet parse(const std::string& json_text);
    static EmbeddingSet load(const std::string& path);
};

struct ReportCell {
    std::optional<double> value;
    std::optional<double> lower;
    std::optional<double> upper;
    std::string reason;  // why the value is null
};

// One table of per-(row, label) values, with enough metadata to reproduce
// the run. Serializes losslessly to JSON and long-format CSV, and renders
// to SVG as a line chart (series) or labeled scatter (compare).
struct SeriesReport {
    std::string kind;  // projection_series | angle_series | compare | names
    std::vector<std::string> labels;
    std::vector<std::string> rows;
    std::vector<std::vector<ReportCell>> cells;  // [row][label]
    nlohmann::ordered_json metadata;

    nlohmann::ordered_json to_json() const;
    static SeriesReport from_json(const nlohmann::ordered_json& j);
};

enum class RenderFormat { csv, json, svg };

RenderFormat render_format_from_string(const std::string& name);

void render(const SeriesReport& report, RenderFormat format,
            const std::string& out_path);
std::string render_to_string(const SeriesReport& report, RenderFormat format);

// Projection of each word onto the dimension, per labeled embedding.
// Missing words are null-with-reason; a supplied plan plus per-label corpus
// paths attach resampled confidence intervals.
SeriesReport projection_series(const EmbeddingSet& set,
                               const DimensionSpec& dim_spec,
                               const std::vector<std::string>& words,
                               const std::optional<ResamplingPlan>& plan = {});

// Cosine between two induced dimensions, per labeled embedding.
SeriesReport angle_series(const EmbeddingSet& set,
                          const DimensionSpec& dim_spec_a,
                          const DimensionSpec& dim_spec_b,
                          const std::optional<ResamplingPlan>& plan = {});

// Paired projections of the words in two embeddings, as scatter data.
SeriesReport cross_corpus_compare(const EmbeddingSetEntry& a,
                                  const EmbeddingSetEntry& b,
                                  const DimensionSpec& dim_spec,
                                  const std::vector<std::string>& words,
                                  const std::optional<ResamplingPlan>& plan = {});

struct NameRecord {
    std::string label;  // cohort label, matching the embedding set
    std::string name;
    bool male = false;
};

// CSV: label,name,recorded_sex (m/male or f/female, case-insensitive).
std::vector<NameRecord> load_names(const std::string& path);

// Projects each cohort's names on the gender dimension of the embedding
// `lag_labels` positions later; a name is classified masculine when its
// projection is positive, and a zero projection counts as misclassified.
SeriesReport name_gender_audit(const EmbeddingSet& set,
                               const std::vector<NameRecord>& names,
                               std::size_t lag_labels,
                               const DimensionSpec& gender_spec);

struct DomainAccuracy {
    std::string domain;
    PairwiseResult result;
};

struct ScaleValidation {
    std::string scale;
    int orientation = +1;
    CorrelationResult correlation;
    std::vector<DomainAccuracy> domains;
    std::size_t total_significant = 0;
    std::size_t total_correct = 0;
    std::optional<double> overall_accuracy;
};

struct ValidationReport {
    std::vector<ScaleValidation> scales;
    std::vector<std::string> warnings;
    nlohmann::ordered_json metadata;

    nlohmann::ordered_json to_json() const;
    std::string to_csv() const;
};

struct ValidationInputs {
    std::string responses_csv;
    std::string demographics_csv;
    std::string population_csv;
    // scale name -> (dimension spec, orientation toward the first pole)
    std::vector<std::tuple<std::string, DimensionSpec, int>> scales;
    double alpha = 0.01;
};

ValidationReport validation_report(const ValidationInputs& inputs,
                                   const Embedding& emb);

}  // namespace wordgeom
