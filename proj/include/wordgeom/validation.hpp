#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wordgeom/dimension.hpp"
#include "wordgeom/embedding.hpp"

namespace wordgeom {

// Demographic cell used for post-stratification: sex x education x race.
struct StratumCell {
    std::string sex;
    std::string education;
    std::string race;

    auto operator<=>(const StratumCell&) const = default;
};

struct SurveyResponse {
    std::string respondent_id;
    std::string item;
    std::string scale;   // gender / class / race
    double rating = 0.0; // 0..100
};

struct SurveyDataset {
    std::vector<SurveyResponse> responses;
    std::map<std::string, StratumCell> demographics;  // respondent -> cell
    std::map<std::string, std::string> item_domain;   // item -> domain tag

    std::vector<std::string> scales() const;
    std::vector<std::string> items_in_domain(const std::string& domain) const;
};

// responses.csv: respondent_id,item,scale,rating with an optional domain
// column; demographics.csv: respondent_id,sex,education,race.
SurveyDataset load_survey(const std::string& responses_csv,
                          const std::string& demographics_csv);

// population.csv: sex,education,race,share. Shares must sum to 1.
std::map<StratumCell, double> load_population(const std::string& path);

struct StratumWeights {
    std::map<StratumCell, double> cell_weight;
    std::map<std::string, double> respondent_weight;
    std::vector<std::string> warnings;  // unreachable population cells
};

// weight(cell) = population share / sample share.
StratumWeights poststratify(const SurveyDataset& survey,
                            const std::map<StratumCell, double>& population);

struct ItemMeans {
    // (item, scale) -> weighted mean rating
    std::map<std::pair<std::string, std::string>, double> means;
    std::vector<std::string> omitted;  // item/scale combos with no responses
};

ItemMeans weighted_item_means(const SurveyDataset& survey,
                              const StratumWeights& weights);

struct CorrelationResult {
    double r = 0.0;
    std::size_t n_items = 0;
    std::vector<std::string> missing_items;  // not in the embedding
};

// Pearson correlation between per-item survey means and projections onto
// the dimension, over the items present in the vocabulary.
CorrelationResult correlate_with_embedding(
    const std::map<std::string, double>& item_means, const Embedding& emb,
    const CulturalDimension& dim);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;  // two-sided
};

// Welch's unequal-variance t-test with Satterthwaite degrees of freedom.
// `weights`, when given, are frequency weights applied per observation.
WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b,
                         const std::vector<double>& a_weights = {},
                         const std::vector<double>& b_weights = {});

struct PairDetail {
    std::string item_a;
    std::string item_b;
    double p = 1.0;
    bool significant = false;
    bool correct = false;
    std::string note;
};

struct PairwiseResult {
    std::optional<double> accuracy;  // empty when no significant pairs
    std::size_t n_significant = 0;
    std::size_t n_correct = 0;
    std::vector<PairDetail> pairs;
    std::vector<std::string> out_of_vocabulary;
};

// For every unordered item pair in the domain with a Welch p < alpha
// difference on the survey scale (unweighted ratings), scores the pair
// correct when the weighted survey means and the projections order the two
// items the same way. `orientation` maps the survey scale onto the
// dimension's first-pole-positive convention (+1 when a high rating means
// the first pole).
PairwiseResult pairwise_classification(const SurveyDataset& survey,
                                       const StratumWeights& weights,
                                       const Embedding& emb,
                                       const CulturalDimension& dim,
                                       const std::string& scale,
                                       const std::string& domain,
                                       double alpha = 0.01,
                                       int orientation = +1);

}  // namespace wordgeom
