#include "wordgeom/validation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "wordgeom/csv.hpp"

namespace wordgeom {

namespace {

double parse_rating(const std::string& text, std::uint64_t line_no) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw parse_error("bad rating \"" + text + "\"", line_no, false);
    }
    if (used != text.size() || !std::isfinite(value))
        throw parse_error("bad rating \"" + text + "\"", line_no, false);
    if (value < 0.0 || value > 100.0)
        throw parse_error("rating " + text + " outside [0,100]", line_no,
                          false);
    return value;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // sample variance
    double n = 0.0;         // observations (or sum of weights)
};

Moments moments(const std::vector<double>& x, const std::vector<double>& w) {
    Moments m;
    if (w.empty()) {
        m.n = static_cast<double>(x.size());
        for (double v : x) m.mean += v;
        m.mean /= m.n;
        for (double v : x) m.variance += (v - m.mean) * (v - m.mean);
        m.variance /= (m.n - 1.0);
        return m;
    }
    if (w.size() != x.size())
        throw std::invalid_argument("weights do not match sample size");
    double wsum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] <= 0.0) throw std::invalid_argument("weights must be > 0");
        wsum += w[i];
        m.mean += w[i] * x[i];
    }
    m.mean /= wsum;
    for (std::size_t i = 0; i < x.size(); ++i)
        m.variance += w[i] * (x[i] - m.mean) * (x[i] - m.mean);
    if (wsum <= 1.0)
        throw std::invalid_argument("total weight must exceed 1 for variance");
    m.variance /= (wsum - 1.0);
    m.n = wsum;
    return m;
}

}  // namespace

std::vector<std::string> SurveyDataset::scales() const {
    std::set<std::string> seen;
    for (const auto& r : responses) seen.insert(r.scale);
    return {seen.begin(), seen.end()};
}

std::vector<std::string> SurveyDataset::items_in_domain(
    const std::string& domain) const {
    std::set<std::string> seen;
    for (const auto& [item, dom] : item_domain)
        if (dom == domain) seen.insert(item);
    return {seen.begin(), seen.end()};
}

SurveyDataset load_survey(const std::string& responses_csv,
                          const std::string& demographics_csv) {
    SurveyDataset survey;

    CsvTable demo = read_csv(demographics_csv);
    std::size_t d_id = demo.column("respondent_id");
    std::size_t d_sex = demo.column("sex");
    std::size_t d_edu = demo.column("education");
    std::size_t d_race = demo.column("race");
    for (const auto& row : demo.rows)
        survey.demographics[row[d_id]] =
            StratumCell{row[d_sex], row[d_edu], row[d_race]};

    CsvTable resp = read_csv(responses_csv);
    std::size_t r_id = resp.column("respondent_id");
    std::size_t r_item = resp.column("item");
    std::size_t r_scale = resp.column("scale");
    std::size_t r_rating = resp.column("rating");
    bool has_domain = resp.has_column("domain");
    std::size_t r_domain = has_domain ? resp.column("domain") : 0;

    std::uint64_t line_no = 1;  // header
    for (const auto& row : resp.rows) {
        ++line_no;
        SurveyResponse r;
        r.respondent_id = row[r_id];
        r.item = row[r_item];
        r.scale = row[r_scale];
        r.rating = parse_rating(row[r_rating], line_no);
        if (!survey.demographics.count(r.respondent_id))
            throw std::runtime_error("respondent \"" + r.respondent_id +
                                     "\" has no demographics row");
        std::string domain = has_domain ? row[r_domain] : "all";
        auto [it, inserted] = survey.item_domain.emplace(r.item, domain);
        if (!inserted && it->second != domain)
            throw std::runtime_error("item \"" + r.item +
                                     "\" appears in two domains");
        survey.responses.push_back(std::move(r));
    }
    return survey;
}

std::map<StratumCell, double> load_population(const std::string& path) {
    CsvTable table = read_csv(path);
    std::size_t c_sex = table.column("sex");
    std::size_t c_edu = table.column("education");
    std::size_t c_race = table.column("race");
    std::size_t c_share = table.column("share");

    std::map<StratumCell, double> population;
    double total = 0.0;
    std::uint64_t line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        StratumCell cell{row[c_sex], row[c_edu], row[c_race]};
        double share = 0.0;
        try {
            share = std::stod(row[c_share]);
        } catch (const std::exception&) {
            throw parse_error("bad share \"" + row[c_share] + "\"", line_no,
                              false);
        }
        if (share < 0.0)
            throw parse_error("negative population share", line_no, false);
        if (!population.emplace(cell, share).second)
            throw parse_error("duplicate population cell", line_no, false);
        total += share;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::runtime_error("population shares sum to " +
                                 std::to_string(total) + ", expected 1");
    return population;
}

StratumWeights poststratify(const SurveyDataset& survey,
                            const std::map<StratumCell, double>& population) {
    double share_sum = 0.0;
    for (const auto& [cell, share] : population) share_sum += share;
    if (std::abs(share_sum - 1.0) > 1e-9)
        throw std::invalid_argument("population shares sum to " +
                                    std::to_string(share_sum) +
                                    ", expected 1");

    // Sample shares over respondents who actually responded.
    std::set<std::string> responding;
    for (const auto& r : survey.responses) responding.insert(r.respondent_id);
    if (responding.empty()) throw std::runtime_error("survey has no responses");

    std::map<StratumCell, std::size_t> cell_counts;
    for (const auto& id : responding) {
        auto it = survey.demographics.find(id);
        if (it == survey.demographics.end())
            throw std::runtime_error("respondent \"" + id +
                                     "\" has no demographics row");
        ++cell_counts[it->second];
    }

    StratumWeights weights;
    double n = static_cast<double>(responding.size());
    for (const auto& [cell, count] : cell_counts) {
        auto pop = population.find(cell);
        if (pop == population.end() || pop->second == 0.0)
            throw std::runtime_error(
                "sample cell (" + cell.sex + ", " + cell.education + ", " +
                cell.race + ") has no population share");
        weights.cell_weight[cell] =
            pop->second / (static_cast<double>(count) / n);
    }
    for (const auto& [cell, share] : population) {
        if (share > 0.0 && !cell_counts.count(cell))
            weights.warnings.push_back(
                "population cell (" + cell.sex + ", " + cell.education + ", " +
                cell.race + ") has no sample respondents");
    }
    for (const auto& id : responding)
        weights.respondent_weight[id] =
            weights.cell_weight.at(survey.demographics.at(id));
    return weights;
}

ItemMeans weighted_item_means(const SurveyDataset& survey,
                              const StratumWeights& weights) {
    std::map<std::pair<std::string, std::string>, std::pair<double, double>>
        acc;  // (item, scale) -> (sum w*x, sum w)
    for (const auto& r : survey.responses) {
        auto it = weights.respondent_weight.find(r.respondent_id);
        if (it == weights.respondent_weight.end())
            throw std::runtime_error("no weight for respondent \"" +
                                     r.respondent_id + "\"");
        auto& slot = acc[{r.item, r.scale}];
        slot.first += it->second * r.rating;
        slot.second += it->second;
    }

    ItemMeans out;
    for (const auto& [key, sums] : acc)
        out.means[key] = sums.first / sums.second;

    // An item rated on one scale but never on another is worth reporting.
    std::set<std::string> scales;
    for (const auto& r : survey.responses) scales.insert(r.scale);
    for (const auto& [item, domain] : survey.item_domain)
        for (const auto& scale : scales)
            if (!out.means.count({item, scale}))
                out.omitted.push_back(item + "/" + scale);
    return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson needs two equal samples, n >= 2");
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::domain_error("pearson undefined: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult correlate_with_embedding(
    const std::map<std::string, double>& item_means, const Embedding& emb,
    const CulturalDimension& dim) {
    std::vector<double> ratings, projections;
    CorrelationResult result;
    for (const auto& [item, mean] : item_means) {
        auto idx = emb.index_of(item);
        if (!idx) {
            result.missing_items.push_back(item);
            continue;
        }
        ratings.push_back(mean);
        projections.push_back(cosine(emb.row(*idx), dim.vector));
    }
    if (ratings.size() < 3)
        throw std::runtime_error(
            "fewer than 3 survey items found in the vocabulary");
    result.n_items = ratings.size();
    result.r = pearson(ratings, projections);
    return result;
}

WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b,
                         const std::vector<double>& a_weights,
                         const std::vector<double>& b_weights) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t_test needs >= 2 observations");
    Moments ma = moments(a, a_weights);
    Moments mb = moments(b, b_weights);
    if (ma.variance <= 0.0 || mb.variance <= 0.0)
        throw std::domain_error("welch_t_test undefined: zero variance");

    double va = ma.variance / ma.n;
    double vb = mb.variance / mb.n;
    WelchResult result;
    result.t = (ma.mean - mb.mean) / std::sqrt(va + vb);
    result.df = (va + vb) * (va + vb) /
                (va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0));
    boost::math::students_t dist(result.df);
    result.p = 2.0 * boost::math::cdf(dist, -std::abs(result.t));
    return result;
}

PairwiseResult pairwise_classification(const SurveyDataset& survey,
                                       const StratumWeights& weights,
                                       const Embedding& emb,
                                       const CulturalDimension& dim,
                                       const std::string& scale,
                                       const std::string& domain,
                                       double alpha, int orientation) {
    if (orientation != 1 && orientation != -1)
        throw std::invalid_argument("orientation must be +1 or -1");

    // Raw ratings per item for the significance gate; weighted means for
    // the ordering, mirroring the survey methodology.
    std::map<std::string, std::vector<double>> ratings;
    for (const auto& r : survey.responses) {
        if (r.scale != scale) continue;
        auto dom = survey.item_domain.find(r.item);
        if (dom == survey.item_domain.end() || dom->second != domain) continue;
        ratings[r.item].push_back(r.rating);
    }

    ItemMeans means = weighted_item_means(survey, weights);

    PairwiseResult result;
    std::vector<std::string> items;
    std::map<std::string, double> projection;
    for (const auto& [item, values] : ratings) {
        auto idx = emb.index_of(item);
        if (!idx) {
            result.out_of_vocabulary.push_back(item);
            continue;
        }
        items.push_back(item);
        projection[item] = cosine(emb.row(*idx), dim.vector);
    }
    if (items.size() < 2)
        throw std::runtime_error(
            "fewer than 2 in-vocabulary items in domain \"" + domain + "\"");

    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            PairDetail detail;
            detail.item_a = items[i];
            detail.item_b = items[j];
            const auto& ra = ratings.at(items[i]);
            const auto& rb = ratings.at(items[j]);
            if (ra.size() < 2 || rb.size() < 2) {
                detail.note = "too few responses";
                result.pairs.push_back(std::move(detail));
                continue;
            }
            WelchResult welch;
            try {
                welch = welch_t_test(ra, rb);
            } catch (const std::domain_error&) {
                detail.note = "zero variance";
                result.pairs.push_back(std::move(detail));
                continue;
            }
            detail.p = welch.p;
            if (welch.p < alpha) {
                detail.significant = true;
                double survey_delta = means.means.at({items[i], scale}) -
                                      means.means.at({items[j], scale});
                double embed_delta = orientation * (projection.at(items[i]) -
                                                    projection.at(items[j]));
                detail.correct =
                    survey_delta != 0.0 && embed_delta != 0.0 &&
                    (survey_delta > 0.0) == (embed_delta > 0.0);
                ++result.n_significant;
                if (detail.correct) ++result.n_correct;
            }
            result.pairs.push_back(std::move(detail));
        }
    }
    if (result.n_significant > 0)
        result.accuracy = static_cast<double>(result.n_correct) /
                          static_cast<double>(result.n_significant);
    return result;
}

}  // namespace wordgeom
