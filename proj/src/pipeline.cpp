#include "wordgeom/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wordgeom/csv.hpp"

namespace wordgeom {

namespace {

using nlohmann::ordered_json;

ordered_json entry_to_json(const EmbeddingSetEntry& e) {
    ordered_json j;
    j["label"] = e.label;
    j["embedding"] = e.embedding_path;
    j["format"] = format_to_string(e.format);
    if (e.corpus_path) {
        j["corpus"] = *e.corpus_path;
        j["weighted"] = e.weighted_corpus;
    }
    return j;
}

ordered_json set_to_json(const EmbeddingSet& set) {
    auto arr = ordered_json::array();
    for (const auto& e : set.entries) arr.push_back(entry_to_json(e));
    return ordered_json{{"labels", arr}};
}

ordered_json spec_to_json(const DimensionSpec& spec) {
    ordered_json j;
    j["name"] = spec.name;
    auto pairs = ordered_json::array();
    for (const auto& p : spec.pairs)
        pairs.push_back(ordered_json::array({p.first, p.second}));
    j["pairs"] = pairs;
    return j;
}

Embedding load_normalized(const EmbeddingSetEntry& entry) {
    return normalize(load_embedding(entry.embedding_path, entry.format));
}

Corpus load_entry_corpus(const EmbeddingSetEntry& entry) {
    if (!entry.corpus_path)
        throw std::logic_error("entry has no corpus path");
    return entry.weighted_corpus ? load_weighted_corpus(*entry.corpus_path)
                                 : load_plain_corpus(*entry.corpus_path);
}

StatisticSpec projection_statistic(const std::string& word,
                                   const DimensionSpec& dim) {
    StatisticSpec s;
    s.kind = StatisticSpec::Kind::projection;
    s.word_a = word;
    s.dimension_a = dim;
    return s;
}

StatisticSpec angle_statistic(const DimensionSpec& a, const DimensionSpec& b) {
    StatisticSpec s;
    s.kind = StatisticSpec::Kind::dimension_angle;
    s.dimension_a = a;
    s.dimension_b = b;
    return s;
}

void attach_plan_metadata(SeriesReport& report,
                          const std::optional<ResamplingPlan>& plan) {
    if (plan)
        report.metadata["plan"] = nlohmann::json::parse(plan->to_json());
}

CulturalDimension build_for_label(const Embedding& emb,
                                  const DimensionSpec& spec,
                                  const std::string& label) {
    try {
        return build_dimension(emb, spec.pairs, OnMissing::skip, spec.name);
    } catch (const std::exception& e) {
        throw std::runtime_error("dimension \"" + spec.name +
                                 "\" unbuildable for label \"" + label +
                                 "\": " + e.what());
    }
}

bool sex_is_male(const std::string& recorded, std::uint64_t line_no) {
    std::string s;
    for (char c : recorded)
        s += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    if (s == "m" || s == "male") return true;
    if (s == "f" || s == "female") return false;
    throw parse_error("unrecognized recorded_sex \"" + recorded + "\"",
                      line_no, false);
}

}  // namespace

EmbeddingSet EmbeddingSet::parse(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    EmbeddingSet set;
    std::set<std::string> seen;
    for (const auto& item : j.at("labels")) {
        EmbeddingSetEntry entry;
        entry.label = item.at("label").get<std::string>();
        entry.embedding_path = item.at("embedding").get<std::string>();
        if (item.contains("format"))
            entry.format = format_from_string(item["format"].get<std::string>());
        if (item.contains("corpus")) {
            entry.corpus_path = item["corpus"].get<std::string>();
            entry.weighted_corpus = item.value("weighted", false);
        }
        if (!seen.insert(entry.label).second)
            throw std::runtime_error("duplicate label \"" + entry.label +
                                     "\" in embedding set");
        if (!std::filesystem::exists(entry.embedding_path))
            throw std::runtime_error("embedding file does not exist: " +
                                     entry.embedding_path);
        set.entries.push_back(std::move(entry));
    }
    if (set.entries.empty())
        throw std::runtime_error("embedding set has no labels");
    return set;
}

EmbeddingSet EmbeddingSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

ordered_json SeriesReport::to_json() const {
    ordered_json j;
    j["kind"] = kind;
    j["labels"] = labels;
    j["rows"] = rows;
    auto all = ordered_json::array();
    for (const auto& row : cells) {
        auto row_json = ordered_json::array();
        for (const auto& cell : row) {
            ordered_json c;
            c["value"] = cell.value ? ordered_json(*cell.value)
                                    : ordered_json(nullptr);
            c["lower"] = cell.lower ? ordered_json(*cell.lower)
                                    : ordered_json(nullptr);
            c["upper"] = cell.upper ? ordered_json(*cell.upper)
                                    : ordered_json(nullptr);
            c["reason"] = cell.reason;
            row_json.push_back(std::move(c));
        }
        all.push_back(std::move(row_json));
    }
    j["cells"] = all;
    j["metadata"] = metadata;
    return j;
}

SeriesReport SeriesReport::from_json(const nlohmann::ordered_json& j) {
    SeriesReport report;
    report.kind = j.at("kind").get<std::string>();
    report.labels = j.at("labels").get<std::vector<std::string>>();
    report.rows = j.at("rows").get<std::vector<std::string>>();
    for (const auto& row_json : j.at("cells")) {
        std::vector<ReportCell> row;
        for (const auto& c : row_json) {
            ReportCell cell;
            if (!c.at("value").is_null()) cell.value = c["value"].get<double>();
            if (!c.at("lower").is_null()) cell.lower = c["lower"].get<double>();
            if (!c.at("upper").is_null()) cell.upper = c["upper"].get<double>();
            cell.reason = c.value("reason", "");
            row.push_back(cell);
        }
        report.cells.push_back(std::move(row));
    }
    if (report.cells.size() != report.rows.size())
        throw std::runtime_error("cells do not match rows");
    for (const auto& row : report.cells)
        if (row.size() != report.labels.size())
            throw std::runtime_error("cells do not match labels");
    report.metadata = j.value("metadata", ordered_json::object());
    return report;
}

SeriesReport projection_series(const EmbeddingSet& set,
                               const DimensionSpec& dim_spec,
                               const std::vector<std::string>& words,
                               const std::optional<ResamplingPlan>& plan) {
    if (words.empty()) throw std::invalid_argument("no words given");
    SeriesReport report;
    report.kind = "projection_series";
    report.rows = words;
    report.metadata["dimension"] = spec_to_json(dim_spec);
    report.metadata["words"] = words;
    report.metadata["inputs"] = set_to_json(set);
    attach_plan_metadata(report, plan);

    report.cells.assign(words.size(),
                        std::vector<ReportCell>(set.entries.size()));

    for (std::size_t li = 0; li < set.entries.size(); ++li) {
        const auto& entry = set.entries[li];
        report.labels.push_back(entry.label);
        Embedding emb = load_normalized(entry);
        CulturalDimension dim = build_for_label(emb, dim_spec, entry.label);

        for (std::size_t wi = 0; wi < words.size(); ++wi) {
            ReportCell& cell = report.cells[wi][li];
            auto idx = emb.index_of(words[wi]);
            if (!idx) {
                cell.reason = "not in vocabulary";
                continue;
            }
            cell.value = cosine(emb.row(*idx), dim.vector);
        }

        if (plan && entry.corpus_path) {
            Corpus corpus = load_entry_corpus(entry);
            // The interval bounds the statistic the series reports: the
            // dimension over the pairs that were usable in this label.
            DimensionSpec used{dim_spec.name, dim.pairs_used};
            std::vector<StatisticSpec> stats;
            std::vector<std::size_t> stat_word;
            for (std::size_t wi = 0; wi < words.size(); ++wi) {
                if (!report.cells[wi][li].value) continue;
                stats.push_back(projection_statistic(words[wi], used));
                stat_word.push_back(wi);
            }
            auto outcomes = resample_ci_multi(corpus, *plan, stats);
            for (std::size_t s = 0; s < outcomes.size(); ++s) {
                ReportCell& cell = report.cells[stat_word[s]][li];
                if (outcomes[s].ci) {
                    cell.lower = outcomes[s].ci->lower;
                    cell.upper = outcomes[s].ci->upper;
                } else {
                    cell.reason = "no interval: " + outcomes[s].error;
                }
            }
        }
    }
    return report;
}

SeriesReport angle_series(const EmbeddingSet& set,
                          const DimensionSpec& dim_spec_a,
                          const DimensionSpec& dim_spec_b,
                          const std::optional<ResamplingPlan>& plan) {
    SeriesReport report;
    report.kind = "angle_series";
    report.rows = {"cosine"};
    report.metadata["dimension_a"] = spec_to_json(dim_spec_a);
    report.metadata["dimension_b"] = spec_to_json(dim_spec_b);
    report.metadata["inputs"] = set_to_json(set);
    attach_plan_metadata(report, plan);
    report.cells.assign(1, std::vector<ReportCell>(set.entries.size()));

    for (std::size_t li = 0; li < set.entries.size(); ++li) {
        const auto& entry = set.entries[li];
        report.labels.push_back(entry.label);
        Embedding emb = load_normalized(entry);
        CulturalDimension da = build_for_label(emb, dim_spec_a, entry.label);
        CulturalDimension db = build_for_label(emb, dim_spec_b, entry.label);
        ReportCell& cell = report.cells[0][li];
        cell.value = dimension_angle(da, db).cosine;

        if (plan && entry.corpus_path) {
            Corpus corpus = load_entry_corpus(entry);
            DimensionSpec used_a{dim_spec_a.name, da.pairs_used};
            DimensionSpec used_b{dim_spec_b.name, db.pairs_used};
            auto outcomes = resample_ci_multi(
                corpus, *plan, {angle_statistic(used_a, used_b)});
            if (outcomes[0].ci) {
                cell.lower = outcomes[0].ci->lower;
                cell.upper = outcomes[0].ci->upper;
            } else {
                cell.reason = "no interval: " + outcomes[0].error;
            }
        }
    }
    return report;
}

SeriesReport cross_corpus_compare(const EmbeddingSetEntry& a,
                                  const EmbeddingSetEntry& b,
                                  const DimensionSpec& dim_spec,
                                  const std::vector<std::string>& words,
                                  const std::optional<ResamplingPlan>& plan) {
    if (words.empty()) throw std::invalid_argument("no words given");
    SeriesReport report;
    report.kind = "compare";
    report.labels = {a.label, b.label};
    report.rows = words;
    report.metadata["dimension"] = spec_to_json(dim_spec);
    report.metadata["words"] = words;
    report.metadata["inputs"] =
        ordered_json{{"a", entry_to_json(a)}, {"b", entry_to_json(b)}};
    attach_plan_metadata(report, plan);
    report.cells.assign(words.size(), std::vector<ReportCell>(2));

    const EmbeddingSetEntry* entries[2] = {&a, &b};
    for (std::size_t side = 0; side < 2; ++side) {
        const auto& entry = *entries[side];
        Embedding emb = load_normalized(entry);
        CulturalDimension dim = build_for_label(emb, dim_spec, entry.label);
        for (std::size_t wi = 0; wi < words.size(); ++wi) {
            ReportCell& cell = report.cells[wi][side];
            auto idx = emb.index_of(words[wi]);
            if (!idx) {
                cell.reason = "not in vocabulary";
                continue;
            }
            cell.value = cosine(emb.row(*idx), dim.vector);
        }
        if (plan && entry.corpus_path) {
            Corpus corpus = load_entry_corpus(entry);
            DimensionSpec used{dim_spec.name, dim.pairs_used};
            std::vector<StatisticSpec> stats;
            std::vector<std::size_t> stat_word;
            for (std::size_t wi = 0; wi < words.size(); ++wi) {
                if (!report.cells[wi][side].value) continue;
                stats.push_back(projection_statistic(words[wi], used));
                stat_word.push_back(wi);
            }
            auto outcomes = resample_ci_multi(corpus, *plan, stats);
            for (std::size_t s = 0; s < outcomes.size(); ++s) {
                ReportCell& cell = report.cells[stat_word[s]][side];
                if (outcomes[s].ci) {
                    cell.lower = outcomes[s].ci->lower;
                    cell.upper = outcomes[s].ci->upper;
                } else {
                    cell.reason = "no interval: " + outcomes[s].error;
                }
            }
        }
    }
    return report;
}

std::vector<NameRecord> load_names(const std::string& path) {
    CsvTable table = read_csv(path);
    std::size_t c_label = table.column("label");
    std::size_t c_name = table.column("name");
    std::size_t c_sex = table.column("recorded_sex");
    std::vector<NameRecord> names;
    std::uint64_t line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        NameRecord record;
        record.label = row[c_label];
        record.name = row[c_name];
        record.male = sex_is_male(row[c_sex], line_no);
        names.push_back(std::move(record));
    }
    if (names.empty()) throw std::runtime_error("names file has no rows");
    return names;
}

SeriesReport name_gender_audit(const EmbeddingSet& set,
                               const std::vector<NameRecord>& names,
                               std::size_t lag_labels,
                               const DimensionSpec& gender_spec) {
    std::map<std::string, std::vector<const NameRecord*>> by_label;
    for (const auto& n : names) by_label[n.label].push_back(&n);

    SeriesReport report;
    report.kind = "names";
    report.rows = {"accuracy"};
    report.metadata["dimension"] = spec_to_json(gender_spec);
    report.metadata["lag_labels"] = lag_labels;
    report.metadata["inputs"] = set_to_json(set);

    auto detail = ordered_json::array();
    std::vector<std::string> unknown_labels;
    for (const auto& [label, _] : by_label) {
        bool known = std::any_of(
            set.entries.begin(), set.entries.end(),
            [&](const EmbeddingSetEntry& e) { return e.label == label; });
        if (!known) unknown_labels.push_back(label);
    }

    // Cohorts sharing a target decade reuse its loaded model.
    std::map<std::string, Embedding> cache;
    report.cells.assign(1, {});
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        const std::string& label = set.entries[i].label;
        auto cohort = by_label.find(label);
        if (cohort == by_label.end()) continue;

        report.labels.push_back(label);
        ReportCell cell;
        ordered_json d;
        d["label"] = label;

        if (i + lag_labels >= set.entries.size()) {
            cell.reason = "lagged text label out of range";
            d["dropped"] = cell.reason;
            report.cells[0].push_back(cell);
            detail.push_back(std::move(d));
            continue;
        }
        const auto& target = set.entries[i + lag_labels];
        d["text_label"] = target.label;
        auto it = cache.find(target.embedding_path);
        if (it == cache.end())
            it = cache.emplace(target.embedding_path, load_normalized(target))
                     .first;
        const Embedding& emb = it->second;
        CulturalDimension dim =
            build_for_label(emb, gender_spec, target.label);

        std::size_t n_scored = 0, n_correct = 0, n_oov = 0, n_zero = 0;
        for (const NameRecord* name : cohort->second) {
            auto idx = emb.index_of(name->name);
            if (!idx) {
                ++n_oov;
                continue;
            }
            double p = cosine(emb.row(*idx), dim.vector);
            ++n_scored;
            if (p == 0.0) {
                ++n_zero;  // scored as misclassified
                continue;
            }
            if ((p > 0.0) == name->male) ++n_correct;
        }
        d["names"] = cohort->second.size();
        d["scored"] = n_scored;
        d["correct"] = n_correct;
        d["oov"] = n_oov;
        d["zero_projection"] = n_zero;
        if (n_scored == 0) {
            cell.reason = "no names in vocabulary";
        } else {
            cell.value = static_cast<double>(n_correct) /
                         static_cast<double>(n_scored);
        }
        report.cells[0].push_back(cell);
        detail.push_back(std::move(d));
    }
    report.metadata["detail"] = detail;
    if (!unknown_labels.empty())
        report.metadata["unknown_labels"] = unknown_labels;
    if (report.labels.empty())
        throw std::runtime_error(
            "no name cohorts match the embedding set labels");
    return report;
}

ValidationReport validation_report(const ValidationInputs& inputs,
                                   const Embedding& emb) {
    if (!emb.normalized())
        throw std::invalid_argument(
            "validation_report requires a normalized embedding");
    SurveyDataset survey =
        load_survey(inputs.responses_csv, inputs.demographics_csv);
    auto population = load_population(inputs.population_csv);
    StratumWeights weights = poststratify(survey, population);
    ItemMeans means = weighted_item_means(survey, weights);

    ValidationReport report;
    report.warnings = weights.warnings;
    for (const auto& omitted : means.omitted)
        report.warnings.push_back("no responses for " + omitted);
    report.metadata["inputs"] = ordered_json{
        {"responses", inputs.responses_csv},
        {"demographics", inputs.demographics_csv},
        {"population", inputs.population_csv},
    };
    report.metadata["alpha"] = inputs.alpha;

    std::set<std::string> domains;
    for (const auto& [item, domain] : survey.item_domain)
        domains.insert(domain);

    for (const auto& [scale, spec, orientation] : inputs.scales) {
        ScaleValidation sv;
        sv.scale = scale;
        sv.orientation = orientation;
        CulturalDimension dim =
            build_dimension(emb, spec.pairs, OnMissing::skip, spec.name);
        if (orientation == -1)
            for (double& v : dim.vector) v = -v;
        else if (orientation != 1)
            throw std::invalid_argument("orientation must be +1 or -1");

        std::map<std::string, double> scale_means;
        for (const auto& [key, mean] : means.means)
            if (key.second == scale) scale_means[key.first] = mean;
        if (scale_means.empty())
            throw std::runtime_error("survey has no responses on scale \"" +
                                     scale + "\"");
        sv.correlation = correlate_with_embedding(scale_means, emb, dim);

        for (const auto& domain : domains) {
            DomainAccuracy da;
            da.domain = domain;
            try {
                da.result = pairwise_classification(
                    survey, weights, emb, dim, scale, domain, inputs.alpha,
                    /*orientation=*/+1);  // already folded into the vector
            } catch (const std::exception& e) {
                report.warnings.push_back("scale " + scale + ", domain " +
                                          domain + ": " + e.what());
                continue;
            }
            sv.total_significant += da.result.n_significant;
            sv.total_correct += da.result.n_correct;
            sv.domains.push_back(std::move(da));
        }
        if (sv.total_significant > 0)
            sv.overall_accuracy = static_cast<double>(sv.total_correct) /
                                  static_cast<double>(sv.total_significant);
        report.scales.push_back(std::move(sv));
    }
    return report;
}

ordered_json ValidationReport::to_json() const {
    ordered_json j;
    auto scales_json = ordered_json::array();
    for (const auto& sv : scales) {
        ordered_json s;
        s["scale"] = sv.scale;
        s["orientation"] = sv.orientation;
        s["pearson_r"] = sv.correlation.r;
        s["n_items"] = sv.correlation.n_items;
        s["missing_items"] = sv.correlation.missing_items;
        auto domains_json = ordered_json::array();
        for (const auto& da : sv.domains) {
            ordered_json d;
            d["domain"] = da.domain;
            d["accuracy"] = da.result.accuracy
                                ? ordered_json(*da.result.accuracy)
                                : ordered_json(nullptr);
            d["significant_pairs"] = da.result.n_significant;
            d["correct_pairs"] = da.result.n_correct;
            d["out_of_vocabulary"] = da.result.out_of_vocabulary;
            domains_json.push_back(std::move(d));
        }
        s["domains"] = domains_json;
        s["all_domains"] = {
            {"accuracy", sv.overall_accuracy
                             ? ordered_json(*sv.overall_accuracy)
                             : ordered_json(nullptr)},
            {"significant_pairs", sv.total_significant},
            {"correct_pairs", sv.total_correct},
        };
        scales_json.push_back(std::move(s));
    }
    j["scales"] = scales_json;
    j["warnings"] = warnings;
    j["metadata"] = metadata;
    return j;
}

std::string ValidationReport::to_csv() const {
    std::string out = "scale,domain,metric,value\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& sv : scales) {
        out += csv_quote(sv.scale) + ",,pearson_r," + num(sv.correlation.r) +
               "\n";
        out += csv_quote(sv.scale) + ",,n_items," +
               std::to_string(sv.correlation.n_items) + "\n";
        for (const auto& da : sv.domains) {
            out += csv_quote(sv.scale) + "," + csv_quote(da.domain) +
                   ",accuracy," +
                   (da.result.accuracy ? num(*da.result.accuracy) : "") + "\n";
            out += csv_quote(sv.scale) + "," + csv_quote(da.domain) +
                   ",significant_pairs," +
                   std::to_string(da.result.n_significant) + "\n";
        }
        out += csv_quote(sv.scale) + ",all,accuracy," +
               (sv.overall_accuracy ? num(*sv.overall_accuracy) : "") + "\n";
        out += csv_quote(sv.scale) + ",all,significant_pairs," +
               std::to_string(sv.total_significant) + "\n";
    }
    return out;
}

}  // namespace wordgeom
