#include "wordgeom/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace wordgeom {

namespace {

// Start vector for power iteration; fixed so runs are reproducible.
std::vector<double> seeded_unit_vector(std::size_t k) {
    SplitMix64 rng(0x706f776572ULL);
    std::vector<double> v(k);
    for (auto& x : v) x = rng.next_unit() - 0.5;
    double n = norm(v);
    for (auto& x : v) x /= n;
    return v;
}

std::vector<double> mean_row(const Embedding& emb) {
    const std::size_t k = emb.dim();
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < emb.size(); ++i) {
        auto r = emb.row(i);
        for (std::size_t j = 0; j < k; ++j) mean[j] += r[j];
    }
    for (double& m : mean) m /= static_cast<double>(emb.size());
    return mean;
}

}  // namespace

CulturalDimension build_dimension(const Embedding& emb,
                                  const std::vector<AntonymPair>& pairs,
                                  OnMissing on_missing,
                                  const std::string& name,
                                  PairCombine combine) {
    if (!emb.normalized())
        throw std::invalid_argument(
            "build_dimension requires a normalized embedding");
    if (pairs.empty()) throw std::invalid_argument("no antonym pairs given");

    const std::size_t k = emb.dim();
    CulturalDimension dim;
    dim.name = name;
    std::vector<double> acc(k, 0.0);
    std::vector<double> diff(k);

    for (const auto& pair : pairs) {
        if (pair.first == pair.second)
            throw std::invalid_argument("degenerate pair \"" + pair.first +
                                        "\" - \"" + pair.second + "\"");
        auto i1 = emb.index_of(pair.first);
        auto i2 = emb.index_of(pair.second);
        if (!i1 || !i2) {
            std::string reason = "missing: ";
            if (!i1) reason += pair.first;
            if (!i1 && !i2) reason += ", ";
            if (!i2) reason += pair.second;
            if (on_missing == OnMissing::error)
                throw missing_token_error(!i1 ? pair.first : pair.second);
            dim.pairs_skipped.push_back({pair, reason});
            continue;
        }
        auto v1 = emb.row(*i1);
        auto v2 = emb.row(*i2);
        for (std::size_t j = 0; j < k; ++j) diff[j] = v1[j] - v2[j];
        if (combine == PairCombine::mean_normalized_differences) {
            double n = norm(diff);
            if (n == 0.0) {
                dim.pairs_skipped.push_back({pair, "identical vectors"});
                continue;
            }
            for (double& d : diff) d /= n;
        }
        for (std::size_t j = 0; j < k; ++j) acc[j] += diff[j];
        dim.pairs_used.push_back(pair);
    }

    if (dim.pairs_used.empty())
        throw std::runtime_error("no usable antonym pairs in vocabulary");
    for (double& a : acc) a /= static_cast<double>(dim.pairs_used.size());
    double n = norm(acc);
    if (n < 1e-12)
        throw std::domain_error("antonym pair differences cancel to zero");
    for (double& a : acc) a /= n;
    dim.vector = std::move(acc);
    return dim;
}

double project(const Embedding& emb, const std::string& token,
               const CulturalDimension& dim) {
    return cosine(emb.vector(token), dim.vector);
}

double project(std::span<const double> vec, const CulturalDimension& dim) {
    return cosine(vec, dim.vector);
}

std::vector<double> project_all(const Embedding& emb,
                                const CulturalDimension& dim) {
    std::vector<double> out(emb.size());
    for (std::size_t i = 0; i < emb.size(); ++i)
        out[i] = cosine(emb.row(i), dim.vector);
    return out;
}

DimensionAngle dimension_angle(const CulturalDimension& a,
                               const CulturalDimension& b) {
    if (a.vector.size() != b.vector.size())
        throw std::invalid_argument("dimension_angle: dimensionality mismatch");
    double c = std::clamp(dot(a.vector, b.vector), -1.0, 1.0);
    return {c, std::acos(c) * 180.0 / std::numbers::pi};
}

double variance_explained(const Embedding& emb, std::span<const double> axis,
                          bool centered) {
    if (emb.size() < 2)
        throw std::invalid_argument("variance requires at least 2 rows");
    if (axis.size() != emb.dim())
        throw std::invalid_argument("axis dimensionality mismatch");
    double axis_norm = norm(axis);
    if (axis_norm == 0.0) throw std::domain_error("zero axis");

    const std::size_t k = emb.dim();
    std::vector<double> mean(k, 0.0);
    if (centered) mean = mean_row(emb);

    double along = 0.0, total = 0.0;
    std::vector<double> c(k);
    for (std::size_t i = 0; i < emb.size(); ++i) {
        auto r = emb.row(i);
        for (std::size_t j = 0; j < k; ++j) c[j] = r[j] - mean[j];
        double p = dot(c, axis) / axis_norm;
        along += p * p;
        total += dot(c, c);
    }
    if (total == 0.0)
        throw std::domain_error("all rows identical: total variance is zero");
    return along / total;
}

double variance_explained(const Embedding& emb, const CulturalDimension& dim,
                          bool centered) {
    return variance_explained(emb, std::span<const double>(dim.vector),
                              centered);
}

double top_component_variance(const Embedding& emb, double rel_tol,
                              std::size_t max_iters, unsigned threads) {
    if (emb.size() < 2)
        throw std::invalid_argument("variance requires at least 2 rows");
    const std::size_t n = emb.size();
    const std::size_t k = emb.dim();
    std::vector<double> mean = mean_row(emb);

    // One pass of the covariance operator: v -> sum_i c_i (c_i . v),
    // accumulated over row blocks so large vocabularies can use threads.
    // Blocks are reduced in index order, keeping the result independent of
    // scheduling.
    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        unsigned nthreads = std::max(1u, threads);
        std::size_t block = (n + nthreads - 1) / nthreads;
        std::vector<std::vector<double>> partial(nthreads,
                                                 std::vector<double>(k, 0.0));
        auto work = [&](unsigned t) {
            std::size_t lo = t * block, hi = std::min(n, lo + block);
            std::vector<double> c(k);
            for (std::size_t i = lo; i < hi; ++i) {
                auto r = emb.row(i);
                for (std::size_t j = 0; j < k; ++j) c[j] = r[j] - mean[j];
                double p = dot(c, v);
                for (std::size_t j = 0; j < k; ++j)
                    partial[t][j] += p * c[j];
            }
        };
        if (nthreads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < nthreads; ++t)
                pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        out.assign(k, 0.0);
        for (unsigned t = 0; t < nthreads; ++t)
            for (std::size_t j = 0; j < k; ++j) out[j] += partial[t][j];
    };

    std::vector<double> v = seeded_unit_vector(k);
    std::vector<double> cv(k);
    double eigen_prev = 0.0;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        apply(v, cv);
        double eigen = dot(v, cv);  // Rayleigh quotient (v is unit)
        double cv_norm = norm(cv);
        if (cv_norm == 0.0)
            throw std::domain_error("all rows identical: total variance is zero");
        for (std::size_t j = 0; j < k; ++j) v[j] = cv[j] / cv_norm;
        if (iter > 0 &&
            std::abs(eigen - eigen_prev) <= rel_tol * std::abs(eigen))
            break;
        eigen_prev = eigen;
    }
    return variance_explained(emb, std::span<const double>(v), true);
}

AntonymLexicon load_antonym_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    AntonymLexicon lex;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t dropped = 0;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw parse_error("expected word1<TAB>word2", line_no, false);
        std::string first = line.substr(0, tab);
        std::string second = line.substr(tab + 1);
        auto strip = [](std::string& s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
        };
        strip(first);
        strip(second);
        if (first.empty() || second.empty() || first == second)
            throw parse_error("bad pair \"" + first + "\" / \"" + second +
                                  "\"",
                              line_no, false);
        auto key = first < second ? std::make_pair(first, second)
                                  : std::make_pair(second, first);
        if (!seen.insert(key).second) {
            ++dropped;
            continue;
        }
        lex.pairs.push_back({std::move(first), std::move(second)});
    }
    lex.provenance = path + " (" + std::to_string(lex.pairs.size()) +
                     " pairs, " + std::to_string(dropped) +
                     " duplicates dropped)";
    return lex;
}

AntonymLexicon filter_lexicon(const AntonymLexicon& lex, const Embedding& emb,
                              std::size_t top_n) {
    AntonymLexicon out;
    for (const auto& pair : lex.pairs) {
        auto i1 = emb.index_of(pair.first);
        auto i2 = emb.index_of(pair.second);
        if (i1 && i2 && *i1 < top_n && *i2 < top_n) out.pairs.push_back(pair);
    }
    out.provenance = lex.provenance + "; filtered to vocabulary rank < " +
                     std::to_string(top_n);
    return out;
}

ScanResult scan_nearest_dimensions(const Embedding& emb,
                                   const CulturalDimension& focal,
                                   const AntonymLexicon& lex,
                                   std::size_t top_k) {
    if (!emb.normalized())
        throw std::invalid_argument("scan requires a normalized embedding");
    ScanResult result;
    const std::size_t k = emb.dim();
    std::vector<double> diff(k);
    for (const auto& pair : lex.pairs) {
        auto i1 = emb.index_of(pair.first);
        auto i2 = emb.index_of(pair.second);
        if (!i1 || !i2) {
            ++result.pairs_dropped;
            continue;
        }
        auto v1 = emb.row(*i1);
        auto v2 = emb.row(*i2);
        for (std::size_t j = 0; j < k; ++j) diff[j] = v1[j] - v2[j];
        double n = norm(diff);
        if (n == 0.0) {
            ++result.pairs_dropped;
            continue;
        }
        double c = std::clamp(dot(diff, focal.vector) / n, -1.0, 1.0);
        result.ranked.push_back({pair, c});
    }
    std::stable_sort(result.ranked.begin(), result.ranked.end(),
                     [](const ScannedPair& a, const ScannedPair& b) {
                         return std::abs(a.cosine) > std::abs(b.cosine);
                     });
    if (result.ranked.size() > top_k) result.ranked.resize(top_k);
    return result;
}

DimensionSpec parse_dimension_spec(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    DimensionSpec spec;
    spec.name = j.value("name", "");
    if (!j.contains("pairs") || !j["pairs"].is_array())
        throw std::runtime_error("dimension spec needs a \"pairs\" array");
    for (const auto& p : j["pairs"]) {
        if (!p.is_array() || p.size() != 2)
            throw std::runtime_error(
                "each pair must be a two-element array of words");
        spec.pairs.push_back(
            {p[0].get<std::string>(), p[1].get<std::string>()});
    }
    if (spec.pairs.empty())
        throw std::runtime_error("dimension spec has no pairs");
    return spec;
}

DimensionSpec load_dimension_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dimension_spec(buf.str());
}

}  // namespace wordgeom
