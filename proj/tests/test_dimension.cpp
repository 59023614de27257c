#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "wordgeom/dimension.hpp"

using namespace wordgeom;
namespace fs = std::filesystem;

namespace {

Embedding random_normalized(std::size_t n, std::size_t k, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    std::vector<std::string> tokens;
    std::vector<double> matrix(n * k);
    for (std::size_t i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(i));
    for (auto& v : matrix) v = dist(gen);
    return normalize(Embedding(std::move(tokens), std::move(matrix), k));
}

std::vector<std::vector<double>> rows_of(const Embedding& emb) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < emb.size(); ++i)
        rows.emplace_back(emb.row(i).begin(), emb.row(i).end());
    return rows;
}

fs::path temp_file(const std::string& name, const std::string& content) {
    auto dir = fs::temp_directory_path() / "wordgeom_dim_tests";
    fs::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("single pair dimension by hand") {
    Embedding emb = normalize(Embedding({"a", "b"}, {1, 0, 0, 1}, 2));
    auto dim = build_dimension(emb, {{"a", "b"}});
    CHECK(dim.vector[0] == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(dim.vector[1] == doctest::Approx(-0.7071).epsilon(1e-4));
    CHECK(dim.pairs_used.size() == 1);
}

TEST_CASE("build_dimension equals the mean-then-normalize oracle") {
    Embedding emb = random_normalized(12, 6, 3);
    std::vector<AntonymPair> pairs{{"w0", "w7"}, {"w3", "w1"}, {"w10", "w4"}};
    auto dim = build_dimension(emb, pairs);

    std::vector<std::pair<std::vector<double>, std::vector<double>>> raw;
    for (const auto& p : pairs)
        raw.emplace_back(
            std::vector<double>(emb.vector(p.first).begin(),
                                emb.vector(p.first).end()),
            std::vector<double>(emb.vector(p.second).begin(),
                                emb.vector(p.second).end()));
    auto expect = oracles::mean_difference_axis(raw);
    for (std::size_t j = 0; j < expect.size(); ++j)
        CHECK(dim.vector[j] == doctest::Approx(expect[j]).epsilon(1e-12));
    CHECK(std::abs(norm(dim.vector) - 1.0) < 1e-9);
}

TEST_CASE("build_dimension skip and error modes") {
    Embedding emb = random_normalized(6, 4, 9);
    std::vector<AntonymPair> pairs{{"w0", "w1"}, {"w2", "ghost"}};
    auto dim = build_dimension(emb, pairs, OnMissing::skip);
    CHECK(dim.pairs_used.size() == 1);
    REQUIRE(dim.pairs_skipped.size() == 1);
    CHECK(dim.pairs_skipped[0].reason == "missing: ghost");

    CHECK_THROWS_AS(build_dimension(emb, pairs, OnMissing::error),
                    missing_token_error);
    CHECK_THROWS_AS(
        build_dimension(emb, {{"ghost", "wraith"}}, OnMissing::skip),
        std::runtime_error);

    Embedding raw({"a", "b"}, {1, 0, 0, 1}, 2);
    CHECK_THROWS_AS(build_dimension(raw, {{"a", "b"}}),
                    std::invalid_argument);  // not normalized
}

TEST_CASE("exactly cancelling pairs are an error") {
    Embedding emb =
        normalize(Embedding({"a", "b"}, {1, 0, 0, 1}, 2));
    CHECK_THROWS_AS(build_dimension(emb, {{"a", "b"}, {"b", "a"}}),
                    std::domain_error);
}

TEST_CASE("reversing every pair negates the dimension exactly") {
    Embedding emb = random_normalized(20, 8, 21);
    std::vector<AntonymPair> pairs{{"w1", "w2"}, {"w5", "w9"}, {"w13", "w0"}};
    std::vector<AntonymPair> reversed;
    for (const auto& p : pairs) reversed.push_back({p.second, p.first});

    auto fwd = build_dimension(emb, pairs);
    auto rev = build_dimension(emb, reversed);
    for (std::size_t j = 0; j < fwd.vector.size(); ++j)
        CHECK(rev.vector[j] == -fwd.vector[j]);

    // argmax of projections becomes argmin
    auto pf = project_all(emb, fwd);
    auto pr = project_all(emb, rev);
    auto fwd_max = std::max_element(pf.begin(), pf.end()) - pf.begin();
    auto rev_min = std::min_element(pr.begin(), pr.end()) - pr.begin();
    CHECK(fwd_max == rev_min);
}

TEST_CASE("dimension invariant to uniform rescaling of raw vectors") {
    std::mt19937 gen(33);
    std::normal_distribution<double> dist;
    std::vector<std::string> tokens;
    std::vector<double> matrix(10 * 5);
    for (std::size_t i = 0; i < 10; ++i) tokens.push_back("w" + std::to_string(i));
    for (auto& v : matrix) v = dist(gen);
    std::vector<double> scaled = matrix;
    for (auto& v : scaled) v *= 7.5;

    Embedding a = normalize(Embedding(tokens, matrix, 5));
    Embedding b = normalize(Embedding(tokens, scaled, 5));
    std::vector<AntonymPair> pairs{{"w0", "w1"}, {"w2", "w3"}};
    auto da = build_dimension(a, pairs);
    auto db = build_dimension(b, pairs);
    for (std::size_t j = 0; j < da.vector.size(); ++j)
        CHECK(da.vector[j] == doctest::Approx(db.vector[j]).epsilon(1e-12));
}

TEST_CASE("project basics and sign convention") {
    Embedding emb = random_normalized(8, 5, 4);
    auto dim = build_dimension(emb, {{"w0", "w1"}});

    CHECK(project(std::span<const double>(dim.vector), dim) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // any vector orthogonal to the dimension projects to zero
    std::vector<double> orth(5, 0.0);
    orth[0] = dim.vector[1];
    orth[1] = -dim.vector[0];
    double c = project(std::span<const double>(orth), dim);
    double expected = oracles::dot(orth, dim.vector) / oracles::norm(orth);
    CHECK(c == doctest::Approx(expected).epsilon(1e-12));

    // the pair whose difference IS the dimension orders correctly
    CHECK(project(emb, "w0", dim) - project(emb, "w1", dim) > 0.0);

    CHECK_THROWS_AS(project(emb, "ghost", dim), missing_token_error);

    auto all = project_all(emb, dim);
    REQUIRE(all.size() == emb.size());
    for (std::size_t i = 0; i < emb.size(); ++i) {
        CHECK(all[i] == project(emb, emb.token_at(i), dim));
        CHECK(all[i] >= -1.0);
        CHECK(all[i] <= 1.0);
    }
}

TEST_CASE("dimension_angle values and symmetry") {
    Embedding emb = random_normalized(10, 7, 8);
    auto d1 = build_dimension(emb, {{"w0", "w1"}});
    auto d2 = build_dimension(emb, {{"w2", "w3"}});

    auto self = dimension_angle(d1, d1);
    CHECK(self.cosine == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.degrees == doctest::Approx(0.0).epsilon(1e-6));

    auto ab = dimension_angle(d1, d2);
    auto ba = dimension_angle(d2, d1);
    CHECK(ab.cosine == ba.cosine);
    CHECK(ab.degrees >= 0.0);
    CHECK(ab.degrees <= 180.0);

    CulturalDimension neg = d1;
    for (auto& v : neg.vector) v = -v;
    CHECK(dimension_angle(d1, neg).cosine ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(dimension_angle(d1, neg).degrees ==
          doctest::Approx(180.0).epsilon(1e-6));
}

TEST_CASE("angle degrees match the published map of cosines") {
    CulturalDimension a, b;
    a.vector = {1.0, 0.0};
    double c1 = -0.255;
    b.vector = {c1, std::sqrt(1.0 - c1 * c1)};
    CHECK(dimension_angle(a, b).degrees == doctest::Approx(104.8).epsilon(0.0005));

    double c2 = -0.143;
    b.vector = {c2, std::sqrt(1.0 - c2 * c2)};
    CHECK(dimension_angle(a, b).degrees == doctest::Approx(98.2).epsilon(0.0005));
}

TEST_CASE("random unit vectors in high dimension are nearly orthogonal") {
    std::mt19937 gen(105);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(300), v(300);
        for (auto& x : u) x = dist(gen);
        for (auto& x : v) x = dist(gen);
        CHECK(std::abs(oracles::cosine(u, v)) < 0.2);
    }
}

TEST_CASE("variance_explained: rows on the axis, oracle, errors") {
    // rows are +/- d only: all variance along d
    std::vector<double> d{0.6, 0.8};
    Embedding axis_emb(
        {"p", "q", "r"},
        {d[0], d[1], -d[0], -d[1], d[0], d[1]}, 2, false);
    CulturalDimension dim;
    dim.vector = d;
    CHECK(variance_explained(axis_emb, dim) == doctest::Approx(1.0).epsilon(1e-12));

    Embedding emb = random_normalized(500, 20, 77);
    std::mt19937 gen(6);
    std::normal_distribution<double> dist;
    std::vector<double> axis(20);
    for (auto& x : axis) x = dist(gen);
    double n = oracles::norm(axis);
    for (auto& x : axis) x /= n;
    dim.vector = axis;
    double got = variance_explained(emb, dim);
    double expect = oracles::variance_fraction(rows_of(emb), axis);
    CHECK(got == doctest::Approx(expect).epsilon(1e-10));

    Embedding flat({"a", "b"}, {1, 1, 1, 1}, 2);
    dim.vector = {1.0, 0.0};
    CHECK_THROWS_AS(variance_explained(flat, dim), std::domain_error);
}

TEST_CASE("variance over an orthonormal basis sums to one") {
    Embedding emb = random_normalized(60, 10, 13);
    // Gram-Schmidt a random basis
    std::mt19937 gen(14);
    std::normal_distribution<double> dist;
    std::vector<std::vector<double>> basis;
    while (basis.size() < 10) {
        std::vector<double> v(10);
        for (auto& x : v) x = dist(gen);
        for (const auto& u : basis) {
            double c = oracles::dot(v, u);
            for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c * u[j];
        }
        double n = oracles::norm(v);
        if (n < 1e-6) continue;
        for (auto& x : v) x /= n;
        basis.push_back(v);
    }
    double total = 0.0;
    for (const auto& v : basis)
        total += variance_explained(emb, std::span<const double>(v));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("top principal component: planted and eigensolver oracle") {
    // rank-1 structure plus tiny noise
    std::mt19937 gen(55);
    std::normal_distribution<double> noise(0.0, 1e-4);
    std::normal_distribution<double> coef(0.0, 1.0);
    std::vector<double> u{0.5, -0.5, 0.5, -0.5};
    std::vector<std::string> tokens;
    std::vector<double> matrix;
    for (int i = 0; i < 50; ++i) {
        tokens.push_back("w" + std::to_string(i));
        double a = coef(gen);
        for (double uj : u) matrix.push_back(a * uj + noise(gen));
    }
    Embedding planted(tokens, matrix, 4);
    CHECK(top_component_variance(planted) > 0.999);

    Embedding emb = random_normalized(300, 30, 19);
    double got = top_component_variance(emb);
    double expect = oracles::top_eigen_fraction(rows_of(emb));
    CHECK(got == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("PCA dominance for arbitrary unit axes") {
    Embedding emb = random_normalized(120, 12, 23);
    double top = top_component_variance(emb);
    std::mt19937 gen(24);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> axis(12);
        for (auto& x : axis) x = dist(gen);
        double n = oracles::norm(axis);
        for (auto& x : axis) x /= n;
        CHECK(variance_explained(emb, std::span<const double>(axis)) <=
              top + 1e-6);
    }
}

TEST_CASE("antonym lexicon: load, dedupe, filter, scan") {
    auto path = temp_file("lex.tsv",
                          "# comment line\n"
                          "hot\tcold\n"
                          "big\tsmall\n"
                          "cold\thot\n"  // reversed duplicate
                          "up\tdown # inline comment\n");
    auto lex = load_antonym_lexicon(path.string());
    REQUIRE(lex.pairs.size() == 3);
    CHECK(lex.pairs[0].first == "hot");
    CHECK(lex.pairs[2].second == "down");
    CHECK(lex.provenance.find("1 duplicates dropped") != std::string::npos);

    auto bad = temp_file("bad.tsv", "onlyone\n");
    CHECK_THROWS_AS(load_antonym_lexicon(bad.string()), parse_error);

    Embedding emb = random_normalized(10, 6, 31);
    AntonymLexicon small;
    small.pairs = {{"w0", "w1"}, {"w0", "w9"}, {"w8", "w2"}, {"w0", "ghost"}};
    auto kept = filter_lexicon(small, emb, 5);
    REQUIRE(kept.pairs.size() == 1);
    CHECK(kept.pairs[0].first == "w0");
    CHECK(kept.pairs[0].second == "w1");

    auto focal = build_dimension(emb, {{"w0", "w1"}});
    auto scan = scan_nearest_dimensions(emb, focal, small, 10);
    CHECK(scan.pairs_dropped == 1);
    REQUIRE(scan.ranked.size() == 3);
    // matches a brute-force per-pair loop
    std::vector<std::pair<double, std::size_t>> brute;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& p = small.pairs[i];
        std::vector<double> diff(6);
        for (std::size_t j = 0; j < 6; ++j)
            diff[j] = emb.vector(p.first)[j] - emb.vector(p.second)[j];
        brute.emplace_back(oracles::cosine(diff, focal.vector), i);
    }
    std::stable_sort(brute.begin(), brute.end(), [](auto& a, auto& b) {
        return std::abs(a.first) > std::abs(b.first);
    });
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(scan.ranked[i].pair.first == small.pairs[brute[i].second].first);
        CHECK(scan.ranked[i].cosine ==
              doctest::Approx(brute[i].first).epsilon(1e-12));
    }

    // a lexicon pair equal to the focal pair scores +/- 1
    AntonymLexicon self;
    self.pairs = {{"w0", "w1"}};
    auto self_scan = scan_nearest_dimensions(emb, focal, self, 1);
    CHECK(self_scan.ranked[0].cosine == doctest::Approx(1.0).epsilon(1e-12));
    self.pairs = {{"w1", "w0"}};
    CHECK(scan_nearest_dimensions(emb, focal, self, 1).ranked[0].cosine ==
          doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("scan agrees with brute force on a larger random lexicon") {
    Embedding emb = random_normalized(80, 10, 37);
    std::mt19937 gen(38);
    std::uniform_int_distribution<std::size_t> pick(0, 79);
    AntonymLexicon lex;
    while (lex.pairs.size() < 60) {
        auto a = pick(gen), b = pick(gen);
        if (a == b) continue;
        lex.pairs.push_back(
            {"w" + std::to_string(a), "w" + std::to_string(b)});
    }
    auto focal = build_dimension(emb, {{"w3", "w4"}, {"w7", "w8"}});
    auto scan = scan_nearest_dimensions(emb, focal, lex, 60);
    REQUIRE(scan.ranked.size() == 60);
    for (std::size_t i = 1; i < scan.ranked.size(); ++i)
        CHECK(std::abs(scan.ranked[i - 1].cosine) >=
              std::abs(scan.ranked[i].cosine));
}

TEST_CASE("per-pair-normalized combination variant") {
    Embedding emb = random_normalized(10, 5, 42);
    std::vector<AntonymPair> pairs{{"w0", "w1"}, {"w2", "w3"}, {"w4", "w5"}};
    auto dim = build_dimension(emb, pairs, OnMissing::skip, "",
                               PairCombine::mean_normalized_differences);

    std::vector<double> acc(5, 0.0);
    for (const auto& p : pairs) {
        std::vector<double> diff(5);
        for (std::size_t j = 0; j < 5; ++j)
            diff[j] = emb.vector(p.first)[j] - emb.vector(p.second)[j];
        double n = oracles::norm(diff);
        for (std::size_t j = 0; j < 5; ++j) acc[j] += diff[j] / n;
    }
    for (double& x : acc) x /= 3.0;
    double n = oracles::norm(acc);
    for (double& x : acc) x /= n;
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(dim.vector[j] == doctest::Approx(acc[j]).epsilon(1e-12));

    // single-pair dimensions agree across both variants
    auto raw = build_dimension(emb, {pairs[0]});
    auto unit = build_dimension(emb, {pairs[0]}, OnMissing::skip, "",
                                PairCombine::mean_normalized_differences);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(raw.vector[j] == doctest::Approx(unit.vector[j]).epsilon(1e-12));
}

TEST_CASE("dimension spec JSON") {
    auto spec = parse_dimension_spec(
        R"({"name": "gender", "pairs": [["man","woman"], ["he","she"]]})");
    CHECK(spec.name == "gender");
    REQUIRE(spec.pairs.size() == 2);
    CHECK(spec.pairs[1].first == "he");

    CHECK_THROWS(parse_dimension_spec(R"({"name": "x"})"));
    CHECK_THROWS(parse_dimension_spec(R"({"pairs": [["solo"]]})"));
}
