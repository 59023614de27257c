#pragma once

#include <string>
#include <vector>

#include "wordgeom/embedding.hpp"

namespace wordgeom {

// Orientation convention: the dimension points toward `first`, so words
// projecting positive lean toward the first pole (masculine, rich, ...).
struct AntonymPair {
    std::string first;
    std::string second;
};

struct SkippedPair {
    AntonymPair pair;
    std::string reason;
};

struct CulturalDimension {
    std::string name;
    std::vector<double> vector;  // unit norm
    std::vector<AntonymPair> pairs_used;
    std::vector<SkippedPair> pairs_skipped;
};

struct AntonymLexicon {
    std::vector<AntonymPair> pairs;
    std::string provenance;
};

enum class OnMissing { skip, error };

// How per-pair differences are combined. The default averages raw
// differences of unit word vectors and renormalizes the mean; the variant
// normalizes each difference before averaging.
enum class PairCombine { mean_raw_differences, mean_normalized_differences };

// vector = normalize(mean over usable pairs of vec(first) - vec(second)),
// on a normalized embedding. Pairs with a missing word are skipped and
// recorded (or fatal under OnMissing::error).
CulturalDimension build_dimension(
    const Embedding& emb, const std::vector<AntonymPair>& pairs,
    OnMissing on_missing = OnMissing::skip, const std::string& name = "",
    PairCombine combine = PairCombine::mean_raw_differences);

// Cosine of the word with the dimension vector; positive = first pole.
double project(const Embedding& emb, const std::string& token,
               const CulturalDimension& dim);
double project(std::span<const double> vec, const CulturalDimension& dim);

// Projections for the whole vocabulary, in vocabulary order.
std::vector<double> project_all(const Embedding& emb,
                                const CulturalDimension& dim);

struct DimensionAngle {
    double cosine;
    double degrees;
};

DimensionAngle dimension_angle(const CulturalDimension& a,
                               const CulturalDimension& b);

// Fraction of total centered variance captured by projections onto `dim`:
// sum_i ((x_i - mean) . d)^2 / sum_i |x_i - mean|^2. Set centered=false for
// the uncentered variant (mean replaced by zero).
double variance_explained(const Embedding& emb, const CulturalDimension& dim,
                          bool centered = true);
double variance_explained(const Embedding& emb, std::span<const double> axis,
                          bool centered = true);

// Variance explained by the top principal component of the centered rows,
// found by power iteration.
double top_component_variance(const Embedding& emb, double rel_tol = 1e-7,
                              std::size_t max_iters = 10000,
                              unsigned threads = 1);

// TSV "word1<TAB>word2" per line; '#' starts a comment. Duplicate unordered
// pairs are dropped (first occurrence wins), reversed duplicates included.
AntonymLexicon load_antonym_lexicon(const std::string& path);

// Keeps pairs whose words both rank below top_n in the embedding's
// vocabulary order (vocabulary order = frequency rank for trainer output
// and the published word2vec files).
AntonymLexicon filter_lexicon(const AntonymLexicon& lex, const Embedding& emb,
                              std::size_t top_n);

struct ScannedPair {
    AntonymPair pair;
    double cosine;  // signed cosine of the per-pair dimension to the focal
};

struct ScanResult {
    std::vector<ScannedPair> ranked;  // by |cosine| descending
    std::size_t pairs_dropped = 0;    // pairs with a missing word
};

// Builds a single-pair dimension for every lexicon pair and ranks them by
// |cosine| with the focal dimension, reporting the signed cosine.
ScanResult scan_nearest_dimensions(const Embedding& emb,
                                   const CulturalDimension& focal,
                                   const AntonymLexicon& lex,
                                   std::size_t top_k);

// JSON dimension spec: {"name": ..., "pairs": [["man","woman"], ...]}.
struct DimensionSpec {
    std::string name;
    std::vector<AntonymPair> pairs;
};

DimensionSpec load_dimension_spec(const std::string& path);
DimensionSpec parse_dimension_spec(const std::string& json_text);

}  // namespace wordgeom
