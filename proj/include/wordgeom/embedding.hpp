#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wordgeom/common.hpp"

namespace wordgeom {

enum class EmbeddingFormat { word2vec_binary, word2vec_text, glove_text };

EmbeddingFormat format_from_string(const std::string& name);
std::string format_to_string(EmbeddingFormat format);

struct LoadOptions {
    bool case_fold = false;
    std::optional<std::size_t> max_vocab;
};

// Vocabulary plus a dense row-major matrix. Immutable after load/normalize,
// safe to share across threads. Vocabulary order is file order, which for
// trainer output and the published word2vec binaries doubles as frequency
// rank. Values are stored as doubles regardless of on-disk width.
class Embedding {
public:
    Embedding() = default;
    Embedding(std::vector<std::string> tokens, std::vector<double> matrix,
              std::size_t dim, bool normalized = false);

    std::size_t size() const { return tokens_.size(); }
    std::size_t dim() const { return dim_; }
    bool normalized() const { return normalized_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<double>& matrix() const { return matrix_; }

    bool contains(const std::string& token) const;
    // Row index, i.e. frequency rank for count-ordered files.
    std::optional<std::size_t> index_of(const std::string& token) const;
    const std::string& token_at(std::size_t row) const { return tokens_[row]; }

    std::span<const double> row(std::size_t i) const {
        return {matrix_.data() + i * dim_, dim_};
    }
    // Throws missing_token_error.
    std::span<const double> vector(const std::string& token) const;

    // Tokens lowercased at load time that collided with an earlier token
    // and were dropped (first occurrence wins).
    std::size_t folded_duplicates() const { return folded_duplicates_; }
    void set_folded_duplicates(std::size_t n) { folded_duplicates_ = n; }

    // When set, lookups lowercase the query to match the folded vocabulary.
    bool case_folded() const { return case_folded_; }
    void set_case_folded(bool folded) { case_folded_ = folded; }

private:
    friend Embedding normalize(Embedding&& emb);

    std::vector<std::string> tokens_;
    std::vector<double> matrix_;
    std::size_t dim_ = 0;
    bool normalized_ = false;
    bool case_folded_ = false;
    std::size_t folded_duplicates_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

Embedding load_embedding(const std::string& path, EmbeddingFormat format,
                         const LoadOptions& options = {});
void save_embedding(const Embedding& emb, const std::string& path,
                    EmbeddingFormat format);

// Returns a copy with every row scaled to unit Euclidean norm.
// Throws on zero-norm rows, naming the offending token. The rvalue
// overload reuses the argument's buffers, which matters for
// multi-gigabyte models.
Embedding normalize(const Embedding& emb);
Embedding normalize(Embedding&& emb);

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> v);

// dot(u,v)/(|u||v|), clamped to [-1,1] against rounding.
double cosine(std::span<const double> u, std::span<const double> v);

struct Neighbor {
    std::string token;
    double cosine;
};

// Top `count` tokens by cosine to `query`, excluding `exclude`; ties broken
// by vocabulary order. Returns fewer than `count` when the usable vocabulary
// is smaller; count == 0 yields an empty list.
std::vector<Neighbor> nearest_neighbors(
    const Embedding& emb, std::span<const double> query, std::size_t count,
    const std::unordered_set<std::string>& exclude = {});

// 3CosAdd: argmax over vocabulary \ {a,b,c} of cosine with c - a + b.
// Requires a normalized embedding.
std::string analogy(const Embedding& emb, const std::string& a,
                    const std::string& b, const std::string& c);

struct EntityVector {
    std::vector<double> vector;
    std::vector<std::string> found;
    std::vector<std::string> missing;
};

// Mean of the present tokens' normalized vectors, renormalized. Multi-word
// entities (a surname plus a full name, say) get one robust vector.
EntityVector entity_vector(const Embedding& emb,
                           const std::vector<std::string>& tokens);

}  // namespace wordgeom
