#include "wordgeom/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace wordgeom {

namespace {

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

float load_f32_le(const unsigned char* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                         static_cast<std::uint32_t>(p[1]) << 8 |
                         static_cast<std::uint32_t>(p[2]) << 16 |
                         static_cast<std::uint32_t>(p[3]) << 24;
    return std::bit_cast<float>(bits);
}

void store_f32_le(float value, unsigned char* p) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(value);
    p[0] = static_cast<unsigned char>(bits & 0xff);
    p[1] = static_cast<unsigned char>((bits >> 8) & 0xff);
    p[2] = static_cast<unsigned char>((bits >> 16) & 0xff);
    p[3] = static_cast<unsigned char>((bits >> 24) & 0xff);
}

void validate_token_for_save(const std::string& token) {
    if (token.empty())
        throw std::invalid_argument("cannot save empty token");
    if (token.find(' ') != std::string::npos ||
        token.find('\n') != std::string::npos ||
        token.find('\t') != std::string::npos)
        throw std::invalid_argument(
            "token contains whitespace, unrepresentable in this format: \"" +
            token + "\"");
}

struct LineSplitter {
    const char* p;
    const char* end;

    explicit LineSplitter(const std::string& line)
        : p(line.data()), end(line.data() + line.size()) {}

    bool next_field(std::string_view& out) {
        while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p == end) return false;
        const char* start = p;
        while (p != end && *p != ' ' && *p != '\t' && *p != '\r') ++p;
        out = std::string_view(start, static_cast<std::size_t>(p - start));
        return true;
    }
};

double parse_double_field(std::string_view field, std::uint64_t line_no) {
    double value;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw parse_error("malformed number \"" + std::string(field) + "\"",
                          line_no, /*byte_offset=*/false);
    if (!std::isfinite(value))
        throw parse_error("non-finite value \"" + std::string(field) + "\"",
                          line_no, /*byte_offset=*/false);
    return value;
}

class EmbeddingBuilder {
public:
    EmbeddingBuilder(const LoadOptions& options, std::size_t dim)
        : options_(options), dim_(dim) {}

    bool full() const {
        return options_.max_vocab && tokens_.size() >= *options_.max_vocab;
    }

    // Returns false when the row was dropped (case-fold collision).
    bool add(std::string token, const double* values, std::uint64_t offset,
             bool byte_offset) {
        if (token.empty())
            throw parse_error("empty token", offset, byte_offset);
        if (options_.case_fold) token = ascii_lower(token);
        auto [it, inserted] = index_.emplace(token, tokens_.size());
        if (!inserted) {
            if (!options_.case_fold)
                throw parse_error("duplicate token \"" + token + "\"", offset,
                                  byte_offset);
            ++folded_duplicates_;
            return false;
        }
        tokens_.push_back(std::move(token));
        matrix_.insert(matrix_.end(), values, values + dim_);
        return true;
    }

    Embedding finish() {
        Embedding emb(std::move(tokens_), std::move(matrix_), dim_, false);
        emb.set_folded_duplicates(folded_duplicates_);
        emb.set_case_folded(options_.case_fold);
        return emb;
    }

private:
    LoadOptions options_;
    std::size_t dim_;
    std::vector<std::string> tokens_;
    std::vector<double> matrix_;
    std::size_t folded_duplicates_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

Embedding load_word2vec_binary(const std::string& path,
                               const LoadOptions& options) {
    std::ifstream in;
    std::vector<char> io_buffer(1 << 22);
    in.rdbuf()->pubsetbuf(io_buffer.data(),
                          static_cast<std::streamsize>(io_buffer.size()));
    in.open(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::uint64_t offset = 0;
    std::string header;
    if (!std::getline(in, header))
        throw parse_error("missing header", 0, true);
    offset = header.size() + 1;

    std::size_t n = 0, k = 0;
    {
        std::istringstream hs(header);
        std::string extra;
        if (!(hs >> n >> k) || (hs >> extra) || k == 0)
            throw parse_error("malformed header \"" + header + "\"", 0, true);
    }

    EmbeddingBuilder builder(options, k);
    std::vector<unsigned char> raw(k * 4);
    std::vector<double> values(k);
    std::string token;

    for (std::size_t i = 0; i < n && !builder.full(); ++i) {
        std::uint64_t entry_offset = offset;
        token.clear();
        // Token runs to the single 0x20 separator; a leading 0x0A left over
        // from the previous entry is consumed by the separator tolerance
        // below, so hitting one here means a structural problem.
        int c;
        while ((c = in.get()) != EOF && c != ' ') {
            if (c == '\n')
                throw parse_error("newline inside token", offset, true);
            token.push_back(static_cast<char>(c));
            ++offset;
        }
        if (c == EOF)
            throw parse_error("truncated file: expected token " +
                                  std::to_string(i + 1) + " of " +
                                  std::to_string(n),
                              offset, true);
        ++offset;  // separator

        if (!in.read(reinterpret_cast<char*>(raw.data()),
                     static_cast<std::streamsize>(raw.size())))
            throw parse_error("truncated vector for token \"" + token + "\"",
                              offset, true);
        for (std::size_t j = 0; j < k; ++j) {
            float f = load_f32_le(raw.data() + j * 4);
            if (!std::isfinite(f))
                throw parse_error("non-finite value in vector for token \"" +
                                      token + "\"",
                                  offset + j * 4, true);
            values[j] = static_cast<double>(f);
        }
        offset += raw.size();

        // A single trailing 0x0A per entry is tolerated.
        if (in.peek() == '\n') {
            in.get();
            ++offset;
        }
        builder.add(token, values.data(), entry_offset, true);
    }
    return builder.finish();
}

Embedding load_text(const std::string& path, bool has_header,
                    const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::uint64_t line_no = 0;
    std::size_t declared_n = 0, k = 0;
    std::string line;

    if (has_header) {
        if (!std::getline(in, line))
            throw parse_error("missing header", 1, false);
        ++line_no;
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> declared_n >> k) || (hs >> extra) || k == 0)
            throw parse_error("malformed header \"" + line + "\"", 1, false);
    }

    std::vector<double> values;
    std::optional<EmbeddingBuilder> builder;
    if (has_header) builder.emplace(options, k);

    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        LineSplitter fields(line);
        std::string_view tok;
        if (!fields.next_field(tok)) continue;

        values.clear();
        std::string_view field;
        while (fields.next_field(field))
            values.push_back(parse_double_field(field, line_no));

        if (!builder) {  // glove-text: infer k from the first row
            if (values.empty())
                throw parse_error("row has no vector values", line_no, false);
            k = values.size();
            builder.emplace(options, k);
        }
        if (values.size() != k)
            throw parse_error("dimension mismatch: expected " +
                                  std::to_string(k) + " values, got " +
                                  std::to_string(values.size()),
                              line_no, false);
        if (builder->full()) break;
        builder->add(std::string(tok), values.data(), line_no, false);
        ++rows;
    }

    if (!builder) {
        if (has_header && declared_n == 0)
            return Embedding({}, {}, k, false);
        throw parse_error("empty embedding file", line_no, false);
    }
    if (has_header && !options.max_vocab && rows != declared_n)
        throw parse_error("header declares " + std::to_string(declared_n) +
                              " rows but file has " + std::to_string(rows),
                          line_no, false);
    return builder->finish();
}

void append_g17(std::string& out, double value) {
    char buf[32];
    int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
    out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

Embedding::Embedding(std::vector<std::string> tokens,
                     std::vector<double> matrix, std::size_t dim,
                     bool normalized)
    : tokens_(std::move(tokens)),
      matrix_(std::move(matrix)),
      dim_(dim),
      normalized_(normalized) {
    if (matrix_.size() != tokens_.size() * dim_)
        throw std::invalid_argument("matrix size does not match tokens x dim");
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], i).second)
            throw std::invalid_argument("duplicate token \"" + tokens_[i] +
                                        "\"");
    }
    for (double v : matrix_) {
        if (!std::isfinite(v))
            throw std::invalid_argument("non-finite value in matrix");
    }
    if (normalized_) {
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            if (std::abs(norm(row(i)) - 1.0) > 1e-6)
                throw std::invalid_argument("row for \"" + tokens_[i] +
                                            "\" is not unit norm");
        }
    }
}

bool Embedding::contains(const std::string& token) const {
    return index_of(token).has_value();
}

std::optional<std::size_t> Embedding::index_of(const std::string& token) const {
    auto it = index_.find(case_folded_ ? ascii_lower(token) : token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const double> Embedding::vector(const std::string& token) const {
    auto idx = index_of(token);
    if (!idx) throw missing_token_error(token);
    return row(*idx);
}

EmbeddingFormat format_from_string(const std::string& name) {
    if (name == "word2vec-binary") return EmbeddingFormat::word2vec_binary;
    if (name == "word2vec-text") return EmbeddingFormat::word2vec_text;
    if (name == "glove-text") return EmbeddingFormat::glove_text;
    throw std::invalid_argument("unknown embedding format \"" + name + "\"");
}

std::string format_to_string(EmbeddingFormat format) {
    switch (format) {
        case EmbeddingFormat::word2vec_binary: return "word2vec-binary";
        case EmbeddingFormat::word2vec_text: return "word2vec-text";
        case EmbeddingFormat::glove_text: return "glove-text";
    }
    throw std::logic_error("unreachable");
}

Embedding load_embedding(const std::string& path, EmbeddingFormat format,
                         const LoadOptions& options) {
    switch (format) {
        case EmbeddingFormat::word2vec_binary:
            return load_word2vec_binary(path, options);
        case EmbeddingFormat::word2vec_text:
            return load_text(path, /*has_header=*/true, options);
        case EmbeddingFormat::glove_text:
            return load_text(path, /*has_header=*/false, options);
    }
    throw std::logic_error("unreachable");
}

void save_embedding(const Embedding& emb, const std::string& path,
                    EmbeddingFormat format) {
    if (format == EmbeddingFormat::glove_text && emb.size() == 0)
        throw std::invalid_argument(
            "glove-text has no header; an empty embedding would not be "
            "re-loadable");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");

    std::string buf;
    if (format != EmbeddingFormat::glove_text) {
        buf = std::to_string(emb.size()) + " " + std::to_string(emb.dim()) +
              "\n";
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }

    if (format == EmbeddingFormat::word2vec_binary) {
        std::vector<unsigned char> raw(emb.dim() * 4);
        for (std::size_t i = 0; i < emb.size(); ++i) {
            validate_token_for_save(emb.token_at(i));
            out.write(emb.token_at(i).data(),
                      static_cast<std::streamsize>(emb.token_at(i).size()));
            out.put(' ');
            auto r = emb.row(i);
            for (std::size_t j = 0; j < emb.dim(); ++j)
                store_f32_le(static_cast<float>(r[j]), raw.data() + j * 4);
            out.write(reinterpret_cast<const char*>(raw.data()),
                      static_cast<std::streamsize>(raw.size()));
            out.put('\n');
        }
    } else {
        for (std::size_t i = 0; i < emb.size(); ++i) {
            validate_token_for_save(emb.token_at(i));
            buf.clear();
            buf += emb.token_at(i);
            auto r = emb.row(i);
            for (std::size_t j = 0; j < emb.dim(); ++j) {
                buf += ' ';
                append_g17(buf, r[j]);
            }
            buf += '\n';
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

void normalize_rows(std::vector<double>& matrix, std::size_t k,
                    const std::vector<std::string>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        double* r = matrix.data() + i * k;
        double n = norm({r, k});
        if (n == 0.0)
            throw std::domain_error("zero-norm vector for token \"" +
                                    tokens[i] + "\"");
        for (std::size_t j = 0; j < k; ++j) r[j] /= n;
    }
}

}  // namespace

Embedding normalize(const Embedding& emb) {
    std::vector<double> matrix(emb.matrix());
    normalize_rows(matrix, emb.dim(), emb.tokens());
    Embedding out(emb.tokens(), std::move(matrix), emb.dim(), true);
    out.set_folded_duplicates(emb.folded_duplicates());
    out.set_case_folded(emb.case_folded());
    return out;
}

Embedding normalize(Embedding&& emb) {
    std::vector<double> matrix = std::move(emb.matrix_);
    std::vector<std::string> tokens = std::move(emb.tokens_);
    std::size_t k = emb.dim_;
    emb.index_.clear();
    normalize_rows(matrix, k, tokens);
    Embedding out(std::move(tokens), std::move(matrix), k, true);
    out.set_folded_duplicates(emb.folded_duplicates_);
    out.set_case_folded(emb.case_folded_);
    return out;
}

double dot(std::span<const double> u, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("cosine: length mismatch");
    double nu = norm(u), nv = norm(v);
    if (nu == 0.0 || nv == 0.0)
        throw std::domain_error("cosine undefined for zero vector");
    return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

std::vector<Neighbor> nearest_neighbors(
    const Embedding& emb, std::span<const double> query, std::size_t count,
    const std::unordered_set<std::string>& exclude) {
    if (query.size() != emb.dim())
        throw std::invalid_argument("query dimension mismatch");
    if (count == 0) return {};

    std::unordered_set<std::string> skip;
    const std::unordered_set<std::string>* skip_set = &exclude;
    if (emb.case_folded() && !exclude.empty()) {
        for (const auto& t : exclude) skip.insert(ascii_lower(t));
        skip_set = &skip;
    }

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(emb.size());
    for (std::size_t i = 0; i < emb.size(); ++i) {
        if (skip_set->count(emb.token_at(i))) continue;
        scored.emplace_back(cosine(query, emb.row(i)), i);
    }
    std::size_t take = std::min(count, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });
    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.push_back({emb.token_at(scored[i].second), scored[i].first});
    return out;
}

std::string analogy(const Embedding& emb, const std::string& a,
                    const std::string& b, const std::string& c) {
    if (!emb.normalized())
        throw std::invalid_argument("analogy requires a normalized embedding");
    auto resolve = [&](const std::string& t) {
        auto idx = emb.index_of(t);
        if (!idx) throw missing_token_error(t);
        return *idx;
    };
    std::size_t ia = resolve(a), ib = resolve(b), ic = resolve(c);
    auto va = emb.row(ia), vb = emb.row(ib), vc = emb.row(ic);
    std::vector<double> target(emb.dim());
    for (std::size_t j = 0; j < emb.dim(); ++j)
        target[j] = vc[j] - va[j] + vb[j];
    if (norm(target) == 0.0)
        throw std::domain_error("analogy target c - a + b is the zero vector");

    std::size_t best = emb.size();
    double best_cos = -2.0;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        if (i == ia || i == ib || i == ic) continue;
        double cs = cosine(target, emb.row(i));
        if (cs > best_cos) {
            best_cos = cs;
            best = i;
        }
    }
    if (best == emb.size())
        throw std::domain_error("vocabulary too small for analogy query");
    return emb.token_at(best);
}

EntityVector entity_vector(const Embedding& emb,
                           const std::vector<std::string>& tokens) {
    EntityVector result;
    result.vector.assign(emb.dim(), 0.0);
    for (const auto& t : tokens) {
        auto idx = emb.index_of(t);
        if (!idx) {
            result.missing.push_back(t);
            continue;
        }
        auto r = emb.row(*idx);
        double n = norm(r);
        if (n == 0.0)
            throw std::domain_error("zero-norm vector for token \"" + t +
                                    "\"");
        for (std::size_t j = 0; j < emb.dim(); ++j)
            result.vector[j] += r[j] / n;
        result.found.push_back(t);
    }
    if (result.found.empty()) {
        std::string misses;
        for (const auto& t : result.missing)
            misses += (misses.empty() ? "" : ", ") + t;
        throw missing_token_error(misses);
    }
    for (double& v : result.vector)
        v /= static_cast<double>(result.found.size());
    double n = norm(result.vector);
    if (n < 1e-12)
        throw std::domain_error(
            "entity tokens cancel to a (near-)zero mean vector");
    for (double& v : result.vector) v /= n;
    return result;
}

}  // namespace wordgeom
