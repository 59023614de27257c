#include "wordgeom/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace wordgeom {

namespace {

constexpr double kMinLrFraction = 1e-4;

std::vector<std::string> split_whitespace(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(std::move(tok));
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Shared bookkeeping for one training run.
struct TrainContext {
    const TrainingConfig& config;
    const VocabCounts& vocab;
    const UnigramTable& table;
    std::vector<double>& input;    // n x k
    std::vector<double>& context;  // n x k
    std::vector<double> keep_prob;
    std::uint64_t planned_visits = 0;  // epochs * in-vocab token positions
    std::atomic<std::uint64_t> visits{0};

    double learning_rate() const {
        double done = static_cast<double>(visits.load(std::memory_order_relaxed)) /
                      static_cast<double>(planned_visits);
        return config.initial_lr * std::max(1.0 - done, kMinLrFraction);
    }
};

// Trains one sentence (already mapped to vocabulary ids). Returns the summed
// pair loss and the number of positive pairs, for the epoch telemetry.
struct SentenceStats {
    double loss = 0.0;
    std::uint64_t pairs = 0;
};

void train_sentence(TrainContext& ctx, const std::vector<std::size_t>& sent,
                    SplitMix64& rng, SentenceStats& stats) {
    const std::size_t k = ctx.config.dim;
    const std::size_t window = ctx.config.window;
    std::vector<double> hidden(k);
    std::vector<double> grad(k);

    for (std::size_t pos = 0; pos < sent.size(); ++pos) {
        const std::size_t center = sent[pos];
        std::size_t reduced = window;
        if (ctx.config.dynamic_window) reduced = window - rng.next_below(window);

        std::size_t lo = pos >= reduced ? pos - reduced : 0;
        std::size_t hi = std::min(sent.size() - 1, pos + reduced);
        const double lr = ctx.learning_rate();

        auto run_targets = [&](const double* in_row, double* grad_out) {
            // One positive target (the center) plus `negative` noise draws;
            // a draw that hits the center is skipped, as in word2vec.
            for (std::size_t d = 0; d <= ctx.config.negative; ++d) {
                std::size_t target;
                double label;
                if (d == 0) {
                    target = center;
                    label = 1.0;
                } else {
                    target = ctx.table.sample(rng);
                    if (target == center) continue;
                    label = 0.0;
                }
                double* out_row = ctx.context.data() + target * k;
                double f = 0.0;
                for (std::size_t j = 0; j < k; ++j) f += in_row[j] * out_row[j];
                double s = sigmoid(f);
                stats.loss += label == 1.0 ? -std::log(std::max(s, 1e-12))
                                           : -std::log(std::max(1.0 - s, 1e-12));
                double g = (label - s) * lr;
                for (std::size_t j = 0; j < k; ++j) {
                    grad_out[j] += g * out_row[j];
                    out_row[j] += g * in_row[j];
                }
            }
        };

        if (ctx.config.architecture == Architecture::sgns) {
            for (std::size_t q = lo; q <= hi; ++q) {
                if (q == pos) continue;
                double* in_row = ctx.input.data() + sent[q] * k;
                std::fill(grad.begin(), grad.end(), 0.0);
                run_targets(in_row, grad.data());
                for (std::size_t j = 0; j < k; ++j) in_row[j] += grad[j];
                ++stats.pairs;
            }
        } else {  // CBOW: average context inputs, predict the center
            std::size_t cw = 0;
            std::fill(hidden.begin(), hidden.end(), 0.0);
            for (std::size_t q = lo; q <= hi; ++q) {
                if (q == pos) continue;
                const double* in_row = ctx.input.data() + sent[q] * k;
                for (std::size_t j = 0; j < k; ++j) hidden[j] += in_row[j];
                ++cw;
            }
            if (cw == 0) continue;
            for (std::size_t j = 0; j < k; ++j)
                hidden[j] /= static_cast<double>(cw);
            std::fill(grad.begin(), grad.end(), 0.0);
            run_targets(hidden.data(), grad.data());
            for (std::size_t q = lo; q <= hi; ++q) {
                if (q == pos) continue;
                double* in_row = ctx.input.data() + sent[q] * k;
                for (std::size_t j = 0; j < k; ++j) in_row[j] += grad[j];
            }
            ++stats.pairs;
        }
    }
}

// Maps a record to vocabulary ids, ticking the visit counter per in-vocab
// token and applying frequent-word downsampling.
void build_sentence(TrainContext& ctx, const CorpusRecord& record,
                    SplitMix64& rng, std::vector<std::size_t>& sent) {
    sent.clear();
    for (const auto& tok : record.tokens) {
        auto it = ctx.vocab.index.find(tok);
        if (it == ctx.vocab.index.end()) continue;
        ctx.visits.fetch_add(1, std::memory_order_relaxed);
        if (ctx.config.subsample_t > 0.0) {
            double u = rng.next_unit();
            if (ctx.keep_prob[it->second] < u) continue;
        }
        sent.push_back(it->second);
    }
}

void check_finite(const std::vector<double>& m, const char* which) {
    for (double v : m) {
        if (!std::isfinite(v))
            throw std::runtime_error(std::string("training diverged: non-finite "
                                                 "value in ") +
                                     which + " matrix");
    }
}

}  // namespace

Architecture architecture_from_string(const std::string& name) {
    if (name == "cbow") return Architecture::cbow;
    if (name == "sgns" || name == "skipgram" || name == "skip-gram")
        return Architecture::sgns;
    throw std::invalid_argument("unknown architecture \"" + name + "\"");
}

void TrainingConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (negative < 1) throw std::invalid_argument("negative must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (subsample_t < 0.0)
        throw std::invalid_argument("subsample_t must be >= 0");
    if (!(initial_lr > 0.0))
        throw std::invalid_argument("initial_lr must be > 0");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

std::uint64_t Corpus::token_occurrences() const {
    std::uint64_t total = 0;
    for (const auto& r : records) total += r.count * r.tokens.size();
    return total;
}

Corpus load_plain_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Corpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        auto tokens = split_whitespace(line);
        if (tokens.empty()) continue;
        corpus.records.push_back({std::move(tokens), 1});
    }
    return corpus;
}

Corpus load_weighted_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Corpus corpus;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto tab = line.rfind('\t');
        if (tab == std::string::npos)
            throw parse_error("expected \"tokens<TAB>count\"", line_no, false);
        auto tokens = split_whitespace(line.substr(0, tab));
        std::string count_text = line.substr(tab + 1);
        std::uint64_t count = 0;
        try {
            std::size_t used = 0;
            count = std::stoull(count_text, &used);
            while (used < count_text.size() &&
                   (count_text[used] == ' ' || count_text[used] == '\r'))
                ++used;
            if (used != count_text.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw parse_error("bad count \"" + count_text + "\"", line_no,
                              false);
        }
        if (count == 0)
            throw parse_error("record count must be >= 1", line_no, false);
        if (tokens.empty())
            throw parse_error("record has no tokens", line_no, false);
        corpus.records.push_back({std::move(tokens), count});
    }
    return corpus;
}

VocabCounts build_vocab(const Corpus& corpus, std::uint64_t min_count) {
    if (corpus.records.empty()) throw std::runtime_error("empty corpus");

    std::unordered_map<std::string, std::uint64_t> raw;
    for (const auto& record : corpus.records)
        for (const auto& tok : record.tokens) raw[tok] += record.count;

    std::vector<std::pair<std::string, std::uint64_t>> kept;
    kept.reserve(raw.size());
    for (auto& [tok, count] : raw)
        if (count >= min_count) kept.emplace_back(tok, count);
    if (kept.empty())
        throw std::runtime_error(
            "no tokens reach min_count=" + std::to_string(min_count));

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    VocabCounts vocab;
    vocab.tokens.reserve(kept.size());
    vocab.counts.reserve(kept.size());
    for (auto& [tok, count] : kept) {
        vocab.index.emplace(tok, vocab.tokens.size());
        vocab.tokens.push_back(std::move(tok));
        vocab.counts.push_back(count);
        vocab.total += count;
    }
    return vocab;
}

UnigramTable::UnigramTable(const std::vector<std::uint64_t>& counts,
                           double power, std::size_t size) {
    if (counts.empty()) throw std::invalid_argument("empty vocabulary");
    if (counts.size() > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("vocabulary too large for unigram table");
    if (size < counts.size())
        throw std::invalid_argument("unigram table smaller than vocabulary");
    double total = 0.0;
    for (auto c : counts) total += std::pow(static_cast<double>(c), power);

    table_.reserve(size);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        cumulative += std::pow(static_cast<double>(counts[i]), power) / total;
        auto end = static_cast<std::size_t>(
            std::llround(cumulative * static_cast<double>(size)));
        end = std::min(end, size);
        while (table_.size() < end)
            table_.push_back(static_cast<std::uint32_t>(i));
    }
    while (table_.size() < size)
        table_.push_back(static_cast<std::uint32_t>(counts.size() - 1));
}

ModelState train(const Corpus& corpus, const TrainingConfig& config) {
    config.validate();
    VocabCounts vocab = build_vocab(corpus, config.min_count);
    const std::size_t n = vocab.size();
    const std::size_t k = config.dim;

    std::vector<double> input(n * k);
    std::vector<double> context(n * k, 0.0);
    SplitMix64 init_rng(config.seed);
    for (auto& w : input) w = (init_rng.next_unit() - 0.5) / static_cast<double>(k);

    UnigramTable table(vocab.counts);

    TrainContext ctx{config, vocab, table, input, context, {}};

    // Keep probability per canonical word2vec:
    // (sqrt(c/(t*total)) + 1) * t*total/c, capped at 1.
    ctx.keep_prob.resize(n, 1.0);
    if (config.subsample_t > 0.0) {
        double threshold = config.subsample_t * static_cast<double>(vocab.total);
        for (std::size_t i = 0; i < n; ++i) {
            double c = static_cast<double>(vocab.counts[i]);
            ctx.keep_prob[i] =
                std::min(1.0, (std::sqrt(c / threshold) + 1.0) * threshold / c);
        }
    }

    // Planned visits: every in-vocab token position, once per record pass.
    std::uint64_t per_epoch = 0;
    for (const auto& record : corpus.records) {
        std::uint64_t in_vocab = 0;
        for (const auto& tok : record.tokens)
            if (vocab.index.count(tok)) ++in_vocab;
        per_epoch += record.count * in_vocab;
    }
    if (per_epoch == 0)
        throw std::runtime_error("no in-vocabulary tokens to train on");
    ctx.planned_visits = per_epoch * config.epochs;

    std::vector<double> epoch_loss(config.epochs, 0.0);
    std::vector<std::uint64_t> epoch_pairs(config.epochs, 0);

    if (config.workers == 1) {
        // Deterministic path: records in corpus order, a record with count c
        // unrolled into c consecutive passes, one RNG stream.
        SplitMix64 rng(init_rng.next());
        std::vector<std::size_t> sent;
        for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
            SentenceStats stats;
            for (const auto& record : corpus.records) {
                for (std::uint64_t rep = 0; rep < record.count; ++rep) {
                    build_sentence(ctx, record, rng, sent);
                    if (!sent.empty()) train_sentence(ctx, sent, rng, stats);
                }
            }
            epoch_loss[epoch] =
                stats.pairs ? stats.loss / static_cast<double>(stats.pairs) : 0.0;
            epoch_pairs[epoch] = stats.pairs;
            if (!std::isfinite(epoch_loss[epoch]))
                throw std::runtime_error("training diverged: non-finite loss");
        }
    } else {
        // Lock-free parallel path: workers sample records proportionally to
        // their counts and update the shared matrices racily. Not
        // bit-reproducible.
        std::vector<double> cumulative(corpus.records.size());
        double acc = 0.0, total_passes = 0.0;
        for (const auto& r : corpus.records)
            total_passes += static_cast<double>(r.count);
        for (std::size_t i = 0; i < corpus.records.size(); ++i) {
            acc += static_cast<double>(corpus.records[i].count) / total_passes;
            cumulative[i] = acc;
        }
        std::uint64_t passes_per_worker =
            (static_cast<std::uint64_t>(total_passes) + config.workers - 1) /
            config.workers;

        std::vector<double> worker_loss(config.workers);
        std::vector<std::uint64_t> worker_pairs(config.workers);
        std::uint64_t stream_base = init_rng.next();

        for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
            auto work = [&](unsigned w) {
                SplitMix64 rng(stream_base + epoch * config.workers + w);
                std::vector<std::size_t> sent;
                SentenceStats stats;
                for (std::uint64_t p = 0; p < passes_per_worker; ++p) {
                    double u = rng.next_unit();
                    std::size_t idx = static_cast<std::size_t>(
                        std::lower_bound(cumulative.begin(), cumulative.end(),
                                         u) -
                        cumulative.begin());
                    if (idx >= corpus.records.size())
                        idx = corpus.records.size() - 1;
                    build_sentence(ctx, corpus.records[idx], rng, sent);
                    if (!sent.empty()) train_sentence(ctx, sent, rng, stats);
                }
                worker_loss[w] = stats.loss;
                worker_pairs[w] = stats.pairs;
            };
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < config.workers; ++w)
                pool.emplace_back(work, w);
            for (auto& th : pool) th.join();

            double loss = 0.0;
            std::uint64_t pairs = 0;
            for (unsigned w = 0; w < config.workers; ++w) {
                loss += worker_loss[w];
                pairs += worker_pairs[w];
            }
            epoch_loss[epoch] = pairs ? loss / static_cast<double>(pairs) : 0.0;
            epoch_pairs[epoch] = pairs;
            if (!std::isfinite(epoch_loss[epoch]))
                throw std::runtime_error("training diverged: non-finite loss");
        }
    }

    check_finite(input, "input");
    check_finite(context, "context");

    ModelState state{
        Embedding(vocab.tokens, std::move(input), k, false),
        Embedding(vocab.tokens, std::move(context), k, false),
        std::move(epoch_loss), std::move(epoch_pairs)};
    return state;
}

const Embedding& context_vectors(const ModelState& state) {
    return state.context;
}

}  // namespace wordgeom
