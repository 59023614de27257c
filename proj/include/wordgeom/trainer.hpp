#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "wordgeom/embedding.hpp"

namespace wordgeom {

enum class Architecture { cbow, sgns };

Architecture architecture_from_string(const std::string& name);

struct TrainingConfig {
    std::size_t dim = 300;
    std::size_t window = 8;
    Architecture architecture = Architecture::sgns;
    std::size_t negative = 5;
    std::size_t epochs = 5;
    std::uint64_t min_count = 5;
    double subsample_t = 1e-3;  // 0 disables frequent-word downsampling
    double initial_lr = 0.025;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    // Uniform shrink of the context window to [1, window] per center word,
    // as in canonical word2vec. Disable for exact-oracle tests.
    bool dynamic_window = true;

    void validate() const;
};

// A record is one training text: a line of a plain corpus (count 1) or a
// weighted n-gram with its occurrence count. Context windows never cross
// record boundaries.
struct CorpusRecord {
    std::vector<std::string> tokens;
    std::uint64_t count = 1;
};

struct Corpus {
    std::vector<CorpusRecord> records;

    std::size_t record_count() const { return records.size(); }
    std::uint64_t token_occurrences() const;  // sum of count * record length
};

// UTF-8, one whitespace-tokenized document per line; blank lines skipped.
Corpus load_plain_corpus(const std::string& path);
// "<tok1> ... <tokJ>\t<count>" per line.
Corpus load_weighted_corpus(const std::string& path);

struct VocabCounts {
    std::vector<std::string> tokens;       // (count desc, token asc)
    std::vector<std::uint64_t> counts;     // weighted occurrence counts
    std::uint64_t total = 0;               // sum of retained counts
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const { return tokens.size(); }
};

// Aggregates record multiplicities and drops tokens below min_count.
VocabCounts build_vocab(const Corpus& corpus, std::uint64_t min_count);

// Negative-sampling table: token i occupies a share of slots proportional
// to counts[i]^power.
class UnigramTable {
public:
    static constexpr std::size_t kDefaultSize = 10'000'000;

    explicit UnigramTable(const std::vector<std::uint64_t>& counts,
                          double power = 0.75,
                          std::size_t size = kDefaultSize);

    std::size_t sample(SplitMix64& rng) const {
        return table_[rng.next_below(table_.size())];
    }
    std::size_t size() const { return table_.size(); }

private:
    std::vector<std::uint32_t> table_;
};

struct ModelState {
    Embedding input;                 // the word embedding, normalized=false
    Embedding context;               // output-side vectors, same vocabulary
    std::vector<double> epoch_loss;  // average negative-sampling loss
    std::vector<std::uint64_t> epoch_pairs;  // training pairs per epoch
};

// Trains word2vec with negative sampling. With workers=1 and a fixed seed
// the result is bit-reproducible across runs; workers>1 updates shared
// matrices without locks and is not.
ModelState train(const Corpus& corpus, const TrainingConfig& config);

const Embedding& context_vectors(const ModelState& state);

}  // namespace wordgeom
