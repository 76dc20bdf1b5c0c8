#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "depxfer/ambiguity.hpp"
#include "depxfer/batch.hpp"
#include "depxfer/model.hpp"
#include "depxfer/treebank.hpp"

namespace depxfer {

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
    int epochs = 5;
    double learning_rate = 1e-3;
    double lambda = 0.0;     // L2-to-initializer coefficient
    double sigma = 0.95;     // candidate-set threshold
    int length_cutoff = 30;  // training-only; evaluation always sees full data
    bool projective_mode = false;
    int batch_size = 32;
    uint64_t seed = 1;
    Optimizer optimizer = Optimizer::Adam;

    void validate() const;
};

// Tuned value sets, keyed as "<regime>-<group>": st, aast, aaet, aaet-repr,
// aaet-prag crossed with nearby/distant, plus aast-proj, aaet-prag-proj and
// the supervised "source" profile.
TrainConfig named_profile(const std::string& name);
const std::vector<std::string>& profile_names();

struct SourceBundle {
    std::vector<std::pair<ParserModel, std::string>> sources;  // (model, name)
    size_t main_index = 0;

    void validate() const;
};

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;         // data term + L2 penalty, per sentence
    double distance_to_init = 0.0;  // ||theta - theta0||
};

struct TrainLog {
    size_t trained_sentences = 0;
    size_t discarded_sentences = 0;
    std::vector<EpochStats> epochs;
};

// Tree CRF negative log-likelihood on gold trees, plus per-arc label
// cross-entropy when the data is labeled. Extends the model's label
// inventory from the data.
ParserModel train_supervised(const ParserModel& model, const LabeledTreebank& data,
                             const TrainConfig& config, TrainLog* log = nullptr);

// Parse with the source model as-is.
std::vector<DependencyTree> direct_transfer(const ParserModel& source,
                                            const std::vector<Sentence>& sentences,
                                            bool projective_mode);

// Fine-tune on the source parser's own 1-best parses as pseudo-gold,
// regularized toward the source parameters. Pseudo-gold is computed once
// before epoch 1 and never regenerated.
ParserModel self_train(const ParserModel& source, const std::vector<Sentence>& sentences,
                       const TrainConfig& config, TrainLog* log = nullptr);

// Fine-tune on the probability mass of the candidate tree sets induced by
// the source parser's high-marginal arcs plus its 1-best tree.
ParserModel ambiguity_self_train(const ParserModel& source, const std::vector<Sentence>& sentences,
                                 const TrainConfig& config, TrainLog* log = nullptr);

// Multi-source variant: candidate arc sets are unions across sources; the
// main source provides the initializer and the label supervision.
ParserModel ensemble_transfer(const SourceBundle& sources, const std::vector<Sentence>& sentences,
                              const TrainConfig& config, TrainLog* log = nullptr);

// Core entry shared by the two regimes above and by the file-based CLI
// pipeline: candidate sets of extra sources come precomputed, one list per
// source, each aligned with `sentences`.
ParserModel ambiguity_train_with_sets(const ParserModel& main_source,
                                      const std::vector<Sentence>& sentences,
                                      const std::vector<std::vector<AmbiguousArcSet>>& extra_sets,
                                      const TrainConfig& config, TrainLog* log = nullptr);

// Shuffled index deal shared by subsampling and splitting.
std::vector<size_t> sample_indices(size_t n, size_t count, uint64_t seed);

// Seeded sample without replacement; original order is kept.
template <typename Item>
std::vector<Item> subsample(const std::vector<Item>& data, size_t count, uint64_t seed) {
    std::vector<Item> out;
    out.reserve(count);
    for (size_t i : sample_indices(data.size(), count, seed)) out.push_back(data[i]);
    return out;
}

template <typename Item>
std::vector<Item> subsample_fraction(const std::vector<Item>& data, double fraction, uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("sample fraction must lie in (0, 1], got " + std::to_string(fraction));
    const auto count = static_cast<size_t>(std::llround(fraction * static_cast<double>(data.size())));
    return subsample(data, count < 1 ? 1 : count, seed);
}

std::vector<std::vector<size_t>> partition_indices(size_t n, int parts, uint64_t seed);

// Seeded partition into near-equal parts; disjoint and covering, each part
// in original order.
template <typename Item>
std::vector<std::vector<Item>> split_parts(const std::vector<Item>& data, int parts, uint64_t seed) {
    std::vector<std::vector<Item>> out;
    for (const auto& idxs : partition_indices(data.size(), parts, seed)) {
        std::vector<Item> part;
        part.reserve(idxs.size());
        for (size_t i : idxs) part.push_back(data[i]);
        out.push_back(std::move(part));
    }
    return out;
}

}  // namespace depxfer
