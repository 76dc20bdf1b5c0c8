#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "depxfer/ambiguity.hpp"
#include "depxfer/inference.hpp"
#include "depxfer/model.hpp"
#include "depxfer/treebank.hpp"

namespace depxfer {

// Corpus kernels come in an OpenMP flavor and a serial reference flavor.
// Per-sentence work is pure, and reductions happen in sentence order, so the
// two produce bitwise-identical results; tests hold them to that.
enum class Exec { Serial, Parallel };

// 1-best parse per sentence; labels by per-arc argmax when the model has a
// label inventory and with_labels is set.
std::vector<DependencyTree> decode_corpus(const ParserModel& model,
                                          const std::vector<Sentence>& sentences, bool projective,
                                          bool with_labels, Exec exec);

// What target-side training needs from one source parser, per sentence.
struct SourceInference {
    AmbiguousArcSet arc_set;
    DependencyTree one_best;  // labeled when the source model has labels
};

std::vector<SourceInference> infer_corpus(const ParserModel& model,
                                          const std::vector<Sentence>& sentences,
                                          const AmbiguityConfig& config, bool projective, Exec exec);

// One frozen training example. Exactly one of arc_set / gold_tree drives the
// tree loss; label_arcs drive the label cross-entropy.
struct TrainInstance {
    SentenceFeatures feats;
    std::optional<AmbiguousArcSet> arc_set;   // candidate-set likelihood
    std::optional<DependencyTree> gold_tree;  // negative log-likelihood
    std::vector<std::tuple<int, int, int>> label_arcs;  // (h, m, label index)
};

struct BatchGradient {
    double loss = 0.0;  // summed over sentences, tree loss + label loss
    std::vector<double> arc_grad;
    std::vector<double> label_grad;
};

// Loss and gradient summed over instances. Sentences are processed in
// parallel; accumulation order is fixed by instance order regardless of
// thread count.
BatchGradient batch_gradient(const ParserModel& model,
                             const std::vector<const TrainInstance*>& batch, bool projective,
                             Exec exec);

// Loss and gradient of one instance, appended as (feature id, value) pairs.
struct SentenceGradient {
    double loss = 0.0;
    std::vector<std::pair<uint32_t, double>> arc_updates;
    std::vector<std::pair<uint32_t, double>> label_updates;
};
SentenceGradient sentence_gradient(const ParserModel& model, const TrainInstance& instance,
                                   bool projective);

}  // namespace depxfer
