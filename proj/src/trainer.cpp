#include "depxfer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depxfer/rng.hpp"

namespace depxfer {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw ConfigError("sigma must lie in (0, 1]");
    if (length_cutoff < 1) throw ConfigError("length_cutoff must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

void SourceBundle::validate() const {
    if (sources.empty()) throw ConfigError("source bundle is empty");
    if (main_index >= sources.size()) throw ConfigError("main source index out of range");
}

namespace {

TrainConfig base_profile() {
    return TrainConfig{};
}

}  // namespace

const std::vector<std::string>& profile_names() {
    static const std::vector<std::string> names = {
        "source",        "st-nearby",        "st-distant",        "aast-nearby",
        "aast-distant",  "aaet-nearby",      "aaet-distant",      "aaet-repr-nearby",
        "aaet-repr-distant", "aaet-prag-nearby", "aaet-prag-distant", "aast-proj",
        "aaet-prag-proj"};
    return names;
}

TrainConfig named_profile(const std::string& name) {
    TrainConfig c = base_profile();
    if (name == "source") {
        c.learning_rate = 1e-4;
        c.batch_size = 80;
        c.length_cutoff = 100;
        c.lambda = 0.0;
    } else if (name == "st-nearby") {
        c.learning_rate = 5.6e-4;
        c.lambda = 3e-4;
        c.length_cutoff = 60;
    } else if (name == "st-distant") {
        c.learning_rate = 3.7e-4;
        c.lambda = 2.8e-4;
        c.length_cutoff = 60;
    } else if (name == "aast-nearby") {
        c.learning_rate = 3.8e-5;
        c.lambda = 0.01;
    } else if (name == "aast-distant") {
        c.learning_rate = 2e-5;
        c.lambda = 0.39;
    } else if (name == "aaet-nearby") {
        c.learning_rate = 2.1e-5;
        c.lambda = 0.079;
    } else if (name == "aaet-distant") {
        c.learning_rate = 5.9e-5;
        c.lambda = 1.2e-4;
    } else if (name == "aaet-repr-nearby") {
        c.learning_rate = 1.7e-5;
        c.lambda = 4e-4;
    } else if (name == "aaet-repr-distant") {
        c.learning_rate = 9.7e-5;
        c.lambda = 0.084;
    } else if (name == "aaet-prag-nearby") {
        c.learning_rate = 4.4e-5;
        c.lambda = 2.7e-4;
    } else if (name == "aaet-prag-distant") {
        c.learning_rate = 8.5e-5;
        c.lambda = 2.8e-5;
    } else if (name == "aast-proj") {
        c.learning_rate = 1e-4;
        c.lambda = 7.9e-4;
        c.length_cutoff = 20;
        c.projective_mode = true;
    } else if (name == "aaet-prag-proj") {
        c.learning_rate = 9.4e-5;
        c.lambda = 2.4e-4;
        c.length_cutoff = 20;
        c.projective_mode = true;
    } else {
        std::string known;
        for (const auto& n : profile_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown profile '" + name + "' (known: " + known + ")");
    }
    return c;
}

namespace {

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(size_t dim) : m(dim, 0.0), v(dim, 0.0) {}
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// One fused pass: mean data gradient + full-strength L2 pull, then the
// parameter update. Returns ||theta - theta0||^2 before the update.
double update_table(std::vector<double>& theta, const std::vector<double>& theta0,
                    const std::vector<double>& grad_sum, double inv_batch, double lambda,
                    const TrainConfig& cfg, AdamState& adam, int step) {
    const double bc1 = 1.0 - std::pow(kBeta1, step);
    const double bc2 = 1.0 - std::pow(kBeta2, step);
    double sq = 0.0;
    for (size_t i = 0; i < theta.size(); ++i) {
        const double d = theta[i] - theta0[i];
        sq += d * d;
        const double g = grad_sum[i] * inv_batch + 2.0 * lambda * d;
        if (cfg.optimizer == Optimizer::Sgd) {
            theta[i] -= cfg.learning_rate * g;
        } else {
            adam.m[i] = kBeta1 * adam.m[i] + (1.0 - kBeta1) * g;
            adam.v[i] = kBeta2 * adam.v[i] + (1.0 - kBeta2) * g * g;
            theta[i] -= cfg.learning_rate * (adam.m[i] / bc1) / (std::sqrt(adam.v[i] / bc2) + kAdamEps);
        }
    }
    return sq;
}

double distance_to_init(const ParserModel& model) {
    double sq = 0.0;
    for (size_t i = 0; i < model.arc_weights.size(); ++i) {
        const double d = model.arc_weights[i] - model.arc_init[i];
        sq += d * d;
    }
    for (size_t i = 0; i < model.label_weights.size(); ++i) {
        const double d = model.label_weights[i] - model.label_init[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

// The shared optimization loop. Assumes theta0 is already snapshotted.
ParserModel run_training(ParserModel model, const std::vector<TrainInstance>& instances,
                         const TrainConfig& cfg, TrainLog* log) {
    cfg.validate();
    if (instances.empty()) throw ValidationError("no training sentences after filtering");

    AdamState adam_arc(model.space.dim()), adam_label(model.space.dim());
    std::vector<size_t> order(instances.size());
    std::iota(order.begin(), order.end(), static_cast<size_t>(0));
    Rng rng(cfg.seed);
    int step = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(order, rng);
        double epoch_loss = 0.0;
        size_t batches = 0;
        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(order.size(), begin + static_cast<size_t>(cfg.batch_size));
            std::vector<const TrainInstance*> batch;
            batch.reserve(end - begin);
            for (size_t i = begin; i < end; ++i) batch.push_back(&instances[order[i]]);

            const BatchGradient g =
                batch_gradient(model, batch, cfg.projective_mode, Exec::Parallel);
            const double inv = 1.0 / static_cast<double>(batch.size());
            ++step;
            double sq = update_table(model.arc_weights, model.arc_init, g.arc_grad, inv, cfg.lambda,
                                     cfg, adam_arc, step);
            sq += update_table(model.label_weights, model.label_init, g.label_grad, inv, cfg.lambda,
                               cfg, adam_label, step);
            epoch_loss += g.loss * inv + cfg.lambda * sq;
            ++batches;
        }
        if (log)
            log->epochs.push_back(
                {epoch, epoch_loss / static_cast<double>(batches), distance_to_init(model)});
    }
    return model;
}

std::vector<size_t> keep_by_cutoff(const std::vector<Sentence>& sentences, int cutoff) {
    std::vector<size_t> kept;
    for (size_t i = 0; i < sentences.size(); ++i)
        if (sentences[i].size() <= cutoff) kept.push_back(i);
    return kept;
}

std::vector<std::tuple<int, int, int>> label_arcs_of(const ParserModel& model,
                                                     const DependencyTree& tree) {
    std::vector<std::tuple<int, int, int>> arcs;
    if (!tree.labels) return arcs;
    for (int m = 1; m <= tree.size(); ++m) {
        const int li = model.label_index((*tree.labels)[static_cast<size_t>(m - 1)]);
        if (li >= 0) arcs.emplace_back(tree.head_of(m), m, li);
    }
    return arcs;
}

}  // namespace

ParserModel train_supervised(const ParserModel& model, const LabeledTreebank& data,
                             const TrainConfig& config, TrainLog* log) {
    config.validate();
    if (data.empty()) throw ValidationError("supervised training requires a non-empty treebank");

    ParserModel out = model;
    for (const auto& [sent, tree] : data) {
        if (!tree.labels) continue;
        for (const auto& label : *tree.labels)
            if (out.label_index(label) < 0) out.labels.push_back(label);
    }
    out.snapshot_init();

    std::vector<TrainInstance> instances;
    size_t discarded = 0;
    for (const auto& [sent, tree] : data) {
        if (sent.size() > config.length_cutoff) {
            ++discarded;
            continue;
        }
        TrainInstance inst;
        inst.feats = extract_sentence_features(out.space, sent);
        inst.gold_tree = tree;
        inst.label_arcs = label_arcs_of(out, tree);
        instances.push_back(std::move(inst));
    }
    if (log) {
        log->trained_sentences = instances.size();
        log->discarded_sentences = discarded;
    }
    return run_training(std::move(out), instances, config, log);
}

std::vector<DependencyTree> direct_transfer(const ParserModel& source,
                                            const std::vector<Sentence>& sentences,
                                            bool projective_mode) {
    return decode_corpus(source, sentences, projective_mode, true, Exec::Parallel);
}

ParserModel self_train(const ParserModel& source, const std::vector<Sentence>& sentences,
                       const TrainConfig& config, TrainLog* log) {
    config.validate();
    const std::vector<size_t> kept = keep_by_cutoff(sentences, config.length_cutoff);
    if (kept.empty()) throw ValidationError("no training sentences after the length cutoff");

    std::vector<Sentence> train;
    train.reserve(kept.size());
    for (size_t i : kept) train.push_back(sentences[i]);

    // Pseudo-gold parses, fixed before epoch 1.
    const std::vector<DependencyTree> pseudo =
        decode_corpus(source, train, config.projective_mode, true, Exec::Parallel);

    ParserModel out = source;
    out.snapshot_init();

    std::vector<TrainInstance> instances;
    instances.reserve(train.size());
    for (size_t i = 0; i < train.size(); ++i) {
        TrainInstance inst;
        inst.feats = extract_sentence_features(out.space, train[i]);
        inst.gold_tree = pseudo[i];
        inst.label_arcs = label_arcs_of(out, pseudo[i]);
        instances.push_back(std::move(inst));
    }
    if (log) {
        log->trained_sentences = instances.size();
        log->discarded_sentences = sentences.size() - kept.size();
    }
    return run_training(std::move(out), instances, config, log);
}

ParserModel ambiguity_train_with_sets(const ParserModel& main_source,
                                      const std::vector<Sentence>& sentences,
                                      const std::vector<std::vector<AmbiguousArcSet>>& extra_sets,
                                      const TrainConfig& config, TrainLog* log) {
    config.validate();
    for (const auto& sets : extra_sets)
        if (sets.size() != sentences.size())
            throw ValidationError("extra arc-set list does not align with the sentence list (" +
                                  std::to_string(sets.size()) + " vs " +
                                  std::to_string(sentences.size()) + ")");

    const std::vector<size_t> kept = keep_by_cutoff(sentences, config.length_cutoff);
    if (kept.empty()) throw ValidationError("no training sentences after the length cutoff");

    std::vector<Sentence> train;
    train.reserve(kept.size());
    for (size_t i : kept) train.push_back(sentences[i]);

    const AmbiguityConfig amb{config.sigma, true};
    const std::vector<SourceInference> main_inf =
        infer_corpus(main_source, train, amb, config.projective_mode, Exec::Parallel);

    ParserModel out = main_source;
    out.snapshot_init();

    std::vector<TrainInstance> instances;
    instances.reserve(train.size());
    for (size_t k = 0; k < train.size(); ++k) {
        const size_t orig = kept[k];
        std::vector<AmbiguousArcSet> sets;
        sets.push_back(main_inf[k].arc_set);
        for (const auto& per_source : extra_sets) {
            const AmbiguousArcSet& s = per_source[orig];
            if (s.sentence_length() != train[k].size())
                throw ValidationError("arc set length mismatch for sentence '" + train[k].id + "'");
            sets.push_back(s);
        }
        TrainInstance inst;
        inst.feats = extract_sentence_features(out.space, train[k]);
        inst.arc_set = union_arc_sets(sets);
        inst.label_arcs = label_arcs_of(out, main_inf[k].one_best);
        instances.push_back(std::move(inst));
    }
    if (log) {
        log->trained_sentences = instances.size();
        log->discarded_sentences = sentences.size() - kept.size();
    }
    return run_training(std::move(out), instances, config, log);
}

ParserModel ambiguity_self_train(const ParserModel& source, const std::vector<Sentence>& sentences,
                                 const TrainConfig& config, TrainLog* log) {
    return ambiguity_train_with_sets(source, sentences, {}, config, log);
}

ParserModel ensemble_transfer(const SourceBundle& sources, const std::vector<Sentence>& sentences,
                              const TrainConfig& config, TrainLog* log) {
    sources.validate();
    config.validate();
    const AmbiguityConfig amb{config.sigma, true};

    std::vector<std::vector<AmbiguousArcSet>> extra_sets;
    for (size_t k = 0; k < sources.sources.size(); ++k) {
        if (k == sources.main_index) continue;  // the main source is inferred inside
        const std::vector<SourceInference> inf = infer_corpus(
            sources.sources[k].first, sentences, amb, config.projective_mode, Exec::Parallel);
        std::vector<AmbiguousArcSet> sets;
        sets.reserve(inf.size());
        for (const auto& si : inf) sets.push_back(si.arc_set);
        extra_sets.push_back(std::move(sets));
    }
    return ambiguity_train_with_sets(sources.sources[sources.main_index].first, sentences,
                                     extra_sets, config, log);
}

std::vector<size_t> sample_indices(size_t n, size_t count, uint64_t seed) {
    if (count > n)
        throw ConfigError("sample size " + std::to_string(count) + " exceeds data size " +
                          std::to_string(n));
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), static_cast<size_t>(0));
    Rng rng(seed);
    shuffle(idx, rng);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<std::vector<size_t>> partition_indices(size_t n, int parts, uint64_t seed) {
    if (parts < 1) throw ConfigError("parts must be >= 1");
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), static_cast<size_t>(0));
    Rng rng(seed);
    shuffle(idx, rng);
    std::vector<std::vector<size_t>> out(static_cast<size_t>(parts));
    const size_t base = n / static_cast<size_t>(parts);
    const size_t extra = n % static_cast<size_t>(parts);
    size_t pos = 0;
    for (size_t p = 0; p < static_cast<size_t>(parts); ++p) {
        const size_t len = base + (p < extra ? 1 : 0);
        out[p].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                      idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
        std::sort(out[p].begin(), out[p].end());
        pos += len;
    }
    return out;
}

}  // namespace depxfer
