#include "depxfer/batch.hpp"

#include <cmath>

namespace depxfer {

namespace {

DependencyTree decode_one(const ParserModel& model, const Sentence& sentence, bool projective,
                          bool with_labels) {
    const SentenceFeatures feats = extract_sentence_features(model.space, sentence);
    const ArcScoreMatrix scores = score_arcs(model, feats);
    DependencyTree tree = decode(scores, projective);
    if (with_labels && !model.labels.empty()) {
        std::vector<std::string> labels;
        labels.reserve(static_cast<size_t>(tree.size()));
        for (int m = 1; m <= tree.size(); ++m) {
            const int li = predict_label(model, feats.arc(tree.head_of(m), m));
            labels.push_back(model.labels[static_cast<size_t>(li)]);
        }
        tree.labels = std::move(labels);
    }
    return tree;
}

SourceInference infer_one(const ParserModel& model, const Sentence& sentence,
                          const AmbiguityConfig& config, bool projective) {
    const SentenceFeatures feats = extract_sentence_features(model.space, sentence);
    const ArcScoreMatrix scores = score_arcs(model, feats);
    const ArcMarginals marginals = infer(scores, projective).marginals;
    DependencyTree one_best = decode(scores, projective);
    if (!model.labels.empty()) {
        std::vector<std::string> labels;
        for (int m = 1; m <= one_best.size(); ++m) {
            const int li = predict_label(model, feats.arc(one_best.head_of(m), m));
            labels.push_back(model.labels[static_cast<size_t>(li)]);
        }
        one_best.labels = std::move(labels);
    }
    AmbiguousArcSet arc_set = build_arc_set(marginals, one_best, config);
    return {std::move(arc_set), std::move(one_best)};
}

}  // namespace

std::vector<DependencyTree> decode_corpus(const ParserModel& model,
                                          const std::vector<Sentence>& sentences, bool projective,
                                          bool with_labels, Exec exec) {
    const int n = static_cast<int>(sentences.size());
    std::vector<DependencyTree> out(static_cast<size_t>(n));
    if (exec == Exec::Serial) {
        for (int i = 0; i < n; ++i)
            out[static_cast<size_t>(i)] = decode_one(model, sentences[static_cast<size_t>(i)], projective, with_labels);
        return out;
    }
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = decode_one(model, sentences[static_cast<size_t>(i)], projective, with_labels);
    return out;
}

std::vector<SourceInference> infer_corpus(const ParserModel& model,
                                          const std::vector<Sentence>& sentences,
                                          const AmbiguityConfig& config, bool projective, Exec exec) {
    config.validate();
    const int n = static_cast<int>(sentences.size());
    std::vector<SourceInference> out(static_cast<size_t>(n));
    if (exec == Exec::Serial) {
        for (int i = 0; i < n; ++i)
            out[static_cast<size_t>(i)] = infer_one(model, sentences[static_cast<size_t>(i)], config, projective);
        return out;
    }
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = infer_one(model, sentences[static_cast<size_t>(i)], config, projective);
    return out;
}

SentenceGradient sentence_gradient(const ParserModel& model, const TrainInstance& instance,
                                   bool projective) {
    const int t = instance.feats.t;
    SentenceGradient out;
    const ArcScoreMatrix scores = score_arcs(model, instance.feats);

    // Tree-structured term: d loss / d s(h,m) per arc, then through features.
    ArcScoreMatrix coef(t);
    coef.fill(0.0);
    if (instance.arc_set) {
        const InferenceResult full = infer(scores, projective);
        const ArcScoreMatrix constrained = constrain_scores(scores, *instance.arc_set);
        const InferenceResult inside = infer(constrained, projective);
        out.loss += full.log_partition - inside.log_partition;
        for (int m = 1; m <= t; ++m)
            for (int h = 0; h <= t; ++h)
                if (h != m) coef(h, m) = full.marginals(h, m) - inside.marginals(h, m);
    } else if (instance.gold_tree) {
        const InferenceResult full = infer(scores, projective);
        const double gold_score = scores.tree_score(*instance.gold_tree);
        out.loss += full.log_partition - gold_score;
        for (int m = 1; m <= t; ++m)
            for (int h = 0; h <= t; ++h)
                if (h != m) coef(h, m) = full.marginals(h, m);
        for (int m = 1; m <= t; ++m) coef(instance.gold_tree->head_of(m), m) -= 1.0;
    }

    for (int m = 1; m <= t; ++m) {
        for (int h = 0; h <= t; ++h) {
            if (h == m) continue;
            const double c = coef(h, m);
            if (c == 0.0) continue;
            for (uint32_t id : instance.feats.arc(h, m).ids) out.arc_updates.emplace_back(id, c);
        }
    }

    // Per-arc label cross-entropy.
    if (!instance.label_arcs.empty()) {
        const int n_labels = static_cast<int>(model.labels.size());
        std::vector<double> z(static_cast<size_t>(n_labels));
        for (const auto& [h, m, gold] : instance.label_arcs) {
            const FeatureVector& fv = instance.feats.arc(h, m);
            double zmax = -std::numeric_limits<double>::infinity();
            for (int l = 0; l < n_labels; ++l) {
                z[static_cast<size_t>(l)] = dot_label(model, fv, l);
                if (z[static_cast<size_t>(l)] > zmax) zmax = z[static_cast<size_t>(l)];
            }
            double norm = 0.0;
            for (int l = 0; l < n_labels; ++l) norm += std::exp(z[static_cast<size_t>(l)] - zmax);
            const double log_norm = zmax + std::log(norm);
            out.loss += log_norm - z[static_cast<size_t>(gold)];
            for (int l = 0; l < n_labels; ++l) {
                const double p = std::exp(z[static_cast<size_t>(l)] - log_norm);
                const double g = p - (l == gold ? 1.0 : 0.0);
                if (g == 0.0) continue;
                for (uint32_t id : fv.ids)
                    out.label_updates.emplace_back(label_feature_id(model.space, id, l), g);
            }
        }
    }
    return out;
}

BatchGradient batch_gradient(const ParserModel& model,
                             const std::vector<const TrainInstance*>& batch, bool projective,
                             Exec exec) {
    const int n = static_cast<int>(batch.size());
    std::vector<SentenceGradient> partials(static_cast<size_t>(n));
    if (exec == Exec::Serial) {
        for (int i = 0; i < n; ++i)
            partials[static_cast<size_t>(i)] = sentence_gradient(model, *batch[static_cast<size_t>(i)], projective);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i)
            partials[static_cast<size_t>(i)] = sentence_gradient(model, *batch[static_cast<size_t>(i)], projective);
    }

    // Serial section: fixed accumulation order keeps results independent of
    // the thread count.
    BatchGradient total;
    total.arc_grad.assign(model.space.dim(), 0.0);
    total.label_grad.assign(model.space.dim(), 0.0);
    for (const auto& part : partials) {
        total.loss += part.loss;
        for (const auto& [id, v] : part.arc_updates) total.arc_grad[id] += v;
        for (const auto& [id, v] : part.label_updates) total.label_grad[id] += v;
    }
    return total;
}

}  // namespace depxfer
