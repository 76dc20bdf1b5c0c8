#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "depxfer/inference.hpp"
#include "depxfer/treebank.hpp"

namespace depxfer {

// Hashed feature space shared by the arc and label scorers.
struct FeatureSpace {
    uint32_t hash_bits = 20;

    uint32_t dim() const { return 1u << hash_bits; }
    void validate() const {
        if (hash_bits < 8 || hash_bits > 28)
            throw ConfigError("hash_bits must lie in [8, 28], got " + std::to_string(hash_bits));
    }
};

// Indicator features of one arc; every id contributes value 1, repeats add.
struct FeatureVector {
    std::vector<uint32_t> ids;
};

// Templates: head/dependent upos, upos pair, signed binned distance,
// upos pair x direction, head/dependent form, form x opposite upos, bias.
// Position 0 uses a reserved ROOT form and upos.
FeatureVector extract_features(const FeatureSpace& space, const Sentence& sentence, int h, int m);

// All arcs of a sentence at once; arc (h,m) lives at index h*(t+1)+m.
struct SentenceFeatures {
    int t = 0;
    std::vector<FeatureVector> per_arc;

    const FeatureVector& arc(int h, int m) const {
        return per_arc[static_cast<size_t>(h) * static_cast<size_t>(t + 1) + static_cast<size_t>(m)];
    }
};
SentenceFeatures extract_sentence_features(const FeatureSpace& space, const Sentence& sentence);

// Linear arc scorer plus a per-label scorer over the same features.
// `*_init` hold the frozen fine-tuning start point theta0.
struct ParserModel {
    FeatureSpace space;
    std::vector<std::string> labels;  // inventory, first-seen order
    std::vector<double> arc_weights;
    std::vector<double> label_weights;
    std::vector<double> arc_init;
    std::vector<double> label_init;

    static ParserModel zeros(const FeatureSpace& space, std::vector<std::string> labels = {});

    // Copies theta into theta0; call once when fine-tuning starts.
    void snapshot_init();

    int label_index(const std::string& label) const;  // -1 when unknown
};

// Feature id of (arc feature, label) in the label table.
uint32_t label_feature_id(const FeatureSpace& space, uint32_t arc_feature_id, int label_index);

double dot_arc(const ParserModel& model, const FeatureVector& fv);
double dot_label(const ParserModel& model, const FeatureVector& fv, int label_index);

ArcScoreMatrix score_arcs(const ParserModel& model, const Sentence& sentence);
ArcScoreMatrix score_arcs(const ParserModel& model, const SentenceFeatures& feats);

// Scores for every label in inventory order.
std::vector<std::pair<std::string, double>> score_labels(const ParserModel& model,
                                                         const Sentence& sentence, int h, int m);
// Argmax label; first label wins ties.
int predict_label(const ParserModel& model, const FeatureVector& fv);

// Penalty lambda * ||theta - theta0||^2 over both tables. When gradient
// buffers are supplied (sized to dim()), adds 2*lambda*(theta - theta0).
double l2_to_init(const ParserModel& model, double lambda, std::vector<double>* arc_grad = nullptr,
                  std::vector<double>* label_grad = nullptr);

// Versioned binary serialization; entries where theta = theta0 = 0 are
// skipped, everything else round-trips exactly.
void save_model(const ParserModel& model, std::ostream& out);
void save_model_file(const ParserModel& model, const std::string& path);
ParserModel load_model(std::istream& in);
ParserModel load_model_file(const std::string& path);

}  // namespace depxfer
