#include "depxfer/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace depxfer {

namespace {

const std::string kRootForm = "<ROOT>";
const std::string kRootUpos = "<ROOT>";

// FNV-1a; fixed constants keep ids identical across runs and platforms.
uint64_t fnv1a(const std::string& s, uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

uint32_t reduce(const FeatureSpace& space, uint64_t h) {
    // Fold the high bits in so low-entropy hashes still spread.
    return static_cast<uint32_t>((h ^ (h >> 32)) & (space.dim() - 1));
}

std::string distance_bin(int h, int m) {
    const int d = m - h;
    const int a = d < 0 ? -d : d;
    const char* bin = a >= 7 ? "7+" : (a >= 5 ? "5-6" : (a == 4 ? "4" : (a == 3 ? "3" : (a == 2 ? "2" : "1"))));
    return (d > 0 ? std::string("R") : std::string("L")) + bin;
}

}  // namespace

FeatureVector extract_features(const FeatureSpace& space, const Sentence& sentence, int h, int m) {
    const int t = sentence.size();
    if (h < 0 || h > t || m < 1 || m > t || h == m)
        throw ValidationError("arc (" + std::to_string(h) + "," + std::to_string(m) +
                              ") out of range for sentence of length " + std::to_string(t));
    const std::string& hform = h == 0 ? kRootForm : sentence.token(h).form;
    const std::string& hupos = h == 0 ? kRootUpos : sentence.token(h).upos;
    const std::string& dform = sentence.token(m).form;
    const std::string& dupos = sentence.token(m).upos;
    const std::string dist = distance_bin(h, m);
    const char dir = h < m ? 'R' : 'L';

    FeatureVector fv;
    fv.ids.reserve(10);
    auto add = [&](const std::string& key) { fv.ids.push_back(reduce(space, fnv1a(key))); };
    add("B");
    add("HU=" + hupos);
    add("DU=" + dupos);
    add("UP=" + hupos + "|" + dupos);
    add("DST=" + dist);
    add("UPD=" + hupos + "|" + dupos + "|" + dir);
    add("HF=" + hform);
    add("DF=" + dform);
    add("HFDU=" + hform + "|" + dupos);
    add("DFHU=" + dform + "|" + hupos);
    return fv;
}

SentenceFeatures extract_sentence_features(const FeatureSpace& space, const Sentence& sentence) {
    const int t = sentence.size();
    SentenceFeatures feats;
    feats.t = t;
    feats.per_arc.resize(static_cast<size_t>(t + 1) * static_cast<size_t>(t + 1));
    for (int m = 1; m <= t; ++m)
        for (int h = 0; h <= t; ++h)
            if (h != m)
                feats.per_arc[static_cast<size_t>(h) * static_cast<size_t>(t + 1) + static_cast<size_t>(m)] =
                    extract_features(space, sentence, h, m);
    return feats;
}

ParserModel ParserModel::zeros(const FeatureSpace& space, std::vector<std::string> labels) {
    space.validate();
    ParserModel model;
    model.space = space;
    model.labels = std::move(labels);
    model.arc_weights.assign(space.dim(), 0.0);
    model.label_weights.assign(space.dim(), 0.0);
    model.arc_init = model.arc_weights;
    model.label_init = model.label_weights;
    return model;
}

void ParserModel::snapshot_init() {
    arc_init = arc_weights;
    label_init = label_weights;
}

int ParserModel::label_index(const std::string& label) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    return -1;
}

uint32_t label_feature_id(const FeatureSpace& space, uint32_t arc_feature_id, int label_index) {
    uint64_t x = (static_cast<uint64_t>(arc_feature_id) << 20) ^ static_cast<uint64_t>(label_index + 1);
    x *= 0x9E3779B97F4A7C15ull;
    x ^= x >> 29;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 32;
    return static_cast<uint32_t>(x & (space.dim() - 1));
}

double dot_arc(const ParserModel& model, const FeatureVector& fv) {
    double s = 0.0;
    for (uint32_t id : fv.ids) s += model.arc_weights[id];
    return s;
}

double dot_label(const ParserModel& model, const FeatureVector& fv, int label_index) {
    double s = 0.0;
    for (uint32_t id : fv.ids) s += model.label_weights[label_feature_id(model.space, id, label_index)];
    return s;
}

ArcScoreMatrix score_arcs(const ParserModel& model, const SentenceFeatures& feats) {
    const int t = feats.t;
    ArcScoreMatrix scores(t);
    for (int m = 1; m <= t; ++m)
        for (int h = 0; h <= t; ++h)
            if (h != m) scores(h, m) = dot_arc(model, feats.arc(h, m));
    return scores;
}

ArcScoreMatrix score_arcs(const ParserModel& model, const Sentence& sentence) {
    return score_arcs(model, extract_sentence_features(model.space, sentence));
}

std::vector<std::pair<std::string, double>> score_labels(const ParserModel& model,
                                                         const Sentence& sentence, int h, int m) {
    if (model.labels.empty()) throw ValidationError("label inventory is empty");
    const FeatureVector fv = extract_features(model.space, sentence, h, m);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(model.labels.size());
    for (size_t i = 0; i < model.labels.size(); ++i)
        out.emplace_back(model.labels[i], dot_label(model, fv, static_cast<int>(i)));
    return out;
}

int predict_label(const ParserModel& model, const FeatureVector& fv) {
    if (model.labels.empty()) throw ValidationError("label inventory is empty");
    int best = 0;
    double best_score = dot_label(model, fv, 0);
    for (int i = 1; i < static_cast<int>(model.labels.size()); ++i) {
        const double s = dot_label(model, fv, i);
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return best;
}

double l2_to_init(const ParserModel& model, double lambda, std::vector<double>* arc_grad,
                  std::vector<double>* label_grad) {
    if (lambda < 0.0) throw ConfigError("l2 coefficient must be nonnegative");
    double sq = 0.0;
    for (size_t i = 0; i < model.arc_weights.size(); ++i) {
        const double d = model.arc_weights[i] - model.arc_init[i];
        sq += d * d;
        if (arc_grad) (*arc_grad)[i] += 2.0 * lambda * d;
    }
    for (size_t i = 0; i < model.label_weights.size(); ++i) {
        const double d = model.label_weights[i] - model.label_init[i];
        sq += d * d;
        if (label_grad) (*label_grad)[i] += 2.0 * lambda * d;
    }
    return lambda * sq;
}

// ----- Serialization --------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'D', 'X', 'M', 'O', 'D', 'L', '0', '1'};

template <typename T>
void put(std::ostream& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    if (!in) throw ParseError("truncated model file");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put<uint32_t>(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    const uint32_t n = get<uint32_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw ParseError("truncated model file");
    return s;
}

void put_table(std::ostream& out, const std::vector<double>& theta, const std::vector<double>& init) {
    uint64_t count = 0;
    for (size_t i = 0; i < theta.size(); ++i)
        if (theta[i] != 0.0 || init[i] != 0.0) ++count;
    put<uint64_t>(out, count);
    for (size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] == 0.0 && init[i] == 0.0) continue;
        put<uint32_t>(out, static_cast<uint32_t>(i));
        put<double>(out, theta[i]);
        put<double>(out, init[i]);
    }
}

void get_table(std::istream& in, std::vector<double>& theta, std::vector<double>& init) {
    const uint64_t count = get<uint64_t>(in);
    for (uint64_t k = 0; k < count; ++k) {
        const uint32_t id = get<uint32_t>(in);
        if (id >= theta.size()) throw ParseError("model entry id out of range");
        theta[id] = get<double>(in);
        init[id] = get<double>(in);
    }
}

}  // namespace

void save_model(const ParserModel& model, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    put<uint32_t>(out, model.space.hash_bits);
    put<uint32_t>(out, static_cast<uint32_t>(model.labels.size()));
    for (const auto& label : model.labels) put_string(out, label);
    put_table(out, model.arc_weights, model.arc_init);
    put_table(out, model.label_weights, model.label_init);
    if (!out) throw IoError("model write failed");
}

void save_model_file(const ParserModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    save_model(model, out);
}

ParserModel load_model(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("not a model file (bad magic)");
    FeatureSpace space;
    space.hash_bits = get<uint32_t>(in);
    space.validate();
    const uint32_t n_labels = get<uint32_t>(in);
    std::vector<std::string> labels;
    labels.reserve(n_labels);
    for (uint32_t i = 0; i < n_labels; ++i) labels.push_back(get_string(in));
    ParserModel model = ParserModel::zeros(space, std::move(labels));
    get_table(in, model.arc_weights, model.arc_init);
    get_table(in, model.label_weights, model.label_init);
    return model;
}

ParserModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return load_model(in);
}

}  // namespace depxfer
