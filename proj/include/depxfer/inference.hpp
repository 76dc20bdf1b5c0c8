#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "depxfer/error.hpp"
#include "depxfer/treebank.hpp"

namespace depxfer {

// Log-domain arc scores over head h in 0..t, dependent m in 1..t.
// Masked entries (h == m, forbidden arcs) hold kMaskedScore.
class ArcScoreMatrix {
  public:
    static constexpr double kMaskedScore = -std::numeric_limits<double>::infinity();

    ArcScoreMatrix() = default;
    explicit ArcScoreMatrix(int t)
        : t_(t), data_(static_cast<size_t>(t + 1) * static_cast<size_t>(t + 1), kMaskedScore) {}

    int sentence_length() const { return t_; }

    double operator()(int h, int m) const { return data_[idx(h, m)]; }
    double& operator()(int h, int m) { return data_[idx(h, m)]; }

    bool is_masked(int h, int m) const { return data_[idx(h, m)] == kMaskedScore; }
    void mask(int h, int m) { data_[idx(h, m)] = kMaskedScore; }
    void fill(double value) { data_.assign(data_.size(), value); }

    // Sum of arc scores of a tree; kMaskedScore if any arc is masked.
    double tree_score(const DependencyTree& tree) const;

  private:
    size_t idx(int h, int m) const {
        return static_cast<size_t>(h) * static_cast<size_t>(t_ + 1) + static_cast<size_t>(m);
    }

    int t_ = 0;
    std::vector<double> data_;
};

// Same shape as ArcScoreMatrix; entry (h,m) is P(arc (h,m) in y | x).
// Masked arcs carry exactly 0; each dependent's column sums to 1.
using ArcMarginals = ArcScoreMatrix;

// ----- Non-projective inference (matrix-tree, root-constrained Laplacian) --

double log_partition_nonprojective(const ArcScoreMatrix& scores);
ArcMarginals arc_marginals_nonprojective(const ArcScoreMatrix& scores);

// Computes both in one factorization.
struct InferenceResult {
    double log_partition;
    ArcMarginals marginals;
};
InferenceResult infer_nonprojective(const ArcScoreMatrix& scores);

// ----- Projective inference (inside / inside-outside over Eisner spans) ----

double log_partition_projective(const ArcScoreMatrix& scores);
ArcMarginals arc_marginals_projective(const ArcScoreMatrix& scores);
InferenceResult infer_projective(const ArcScoreMatrix& scores);

inline InferenceResult infer(const ArcScoreMatrix& scores, bool projective) {
    return projective ? infer_projective(scores) : infer_nonprojective(scores);
}
inline double log_partition(const ArcScoreMatrix& scores, bool projective) {
    return projective ? log_partition_projective(scores) : log_partition_nonprojective(scores);
}

// ----- Decoding -------------------------------------------------------------

// Maximum-scoring single-root spanning tree (Chu-Liu/Edmonds with a root
// incorporation step). Ties broken deterministically, lower head first.
DependencyTree decode_mst(const ArcScoreMatrix& scores);

// Maximum-scoring projective tree (Eisner chart, same tie-break rule in the
// backpointers).
DependencyTree decode_projective(const ArcScoreMatrix& scores);

inline DependencyTree decode(const ArcScoreMatrix& scores, bool projective) {
    return projective ? decode_projective(scores) : decode_mst(scores);
}

// ----- Brute-force oracle ---------------------------------------------------

// Mask for enumerate_trees: allowed(h,m) for h in 0..t, m in 1..t.
struct ArcMask {
    int t = 0;
    std::vector<bool> allowed;  // (t+1) x (t+1), row h, column m

    explicit ArcMask(int t_, bool allow_all = true)
        : t(t_), allowed(static_cast<size_t>(t_ + 1) * static_cast<size_t>(t_ + 1), allow_all) {
        for (int m = 1; m <= t; ++m) set(m, m, false);
    }
    bool get(int h, int m) const {
        return allowed[static_cast<size_t>(h) * static_cast<size_t>(t + 1) + static_cast<size_t>(m)];
    }
    void set(int h, int m, bool v) {
        allowed[static_cast<size_t>(h) * static_cast<size_t>(t + 1) + static_cast<size_t>(m)] = v;
    }
};

// All single-root trees over t tokens, each exactly once; t <= 8.
std::vector<DependencyTree> enumerate_trees(int t, bool projective_only = false,
                                            const std::optional<ArcMask>& mask = std::nullopt);

}  // namespace depxfer
