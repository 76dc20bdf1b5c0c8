#include <Eigen/Dense>
#include <cmath>

#include "depxfer/inference.hpp"

namespace depxfer {

double ArcScoreMatrix::tree_score(const DependencyTree& tree) const {
    double sum = 0.0;
    for (int m = 1; m <= tree.size(); ++m) {
        const double s = (*this)(tree.head_of(m), m);
        if (s == kMaskedScore) return kMaskedScore;
        sum += s;
    }
    return sum;
}

namespace {

// Masked entries become a large negative finite value so that the rescaled
// weight underflows to exactly 0 without propagating NaNs.
constexpr double kMaskFloor = -1e9;

// Per-dependent max score, used to rescale each Laplacian column.
std::vector<double> column_maxima(const ArcScoreMatrix& scores) {
    const int t = scores.sentence_length();
    std::vector<double> cmax(static_cast<size_t>(t + 1), kMaskFloor);
    for (int m = 1; m <= t; ++m) {
        double best = kMaskFloor;
        bool any = false;
        for (int h = 0; h <= t; ++h) {
            if (h == m || scores.is_masked(h, m)) continue;
            any = true;
            if (scores(h, m) > best) best = scores(h, m);
        }
        if (!any)
            throw EmptyChartError("no allowed head for dependent " + std::to_string(m) +
                                  " (sentence length " + std::to_string(t) + ")");
        cmax[static_cast<size_t>(m)] = best;
    }
    return cmax;
}

double rescaled_weight(const ArcScoreMatrix& scores, const std::vector<double>& cmax, int h, int m) {
    double s = scores(h, m);
    if (s == ArcScoreMatrix::kMaskedScore) s = kMaskFloor;
    return std::exp(s - cmax[static_cast<size_t>(m)]);
}

// Root-constrained Laplacian of Koo et al.: L(m,m) = sum of weights into m,
// L(h,m) = -w(h,m) for words h != m, and the first row replaced by the root
// weights. det(L) is the rescaled partition over single-root trees.
Eigen::MatrixXd build_laplacian(const ArcScoreMatrix& scores, const std::vector<double>& cmax) {
    const int t = scores.sentence_length();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(t, t);
    for (int m = 1; m <= t; ++m) {
        double colsum = 0.0;
        for (int h = 1; h <= t; ++h) {
            if (h == m) continue;
            const double w = rescaled_weight(scores, cmax, h, m);
            colsum += w;
            lap(h - 1, m - 1) = -w;
        }
        lap(m - 1, m - 1) = colsum;
    }
    for (int m = 1; m <= t; ++m) lap(0, m - 1) = rescaled_weight(scores, cmax, 0, m);
    return lap;
}

struct Factorized {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    double log_det;  // log |det|, sign checked by caller via Z > 0
    double det_sign;
};

Factorized factorize(const Eigen::MatrixXd& lap) {
    Factorized f{Eigen::PartialPivLU<Eigen::MatrixXd>(lap), 0.0, 1.0};
    const auto& diag = f.lu.matrixLU().diagonal();
    double sign = static_cast<double>(f.lu.permutationP().determinant());
    double log_abs = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        const double d = diag(i);
        if (d == 0.0) {
            sign = 0.0;
            break;
        }
        if (d < 0.0) sign = -sign;
        log_abs += std::log(std::abs(d));
    }
    f.log_det = log_abs;
    f.det_sign = sign;
    return f;
}

void check_partition(const Factorized& f, int t) {
    if (f.det_sign <= 0.0)
        throw EmptyChartError("no single-root tree has nonzero mass under the mask (sentence length " +
                              std::to_string(t) + ")");
    if (!std::isfinite(f.log_det))
        throw NumericalError("non-finite tree-sum determinant at sentence length " + std::to_string(t));
}

}  // namespace

InferenceResult infer_nonprojective(const ArcScoreMatrix& scores) {
    const int t = scores.sentence_length();
    const std::vector<double> cmax = column_maxima(scores);
    const Eigen::MatrixXd lap = build_laplacian(scores, cmax);
    const Factorized f = factorize(lap);
    check_partition(f, t);

    double log_z = f.log_det;
    for (int m = 1; m <= t; ++m) log_z += cmax[static_cast<size_t>(m)];

    // B = L^{-1}; marginals follow from d log det / d s(h,m).
    const Eigen::MatrixXd inv = f.lu.solve(Eigen::MatrixXd::Identity(t, t));
    ArcMarginals marg(t);
    marg.fill(0.0);
    for (int m = 1; m <= t; ++m) {
        for (int h = 0; h <= t; ++h) {
            if (h == m) continue;
            if (scores.is_masked(h, m)) {
                marg(h, m) = 0.0;
                continue;
            }
            const double w = rescaled_weight(scores, cmax, h, m);
            double p;
            if (h == 0) {
                p = w * inv(m - 1, 0);
            } else {
                const double keep = (m == 1) ? 0.0 : inv(m - 1, m - 1);
                const double swap = (h == 1) ? 0.0 : inv(m - 1, h - 1);
                p = w * (keep - swap);
            }
            if (!std::isfinite(p))
                throw NumericalError("non-finite arc marginal at sentence length " + std::to_string(t));
            marg(h, m) = std::min(1.0, std::max(0.0, p));
        }
    }
    return {log_z, std::move(marg)};
}

double log_partition_nonprojective(const ArcScoreMatrix& scores) {
    const int t = scores.sentence_length();
    const std::vector<double> cmax = column_maxima(scores);
    const Factorized f = factorize(build_laplacian(scores, cmax));
    check_partition(f, t);
    double log_z = f.log_det;
    for (int m = 1; m <= t; ++m) log_z += cmax[static_cast<size_t>(m)];
    return log_z;
}

ArcMarginals arc_marginals_nonprojective(const ArcScoreMatrix& scores) {
    return infer_nonprojective(scores).marginals;
}

}  // namespace depxfer
