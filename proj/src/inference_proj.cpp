#include <cmath>
#include <vector>

#include "depxfer/inference.hpp"

namespace depxfer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// Square table over chart positions 1..t.
struct Table {
    int n;
    std::vector<double> v;
    Table(int t, double init) : n(t + 1), v(static_cast<size_t>(n) * static_cast<size_t>(n), init) {}
    double& operator()(int i, int j) { return v[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)]; }
    double operator()(int i, int j) const { return v[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)]; }
};

// First-order Eisner spans over words 1..t, sum-product in log domain.
// cmp_r(i,j): head i covers i..j; cmp_l(i,j): head j covers i..j;
// inc_r(i,j): arc i->j; inc_l(i,j): arc j->i; base(i,j): span mass shared
// by both incomplete items. ROOT attachment is a separate final step, which
// is what enforces the single-root convention.
struct InsideCharts {
    Table cmp_r, cmp_l, inc_r, inc_l, base;
    double log_z;

    explicit InsideCharts(int t)
        : cmp_r(t, kNegInf), cmp_l(t, kNegInf), inc_r(t, kNegInf), inc_l(t, kNegInf),
          base(t, kNegInf), log_z(kNegInf) {}
};

InsideCharts run_inside(const ArcScoreMatrix& scores) {
    const int t = scores.sentence_length();
    InsideCharts c(t);
    for (int i = 1; i <= t; ++i) {
        c.cmp_r(i, i) = 0.0;
        c.cmp_l(i, i) = 0.0;
    }
    for (int w = 1; w < t; ++w) {
        for (int i = 1; i + w <= t; ++i) {
            const int j = i + w;
            double base = kNegInf;
            for (int k = i; k < j; ++k) base = log_add(base, c.cmp_r(i, k) + c.cmp_l(k + 1, j));
            c.base(i, j) = base;
            c.inc_r(i, j) = base + scores(i, j);
            c.inc_l(i, j) = base + scores(j, i);
            double cr = kNegInf;
            for (int k = i + 1; k <= j; ++k) cr = log_add(cr, c.inc_r(i, k) + c.cmp_r(k, j));
            c.cmp_r(i, j) = cr;
            double cl = kNegInf;
            for (int k = i; k < j; ++k) cl = log_add(cl, c.cmp_l(i, k) + c.inc_l(k, j));
            c.cmp_l(i, j) = cl;
        }
    }
    double z = kNegInf;
    for (int r = 1; r <= t; ++r) z = log_add(z, scores(0, r) + c.cmp_l(1, r) + c.cmp_r(r, t));
    c.log_z = z;
    if (c.log_z == kNegInf)
        throw EmptyChartError("no projective single-root tree has nonzero mass (sentence length " +
                              std::to_string(t) + ")");
    if (!std::isfinite(c.log_z))
        throw NumericalError("non-finite projective tree sum at sentence length " + std::to_string(t));
    return c;
}

}  // namespace

double log_partition_projective(const ArcScoreMatrix& scores) {
    return run_inside(scores).log_z;
}

InferenceResult infer_projective(const ArcScoreMatrix& scores) {
    const int t = scores.sentence_length();
    const InsideCharts c = run_inside(scores);

    // Reverse adjoint sweep. bar(X) = d log Z / d X for the log-value of each
    // chart item; the bar of an arc score is its marginal.
    Table b_cmp_r(t, 0.0), b_cmp_l(t, 0.0), b_inc_r(t, 0.0), b_inc_l(t, 0.0);
    ArcMarginals marg(t);
    marg.fill(0.0);

    for (int r = 1; r <= t; ++r) {
        const double term = scores(0, r) + c.cmp_l(1, r) + c.cmp_r(r, t);
        if (term == kNegInf) continue;
        const double p = std::exp(term - c.log_z);
        marg(0, r) = p;
        b_cmp_l(1, r) += p;
        b_cmp_r(r, t) += p;
    }

    for (int w = t - 1; w >= 1; --w) {
        for (int i = 1; i + w <= t; ++i) {
            const int j = i + w;
            // Complete items feed same-width incomplete items, so they go first.
            const double bcr = b_cmp_r(i, j);
            if (bcr != 0.0 && c.cmp_r(i, j) != kNegInf) {
                for (int k = i + 1; k <= j; ++k) {
                    const double term = c.inc_r(i, k) + c.cmp_r(k, j);
                    if (term == kNegInf) continue;
                    const double share = bcr * std::exp(term - c.cmp_r(i, j));
                    b_inc_r(i, k) += share;
                    b_cmp_r(k, j) += share;
                }
            }
            const double bcl = b_cmp_l(i, j);
            if (bcl != 0.0 && c.cmp_l(i, j) != kNegInf) {
                for (int k = i; k < j; ++k) {
                    const double term = c.cmp_l(i, k) + c.inc_l(k, j);
                    if (term == kNegInf) continue;
                    const double share = bcl * std::exp(term - c.cmp_l(i, j));
                    b_cmp_l(i, k) += share;
                    b_inc_l(k, j) += share;
                }
            }
            const double bir = b_inc_r(i, j);
            const double bil = b_inc_l(i, j);
            if (!scores.is_masked(i, j)) marg(i, j) = std::min(1.0, std::max(0.0, bir));
            if (!scores.is_masked(j, i)) marg(j, i) = std::min(1.0, std::max(0.0, bil));
            const double bbase = bir + bil;
            if (bbase != 0.0 && c.base(i, j) != kNegInf) {
                for (int k = i; k < j; ++k) {
                    const double term = c.cmp_r(i, k) + c.cmp_l(k + 1, j);
                    if (term == kNegInf) continue;
                    const double share = bbase * std::exp(term - c.base(i, j));
                    b_cmp_r(i, k) += share;
                    b_cmp_l(k + 1, j) += share;
                }
            }
        }
    }
    return {c.log_z, std::move(marg)};
}

ArcMarginals arc_marginals_projective(const ArcScoreMatrix& scores) {
    return infer_projective(scores).marginals;
}

namespace {

struct ViterbiCharts {
    Table cmp_r, cmp_l, inc_r, inc_l;
    // Split backpointers; -1 means unreachable.
    std::vector<std::vector<int>> bp_cmp_r, bp_cmp_l, bp_inc;

    explicit ViterbiCharts(int t)
        : cmp_r(t, kNegInf), cmp_l(t, kNegInf), inc_r(t, kNegInf), inc_l(t, kNegInf),
          bp_cmp_r(static_cast<size_t>(t + 1), std::vector<int>(static_cast<size_t>(t + 1), -1)),
          bp_cmp_l(static_cast<size_t>(t + 1), std::vector<int>(static_cast<size_t>(t + 1), -1)),
          bp_inc(static_cast<size_t>(t + 1), std::vector<int>(static_cast<size_t>(t + 1), -1)) {}
};

void expand_cmp_r(const ViterbiCharts& c, int i, int j, std::vector<int>& heads);
void expand_cmp_l(const ViterbiCharts& c, int i, int j, std::vector<int>& heads);

void expand_inc_r(const ViterbiCharts& c, int i, int j, std::vector<int>& heads) {
    heads[static_cast<size_t>(j - 1)] = i;
    const int k = c.bp_inc[static_cast<size_t>(i)][static_cast<size_t>(j)];
    expand_cmp_r(c, i, k, heads);
    expand_cmp_l(c, k + 1, j, heads);
}

void expand_inc_l(const ViterbiCharts& c, int i, int j, std::vector<int>& heads) {
    heads[static_cast<size_t>(i - 1)] = j;
    const int k = c.bp_inc[static_cast<size_t>(i)][static_cast<size_t>(j)];
    expand_cmp_r(c, i, k, heads);
    expand_cmp_l(c, k + 1, j, heads);
}

void expand_cmp_r(const ViterbiCharts& c, int i, int j, std::vector<int>& heads) {
    if (i == j) return;
    const int k = c.bp_cmp_r[static_cast<size_t>(i)][static_cast<size_t>(j)];
    expand_inc_r(c, i, k, heads);
    expand_cmp_r(c, k, j, heads);
}

void expand_cmp_l(const ViterbiCharts& c, int i, int j, std::vector<int>& heads) {
    if (i == j) return;
    const int k = c.bp_cmp_l[static_cast<size_t>(i)][static_cast<size_t>(j)];
    expand_cmp_l(c, i, k, heads);
    expand_inc_l(c, k, j, heads);
}

}  // namespace

DependencyTree decode_projective(const ArcScoreMatrix& scores) {
    const int t = scores.sentence_length();
    ViterbiCharts c(t);
    for (int i = 1; i <= t; ++i) {
        c.cmp_r(i, i) = 0.0;
        c.cmp_l(i, i) = 0.0;
    }
    for (int w = 1; w < t; ++w) {
        for (int i = 1; i + w <= t; ++i) {
            const int j = i + w;
            double best_base = kNegInf;
            int best_k = -1;
            for (int k = i; k < j; ++k) {
                const double v = c.cmp_r(i, k) + c.cmp_l(k + 1, j);
                if (v > best_base) {
                    best_base = v;
                    best_k = k;
                }
            }
            c.inc_r(i, j) = best_base + scores(i, j);
            c.inc_l(i, j) = best_base + scores(j, i);
            c.bp_inc[static_cast<size_t>(i)][static_cast<size_t>(j)] = best_k;

            double best_cr = kNegInf;
            int best_cr_k = -1;
            for (int k = i + 1; k <= j; ++k) {
                const double v = c.inc_r(i, k) + c.cmp_r(k, j);
                if (v > best_cr) {
                    best_cr = v;
                    best_cr_k = k;
                }
            }
            c.cmp_r(i, j) = best_cr;
            c.bp_cmp_r[static_cast<size_t>(i)][static_cast<size_t>(j)] = best_cr_k;

            double best_cl = kNegInf;
            int best_cl_k = -1;
            for (int k = i; k < j; ++k) {
                const double v = c.cmp_l(i, k) + c.inc_l(k, j);
                if (v > best_cl) {
                    best_cl = v;
                    best_cl_k = k;
                }
            }
            c.cmp_l(i, j) = best_cl;
            c.bp_cmp_l[static_cast<size_t>(i)][static_cast<size_t>(j)] = best_cl_k;
        }
    }

    double best = kNegInf;
    int best_root = -1;
    for (int r = 1; r <= t; ++r) {
        const double v = scores(0, r) + c.cmp_l(1, r) + c.cmp_r(r, t);
        if (v > best) {
            best = v;
            best_root = r;
        }
    }
    if (best == kNegInf || best_root < 0)
        throw EmptyChartError("no projective single-root tree is feasible (sentence length " +
                              std::to_string(t) + ")");

    std::vector<int> heads(static_cast<size_t>(t), -1);
    heads[static_cast<size_t>(best_root - 1)] = 0;
    expand_cmp_l(c, 1, best_root, heads);
    expand_cmp_r(c, best_root, t, heads);
    DependencyTree tree{std::move(heads), std::nullopt};
    validate_tree(tree);
    return tree;
}

}  // namespace depxfer
