#include <vector>

#include "depxfer/inference.hpp"

namespace depxfer {

namespace {

bool assignment_is_tree(const std::vector<int>& heads) {
    const int t = static_cast<int>(heads.size());
    int roots = 0;
    for (int m = 1; m <= t; ++m)
        if (heads[static_cast<size_t>(m - 1)] == 0) ++roots;
    if (roots != 1) return false;
    for (int m = 1; m <= t; ++m) {
        int cur = m, steps = 0;
        while (cur != 0) {
            cur = heads[static_cast<size_t>(cur - 1)];
            if (++steps > t) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<DependencyTree> enumerate_trees(int t, bool projective_only,
                                            const std::optional<ArcMask>& mask) {
    if (t < 1) throw ValidationError("enumerate_trees requires t >= 1");
    if (t > 8)
        throw ValidationError("enumerate_trees refuses t = " + std::to_string(t) +
                              " (exhaustive enumeration is capped at t = 8)");
    if (mask && mask->t != t) throw ValidationError("mask shape does not match t");

    std::vector<DependencyTree> result;
    std::vector<int> heads(static_cast<size_t>(t), 0);
    // Odometer over all head assignments, lexicographic in (heads[1..t]).
    while (true) {
        bool legal = true;
        for (int m = 1; m <= t && legal; ++m) {
            const int h = heads[static_cast<size_t>(m - 1)];
            if (h == m) legal = false;
            if (legal && mask && !mask->get(h, m)) legal = false;
        }
        if (legal && assignment_is_tree(heads)) {
            DependencyTree tree{heads, std::nullopt};
            if (!projective_only || is_projective(tree)) result.push_back(std::move(tree));
        }
        int pos = t - 1;
        while (pos >= 0 && heads[static_cast<size_t>(pos)] == t) {
            heads[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++heads[static_cast<size_t>(pos)];
    }
    return result;
}

}  // namespace depxfer
