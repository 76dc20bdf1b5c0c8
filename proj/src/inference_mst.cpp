#include <algorithm>
#include <cmath>
#include <vector>

#include "depxfer/inference.hpp"

namespace depxfer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Dense arc weights over the nodes of the current contraction level;
// node 0 is the root. kNegInf marks a missing arc.
struct Graph {
    int n;
    std::vector<double> w;

    explicit Graph(int n_) : n(n_), w(static_cast<size_t>(n_) * static_cast<size_t>(n_), kNegInf) {}
    double get(int h, int m) const { return w[static_cast<size_t>(h) * static_cast<size_t>(n) + static_cast<size_t>(m)]; }
    void set(int h, int m, double v) { w[static_cast<size_t>(h) * static_cast<size_t>(n) + static_cast<size_t>(m)] = v; }
};

// Chu-Liu/Edmonds by recursive cycle contraction. Returns the chosen head of
// every non-root node of g. Greedy argmaxes iterate heads in ascending order
// with strict improvement, so ties go to the lower head.
std::vector<int> best_arborescence(const Graph& g) {
    const int n = g.n;
    std::vector<int> best_head(static_cast<size_t>(n), -1);
    for (int m = 1; m < n; ++m) {
        double best = kNegInf;
        for (int h = 0; h < n; ++h) {
            if (h == m) continue;
            const double v = g.get(h, m);
            if (v > best) {
                best = v;
                best_head[static_cast<size_t>(m)] = h;
            }
        }
        if (best_head[static_cast<size_t>(m)] < 0)
            throw EmptyChartError("node has no allowed head during spanning-tree search");
    }

    std::vector<int> color(static_cast<size_t>(n), 0);  // 0 unseen, 1 on path, 2 done
    color[0] = 2;
    std::vector<int> cycle;
    for (int start = 1; start < n && cycle.empty(); ++start) {
        if (color[static_cast<size_t>(start)] != 0) continue;
        int cur = start;
        std::vector<int> path;
        while (color[static_cast<size_t>(cur)] == 0) {
            color[static_cast<size_t>(cur)] = 1;
            path.push_back(cur);
            cur = best_head[static_cast<size_t>(cur)];
        }
        if (color[static_cast<size_t>(cur)] == 1) {
            auto it = std::find(path.begin(), path.end(), cur);
            cycle.assign(it, path.end());
        }
        for (int v : path) color[static_cast<size_t>(v)] = 2;
    }
    if (cycle.empty()) return best_head;

    std::vector<bool> in_cycle(static_cast<size_t>(n), false);
    for (int v : cycle) in_cycle[static_cast<size_t>(v)] = true;

    std::vector<int> new_id(static_cast<size_t>(n), -1);
    int next = 0;
    for (int v = 0; v < n; ++v)
        if (!in_cycle[static_cast<size_t>(v)]) new_id[static_cast<size_t>(v)] = next++;
    const int super = next;
    const int cn = next + 1;

    // Each contracted arc remembers which arc of the current level it stands
    // for, so the recursion's choices can be expanded here.
    Graph cg(cn);
    std::vector<std::pair<int, int>> parent_arc(static_cast<size_t>(cn) * static_cast<size_t>(cn), {-1, -1});
    auto arc_at = [&](int h, int m) -> std::pair<int, int>& {
        return parent_arc[static_cast<size_t>(h) * static_cast<size_t>(cn) + static_cast<size_t>(m)];
    };

    for (int h = 0; h < n; ++h) {
        for (int m = 1; m < n; ++m) {
            if (h == m) continue;
            const double v = g.get(h, m);
            if (v == kNegInf) continue;
            const bool hc = in_cycle[static_cast<size_t>(h)];
            const bool mc = in_cycle[static_cast<size_t>(m)];
            if (hc && mc) continue;
            if (!hc && !mc) {
                const int nh = new_id[static_cast<size_t>(h)], nm = new_id[static_cast<size_t>(m)];
                if (v > cg.get(nh, nm)) {
                    cg.set(nh, nm, v);
                    arc_at(nh, nm) = {h, m};
                }
            } else if (!hc) {
                // Entering arc: its weight swaps out the cycle's arc into m.
                const int nh = new_id[static_cast<size_t>(h)];
                const double gain = v - g.get(best_head[static_cast<size_t>(m)], m);
                if (gain > cg.get(nh, super)) {
                    cg.set(nh, super, gain);
                    arc_at(nh, super) = {h, m};
                }
            } else {
                const int nm = new_id[static_cast<size_t>(m)];
                if (v > cg.get(super, nm)) {
                    cg.set(super, nm, v);
                    arc_at(super, nm) = {h, m};
                }
            }
        }
    }

    const std::vector<int> sub = best_arborescence(cg);

    std::vector<int> result(static_cast<size_t>(n), -1);
    for (int nm = 1; nm < cn; ++nm) {
        const auto& [h, m] = arc_at(sub[static_cast<size_t>(nm)], nm);
        result[static_cast<size_t>(m)] = h;
    }
    // The entering arc displaced exactly one cycle arc; the rest stay.
    for (int v : cycle)
        if (result[static_cast<size_t>(v)] < 0) result[static_cast<size_t>(v)] = best_head[static_cast<size_t>(v)];
    return result;
}

DependencyTree run_single(const ArcScoreMatrix& scores, int forced_root) {
    const int t = scores.sentence_length();
    Graph g(t + 1);
    for (int m = 1; m <= t; ++m) {
        for (int h = 0; h <= t; ++h) {
            if (h == m || scores.is_masked(h, m)) continue;
            if (h == 0 && forced_root > 0 && m != forced_root) continue;
            g.set(h, m, scores(h, m));
        }
    }
    const std::vector<int> parents = best_arborescence(g);
    std::vector<int> heads(static_cast<size_t>(t));
    for (int m = 1; m <= t; ++m) heads[static_cast<size_t>(m - 1)] = parents[static_cast<size_t>(m)];
    return DependencyTree{std::move(heads), std::nullopt};
}

}  // namespace

DependencyTree decode_mst(const ArcScoreMatrix& scores) {
    const int t = scores.sentence_length();

    DependencyTree unconstrained = run_single(scores, 0);
    int roots = 0;
    for (int m = 1; m <= t; ++m)
        if (unconstrained.head_of(m) == 0) ++roots;
    if (roots == 1) {
        validate_tree(unconstrained);
        return unconstrained;
    }

    // The unconstrained optimum used several root arcs; the single-root
    // optimum is found by forcing each candidate root in turn.
    double best_score = kNegInf;
    DependencyTree best;
    for (int r = 1; r <= t; ++r) {
        if (scores.is_masked(0, r)) continue;
        DependencyTree candidate;
        try {
            candidate = run_single(scores, r);
        } catch (const EmptyChartError&) {
            continue;
        }
        const double s = scores.tree_score(candidate);
        if (s > best_score) {
            best_score = s;
            best = std::move(candidate);
        }
    }
    if (best.size() == 0)
        throw EmptyChartError("no single-root spanning tree is feasible (sentence length " +
                              std::to_string(t) + ")");
    validate_tree(best);
    return best;
}

}  // namespace depxfer
