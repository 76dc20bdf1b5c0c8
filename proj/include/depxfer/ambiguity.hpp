#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "depxfer/inference.hpp"
#include "depxfer/treebank.hpp"

namespace depxfer {

struct AmbiguityConfig {
    double sigma = 0.95;        // cumulative-probability threshold
    bool include_one_best = true;

    void validate() const {
        if (!(sigma > 0.0 && sigma <= 1.0))
            throw ConfigError("sigma must lie in (0, 1], got " + std::to_string(sigma));
    }
};

// Per-dependent candidate head sets, stored as an allowed-arc matrix.
class AmbiguousArcSet {
  public:
    AmbiguousArcSet() = default;
    explicit AmbiguousArcSet(int t)
        : t_(t), allowed_(static_cast<size_t>(t + 1) * static_cast<size_t>(t + 1), false) {}

    int sentence_length() const { return t_; }
    bool allows(int h, int m) const { return allowed_[idx(h, m)]; }
    void allow(int h, int m) { allowed_[idx(h, m)] = true; }

    // Heads allowed for dependent m, ascending.
    std::vector<int> heads_of(int m) const;

    // True when every dependent has at least one allowed head.
    bool covers_all_dependents() const;

  private:
    size_t idx(int h, int m) const {
        return static_cast<size_t>(h) * static_cast<size_t>(t_ + 1) + static_cast<size_t>(m);
    }

    int t_ = 0;
    std::vector<bool> allowed_;
};

// Adds heads per dependent in decreasing marginal order until the running
// mass first reaches sigma (the crossing arc is included; ties go to the
// lower head), then adds the 1-best tree's arcs when configured.
AmbiguousArcSet build_arc_set(const ArcMarginals& marginals, const DependencyTree& one_best,
                              const AmbiguityConfig& config);

// Elementwise union; all sets must share the sentence length.
AmbiguousArcSet union_arc_sets(const std::vector<AmbiguousArcSet>& sets);

// Masks every score outside the arc set.
ArcScoreMatrix constrain_scores(const ArcScoreMatrix& scores, const AmbiguousArcSet& arc_set);

// ----- Text serialization ---------------------------------------------------
// One block per sentence:
//   sent <id> <t>
//   <m>: <h> <h> ...        (one line per dependent, heads ascending)
// separated by blank lines. This file is the only thing a training run needs
// from a source parser besides its 1-best parses.

void write_arc_sets(const std::vector<std::pair<std::string, AmbiguousArcSet>>& sets,
                    std::ostream& out);
void write_arc_sets_file(const std::vector<std::pair<std::string, AmbiguousArcSet>>& sets,
                         const std::string& path);
std::vector<std::pair<std::string, AmbiguousArcSet>> read_arc_sets(std::istream& in);
std::vector<std::pair<std::string, AmbiguousArcSet>> read_arc_sets_file(const std::string& path);

}  // namespace depxfer
