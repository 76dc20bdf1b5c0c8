#include "depxfer/ambiguity.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace depxfer {

std::vector<int> AmbiguousArcSet::heads_of(int m) const {
    std::vector<int> heads;
    for (int h = 0; h <= t_; ++h)
        if (h != m && allows(h, m)) heads.push_back(h);
    return heads;
}

bool AmbiguousArcSet::covers_all_dependents() const {
    for (int m = 1; m <= t_; ++m) {
        bool any = false;
        for (int h = 0; h <= t_ && !any; ++h)
            if (h != m && allows(h, m)) any = true;
        if (!any) return false;
    }
    return true;
}

AmbiguousArcSet build_arc_set(const ArcMarginals& marginals, const DependencyTree& one_best,
                              const AmbiguityConfig& config) {
    config.validate();
    const int t = marginals.sentence_length();
    if (one_best.size() != t)
        throw ValidationError("1-best tree length does not match marginal matrix");

    AmbiguousArcSet set(t);
    std::vector<std::pair<double, int>> ranked;
    for (int m = 1; m <= t; ++m) {
        ranked.clear();
        for (int h = 0; h <= t; ++h) {
            if (h == m || marginals.is_masked(h, m)) continue;
            ranked.emplace_back(marginals(h, m), h);
        }
        // Decreasing marginal, lower head first among ties.
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        double cum = 0.0;
        for (const auto& [p, h] : ranked) {
            set.allow(h, m);
            cum += p;
            if (cum >= config.sigma) break;
        }
    }
    if (config.include_one_best) {
        for (int m = 1; m <= t; ++m) set.allow(one_best.head_of(m), m);
    } else if (!set.covers_all_dependents()) {
        throw ValidationError("no spanning tree in arc set: some dependent has no allowed head");
    }
    return set;
}

AmbiguousArcSet union_arc_sets(const std::vector<AmbiguousArcSet>& sets) {
    if (sets.empty()) throw ValidationError("union over an empty list of arc sets");
    const int t = sets.front().sentence_length();
    AmbiguousArcSet merged(t);
    for (const auto& s : sets) {
        if (s.sentence_length() != t)
            throw ValidationError("arc-set union over mismatched sentence lengths (" +
                                  std::to_string(t) + " vs " + std::to_string(s.sentence_length()) + ")");
        for (int m = 1; m <= t; ++m)
            for (int h = 0; h <= t; ++h)
                if (h != m && s.allows(h, m)) merged.allow(h, m);
    }
    return merged;
}

ArcScoreMatrix constrain_scores(const ArcScoreMatrix& scores, const AmbiguousArcSet& arc_set) {
    const int t = scores.sentence_length();
    if (arc_set.sentence_length() != t)
        throw ValidationError("arc set and score matrix have different sentence lengths");
    ArcScoreMatrix out = scores;
    for (int m = 1; m <= t; ++m)
        for (int h = 0; h <= t; ++h)
            if (h != m && !arc_set.allows(h, m)) out.mask(h, m);
    return out;
}

void write_arc_sets(const std::vector<std::pair<std::string, AmbiguousArcSet>>& sets,
                    std::ostream& out) {
    for (const auto& [id, set] : sets) {
        out << "sent " << id << ' ' << set.sentence_length() << "\n";
        for (int m = 1; m <= set.sentence_length(); ++m) {
            out << m << ':';
            for (int h : set.heads_of(m)) out << ' ' << h;
            out << "\n";
        }
        out << "\n";
    }
}

void write_arc_sets_file(const std::vector<std::pair<std::string, AmbiguousArcSet>>& sets,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_arc_sets(sets, out);
}

std::vector<std::pair<std::string, AmbiguousArcSet>> read_arc_sets(std::istream& in) {
    std::vector<std::pair<std::string, AmbiguousArcSet>> result;
    std::string line;
    int line_no = 0;
    std::string cur_id;
    int cur_t = -1;
    int next_m = 1;
    AmbiguousArcSet cur;

    auto flush = [&]() {
        if (cur_t < 0) return;
        if (next_m != cur_t + 1)
            throw ParseError("arc-set block for sentence '" + cur_id + "' ended at dependent " +
                             std::to_string(next_m - 1) + " of " + std::to_string(cur_t));
        result.emplace_back(cur_id, cur);
        cur_t = -1;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        std::istringstream ls(line);
        if (cur_t < 0) {
            std::string tag;
            ls >> tag >> cur_id >> cur_t;
            if (tag != "sent" || ls.fail() || cur_t < 1)
                throw ParseError("line " + std::to_string(line_no) + ": expected 'sent <id> <t>'");
            cur = AmbiguousArcSet(cur_t);
            next_m = 1;
            continue;
        }
        int m = -1;
        char colon = 0;
        ls >> m >> colon;
        if (ls.fail() || colon != ':' || m != next_m)
            throw ParseError("line " + std::to_string(line_no) + ": expected '" +
                             std::to_string(next_m) + ": <heads>'");
        int h;
        while (ls >> h) {
            if (h < 0 || h > cur_t || h == m)
                throw ParseError("line " + std::to_string(line_no) + ": head " + std::to_string(h) +
                                 " out of range for dependent " + std::to_string(m));
            cur.allow(h, m);
        }
        ++next_m;
    }
    flush();
    return result;
}

std::vector<std::pair<std::string, AmbiguousArcSet>> read_arc_sets_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_arc_sets(in);
}

}  // namespace depxfer
