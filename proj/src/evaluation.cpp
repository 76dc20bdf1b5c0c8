#include "depxfer/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

namespace depxfer {

EvalReport score(const LabeledTreebank& gold, const std::vector<DependencyTree>& predicted,
                 PunctBy punct_by) {
    if (gold.size() != predicted.size())
        throw ValidationError("gold and predicted lists differ in length (" +
                              std::to_string(gold.size()) + " vs " + std::to_string(predicted.size()) +
                              ")");
    EvalReport report;
    report.sentences = gold.size();
    size_t correct_head = 0, correct_labeled = 0;

    for (size_t i = 0; i < gold.size(); ++i) {
        const auto& [sent, gtree] = gold[i];
        const DependencyTree& ptree = predicted[i];
        if (ptree.size() != gtree.size())
            throw ValidationError("sentence '" + sent.id + "': predicted tree has " +
                                  std::to_string(ptree.size()) + " tokens, gold has " +
                                  std::to_string(gtree.size()));
        const std::vector<bool> punct = punctuation_mask(sent, gtree, punct_by);
        for (int m = 1; m <= gtree.size(); ++m) {
            ++report.total_tokens;
            if (punct[static_cast<size_t>(m - 1)]) continue;
            ++report.scored_tokens;
            const bool head_ok = ptree.head_of(m) == gtree.head_of(m);
            std::string gold_label = "_";
            if (gtree.labels) gold_label = (*gtree.labels)[static_cast<size_t>(m - 1)];
            LabelCounts& lc = report.per_label[gold_label];
            ++lc.total;
            if (!head_ok) continue;
            ++correct_head;
            ++lc.correct_head;
            const bool label_ok = gtree.labels && ptree.labels &&
                                  (*ptree.labels)[static_cast<size_t>(m - 1)] == gold_label;
            if (label_ok) {
                ++correct_labeled;
                ++lc.correct_head_and_label;
            }
        }
    }
    if (report.scored_tokens == 0) throw ValidationError("no scorable tokens (all punctuation?)");
    report.uas = static_cast<double>(correct_head) / static_cast<double>(report.scored_tokens);
    report.las = static_cast<double>(correct_labeled) / static_cast<double>(report.scored_tokens);
    return report;
}

namespace {

// Canonical bracketing of the rooted tree ignoring sibling order (AHU).
std::string unordered_canonical(const DependencyTree& tree) {
    const int t = tree.size();
    std::vector<std::vector<int>> children(static_cast<size_t>(t + 1));
    for (int m = 1; m <= t; ++m) children[static_cast<size_t>(tree.head_of(m))].push_back(m);
    // Iterative post-order via recursion on small trees is fine here.
    struct Enc {
        const std::vector<std::vector<int>>& ch;
        std::string at(int node) const {
            std::vector<std::string> parts;
            for (int c : ch[static_cast<size_t>(node)]) parts.push_back(at(c));
            std::sort(parts.begin(), parts.end());
            std::string s = "(";
            for (const auto& p : parts) s += p;
            s += ")";
            return s;
        }
    };
    return Enc{children}.at(0);
}

std::string ordered_key(const DependencyTree& tree) {
    std::string key;
    for (int m = 1; m <= tree.size(); ++m) {
        key += std::to_string(tree.head_of(m));
        key += ',';
    }
    return key;
}

}  // namespace

double treebank_leakage(const std::vector<DependencyTree>& train,
                        const std::vector<DependencyTree>& test, LeakageMatch match) {
    if (test.empty()) throw ValidationError("leakage needs a non-empty test set");
    std::set<std::string> seen;
    for (const auto& tree : train)
        seen.insert(match == LeakageMatch::OrderedIdentity ? ordered_key(tree)
                                                           : unordered_canonical(tree));
    size_t leaked = 0;
    for (const auto& tree : test) {
        const std::string key = match == LeakageMatch::OrderedIdentity ? ordered_key(tree)
                                                                       : unordered_canonical(tree);
        if (seen.count(key)) ++leaked;
    }
    return static_cast<double>(leaked) / static_cast<double>(test.size());
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_report(const EvalReport& report, std::ostream& out) {
    out << "sentences\t" << report.sentences << "\n";
    out << "tokens\t" << report.total_tokens << "\n";
    out << "scored_tokens\t" << report.scored_tokens << "\n";
    out << "UAS\t" << fmt(report.uas) << "\n";
    out << "LAS\t" << fmt(report.las) << "\n";
    out << "\nlabel\ttotal\tcorrect_head\tcorrect_head_and_label\n";
    for (const auto& [label, lc] : report.per_label)
        out << label << '\t' << lc.total << '\t' << lc.correct_head << '\t'
            << lc.correct_head_and_label << "\n";
}

void write_report_kv(const EvalReport& report, std::ostream& out) {
    out << "uas\t" << fmt(report.uas) << "\n";
    out << "las\t" << fmt(report.las) << "\n";
    out << "scored_tokens\t" << report.scored_tokens << "\n";
    out << "total_tokens\t" << report.total_tokens << "\n";
    out << "sentences\t" << report.sentences << "\n";
    for (const auto& [label, lc] : report.per_label) {
        out << "label." << label << ".total\t" << lc.total << "\n";
        out << "label." << label << ".correct_head\t" << lc.correct_head << "\n";
        out << "label." << label << ".correct_label\t" << lc.correct_head_and_label << "\n";
    }
}

}  // namespace depxfer
