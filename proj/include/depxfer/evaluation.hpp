#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "depxfer/treebank.hpp"

namespace depxfer {

struct LabelCounts {
    size_t total = 0;
    size_t correct_head = 0;
    size_t correct_head_and_label = 0;
};

struct EvalReport {
    double uas = 0.0;
    double las = 0.0;
    size_t scored_tokens = 0;  // punctuation excluded
    size_t total_tokens = 0;
    size_t sentences = 0;
    std::map<std::string, LabelCounts> per_label;  // keyed by gold label
};

// UAS/LAS over non-punctuation tokens; the per-label table is keyed by the
// gold label. Lists must align sentence by sentence.
EvalReport score(const LabeledTreebank& gold, const std::vector<DependencyTree>& predicted,
                 PunctBy punct_by = PunctBy::Upos);

// Fraction of test trees whose unlabeled head sequence equals some training
// tree's head sequence (words ignored). The unordered variant compares
// rooted trees up to sibling order instead.
enum class LeakageMatch { OrderedIdentity, UnorderedIsomorphism };

double treebank_leakage(const std::vector<DependencyTree>& train,
                        const std::vector<DependencyTree>& test,
                        LeakageMatch match = LeakageMatch::OrderedIdentity);

// Human-readable block and machine-readable "key<TAB>value" lines. Keys:
// uas, las, scored_tokens, total_tokens, sentences, label.<name>.{total,
// correct_head,correct_label}.
void write_report(const EvalReport& report, std::ostream& out);
void write_report_kv(const EvalReport& report, std::ostream& out);

}  // namespace depxfer
