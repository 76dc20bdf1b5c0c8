#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "depxfer/error.hpp"

namespace depxfer {

struct Token {
    std::string form;
    std::string upos;
    std::optional<std::string> deprel;
};

// Tokens occupy positions 1..size(); position 0 is the implicit ROOT.
struct Sentence {
    std::string id;
    std::vector<Token> tokens;

    int size() const { return static_cast<int>(tokens.size()); }
    // 1-based access; position 0 is not stored.
    const Token& token(int position) const { return tokens[static_cast<size_t>(position - 1)]; }
};

// heads[m-1] is the head of token m, in 0..t with exactly one head 0.
struct DependencyTree {
    std::vector<int> heads;
    std::optional<std::vector<std::string>> labels;

    int size() const { return static_cast<int>(heads.size()); }
    int head_of(int m) const { return heads[static_cast<size_t>(m - 1)]; }
};

// Throws ValidationError unless heads form a single-root spanning tree.
void validate_tree(const DependencyTree& tree, const std::string& sentence_id = "");

using TreebankEntry = std::pair<Sentence, std::optional<DependencyTree>>;
using LabeledTreebank = std::vector<std::pair<Sentence, DependencyTree>>;

// CoNLL-U subset: 10 tab-separated columns, '#' comments, blank-line
// separators. Only ID, FORM, UPOS, HEAD, DEPREL are interpreted; multi-word
// token ranges and empty nodes are skipped. HEAD '_' yields a sentence
// without a tree.
std::vector<TreebankEntry> read_conllu(std::istream& in);
std::vector<TreebankEntry> read_conllu_file(const std::string& path);

void write_conllu(const std::vector<TreebankEntry>& items, std::ostream& out);
void write_conllu_file(const std::vector<TreebankEntry>& items, const std::string& path);

// Entries that carry a tree, as (sentence, tree) pairs.
LabeledTreebank labeled_only(const std::vector<TreebankEntry>& items);
std::vector<Sentence> sentences_only(const std::vector<TreebankEntry>& items);

// True iff no two arcs cross, with (h,m) read as the interval
// [min(h,m), max(h,m)] and ROOT included as position 0.
bool is_projective(const DependencyTree& tree);

// Which token positions count as punctuation for scoring purposes.
enum class PunctBy { Upos, Deprel };

// mask[m-1] is true iff token m is punctuation.
std::vector<bool> punctuation_mask(const Sentence& sentence, PunctBy by = PunctBy::Upos);
std::vector<bool> punctuation_mask(const Sentence& sentence, const DependencyTree& tree,
                                   PunctBy by);

}  // namespace depxfer
