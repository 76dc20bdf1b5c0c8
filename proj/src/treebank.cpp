#include "depxfer/treebank.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace depxfer {

void validate_tree(const DependencyTree& tree, const std::string& sentence_id) {
    const int t = tree.size();
    auto fail = [&](const std::string& what) {
        std::string where = sentence_id.empty() ? "" : " in sentence '" + sentence_id + "'";
        throw ValidationError("invalid tree" + where + ": " + what);
    };
    if (t < 1) fail("empty head list");
    if (tree.labels && static_cast<int>(tree.labels->size()) != t)
        fail("label list length differs from head list length");
    int roots = 0;
    for (int m = 1; m <= t; ++m) {
        const int h = tree.head_of(m);
        if (h < 0 || h > t) fail("head out of range at token " + std::to_string(m));
        if (h == m) fail("token " + std::to_string(m) + " is its own head");
        if (h == 0) ++roots;
    }
    if (roots != 1) fail(roots == 0 ? "no root attachment" : "multiple root attachments");
    // Walking up from every token must hit ROOT within t steps.
    for (int m = 1; m <= t; ++m) {
        int cur = m;
        int steps = 0;
        while (cur != 0) {
            cur = tree.head_of(cur);
            if (++steps > t) fail("cycle through token " + std::to_string(m));
        }
    }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cols;
}

bool is_plain_index(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

struct PendingSentence {
    std::string id;
    std::vector<Token> tokens;
    std::vector<std::string> head_strs;
    std::vector<int> first_lines;  // line number of each token row

    void clear() {
        id.clear();
        tokens.clear();
        head_strs.clear();
        first_lines.clear();
    }
    bool empty() const { return tokens.empty(); }
};

TreebankEntry finish_sentence(PendingSentence& pend, int ordinal) {
    Sentence sent;
    sent.id = pend.id.empty() ? std::to_string(ordinal) : pend.id;
    sent.tokens = pend.tokens;

    const int t = sent.size();
    bool all_heads = true;
    for (const auto& h : pend.head_strs)
        if (h == "_") all_heads = false;

    std::optional<DependencyTree> tree;
    if (all_heads) {
        DependencyTree tr;
        tr.heads.resize(static_cast<size_t>(t));
        for (int m = 1; m <= t; ++m) {
            const std::string& hs = pend.head_strs[static_cast<size_t>(m - 1)];
            if (!is_plain_index(hs))
                throw ParseError("line " + std::to_string(pend.first_lines[static_cast<size_t>(m - 1)]) +
                                 ": HEAD column is not an integer: '" + hs + "'");
            tr.heads[static_cast<size_t>(m - 1)] = std::stoi(hs);
        }
        bool all_labels = true;
        for (const auto& tok : sent.tokens)
            if (!tok.deprel) all_labels = false;
        if (all_labels) {
            std::vector<std::string> labels;
            labels.reserve(static_cast<size_t>(t));
            for (const auto& tok : sent.tokens) labels.push_back(*tok.deprel);
            tr.labels = std::move(labels);
        }
        validate_tree(tr, sent.id);
        tree = std::move(tr);
    }
    pend.clear();
    return {std::move(sent), std::move(tree)};
}

}  // namespace

std::vector<TreebankEntry> read_conllu(std::istream& in) {
    std::vector<TreebankEntry> result;
    PendingSentence pend;
    std::string line;
    int line_no = 0;
    int ordinal = 0;

    auto flush = [&]() {
        if (!pend.empty()) {
            ++ordinal;
            result.push_back(finish_sentence(pend, ordinal));
        } else {
            pend.clear();
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            // Keep sent_id when present; other comments are dropped.
            const std::string key = "# sent_id";
            if (line.rfind(key, 0) == 0) {
                size_t eq = line.find('=');
                if (eq != std::string::npos) {
                    size_t s = line.find_first_not_of(' ', eq + 1);
                    if (s != std::string::npos) pend.id = line.substr(s);
                }
            }
            continue;
        }
        std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != 10)
            throw ParseError("line " + std::to_string(line_no) + ": expected 10 tab-separated columns, got " +
                             std::to_string(cols.size()));
        const std::string& idcol = cols[0];
        if (!is_plain_index(idcol)) continue;  // multi-word range "1-2" or empty node "1.1"
        Token tok;
        tok.form = cols[1];
        tok.upos = cols[3];
        if (tok.form.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty FORM");
        if (tok.upos.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty UPOS");
        if (cols[7] != "_") tok.deprel = cols[7];
        pend.tokens.push_back(std::move(tok));
        pend.head_strs.push_back(cols[6]);
        pend.first_lines.push_back(line_no);
    }
    flush();
    return result;
}

std::vector<TreebankEntry> read_conllu_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_conllu(in);
}

void write_conllu(const std::vector<TreebankEntry>& items, std::ostream& out) {
    for (const auto& [sent, tree] : items) {
        out << "# sent_id = " << sent.id << "\n";
        for (int m = 1; m <= sent.size(); ++m) {
            const Token& tok = sent.token(m);
            std::string head = "_";
            std::string deprel = "_";
            if (tree) {
                head = std::to_string(tree->head_of(m));
                if (tree->labels) deprel = (*tree->labels)[static_cast<size_t>(m - 1)];
            }
            if (!tree && tok.deprel) deprel = *tok.deprel;
            out << m << '\t' << tok.form << "\t_\t" << tok.upos << "\t_\t_\t" << head << '\t' << deprel
                << "\t_\t_\n";
        }
        out << "\n";
    }
}

void write_conllu_file(const std::vector<TreebankEntry>& items, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_conllu(items, out);
}

LabeledTreebank labeled_only(const std::vector<TreebankEntry>& items) {
    LabeledTreebank result;
    for (const auto& [sent, tree] : items)
        if (tree) result.emplace_back(sent, *tree);
    return result;
}

std::vector<Sentence> sentences_only(const std::vector<TreebankEntry>& items) {
    std::vector<Sentence> result;
    result.reserve(items.size());
    for (const auto& [sent, tree] : items) result.push_back(sent);
    return result;
}

bool is_projective(const DependencyTree& tree) {
    const int t = tree.size();
    // Arcs (h,m) and (h',m') cross iff exactly one endpoint of one lies
    // strictly inside the other's interval.
    for (int m = 1; m <= t; ++m) {
        const int h = tree.head_of(m);
        const int lo = std::min(h, m), hi = std::max(h, m);
        for (int m2 = m + 1; m2 <= t; ++m2) {
            const int h2 = tree.head_of(m2);
            const int lo2 = std::min(h2, m2), hi2 = std::max(h2, m2);
            const bool lo2_in = lo2 > lo && lo2 < hi;
            const bool hi2_in = hi2 > lo && hi2 < hi;
            if (lo2_in != hi2_in) {
                // Shared endpoints do not count as crossings.
                if (lo2 == lo || lo2 == hi || hi2 == lo || hi2 == hi) continue;
                return false;
            }
        }
    }
    return true;
}

std::vector<bool> punctuation_mask(const Sentence& sentence, PunctBy by) {
    std::vector<bool> mask(static_cast<size_t>(sentence.size()), false);
    for (int m = 1; m <= sentence.size(); ++m) {
        const Token& tok = sentence.token(m);
        if (by == PunctBy::Upos)
            mask[static_cast<size_t>(m - 1)] = tok.upos == "PUNCT";
        else
            mask[static_cast<size_t>(m - 1)] = tok.deprel && *tok.deprel == "punct";
    }
    return mask;
}

std::vector<bool> punctuation_mask(const Sentence& sentence, const DependencyTree& tree, PunctBy by) {
    if (by == PunctBy::Upos) return punctuation_mask(sentence, by);
    std::vector<bool> mask(static_cast<size_t>(sentence.size()), false);
    if (tree.labels) {
        for (int m = 1; m <= sentence.size(); ++m)
            mask[static_cast<size_t>(m - 1)] = (*tree.labels)[static_cast<size_t>(m - 1)] == "punct";
    }
    return mask;
}

}  // namespace depxfer
