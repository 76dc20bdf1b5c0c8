#include "depxfer/synth.hpp"

#include "depxfer/rng.hpp"

namespace depxfer {

namespace {

struct Node {
    std::string form;
    std::string upos;
    std::string deprel;
    int parent;  // index into the node pool, -1 for the root's parent
    bool after;  // subtree goes after the parent's position
    std::vector<int> before_children, after_children;
};

struct Builder {
    const SynthLanguage& lang;
    Rng& rng;
    std::vector<Node> nodes;

    std::string word(const char* pos, int types) {
        return lang.name + ":" + pos + std::to_string(rng.below(static_cast<uint64_t>(types)));
    }
    bool coin(double p) { return rng.uniform() < p; }

    int add(int parent, bool after, std::string form, std::string upos, std::string deprel) {
        nodes.push_back({std::move(form), std::move(upos), std::move(deprel), parent, after, {}, {}});
        const int id = static_cast<int>(nodes.size()) - 1;
        if (parent >= 0) {
            if (after)
                nodes[static_cast<size_t>(parent)].after_children.push_back(id);
            else
                nodes[static_cast<size_t>(parent)].before_children.push_back(id);
        }
        return id;
    }

    int noun_phrase(int parent, bool after, const std::string& deprel, int depth) {
        const int np = add(parent, after, word("n", lang.noun_types), "NOUN", deprel);
        const SynthGrammar& g = lang.grammar;
        if (coin(g.p_det)) add(np, false, word("d", lang.det_types), "DET", "det");
        if (coin(g.p_adj)) add(np, coin(g.p_adj_after), word("a", lang.adj_types), "ADJ", "amod");
        if (coin(g.p_adp)) add(np, coin(g.p_adp_after), word("p", lang.adp_types), "ADP", "case");
        if (depth < 2 && coin(g.p_nmod)) noun_phrase(np, true, "nmod", depth + 1);
        return np;
    }

    void sentence() {
        const SynthGrammar& g = lang.grammar;
        const int verb = add(-1, false, word("v", lang.verb_types), "VERB", "root");
        if (coin(g.p_subj)) noun_phrase(verb, coin(g.p_subj_after), "nsubj", 0);
        if (coin(g.p_obj)) noun_phrase(verb, coin(g.p_obj_after), "obj", 0);
        if (coin(g.p_advmod)) add(verb, coin(g.p_advmod_after), word("r", lang.adv_types), "ADV", "advmod");
        if (coin(g.p_final_punct)) {
            // Attached to the root, linearized last.
            nodes.push_back({".", "PUNCT", "punct", verb, true, {}, {}});
            nodes[static_cast<size_t>(verb)].after_children.push_back(static_cast<int>(nodes.size()) - 1);
        }
    }

    void linearize(int id, std::vector<int>& order) const {
        const Node& node = nodes[static_cast<size_t>(id)];
        for (int c : node.before_children) linearize(c, order);
        order.push_back(id);
        for (int c : node.after_children) linearize(c, order);
    }
};

}  // namespace

LabeledTreebank generate_treebank(const SynthLanguage& language, int n_sentences, uint64_t seed) {
    Rng rng(seed);
    LabeledTreebank out;
    out.reserve(static_cast<size_t>(n_sentences));
    for (int i = 0; i < n_sentences; ++i) {
        Builder b{language, rng, {}};
        b.sentence();
        std::vector<int> order;
        b.linearize(0, order);

        std::vector<int> position(order.size());
        for (size_t pos = 0; pos < order.size(); ++pos)
            position[static_cast<size_t>(order[pos])] = static_cast<int>(pos) + 1;

        Sentence sent;
        sent.id = language.name + "-" + std::to_string(i + 1);
        DependencyTree tree;
        std::vector<std::string> labels;
        for (size_t pos = 0; pos < order.size(); ++pos) {
            const Node& node = b.nodes[static_cast<size_t>(order[pos])];
            sent.tokens.push_back({node.form, node.upos, node.deprel});
            tree.heads.push_back(node.parent < 0 ? 0 : position[static_cast<size_t>(node.parent)]);
            labels.push_back(node.deprel);
        }
        tree.labels = std::move(labels);
        validate_tree(tree, sent.id);
        out.emplace_back(std::move(sent), std::move(tree));
    }
    return out;
}

}  // namespace depxfer
