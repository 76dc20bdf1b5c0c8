#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depxfer/treebank.hpp"

namespace depxfer {

// Toy dependency grammar with tunable head directions. Trees are built
// top-down (verb root, noun arguments, modifiers) and linearized by placing
// each dependent's subtree wholly before or after its head, so every
// generated tree is projective. Word forms are prefixed with the language
// name, which keeps lexicons disjoint across languages.
struct SynthGrammar {
    // Probability that the dependent follows its head.
    double p_adj_after = 0.05;   // adjective vs noun
    double p_adp_after = 0.0;    // adposition vs noun (1.0 = postpositions)
    double p_subj_after = 0.1;   // subject vs verb
    double p_obj_after = 0.9;    // object vs verb
    double p_advmod_after = 0.3; // adverb vs verb

    // Attachment probabilities.
    double p_subj = 0.9;
    double p_obj = 0.75;
    double p_advmod = 0.3;
    double p_det = 0.45;
    double p_adj = 0.5;
    double p_adp = 0.4;
    double p_nmod = 0.18;  // noun attached under a noun, always after
    double p_final_punct = 0.9;
};

struct SynthLanguage {
    std::string name;
    SynthGrammar grammar;
    int noun_types = 25;
    int verb_types = 15;
    int adj_types = 12;
    int adp_types = 5;
    int det_types = 3;
    int adv_types = 8;
};

LabeledTreebank generate_treebank(const SynthLanguage& language, int n_sentences, uint64_t seed);

}  // namespace depxfer
