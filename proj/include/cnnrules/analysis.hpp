#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cnnrules/extraction.hpp"

namespace cnnrules {

// lowercased word -> its most frequent UPOS tag in the treebank
struct PosLexicon {
    std::unordered_map<std::string, std::string> pos_of;
};

// CoNLL-U: 10 tab-separated columns, '#' comments, blank sentence breaks.
// Multiword-token ranges "a-b" are skipped. Majority tag per lowercased
// FORM; count ties go to the lexicographically smaller tag.
PosLexicon load_conllu_pos(const std::string& path);

struct PosStats {
    // percentage per bucket over slots with a known tag:
    // ADJ, ADV, NOUN, VERB, PROPN, NUM and "rest"
    std::map<std::string, double> percent;
    std::size_t known_slots = 0;
    std::size_t unknown_slots = 0;
};

// Distribution over extracted slots (with multiplicity across filters and
// positions); unique_words collapses to one slot per distinct word.
PosStats pos_distribution(const std::vector<FilterInterpretation>& interpretations,
                          const PosLexicon& pos_lexicon, bool unique_words = false);

struct SentimentLexicon {
    std::unordered_set<std::string> positive;
    std::unordered_set<std::string> negative;
};

// Hu-Liu opinion lexicon: one word per line, ';' comments, CRLF and Latin-1
// tolerated.
SentimentLexicon load_opinion_lexicon(const std::string& pos_path, const std::string& neg_path);

struct LexiconStats {
    double coverage = 0.0;  // unique extracted words found in the lexicon
    std::optional<double> precision_pos;
    std::optional<double> precision_neg;
    std::size_t unique_words = 0;
    std::size_t unique_in_lexicon = 0;
    std::size_t slots_pos_predicted = 0;  // in-lexicon slots with positive v_weight
    std::size_t slots_neg_predicted = 0;
};

// Precision counts slots whose word sits in exactly one polarity set; the
// predicted polarity is the sign of the slot's filter v_weight.
LexiconStats lexicon_stats(const std::vector<FilterInterpretation>& interpretations,
                           const SentimentLexicon& lex);

}  // namespace cnnrules
