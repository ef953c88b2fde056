#include "cnnrules/analysis.hpp"

#include <algorithm>
#include <fstream>

#include "cnnrules/errors.hpp"

namespace cnnrules {

namespace {

std::string ascii_lower(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

bool is_range_id(const std::string& id) { return id.find('-') != std::string::npos; }

}  // namespace

PosLexicon load_conllu_pos(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read CoNLL-U file: " + path);

    std::unordered_map<std::string, std::unordered_map<std::string, std::int64_t>> counts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (;;) {
            const std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                cols.push_back(line.substr(start));
                break;
            }
            cols.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (cols.size() != 10) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 10 tab-separated columns, got " +
                             std::to_string(cols.size()));
        }
        if (is_range_id(cols[0])) continue;  // multiword token line
        const std::string& upos = cols[3];
        if (upos.empty() || upos == "_") continue;
        ++counts[ascii_lower(cols[1])][upos];
    }

    PosLexicon lexicon;
    for (const auto& [word, tag_counts] : counts) {
        std::string best_tag;
        std::int64_t best_count = -1;
        for (const auto& [tag, count] : tag_counts) {
            if (count > best_count || (count == best_count && tag < best_tag)) {
                best_tag = tag;
                best_count = count;
            }
        }
        lexicon.pos_of.emplace(word, best_tag);
    }
    return lexicon;
}

PosStats pos_distribution(const std::vector<FilterInterpretation>& interpretations,
                          const PosLexicon& pos_lexicon, bool unique_words) {
    if (interpretations.empty()) throw ConfigError("pos_distribution: empty extraction");

    static const char* kBuckets[] = {"ADJ", "ADV", "NOUN", "VERB", "PROPN", "NUM"};
    std::map<std::string, std::size_t> bucket_counts;
    for (const char* b : kBuckets) bucket_counts[b] = 0;
    bucket_counts["rest"] = 0;

    std::unordered_set<std::string> seen;
    PosStats stats;
    for (const FilterInterpretation& interp : interpretations) {
        for (const auto& position : interp.positions) {
            for (const ExtractedWord& w : position) {
                if (unique_words && !seen.insert(w.word).second) continue;
                const auto it = pos_lexicon.pos_of.find(w.word);
                if (it == pos_lexicon.pos_of.end()) {
                    ++stats.unknown_slots;
                    continue;
                }
                ++stats.known_slots;
                const auto bucket = bucket_counts.find(it->second);
                if (bucket != bucket_counts.end()) {
                    ++bucket->second;
                } else {
                    ++bucket_counts["rest"];
                }
            }
        }
    }
    for (const auto& [bucket, count] : bucket_counts) {
        stats.percent[bucket] =
            stats.known_slots == 0
                ? 0.0
                : 100.0 * static_cast<double>(count) / static_cast<double>(stats.known_slots);
    }
    return stats;
}

namespace {

std::unordered_set<std::string> load_word_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read opinion lexicon file: " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == ';') continue;
        words.insert(ascii_lower(line));
    }
    return words;
}

}  // namespace

SentimentLexicon load_opinion_lexicon(const std::string& pos_path, const std::string& neg_path) {
    SentimentLexicon lex;
    lex.positive = load_word_list(pos_path);
    lex.negative = load_word_list(neg_path);
    return lex;
}

LexiconStats lexicon_stats(const std::vector<FilterInterpretation>& interpretations,
                           const SentimentLexicon& lex) {
    if (lex.positive.empty() && lex.negative.empty()) {
        throw ConfigError("lexicon_stats: empty sentiment lexicon");
    }

    LexiconStats stats;
    std::unordered_set<std::string> unique_words;
    std::size_t correct_pos = 0;
    std::size_t correct_neg = 0;
    for (const FilterInterpretation& interp : interpretations) {
        for (const auto& position : interp.positions) {
            for (const ExtractedWord& w : position) {
                unique_words.insert(w.word);
                const bool in_pos = lex.positive.contains(w.word);
                const bool in_neg = lex.negative.contains(w.word);
                if (in_pos == in_neg) continue;  // absent or in both: no polarity ground truth
                if (interp.v_weight > 0.0f) {
                    ++stats.slots_pos_predicted;
                    if (in_pos) ++correct_pos;
                } else if (interp.v_weight < 0.0f) {
                    ++stats.slots_neg_predicted;
                    if (in_neg) ++correct_neg;
                }
            }
        }
    }

    stats.unique_words = unique_words.size();
    for (const std::string& w : unique_words) {
        if (lex.positive.contains(w) || lex.negative.contains(w)) ++stats.unique_in_lexicon;
    }
    stats.coverage = unique_words.empty()
                         ? 0.0
                         : static_cast<double>(stats.unique_in_lexicon) / static_cast<double>(unique_words.size());
    if (stats.slots_pos_predicted > 0) {
        stats.precision_pos =
            static_cast<double>(correct_pos) / static_cast<double>(stats.slots_pos_predicted);
    }
    if (stats.slots_neg_predicted > 0) {
        stats.precision_neg =
            static_cast<double>(correct_neg) / static_cast<double>(stats.slots_neg_predicted);
    }
    return stats;
}

}  // namespace cnnrules
