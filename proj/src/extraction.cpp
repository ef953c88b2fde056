#include "cnnrules/extraction.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cnnrules/errors.hpp"

namespace cnnrules {

std::vector<ExtractedWord> top_words(const float* weight_vector, const Matrix& embeddings,
                                     const Vocabulary& vocab, std::size_t m) {
    const std::size_t vocab_size = embeddings.rows;
    if (m < 1) throw ConfigError("top_words: m must be at least 1");
    if (vocab_size < 2 + m) {
        throw ConfigError("top_words: m=" + std::to_string(m) + " exceeds the " +
                          std::to_string(vocab_size >= 2 ? vocab_size - 2 : 0) + " non-reserved words");
    }
    std::vector<ExtractedWord> all;
    all.reserve(vocab_size - 2);
    for (std::size_t id = 2; id < vocab_size; ++id) {
        ExtractedWord w;
        w.word_id = static_cast<std::int32_t>(id);
        w.score = dot(embeddings.row(id), weight_vector, embeddings.cols);
        all.push_back(std::move(w));
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m), all.end(),
                      [](const ExtractedWord& a, const ExtractedWord& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.word_id < b.word_id;
                      });
    all.resize(m);
    for (ExtractedWord& w : all) w.word = vocab.word_of[static_cast<std::size_t>(w.word_id)];
    return all;
}

std::vector<FilterInterpretation> extract_all(const Parameters& params, const Vocabulary& vocab,
                                              std::size_t m) {
    const ModelConfig& cfg = params.config;
    if (vocab.size() != cfg.vocab_size) {
        throw ContractViolation("extract_all: vocabulary size does not match the model");
    }
    std::vector<FilterInterpretation> interps;
    interps.reserve(cfg.max_width * cfg.n);
    for (std::size_t width = 1; width <= cfg.max_width; ++width) {
        const Matrix& w = params.W[width - 1];
        for (std::size_t f = 0; f < cfg.n; ++f) {
            FilterInterpretation interp;
            interp.width = width;
            interp.filter_index = f;
            interp.v_weight = params.v[params.v_index(width, f)];
            for (std::size_t s = 0; s < width; ++s) {
                interp.positions.push_back(top_words(w.row(f) + s * cfg.d, params.E, vocab, m));
            }
            interps.push_back(std::move(interp));
        }
    }
    return interps;
}

std::string render_words(const std::vector<ExtractedWord>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) out += ", ";
        char buf[64];
        std::snprintf(buf, sizeof(buf), " (%.3f)", static_cast<double>(words[i].score));
        out += words[i].word;
        out += buf;
    }
    return out;
}

namespace {

std::string format_score(float score) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", static_cast<double>(score));
    return buf;
}

}  // namespace

void save_interpretations_json(const std::vector<FilterInterpretation>& interps, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write rules JSON: " + path);
    out << "[\n";
    for (std::size_t i = 0; i < interps.size(); ++i) {
        const FilterInterpretation& interp = interps[i];
        out << "  {\"width\":" << interp.width << ",\"filter_index\":" << interp.filter_index
            << ",\"v_weight\":" << format_score(interp.v_weight) << ",\"positions\":[";
        for (std::size_t p = 0; p < interp.positions.size(); ++p) {
            if (p > 0) out << ',';
            out << '[';
            for (std::size_t k = 0; k < interp.positions[p].size(); ++k) {
                const ExtractedWord& w = interp.positions[p][k];
                if (k > 0) out << ',';
                out << "{\"word\":" << nlohmann::json(w.word).dump() << ",\"score\":" << format_score(w.score)
                    << '}';
            }
            out << ']';
        }
        out << "]}" << (i + 1 < interps.size() ? "," : "") << '\n';
    }
    out << "]\n";
}

std::vector<FilterInterpretation> load_interpretations_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read rules JSON: " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw FormatError(path + ": expected a JSON array of filters");
    std::vector<FilterInterpretation> interps;
    for (const auto& item : doc) {
        FilterInterpretation interp;
        interp.width = item.at("width").get<std::size_t>();
        interp.filter_index = item.at("filter_index").get<std::size_t>();
        interp.v_weight = item.at("v_weight").get<float>();
        for (const auto& pos : item.at("positions")) {
            std::vector<ExtractedWord> words;
            for (const auto& w : pos) {
                ExtractedWord word;
                word.word_id = -1;
                word.word = w.at("word").get<std::string>();
                word.score = w.at("score").get<float>();
                words.push_back(std::move(word));
            }
            interp.positions.push_back(std::move(words));
        }
        if (interp.positions.size() != interp.width) {
            throw FormatError(path + ": filter must carry one word list per kernel position");
        }
        interps.push_back(std::move(interp));
    }
    return interps;
}

}  // namespace cnnrules
