#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "cnnrules/errors.hpp"
#include "cnnrules/extraction.hpp"
#include "oracles.hpp"

using namespace cnnrules;
namespace fs = std::filesystem;

namespace {

Vocabulary fake_vocab(std::int32_t size) {
    Vocabulary vocab;
    vocab.word_of = {"<pad>", "<unk>"};
    vocab.count_of = {0, 0};
    for (std::int32_t id = 2; id < size; ++id) {
        const std::string word = "w" + std::to_string(id);
        vocab.id_of.emplace(word, id);
        vocab.word_of.push_back(word);
        vocab.count_of.push_back(1);
    }
    return vocab;
}

}  // namespace

TEST_CASE("top_words on a one-hot embedding picks coordinates in order") {
    Matrix embeddings(5, 3);  // rows 0/1 reserved, rows 2..4 one-hot
    embeddings.at(2, 0) = 1.0f;
    embeddings.at(3, 1) = 1.0f;
    embeddings.at(4, 2) = 1.0f;
    const Vocabulary vocab = fake_vocab(5);
    const float w[3] = {0.9f, 0.1f, 0.0f};
    const auto top = top_words(w, embeddings, vocab, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].word_id == 2);
    CHECK(top[0].score == doctest::Approx(0.9));
    CHECK(top[1].word_id == 3);
    CHECK(top[1].score == doctest::Approx(0.1));
}

TEST_CASE("top_words breaks exact ties by smaller word id") {
    Matrix embeddings(6, 2, 1.0f);
    const Vocabulary vocab = fake_vocab(6);
    const float w[2] = {0.0f, 0.0f};
    const auto top = top_words(w, embeddings, vocab, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].word_id == 2);
    CHECK(top[1].word_id == 3);
    CHECK(top[2].word_id == 4);
    for (const auto& t : top) CHECK(t.score == 0.0f);
}

TEST_CASE("top_words equals a brute-force sort over every non-reserved row") {
    Pcg32 rng(41, 4);
    Matrix embeddings(50, 8);
    for (float& x : embeddings.data) x = 2.0f * rng.next_float() - 1.0f;
    const Vocabulary vocab = fake_vocab(50);
    std::vector<float> w(8);
    for (float& x : w) x = 2.0f * rng.next_float() - 1.0f;

    const auto got = top_words(w.data(), embeddings, vocab, 5);

    std::vector<std::pair<float, std::int32_t>> scored;
    for (std::int32_t id = 2; id < 50; ++id) {
        double s = 0.0;
        for (std::size_t j = 0; j < 8; ++j) s += embeddings.at(id, j) * w[j];
        scored.emplace_back(static_cast<float>(s), id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    REQUIRE(got.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(got[i].word_id == scored[i].second);
        CHECK(got[i].score == doctest::Approx(scored[i].first).epsilon(1e-4));
    }
}

TEST_CASE("top_words never returns PAD or UNK and validates m") {
    Matrix embeddings(5, 2, 1.0f);
    const Vocabulary vocab = fake_vocab(5);
    const float w[2] = {1.0f, 1.0f};
    const auto top = top_words(w, embeddings, vocab, 3);
    for (const auto& t : top) CHECK(t.word_id >= 2);
    CHECK_THROWS_AS(top_words(w, embeddings, vocab, 4), ConfigError);
    CHECK_THROWS_AS(top_words(w, embeddings, vocab, 0), ConfigError);
}

TEST_CASE("scaling a weight vector rescales scores but keeps the word list") {
    Pcg32 rng(42, 4);
    Matrix embeddings(30, 6);
    for (float& x : embeddings.data) x = 2.0f * rng.next_float() - 1.0f;
    const Vocabulary vocab = fake_vocab(30);
    std::vector<float> w(6), w3(6);
    for (std::size_t j = 0; j < 6; ++j) {
        w[j] = 2.0f * rng.next_float() - 1.0f;
        w3[j] = 3.0f * w[j];
    }
    const auto base = top_words(w.data(), embeddings, vocab, 4);
    const auto scaled = top_words(w3.data(), embeddings, vocab, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(base[i].word_id == scaled[i].word_id);
        CHECK(scaled[i].score == doctest::Approx(3.0f * base[i].score).epsilon(1e-4));
    }
}

TEST_CASE("extract_all yields one interpretation per filter with width position lists") {
    Pcg32 rng(43, 4);
    const auto params = oracles::random_model(rng, 20, 4, 2, 2);
    const Vocabulary vocab = fake_vocab(20);
    const auto interps = extract_all(params, vocab, 3);

    REQUIRE(interps.size() == 4);  // n=2 filters for each width 1 and 2
    std::size_t position_lists = 0;
    for (const auto& interp : interps) {
        REQUIRE(interp.positions.size() == interp.width);
        position_lists += interp.positions.size();
        CHECK(interp.v_weight == params.v[(interp.width - 1) * 2 + interp.filter_index]);
        for (const auto& pos : interp.positions) {
            REQUIRE(pos.size() == 3);
            for (std::size_t i = 1; i < pos.size(); ++i) CHECK(pos[i - 1].score >= pos[i].score);
        }
    }
    CHECK(position_lists == 6);  // n * (1 + 2)
}

TEST_CASE("extracted scores recompute exactly from E and W") {
    Pcg32 rng(44, 4);
    const auto params = oracles::random_model(rng, 25, 5, 3, 2);
    const Vocabulary vocab = fake_vocab(25);
    for (const auto& interp : extract_all(params, vocab, 2)) {
        const Matrix& w = params.W[interp.width - 1];
        for (std::size_t s = 0; s < interp.width; ++s) {
            for (const auto& word : interp.positions[s]) {
                const float recomputed =
                    dot(params.E.row(static_cast<std::size_t>(word.word_id)),
                        w.row(interp.filter_index) + s * params.config.d, params.config.d);
                CHECK(word.score == recomputed);
            }
        }
    }
}

TEST_CASE("render_words matches the word (score) layout") {
    std::vector<ExtractedWord> words(3);
    words[0] = {10, "perfect", 12.186f};
    words[1] = {11, "brilliant", 5.268f};
    words[2] = {12, "innocent", 5.040f};
    CHECK(render_words(words) == "perfect (12.186), brilliant (5.268), innocent (5.040)");
}

TEST_CASE("interpretations JSON export and reload") {
    Pcg32 rng(45, 4);
    const auto params = oracles::random_model(rng, 15, 3, 2, 2);
    const Vocabulary vocab = fake_vocab(15);
    const auto interps = extract_all(params, vocab, 2);

    const std::string path =
        (fs::temp_directory_path() / ("cnnrules_rules_" + std::to_string(::getpid()) + ".json")).string();
    save_interpretations_json(interps, path);
    const auto loaded = load_interpretations_json(path);

    REQUIRE(loaded.size() == interps.size());
    for (std::size_t i = 0; i < interps.size(); ++i) {
        CHECK(loaded[i].width == interps[i].width);
        CHECK(loaded[i].filter_index == interps[i].filter_index);
        CHECK(loaded[i].v_weight == doctest::Approx(interps[i].v_weight).epsilon(1e-5));
        REQUIRE(loaded[i].positions.size() == interps[i].positions.size());
        for (std::size_t p = 0; p < interps[i].positions.size(); ++p) {
            for (std::size_t k = 0; k < interps[i].positions[p].size(); ++k) {
                CHECK(loaded[i].positions[p][k].word == interps[i].positions[p][k].word);
                // six significant digits survive the round trip
                CHECK(loaded[i].positions[p][k].score ==
                      doctest::Approx(interps[i].positions[p][k].score).epsilon(1e-5));
            }
        }
    }
    fs::remove(path);
}
