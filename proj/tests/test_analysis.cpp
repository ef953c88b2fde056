#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "cnnrules/analysis.hpp"
#include "cnnrules/errors.hpp"

using namespace cnnrules;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = fs::temp_directory_path() /
               ("cnnrules_analysis_" + std::to_string(::getpid()) + "_" + name);
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { fs::remove(path); }
    std::string str() const { return path.string(); }
};

std::string conllu_token(int id, const std::string& form, const std::string& upos) {
    return std::to_string(id) + "\t" + form + "\t" + form + "\t" + upos + "\t_\t_\t0\t_\t_\t_\n";
}

FilterInterpretation slot_interp(float v_weight, std::vector<std::string> words) {
    FilterInterpretation interp;
    interp.width = 1;
    interp.filter_index = 0;
    interp.v_weight = v_weight;
    std::vector<ExtractedWord> list;
    for (const auto& w : words) {
        ExtractedWord e;
        e.word_id = 2;
        e.word = w;
        e.score = 1.0f;
        list.push_back(e);
    }
    interp.positions.push_back(std::move(list));
    return interp;
}

}  // namespace

TEST_CASE("conllu majority tag wins, ties go alphabetically") {
    TempFile file("majority.conllu",
                  "# sent_id = 1\n" + conllu_token(1, "good", "ADJ") + conllu_token(2, "good", "ADJ") +
                      conllu_token(3, "Good", "ADJ") + conllu_token(4, "good", "NOUN") + "\n" +
                      conllu_token(1, "fast", "ADV") + conllu_token(2, "fast", "ADJ") + "\n");
    const PosLexicon lex = load_conllu_pos(file.str());
    CHECK(lex.pos_of.at("good") == "ADJ");
    CHECK(lex.pos_of.at("fast") == "ADJ");  // 1-1 tie, ADJ < ADV
}

TEST_CASE("conllu skips comments, blanks and multiword ranges") {
    TempFile file("ranges.conllu", "# newdoc\n\n1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" +
                                       conllu_token(1, "do", "AUX") + conllu_token(2, "not", "PART") + "\n");
    const PosLexicon lex = load_conllu_pos(file.str());
    CHECK(lex.pos_of.count("don't") == 0);
    CHECK(lex.pos_of.at("do") == "AUX");
    CHECK(lex.pos_of.at("not") == "PART");
}

TEST_CASE("conllu with only comments yields an empty lexicon") {
    TempFile file("comments.conllu", "# a\n# b\n");
    CHECK(load_conllu_pos(file.str()).pos_of.empty());
}

TEST_CASE("conllu parse errors carry the line number") {
    TempFile file("bad.conllu", "# ok\n1\tonly\tthree\n");
    try {
        load_conllu_pos(file.str());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("pos_distribution of a single-tag extraction is 100 percent") {
    PosLexicon lex;
    lex.pos_of["great"] = "ADJ";
    std::vector<FilterInterpretation> interps;
    for (int i = 0; i < 10; ++i) interps.push_back(slot_interp(1.0f, {"great"}));
    const PosStats stats = pos_distribution(interps, lex);
    CHECK(stats.percent.at("ADJ") == doctest::Approx(100.0));
    CHECK(stats.known_slots == 10);
    CHECK(stats.unknown_slots == 0);
}

TEST_CASE("pos_distribution counts slots, excludes unknowns, buckets the rest") {
    PosLexicon lex;
    lex.pos_of["good"] = "ADJ";
    lex.pos_of["run"] = "VERB";
    lex.pos_of["the"] = "DET";
    lex.pos_of["five"] = "NUM";

    const std::vector<FilterInterpretation> interps = {
        slot_interp(1.0f, {"good", "run", "the"}),
        slot_interp(-1.0f, {"good", "five", "martian"}),
    };
    const PosStats stats = pos_distribution(interps, lex);
    CHECK(stats.known_slots == 5);
    CHECK(stats.unknown_slots == 1);
    CHECK(stats.percent.at("ADJ") == doctest::Approx(40.0));
    CHECK(stats.percent.at("VERB") == doctest::Approx(20.0));
    CHECK(stats.percent.at("NUM") == doctest::Approx(20.0));
    CHECK(stats.percent.at("rest") == doctest::Approx(20.0));

    double total = 0.0;
    for (const auto& [bucket, pct] : stats.percent) total += pct;
    CHECK(total == doctest::Approx(100.0).epsilon(0.001));
}

TEST_CASE("pos_distribution unique-words mode collapses duplicates") {
    PosLexicon lex;
    lex.pos_of["good"] = "ADJ";
    lex.pos_of["bad"] = "ADJ";
    const std::vector<FilterInterpretation> interps = {slot_interp(1.0f, {"good", "good", "bad"})};
    const PosStats slots = pos_distribution(interps, lex, false);
    CHECK(slots.known_slots == 3);
    const PosStats uniq = pos_distribution(interps, lex, true);
    CHECK(uniq.known_slots == 2);
}

TEST_CASE("pos_distribution rejects an empty extraction") {
    PosLexicon lex;
    CHECK_THROWS_AS(pos_distribution({}, lex), ConfigError);
}

TEST_CASE("opinion lexicon loads word lists, skipping comments and CRLF") {
    TempFile pos("pos.txt", "; comment line\r\n\r\nGood\r\ngreat\nfine\n");
    TempFile neg("neg.txt", ";\nbad\nawful\n");
    const SentimentLexicon lex = load_opinion_lexicon(pos.str(), neg.str());
    CHECK(lex.positive.size() == 3);
    CHECK(lex.negative.size() == 2);
    CHECK(lex.positive.contains("good"));
    CHECK(lex.negative.contains("awful"));
}

TEST_CASE("opinion lexicon missing file is an ingestion error") {
    TempFile pos("pos_only.txt", "good\n");
    CHECK_THROWS_AS(load_opinion_lexicon(pos.str(), "/nonexistent/neg.txt"), IngestionError);
}

TEST_CASE("lexicon_stats is perfect when every word matches its polarity") {
    SentimentLexicon lex;
    lex.positive = {"good", "great"};
    lex.negative = {"bad"};
    const std::vector<FilterInterpretation> interps = {slot_interp(0.5f, {"good", "great"}),
                                                       slot_interp(-0.5f, {"bad"})};
    const LexiconStats stats = lexicon_stats(interps, lex);
    CHECK(stats.coverage == doctest::Approx(1.0));
    REQUIRE(stats.precision_pos.has_value());
    REQUIRE(stats.precision_neg.has_value());
    CHECK(*stats.precision_pos == doctest::Approx(1.0));
    CHECK(*stats.precision_neg == doctest::Approx(1.0));
}

TEST_CASE("lexicon_stats reports absent precisions when nothing is in the lexicon") {
    SentimentLexicon lex;
    lex.positive = {"good"};
    lex.negative = {"bad"};
    const std::vector<FilterInterpretation> interps = {slot_interp(0.5f, {"martian", "quux"})};
    const LexiconStats stats = lexicon_stats(interps, lex);
    CHECK(stats.coverage == 0.0);
    CHECK(!stats.precision_pos.has_value());
    CHECK(!stats.precision_neg.has_value());
}

TEST_CASE("lexicon_stats hand fixture: one sign mismatch out of three") {
    SentimentLexicon lex;
    lex.positive = {"good", "nice"};
    lex.negative = {"bad"};
    // four slots: three in-lexicon, the positive-predicted "bad" is a mismatch
    const std::vector<FilterInterpretation> interps = {
        slot_interp(0.5f, {"good", "bad", "unknownword"}), slot_interp(0.5f, {"nice"})};
    const LexiconStats stats = lexicon_stats(interps, lex);
    CHECK(stats.slots_pos_predicted == 3);
    REQUIRE(stats.precision_pos.has_value());
    CHECK(*stats.precision_pos == doctest::Approx(2.0 / 3.0));
    CHECK(stats.coverage == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("lexicon_stats coverage ignores duplicate filters") {
    SentimentLexicon lex;
    lex.positive = {"good"};
    lex.negative = {"bad"};
    const std::vector<FilterInterpretation> once = {slot_interp(0.5f, {"good", "meh"})};
    const std::vector<FilterInterpretation> twice = {slot_interp(0.5f, {"good", "meh"}),
                                                     slot_interp(0.5f, {"good", "meh"})};
    CHECK(lexicon_stats(once, lex).coverage == lexicon_stats(twice, lex).coverage);
}

TEST_CASE("lexicon_stats skips words present in both polarity sets") {
    SentimentLexicon lex;
    lex.positive = {"sharp"};
    lex.negative = {"sharp", "dull"};
    const std::vector<FilterInterpretation> interps = {slot_interp(-0.5f, {"sharp", "dull"})};
    const LexiconStats stats = lexicon_stats(interps, lex);
    CHECK(stats.slots_neg_predicted == 1);  // only "dull" counts toward precision
    REQUIRE(stats.precision_neg.has_value());
    CHECK(*stats.precision_neg == doctest::Approx(1.0));
    CHECK(stats.coverage == doctest::Approx(1.0));  // both words are in the union
}

TEST_CASE("lexicon_stats rejects an empty lexicon") {
    CHECK_THROWS_AS(lexicon_stats({slot_interp(1.0f, {"x"})}, SentimentLexicon{}), ConfigError);
}
