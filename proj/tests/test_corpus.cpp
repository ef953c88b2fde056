#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "cnnrules/corpus.hpp"
#include "cnnrules/errors.hpp"

using namespace cnnrules;
namespace fs = std::filesystem;

namespace {

RawDoc make_doc(std::vector<std::string> tokens, int label = 0) {
    RawDoc doc;
    doc.tokens = std::move(tokens);
    doc.label = label;
    return doc;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("cnnrules_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("tokenize lowercases, strips br tags and keeps inner apostrophes") {
    CHECK(tokenize("It's GREAT!<br />Go.") == std::vector<std::string>{"it's", "great", "go"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("'tis 2-D") == std::vector<std::string>{"tis", "2", "d"});
}

TEST_CASE("tokenize handles <br> and repeated separators") {
    CHECK(tokenize("a<br>b") == std::vector<std::string>{"a", "b"});
    CHECK(tokenize("  ''  ") == std::vector<std::string>{});
    CHECK(tokenize("don''t") == std::vector<std::string>{"don''t"});
    CHECK(tokenize("caf\xc3\xa9 bad") == std::vector<std::string>{"caf", "bad"});
}

TEST_CASE("build_vocab orders by count then word and applies min_count") {
    const auto v1 = build_vocab({make_doc({"a", "a", "b"})}, 30000, 1);
    REQUIRE(v1.size() == 4);
    CHECK(v1.lookup("a") == 2);
    CHECK(v1.lookup("b") == 3);
    CHECK(v1.word_of[0] == "<pad>");
    CHECK(v1.word_of[1] == "<unk>");
    CHECK(v1.count_of[2] == 2);

    const auto v2 = build_vocab({make_doc({"a", "b"})}, 30000, 2);
    CHECK(v2.size() == 2);

    // ties go to the lexicographically smaller word
    const auto v3 = build_vocab({make_doc({"zz", "aa"})}, 30000, 1);
    CHECK(v3.lookup("aa") == 2);
    CHECK(v3.lookup("zz") == 3);
}

TEST_CASE("build_vocab respects max_size and rejects empty corpora") {
    const auto v = build_vocab({make_doc({"a", "a", "b", "b", "c"})}, 3, 1);
    CHECK(v.size() == 3);  // PAD, UNK and the single best word
    CHECK(v.lookup("a") == 2);
    CHECK(v.lookup("c") == kUnkId);
    CHECK_THROWS_AS(build_vocab({}, 100, 1), ConfigError);
}

TEST_CASE("encode maps OOV to UNK, truncates and pads") {
    const auto vocab = build_vocab({make_doc({"great", "great"})}, 100, 1);
    CHECK(encode({"great"}, vocab, 400, 3) == std::vector<std::int32_t>{2, kPadId, kPadId});
    CHECK(encode({"martian"}, vocab, 400, 1) == std::vector<std::int32_t>{kUnkId});
    const std::vector<std::string> long_doc(500, "great");
    CHECK(encode(long_doc, vocab, 400, 1).size() == 400);
    CHECK(encode({}, vocab, 400, 1) == std::vector<std::int32_t>{kPadId});
}

TEST_CASE("load_imdb splits a tiny fixture deterministically and stratified") {
    TempDir tmp;
    const char* texts[] = {"good fine", "nice lovely", "bad awful", "poor dull"};
    for (int i = 0; i < 2; ++i) {
        write_file(tmp.path / "train/pos" / (std::to_string(i) + "_10.txt"), texts[i]);
        write_file(tmp.path / "train/neg" / (std::to_string(i) + "_1.txt"), texts[2 + i]);
        write_file(tmp.path / "test/pos" / (std::to_string(i) + "_9.txt"), texts[i]);
        write_file(tmp.path / "test/neg" / (std::to_string(i) + "_2.txt"), texts[2 + i]);
    }

    const RawSplits splits = load_imdb(tmp.path.string(), 13, 0.5);
    REQUIRE(splits.train.size() == 2);
    REQUIRE(splits.validation.size() == 2);
    REQUIRE(splits.test.size() == 4);

    auto count_label = [](const std::vector<RawDoc>& docs, int label) {
        std::size_t n = 0;
        for (const auto& d : docs) n += d.label == label ? 1 : 0;
        return n;
    };
    CHECK(count_label(splits.train, 0) == 1);
    CHECK(count_label(splits.train, 1) == 1);
    CHECK(count_label(splits.validation, 0) == 1);
    CHECK(count_label(splits.validation, 1) == 1);

    // same seed -> identical membership; validation disjoint from train
    const RawSplits again = load_imdb(tmp.path.string(), 13, 0.5);
    std::set<std::string> val_names, val_names_again, train_names;
    for (const auto& d : splits.validation) val_names.insert(d.source_name);
    for (const auto& d : again.validation) val_names_again.insert(d.source_name);
    for (const auto& d : splits.train) train_names.insert(d.source_name);
    CHECK(val_names == val_names_again);
    for (const auto& name : val_names) CHECK(train_names.count(name) == 0);
}

TEST_CASE("load_imdb errors name the missing directory") {
    TempDir tmp;
    write_file(tmp.path / "train/pos/0_1.txt", "x");
    try {
        load_imdb(tmp.path.string(), 1, 0.3);
        FAIL("expected IngestionError");
    } catch (const IngestionError& e) {
        CHECK(std::string(e.what()).find("neg") != std::string::npos);
    }
}

TEST_CASE("batches pad to the longest doc and cover everything") {
    std::vector<Document> docs;
    for (int i = 0; i < 5; ++i) {
        Document d;
        d.token_ids.assign(static_cast<std::size_t>(3 + (i % 2) * 2), 7);
        d.label = i % 2;
        docs.push_back(d);
    }
    Pcg32 rng = make_rng(3, RngStream::shuffling);
    const auto batches = make_batches(docs, 2, rng);
    REQUIRE(batches.size() == 3);
    std::size_t seen = 0;
    for (const auto& batch : batches) {
        seen += batch.rows;
        std::size_t longest = 0;
        for (std::size_t r = 0; r < batch.rows; ++r) {
            longest = std::max(longest, docs[batch.doc_index[r]].token_ids.size());
        }
        CHECK(batch.len == longest);
        CHECK(batch.ids.size() == batch.rows * batch.len);
    }
    CHECK(seen == docs.size());
}

TEST_CASE("batch shuffling advances across epochs but replays under the same seed") {
    std::vector<Document> docs(8);
    for (std::size_t i = 0; i < docs.size(); ++i) docs[i].token_ids = {static_cast<std::int32_t>(i + 2)};

    Pcg32 rng_a = make_rng(11, RngStream::shuffling);
    const auto epoch1_a = make_batches(docs, 8, rng_a);
    const auto epoch2_a = make_batches(docs, 8, rng_a);
    CHECK(epoch1_a[0].doc_index != epoch2_a[0].doc_index);

    Pcg32 rng_b = make_rng(11, RngStream::shuffling);
    const auto epoch1_b = make_batches(docs, 8, rng_b);
    const auto epoch2_b = make_batches(docs, 8, rng_b);
    CHECK(epoch1_a[0].doc_index == epoch1_b[0].doc_index);
    CHECK(epoch2_a[0].doc_index == epoch2_b[0].doc_index);
}

TEST_CASE("a batch larger than the corpus is a single batch") {
    std::vector<Document> docs(3);
    for (auto& d : docs) d.token_ids = {2};
    Pcg32 rng = make_rng(1, RngStream::shuffling);
    const auto batches = make_batches(docs, 64, rng);
    REQUIRE(batches.size() == 1);
    CHECK(batches[0].rows == 3);
}

TEST_CASE("vocabulary TSV round trip") {
    TempDir tmp;
    const auto vocab = build_vocab({make_doc({"b", "b", "a", "a", "a"})}, 100, 1);
    const auto path = (tmp.path / "vocab.tsv").string();
    save_vocab(vocab, path);
    const auto loaded = load_vocab(path);
    REQUIRE(loaded.size() == vocab.size());
    for (std::int32_t id = 0; id < vocab.size(); ++id) {
        CHECK(loaded.word_of[id] == vocab.word_of[id]);
        CHECK(loaded.count_of[id] == vocab.count_of[id]);
    }
    CHECK(loaded.lookup("a") == vocab.lookup("a"));
    CHECK(loaded.lookup("zebra") == kUnkId);
}

TEST_CASE("encode composed with tokenize is a pure function") {
    const auto vocab = build_vocab({make_doc({"alpha", "beta", "alpha"})}, 100, 1);
    const std::string text = "Alpha, beta! ALPHA?";
    CHECK(encode(tokenize(text), vocab) == encode(tokenize(text), vocab));
}
