#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cnnrules/rng.hpp"

namespace cnnrules {

constexpr std::int32_t kPadId = 0;
constexpr std::int32_t kUnkId = 1;

// Lowercases ASCII, treats "<br />" / "<br>" as spaces, keeps maximal runs
// of [a-z0-9'], strips leading/trailing apostrophes. Any other byte is a
// separator.
std::vector<std::string> tokenize(const std::string& text);

// word <-> id with training counts. Ids 0/1 are reserved for PAD/UNK;
// ids 2..V-1 are ordered by (count desc, word asc).
struct Vocabulary {
    std::unordered_map<std::string, std::int32_t> id_of;
    std::vector<std::string> word_of;   // indexed by id; [0]="<pad>", [1]="<unk>"
    std::vector<std::int64_t> count_of; // indexed by id; 0 for reserved ids

    std::int32_t size() const { return static_cast<std::int32_t>(word_of.size()); }

    std::int32_t lookup(const std::string& word) const {
        auto it = id_of.find(word);
        return it == id_of.end() ? kUnkId : it->second;
    }
};

// Tokenized file plus its label, before vocabulary encoding.
struct RawDoc {
    std::vector<std::string> tokens;
    int label = 0;  // 0=negative, 1=positive
    std::string source_name;
};

struct RawSplits {
    std::vector<RawDoc> train;
    std::vector<RawDoc> validation;
    std::vector<RawDoc> test;
};

// Encoded document; length >= 1 (empty inputs become a single PAD).
struct Document {
    std::vector<std::int32_t> token_ids;
    int label = 0;
    std::string source_name;
};

struct DatasetSplits {
    std::vector<Document> train;
    std::vector<Document> validation;
    std::vector<Document> test;
};

Vocabulary build_vocab(const std::vector<RawDoc>& train_docs, std::size_t max_size = 30000,
                       std::int64_t min_count = 2);

// aclImdb-style tree root/{train,test}/{pos,neg}/*.txt. Files are read in
// sorted-filename order per directory. The validation split takes
// round(val_fraction * class size) docs per class out of the training pool,
// chosen by a seeded shuffle on the splits stream.
RawSplits load_imdb(const std::string& root_dir, std::uint64_t seed, double val_fraction = 0.3);

std::vector<std::int32_t> encode(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                 std::size_t max_len = 400, std::size_t min_len = 1);

std::vector<Document> encode_docs(const std::vector<RawDoc>& docs, const Vocabulary& vocab,
                                  std::size_t max_len = 400, std::size_t min_len = 1);

DatasetSplits encode_splits(const RawSplits& raw, const Vocabulary& vocab, std::size_t max_len = 400,
                            std::size_t min_len = 1);

// One shuffled epoch worth of batches; ids are right-padded with PAD to the
// longest doc in each batch and laid out row-major.
struct Batch {
    std::vector<std::int32_t> ids;      // rows * len
    std::vector<int> labels;            // rows
    std::vector<std::size_t> doc_index; // rows, indices into the source vector
    std::size_t rows = 0;
    std::size_t len = 0;
};

std::vector<Batch> make_batches(const std::vector<Document>& docs, std::size_t batch_size, Pcg32& rng);

// TSV "id<TAB>word<TAB>count", one line per id, LF endings.
void save_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

}  // namespace cnnrules
