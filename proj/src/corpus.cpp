#include "cnnrules/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cnnrules/errors.hpp"

namespace fs = std::filesystem;

namespace cnnrules {

namespace {

bool is_token_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\''; }

void push_token(std::vector<std::string>& out, std::string& cur) {
    std::size_t b = 0;
    std::size_t e = cur.size();
    while (b < e && cur[b] == '\'') ++b;
    while (e > b && cur[e - 1] == '\'') --e;
    if (e > b) out.push_back(cur.substr(b, e - b));
    cur.clear();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size();) {
        if (text.compare(i, 6, "<br />") == 0) {
            push_token(out, cur);
            i += 6;
            continue;
        }
        if (text.compare(i, 4, "<br>") == 0) {
            push_token(out, cur);
            i += 4;
            continue;
        }
        char c = text[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (is_token_char(c)) {
            cur.push_back(c);
        } else {
            push_token(out, cur);
        }
        ++i;
    }
    push_token(out, cur);
    return out;
}

Vocabulary build_vocab(const std::vector<RawDoc>& train_docs, std::size_t max_size, std::int64_t min_count) {
    if (train_docs.empty()) throw ConfigError("build_vocab: empty training set");
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& doc : train_docs) {
        for (const auto& tok : doc.tokens) ++counts[tok];
    }
    std::vector<std::pair<std::string, std::int64_t>> entries;
    entries.reserve(counts.size());
    for (auto& kv : counts) {
        if (kv.second >= min_count) entries.emplace_back(kv.first, kv.second);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (max_size < 2) throw ConfigError("build_vocab: max_size must be at least 2");
    if (entries.size() > max_size - 2) entries.resize(max_size - 2);

    Vocabulary vocab;
    vocab.word_of = {"<pad>", "<unk>"};
    vocab.count_of = {0, 0};
    for (auto& [word, count] : entries) {
        const auto id = static_cast<std::int32_t>(vocab.word_of.size());
        vocab.id_of.emplace(word, id);
        vocab.word_of.push_back(word);
        vocab.count_of.push_back(count);
    }
    return vocab;
}

namespace {

std::vector<RawDoc> read_label_dir(const std::string& dir, int label) {
    if (!fs::is_directory(dir)) throw IngestionError("missing directory: " + dir);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    std::vector<RawDoc> docs;
    docs.reserve(names.size());
    for (const auto& name : names) {
        RawDoc doc;
        doc.tokens = tokenize(read_file(dir + "/" + name));
        doc.label = label;
        doc.source_name = (label == 1 ? "pos/" : "neg/") + name;
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace

RawSplits load_imdb(const std::string& root_dir, std::uint64_t seed, double val_fraction) {
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
        throw ConfigError("load_imdb: val_fraction must be in [0, 1)");
    }
    RawSplits splits;
    Pcg32 rng = make_rng(seed, RngStream::splits);
    for (int label : {0, 1}) {
        const std::string sub = label == 1 ? "pos" : "neg";
        auto pool = read_label_dir(root_dir + "/train/" + sub, label);
        std::vector<std::size_t> order(pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(order, rng);
        const auto n_val = static_cast<std::size_t>(
            std::llround(val_fraction * static_cast<double>(pool.size())));
        std::vector<bool> in_val(pool.size(), false);
        for (std::size_t i = 0; i < n_val; ++i) in_val[order[i]] = true;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            (in_val[i] ? splits.validation : splits.train).push_back(std::move(pool[i]));
        }
        auto test_docs = read_label_dir(root_dir + "/test/" + sub, label);
        for (auto& d : test_docs) splits.test.push_back(std::move(d));
    }
    return splits;
}

std::vector<std::int32_t> encode(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                 std::size_t max_len, std::size_t min_len) {
    std::vector<std::int32_t> ids;
    ids.reserve(std::max(std::min(tokens.size(), max_len), min_len));
    for (const auto& tok : tokens) {
        if (ids.size() == max_len) break;
        ids.push_back(vocab.lookup(tok));
    }
    while (ids.size() < std::max<std::size_t>(min_len, 1)) ids.push_back(kPadId);
    return ids;
}

std::vector<Document> encode_docs(const std::vector<RawDoc>& docs, const Vocabulary& vocab,
                                  std::size_t max_len, std::size_t min_len) {
    std::vector<Document> out;
    out.reserve(docs.size());
    for (const auto& raw : docs) {
        Document doc;
        doc.token_ids = encode(raw.tokens, vocab, max_len, min_len);
        doc.label = raw.label;
        doc.source_name = raw.source_name;
        out.push_back(std::move(doc));
    }
    return out;
}

DatasetSplits encode_splits(const RawSplits& raw, const Vocabulary& vocab, std::size_t max_len,
                            std::size_t min_len) {
    DatasetSplits splits;
    splits.train = encode_docs(raw.train, vocab, max_len, min_len);
    splits.validation = encode_docs(raw.validation, vocab, max_len, min_len);
    splits.test = encode_docs(raw.test, vocab, max_len, min_len);
    return splits;
}

std::vector<Batch> make_batches(const std::vector<Document>& docs, std::size_t batch_size, Pcg32& rng) {
    if (batch_size == 0) throw ConfigError("make_batches: batch_size must be positive");
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);

    std::vector<Batch> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t rows = std::min(batch_size, order.size() - start);
        Batch batch;
        batch.rows = rows;
        batch.len = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            batch.len = std::max(batch.len, docs[order[start + r]].token_ids.size());
        }
        batch.ids.assign(rows * batch.len, kPadId);
        batch.labels.resize(rows);
        batch.doc_index.resize(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const Document& doc = docs[order[start + r]];
            std::copy(doc.token_ids.begin(), doc.token_ids.end(), batch.ids.begin() + r * batch.len);
            batch.labels[r] = doc.label;
            batch.doc_index[r] = order[start + r];
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write vocabulary file: " + path);
    for (std::int32_t id = 0; id < vocab.size(); ++id) {
        out << id << '\t' << vocab.word_of[id] << '\t' << vocab.count_of[id] << '\n';
    }
}

Vocabulary load_vocab(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read vocabulary file: " + path);
    Vocabulary vocab;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id_str, word, count_str;
        if (!std::getline(ss, id_str, '\t') || !std::getline(ss, word, '\t') ||
            !std::getline(ss, count_str)) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected id<TAB>word<TAB>count");
        }
        const long id = std::stol(id_str);
        if (id != static_cast<long>(vocab.word_of.size())) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": ids must be dense ascending from 0");
        }
        vocab.word_of.push_back(word);
        vocab.count_of.push_back(std::stoll(count_str));
        if (id >= 2) vocab.id_of.emplace(word, static_cast<std::int32_t>(id));
    }
    if (vocab.size() < 2) throw FormatError(path + ": vocabulary must contain the two reserved ids");
    return vocab;
}

}  // namespace cnnrules
