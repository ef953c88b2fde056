// cnnrules: train a max-over-time CNN sentiment classifier, read its filters
// back as word rules, and evaluate the rule/linear reconstructions.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cnnrules/analysis.hpp"
#include "cnnrules/corpus.hpp"
#include "cnnrules/errors.hpp"
#include "cnnrules/extraction.hpp"
#include "cnnrules/model.hpp"
#include "cnnrules/rules.hpp"
#include "cnnrules/threads.hpp"
#include "cnnrules/trainer.hpp"

namespace fs = std::filesystem;
using namespace cnnrules;

namespace {

struct RunConfig {
    std::string data_dir;
    std::string out_dir;
    std::string model;
    std::string rules;
    std::string vocab;
    std::string conllu;
    std::string lex_pos;
    std::string lex_neg;
    std::string out;
    std::string preds_out;
    std::string split = "test";
    std::string mode = "conjunction";
    std::string vote = "count";
    std::uint64_t seed = 13;
    std::size_t dim = 64;
    std::size_t filters = 128;
    std::size_t max_width = 3;
    std::size_t top_m = 3;
    std::size_t epochs = 10;
    std::size_t batch = 64;
    std::size_t patience = 2;
    std::size_t vocab_size = 30000;
    std::size_t max_len = 400;
    std::size_t lin_epochs = 20;
    std::size_t lin_batch = 256;
    std::int64_t min_count = 2;
    double lr = 1e-3;
    double lin_lr = 1e-3;
    double l2 = 1e-4;
    double val_fraction = 0.3;
    bool bias = false;
    bool unique_pos = false;
    int threads = 0;
    std::size_t show = 0;
};

// JSON config file: known keys only, command-line flags win.
void apply_config_file(const std::string& path, CLI::App& cmd, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot read config file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ConfigError(path + ": config must be a JSON object");

    auto flag_given = [&cmd](const std::string& flag) {
        const CLI::Option* opt = cmd.get_option_no_throw("--" + flag);
        return opt != nullptr && opt->count() > 0;
    };

    for (const auto& [key, value] : doc.items()) {
        if (flag_given(key)) continue;
        if (key == "data_dir") cfg.data_dir = value.get<std::string>();
        else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
        else if (key == "model") cfg.model = value.get<std::string>();
        else if (key == "rules") cfg.rules = value.get<std::string>();
        else if (key == "vocab") cfg.vocab = value.get<std::string>();
        else if (key == "conllu") cfg.conllu = value.get<std::string>();
        else if (key == "lex_pos") cfg.lex_pos = value.get<std::string>();
        else if (key == "lex_neg") cfg.lex_neg = value.get<std::string>();
        else if (key == "out") cfg.out = value.get<std::string>();
        else if (key == "preds_out") cfg.preds_out = value.get<std::string>();
        else if (key == "split") cfg.split = value.get<std::string>();
        else if (key == "mode") cfg.mode = value.get<std::string>();
        else if (key == "vote") cfg.vote = value.get<std::string>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "dim") cfg.dim = value.get<std::size_t>();
        else if (key == "filters") cfg.filters = value.get<std::size_t>();
        else if (key == "max_width") cfg.max_width = value.get<std::size_t>();
        else if (key == "top_m") cfg.top_m = value.get<std::size_t>();
        else if (key == "epochs") cfg.epochs = value.get<std::size_t>();
        else if (key == "batch") cfg.batch = value.get<std::size_t>();
        else if (key == "patience") cfg.patience = value.get<std::size_t>();
        else if (key == "vocab_size") cfg.vocab_size = value.get<std::size_t>();
        else if (key == "max_len") cfg.max_len = value.get<std::size_t>();
        else if (key == "lin_epochs") cfg.lin_epochs = value.get<std::size_t>();
        else if (key == "lin_batch") cfg.lin_batch = value.get<std::size_t>();
        else if (key == "min_count") cfg.min_count = value.get<std::int64_t>();
        else if (key == "lr") cfg.lr = value.get<double>();
        else if (key == "lin_lr") cfg.lin_lr = value.get<double>();
        else if (key == "l2") cfg.l2 = value.get<double>();
        else if (key == "val_fraction") cfg.val_fraction = value.get<double>();
        else if (key == "bias") cfg.bias = value.get<bool>();
        else if (key == "unique") cfg.unique_pos = value.get<bool>();
        else if (key == "threads") cfg.threads = value.get<int>();
        else throw ConfigError(path + ": unknown config key \"" + key + "\"");
    }
}

std::string fmt(double value, int decimals = 4) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cannot write: " + path);
    out << text;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot read: " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw FormatError(path + ": invalid JSON");
    return doc;
}

// A checkpoint plus the vocabulary it was trained with.
struct LoadedModel {
    Parameters params;
    Vocabulary vocab;
    std::uint64_t seed = 0;
};

LoadedModel load_model(const std::string& model_path, const std::string& vocab_override) {
    Checkpoint ckpt = load_checkpoint(model_path);
    LoadedModel loaded;
    loaded.seed = ckpt.seed;

    std::string vocab_path = vocab_override;
    if (vocab_path.empty()) {
        vocab_path = ckpt.vocab_path;
        if (!vocab_path.empty() && !fs::exists(vocab_path)) {
            const fs::path sibling = fs::path(model_path).parent_path() / fs::path(vocab_path).filename();
            if (fs::exists(sibling)) vocab_path = sibling.string();
        }
    }
    if (vocab_path.empty() || !fs::exists(vocab_path)) {
        throw IngestionError("vocabulary file not found (checkpoint says \"" + ckpt.vocab_path +
                             "\"); pass --vocab");
    }
    loaded.vocab = load_vocab(vocab_path);
    if (loaded.vocab.size() != ckpt.params.config.vocab_size) {
        throw ContractViolation("vocabulary size " + std::to_string(loaded.vocab.size()) +
                                " does not match checkpoint vocab_size " +
                                std::to_string(ckpt.params.config.vocab_size));
    }
    loaded.params = std::move(ckpt.params);
    return loaded;
}

std::vector<Document> load_split_encoded(const RunConfig& cfg, const std::string& split,
                                         const Vocabulary& vocab, std::size_t min_len,
                                         std::uint64_t seed) {
    if (cfg.data_dir.empty()) throw ConfigError("--data-dir is required");
    const RawSplits raw = load_imdb(cfg.data_dir, seed, cfg.val_fraction);
    const std::vector<RawDoc>* docs = nullptr;
    if (split == "train") docs = &raw.train;
    else if (split == "val" || split == "validation") docs = &raw.validation;
    else if (split == "test") docs = &raw.test;
    else throw ConfigError("unknown split: " + split);
    return encode_docs(*docs, vocab, cfg.max_len, min_len);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_train(const RunConfig& cfg) {
    if (cfg.data_dir.empty()) throw ConfigError("--data-dir is required");
    if (cfg.out_dir.empty()) throw ConfigError("--out-dir is required");
    fs::create_directories(cfg.out_dir);

    std::cerr << "loading " << cfg.data_dir << "\n";
    const RawSplits raw = load_imdb(cfg.data_dir, cfg.seed, cfg.val_fraction);
    std::cerr << "train=" << raw.train.size() << " val=" << raw.validation.size()
              << " test=" << raw.test.size() << "\n";

    const Vocabulary vocab = build_vocab(raw.train, cfg.vocab_size, cfg.min_count);
    const std::string vocab_path = (fs::path(cfg.out_dir) / "vocab.tsv").string();
    save_vocab(vocab, vocab_path);
    std::cerr << "vocabulary " << vocab.size() << " words -> " << vocab_path << "\n";

    const std::size_t min_len = cfg.max_width;
    const auto train_docs = encode_docs(raw.train, vocab, cfg.max_len, min_len);
    const auto val_docs = encode_docs(raw.validation, vocab, cfg.max_len, min_len);

    ModelConfig model_cfg;
    model_cfg.vocab_size = vocab.size();
    model_cfg.d = cfg.dim;
    model_cfg.n = cfg.filters;
    model_cfg.max_width = cfg.max_width;
    model_cfg.has_output_bias = cfg.bias;

    TrainConfig train_cfg;
    train_cfg.lr = static_cast<float>(cfg.lr);
    train_cfg.batch_size = cfg.batch;
    train_cfg.max_epochs = cfg.epochs;
    train_cfg.patience = cfg.patience;
    train_cfg.seed = cfg.seed;

    const TrainResult result = train(model_cfg, train_cfg, train_docs, val_docs);
    for (const EpochStats& e : result.history.epochs) {
        std::cerr << "epoch " << e.epoch << " loss=" << fmt(e.train_loss, 6)
                  << " train_acc=" << fmt(e.train_acc) << " val_acc=" << fmt(e.val_acc) << "\n";
    }

    const std::string ckpt_path = (fs::path(cfg.out_dir) / "checkpoint.bin").string();
    save_checkpoint(result.params, cfg.seed, vocab_path, ckpt_path);
    save_history_jsonl(result.history, (fs::path(cfg.out_dir) / "history.jsonl").string());

    const EpochStats& best = result.history.epochs[result.history.best_epoch - 1];
    std::string summary = "{\"k\":" + std::to_string(cfg.max_width) + ",\"d\":" + std::to_string(cfg.dim) +
                          ",\"n\":" + std::to_string(cfg.filters) + ",\"seed\":" + std::to_string(cfg.seed) +
                          ",\"epochs_run\":" + std::to_string(result.history.epochs.size()) +
                          ",\"best_epoch\":" + std::to_string(result.history.best_epoch) +
                          ",\"best_val_acc\":" + fmt(best.val_acc) + "}\n";
    write_text((fs::path(cfg.out_dir) / "train_summary.json").string(), summary);

    std::cout << "best_epoch " << result.history.best_epoch << " val_acc " << fmt(best.val_acc) << "\n";
    std::cout << "checkpoint " << ckpt_path << "\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg) {
    const LoadedModel loaded = load_model(cfg.model, cfg.vocab);
    const auto docs =
        load_split_encoded(cfg, cfg.split, loaded.vocab, loaded.params.config.max_width, loaded.seed);
    const double acc = evaluate(loaded.params, docs);
    std::cout << "split " << cfg.split << " docs " << docs.size() << " accuracy " << fmt(acc) << "\n";
    if (!cfg.out.empty()) {
        write_text(cfg.out, "{\"split\":\"" + cfg.split + "\",\"docs\":" + std::to_string(docs.size()) +
                                ",\"accuracy\":" + fmt(acc) + "}\n");
    }
    return 0;
}

int cmd_extract(const RunConfig& cfg) {
    const LoadedModel loaded = load_model(cfg.model, cfg.vocab);
    const auto interps = extract_all(loaded.params, loaded.vocab, cfg.top_m);
    save_interpretations_json(interps, cfg.out);
    std::cout << "wrote " << interps.size() << " filter interpretations to " << cfg.out << "\n";

    if (cfg.show > 0) {
        // strongest output weights first
        std::vector<const FilterInterpretation*> by_weight;
        for (const auto& interp : interps) by_weight.push_back(&interp);
        std::sort(by_weight.begin(), by_weight.end(), [](const auto* a, const auto* b) {
            return std::fabs(a->v_weight) > std::fabs(b->v_weight);
        });
        for (std::size_t i = 0; i < std::min(cfg.show, by_weight.size()); ++i) {
            const FilterInterpretation& interp = *by_weight[i];
            std::printf("width %zu, weight %+.3e:\n", interp.width, static_cast<double>(interp.v_weight));
            for (const auto& position : interp.positions) {
                std::printf("  %s\n", render_words(position).c_str());
            }
        }
    }
    return 0;
}

std::vector<FilterInterpretation> interpretations_for(const RunConfig& cfg, const LoadedModel& loaded) {
    if (!cfg.rules.empty()) {
        // re-attach word ids so rule building can pattern-match on ids
        auto interps = load_interpretations_json(cfg.rules);
        for (auto& interp : interps) {
            for (auto& position : interp.positions) {
                for (auto& word : position) {
                    const std::int32_t id = loaded.vocab.lookup(word.word);
                    if (id == kUnkId) {
                        throw ContractViolation("rules file word \"" + word.word +
                                                "\" is not in the model vocabulary");
                    }
                    word.word_id = id;
                }
            }
        }
        return interps;
    }
    return extract_all(loaded.params, loaded.vocab, cfg.top_m);
}

int cmd_rules_eval(const RunConfig& cfg) {
    const LoadedModel loaded = load_model(cfg.model, cfg.vocab);
    const auto docs =
        load_split_encoded(cfg, cfg.split, loaded.vocab, loaded.params.config.max_width, loaded.seed);
    const auto interps = interpretations_for(cfg, loaded);
    const VoteMode vote = parse_vote_mode(cfg.vote);

    double accs[2] = {0.0, 0.0};
    for (const RuleMode mode : {RuleMode::conjunction, RuleMode::disjunction}) {
        const RuleSet rules = build_rules(interps, mode);
        const auto features = featurize_corpus(docs, rules);
        std::vector<int> preds(docs.size());
        std::size_t correct = 0;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            preds[i] = rule_classify(features[i], rules, vote);
            correct += preds[i] == docs[i].label ? 1 : 0;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(docs.size());
        accs[mode == RuleMode::conjunction ? 0 : 1] = acc;
        const char* name = mode == RuleMode::conjunction ? "conjunction" : "disjunction";
        std::cout << "rules " << name << " accuracy " << fmt(acc) << "\n";
        if (!cfg.preds_out.empty()) {
            save_predictions_tsv(docs, preds, cfg.preds_out + "." + name + ".tsv");
        }
    }
    if (!cfg.out.empty()) {
        write_text(cfg.out, "{\"split\":\"" + cfg.split + "\",\"vote\":\"" + cfg.vote +
                                "\",\"top_m\":" + std::to_string(cfg.top_m) +
                                ",\"conjunction_acc\":" + fmt(accs[0]) +
                                ",\"disjunction_acc\":" + fmt(accs[1]) + "}\n");
    }
    return 0;
}

int cmd_linear(const RunConfig& cfg) {
    const LoadedModel loaded = load_model(cfg.model, cfg.vocab);
    const std::size_t min_len = loaded.params.config.max_width;
    const auto train_docs = load_split_encoded(cfg, "train", loaded.vocab, min_len, loaded.seed);
    const auto test_docs = load_split_encoded(cfg, cfg.split, loaded.vocab, min_len, loaded.seed);

    const auto interps = interpretations_for(cfg, loaded);
    const RuleSet rules = build_rules(interps, parse_rule_mode(cfg.mode));

    const auto train_features = featurize_corpus(train_docs, rules);
    std::vector<int> train_labels(train_docs.size());
    for (std::size_t i = 0; i < train_docs.size(); ++i) train_labels[i] = train_docs[i].label;

    LogisticConfig lin_cfg;
    lin_cfg.l2 = static_cast<float>(cfg.l2);
    lin_cfg.lr = static_cast<float>(cfg.lin_lr);
    lin_cfg.epochs = cfg.lin_epochs;
    lin_cfg.batch_size = cfg.lin_batch;
    lin_cfg.seed = cfg.seed;
    const LinearModel model = train_logistic(train_features, train_labels, lin_cfg);

    auto accuracy_on = [&model](const std::vector<Document>& docs,
                                const std::vector<FeatureVector>& features) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            correct += linear_classify(model, features[i]) == docs[i].label ? 1 : 0;
        }
        return static_cast<double>(correct) / static_cast<double>(docs.size());
    };
    const double train_acc = accuracy_on(train_docs, train_features);
    const auto test_features = featurize_corpus(test_docs, rules);
    const double test_acc = accuracy_on(test_docs, test_features);

    std::cout << "linear " << cfg.mode << " train_acc " << fmt(train_acc) << " " << cfg.split << "_acc "
              << fmt(test_acc) << "\n";
    if (!cfg.out.empty()) {
        write_text(cfg.out, "{\"interp\":\"" + cfg.mode + "\",\"top_m\":" + std::to_string(cfg.top_m) +
                                ",\"l2\":" + fmt(cfg.l2, 6) + ",\"train_acc\":" + fmt(train_acc) +
                                ",\"test_acc\":" + fmt(test_acc) + "}\n");
    }
    return 0;
}

std::vector<FilterInterpretation> interpretations_for_analysis(const RunConfig& cfg) {
    if (!cfg.rules.empty()) return load_interpretations_json(cfg.rules);
    if (!cfg.model.empty()) {
        const LoadedModel loaded = load_model(cfg.model, cfg.vocab);
        return extract_all(loaded.params, loaded.vocab, cfg.top_m);
    }
    throw ConfigError("pass --rules or --model");
}

int cmd_analyze_pos(const RunConfig& cfg) {
    const auto interps = interpretations_for_analysis(cfg);
    const PosLexicon lexicon = load_conllu_pos(cfg.conllu);
    const PosStats stats = pos_distribution(interps, lexicon, cfg.unique_pos);

    std::string json = "{\"unique\":" + std::string(cfg.unique_pos ? "true" : "false") +
                       ",\"known_slots\":" + std::to_string(stats.known_slots) +
                       ",\"unknown_slots\":" + std::to_string(stats.unknown_slots) + ",\"percent\":{";
    bool first = true;
    for (const char* bucket : {"ADJ", "ADV", "NOUN", "VERB", "PROPN", "NUM", "rest"}) {
        if (!first) json += ',';
        json += "\"" + std::string(bucket) + "\":" + fmt(stats.percent.at(bucket), 1);
        first = false;
        std::cout << bucket << " " << fmt(stats.percent.at(bucket), 1) << "\n";
    }
    json += "}}\n";
    if (!cfg.out.empty()) write_text(cfg.out, json);
    return 0;
}

int cmd_analyze_lexicon(const RunConfig& cfg) {
    const auto interps = interpretations_for_analysis(cfg);
    const SentimentLexicon lex = load_opinion_lexicon(cfg.lex_pos, cfg.lex_neg);
    std::cerr << "lexicon positive=" << lex.positive.size() << " negative=" << lex.negative.size() << "\n";
    const LexiconStats stats = lexicon_stats(interps, lex);

    std::cout << "coverage " << fmt(stats.coverage) << " (" << stats.unique_in_lexicon << "/"
              << stats.unique_words << " unique words)\n";
    std::cout << "precision_pos " << (stats.precision_pos ? fmt(*stats.precision_pos) : "n/a") << "\n";
    std::cout << "precision_neg " << (stats.precision_neg ? fmt(*stats.precision_neg) : "n/a") << "\n";
    if (!cfg.out.empty()) {
        write_text(cfg.out,
                   "{\"unique_words\":" + std::to_string(stats.unique_words) +
                       ",\"unique_in_lexicon\":" + std::to_string(stats.unique_in_lexicon) +
                       ",\"coverage\":" + fmt(stats.coverage) +
                       ",\"precision_pos\":" + (stats.precision_pos ? fmt(*stats.precision_pos) : "null") +
                       ",\"precision_neg\":" + (stats.precision_neg ? fmt(*stats.precision_neg) : "null") +
                       ",\"slots_pos_predicted\":" + std::to_string(stats.slots_pos_predicted) +
                       ",\"slots_neg_predicted\":" + std::to_string(stats.slots_neg_predicted) + "}\n");
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out_path) {
    std::string md =
        "| k | CNN | Rules (&) | Rules (v) | Classifier |\n"
        "|---|-----|-----------|-----------|------------|\n";
    std::vector<std::pair<std::string, nlohmann::json>> pos_rows;

    auto pct = [](const nlohmann::json& j, const char* key) -> std::string {
        if (!j.contains(key)) return "-";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", j[key].get<double>() * 100.0);
        return buf;
    };

    for (const std::string& run : runs) {
        const fs::path dir(run);
        if (!fs::is_directory(dir)) throw IngestionError("run directory not found: " + run);
        std::string k = "-";
        if (fs::exists(dir / "train_summary.json")) {
            k = std::to_string(read_json((dir / "train_summary.json").string())["k"].get<std::size_t>());
        }
        nlohmann::json eval_j, rules_j, linear_j;
        if (fs::exists(dir / "eval_test.json")) eval_j = read_json((dir / "eval_test.json").string());
        if (fs::exists(dir / "rules_eval.json")) rules_j = read_json((dir / "rules_eval.json").string());
        if (fs::exists(dir / "linear.json")) linear_j = read_json((dir / "linear.json").string());
        md += "| " + k + " | " + pct(eval_j, "accuracy") + " | " + pct(rules_j, "conjunction_acc") +
              " | " + pct(rules_j, "disjunction_acc") + " | " + pct(linear_j, "test_acc") + " |\n";

        if (fs::exists(dir / "pos.json")) pos_rows.emplace_back(k, read_json((dir / "pos.json").string()));
    }

    if (!pos_rows.empty()) {
        md += "\n| POS |";
        for (const auto& [k, j] : pos_rows) md += " k=" + k + " |";
        md += "\n|-----|";
        for (std::size_t i = 0; i < pos_rows.size(); ++i) md += "-----|";
        md += "\n";
        for (const char* bucket : {"ADJ", "ADV", "NOUN", "VERB", "PROPN", "NUM", "rest"}) {
            md += "| " + std::string(bucket) + " |";
            for (const auto& [k, j] : pos_rows) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), " %.1f |", j["percent"][bucket].get<double>());
                md += buf;
            }
            md += "\n";
        }
    }

    std::cout << md;
    if (!out_path.empty()) write_text(out_path, md);
    return 0;
}

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file; explicit flags win");
    cmd->add_option("--threads", cfg.threads, "cap worker threads (results do not depend on it)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convolutional sentiment classifier and its word-rule reconstruction"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string runs_arg;

    CLI::App* train_cmd = app.add_subcommand("train", "train the CNN on an aclImdb-style directory");
    train_cmd->add_option("--data-dir", cfg.data_dir, "dataset root with train/ and test/");
    train_cmd->add_option("--out-dir", cfg.out_dir, "output directory for artifacts");
    train_cmd->add_option("--seed", cfg.seed, "master seed");
    train_cmd->add_option("--dim", cfg.dim, "embedding dimension");
    train_cmd->add_option("--filters", cfg.filters, "filters per width");
    train_cmd->add_option("--max-width", cfg.max_width, "largest kernel width (widths 1..k)");
    train_cmd->add_option("--epochs", cfg.epochs, "maximum epochs");
    train_cmd->add_option("--batch", cfg.batch, "batch size");
    train_cmd->add_option("--lr", cfg.lr, "Adam learning rate");
    train_cmd->add_option("--patience", cfg.patience, "early-stopping patience in epochs");
    train_cmd->add_option("--vocab-size", cfg.vocab_size, "maximum vocabulary size");
    train_cmd->add_option("--min-count", cfg.min_count, "minimum word frequency");
    train_cmd->add_option("--max-len", cfg.max_len, "truncate documents to this many tokens");
    train_cmd->add_option("--val-fraction", cfg.val_fraction, "validation fraction of the train pool");
    train_cmd->add_flag("--bias", cfg.bias, "add an output bias term");
    add_common(train_cmd, cfg, config_path);

    CLI::App* eval_cmd = app.add_subcommand("eval", "accuracy of a checkpoint on a split");
    eval_cmd->add_option("--model", cfg.model, "checkpoint path")->required();
    eval_cmd->add_option("--data-dir", cfg.data_dir, "dataset root");
    eval_cmd->add_option("--split", cfg.split, "train, val or test");
    eval_cmd->add_option("--vocab", cfg.vocab, "vocabulary TSV (defaults to the checkpoint's)");
    eval_cmd->add_option("--max-len", cfg.max_len, "truncate documents to this many tokens");
    eval_cmd->add_option("--val-fraction", cfg.val_fraction, "validation fraction of the train pool");
    eval_cmd->add_option("--out", cfg.out, "write accuracy JSON here");
    add_common(eval_cmd, cfg, config_path);

    CLI::App* extract_cmd = app.add_subcommand("extract", "write filter interpretations as JSON");
    extract_cmd->add_option("--model", cfg.model, "checkpoint path")->required();
    extract_cmd->add_option("--top-m", cfg.top_m, "words per weight vector");
    extract_cmd->add_option("--vocab", cfg.vocab, "vocabulary TSV");
    extract_cmd->add_option("--out", cfg.out, "rules JSON output path")->required();
    extract_cmd->add_option("--show", cfg.show, "also print the strongest filters");
    add_common(extract_cmd, cfg, config_path);

    CLI::App* rules_cmd = app.add_subcommand("rules-eval", "accuracy of the rule vote classifier");
    rules_cmd->add_option("--model", cfg.model, "checkpoint path")->required();
    rules_cmd->add_option("--data-dir", cfg.data_dir, "dataset root");
    rules_cmd->add_option("--split", cfg.split, "train, val or test");
    rules_cmd->add_option("--rules", cfg.rules, "reuse a rules JSON instead of re-extracting");
    rules_cmd->add_option("--top-m", cfg.top_m, "words per weight vector");
    rules_cmd->add_option("--vote", cfg.vote, "count or weighted");
    rules_cmd->add_option("--vocab", cfg.vocab, "vocabulary TSV");
    rules_cmd->add_option("--max-len", cfg.max_len, "truncate documents to this many tokens");
    rules_cmd->add_option("--val-fraction", cfg.val_fraction, "validation fraction of the train pool");
    rules_cmd->add_option("--out", cfg.out, "write accuracies JSON here");
    rules_cmd->add_option("--preds-out", cfg.preds_out, "prefix for per-document prediction TSVs");
    add_common(rules_cmd, cfg, config_path);

    CLI::App* linear_cmd = app.add_subcommand("linear", "retrain a linear classifier on rule features");
    linear_cmd->add_option("--model", cfg.model, "checkpoint path")->required();
    linear_cmd->add_option("--data-dir", cfg.data_dir, "dataset root");
    linear_cmd->add_option("--split", cfg.split, "evaluation split");
    linear_cmd->add_option("--rules", cfg.rules, "reuse a rules JSON instead of re-extracting");
    linear_cmd->add_option("--top-m", cfg.top_m, "words per weight vector");
    linear_cmd->add_option("--mode", cfg.mode, "conjunction or disjunction features");
    linear_cmd->add_option("--l2", cfg.l2, "L2 penalty on weights");
    linear_cmd->add_option("--lin-lr", cfg.lin_lr, "logistic learning rate");
    linear_cmd->add_option("--lin-epochs", cfg.lin_epochs, "logistic epochs");
    linear_cmd->add_option("--lin-batch", cfg.lin_batch, "logistic batch size");
    linear_cmd->add_option("--vocab", cfg.vocab, "vocabulary TSV");
    linear_cmd->add_option("--max-len", cfg.max_len, "truncate documents to this many tokens");
    linear_cmd->add_option("--val-fraction", cfg.val_fraction, "validation fraction of the train pool");
    linear_cmd->add_option("--out", cfg.out, "write accuracies JSON here");
    add_common(linear_cmd, cfg, config_path);

    CLI::App* pos_cmd = app.add_subcommand("analyze-pos", "POS distribution of extracted words");
    pos_cmd->add_option("--rules", cfg.rules, "rules JSON from extract");
    pos_cmd->add_option("--model", cfg.model, "checkpoint path (alternative to --rules)");
    pos_cmd->add_option("--vocab", cfg.vocab, "vocabulary TSV");
    pos_cmd->add_option("--top-m", cfg.top_m, "words per weight vector");
    pos_cmd->add_option("--conllu", cfg.conllu, "CoNLL-U treebank file")->required();
    pos_cmd->add_flag("--unique", cfg.unique_pos, "count unique words instead of slots");
    pos_cmd->add_option("--out", cfg.out, "write percentages JSON here");
    add_common(pos_cmd, cfg, config_path);

    CLI::App* lex_cmd = app.add_subcommand("analyze-lexicon", "opinion-lexicon coverage and precision");
    lex_cmd->add_option("--rules", cfg.rules, "rules JSON from extract");
    lex_cmd->add_option("--model", cfg.model, "checkpoint path (alternative to --rules)");
    lex_cmd->add_option("--vocab", cfg.vocab, "vocabulary TSV");
    lex_cmd->add_option("--top-m", cfg.top_m, "words per weight vector");
    lex_cmd->add_option("--lex-pos", cfg.lex_pos, "positive word list")->required();
    lex_cmd->add_option("--lex-neg", cfg.lex_neg, "negative word list")->required();
    lex_cmd->add_option("--out", cfg.out, "write stats JSON here");
    add_common(lex_cmd, cfg, config_path);

    CLI::App* report_cmd = app.add_subcommand("report", "markdown tables from prior run artifacts");
    report_cmd->add_option("--runs", runs_arg, "comma-separated run directories")->required();
    report_cmd->add_option("--out", cfg.out, "write the markdown here");
    add_common(report_cmd, cfg, config_path);

    try {
        app.parse(argc, argv);

        CLI::App* active = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(config_path, *active, cfg);
        if (cfg.threads > 0) set_worker_count(cfg.threads);

        if (active == train_cmd) return cmd_train(cfg);
        if (active == eval_cmd) return cmd_eval(cfg);
        if (active == extract_cmd) return cmd_extract(cfg);
        if (active == rules_cmd) return cmd_rules_eval(cfg);
        if (active == linear_cmd) return cmd_linear(cfg);
        if (active == pos_cmd) return cmd_analyze_pos(cfg);
        if (active == lex_cmd) return cmd_analyze_lexicon(cfg);
        if (active == report_cmd) {
            std::vector<std::string> runs;
            std::size_t start = 0;
            while (start < runs_arg.size()) {
                const std::size_t comma = runs_arg.find(',', start);
                const std::size_t end = comma == std::string::npos ? runs_arg.size() : comma;
                if (end > start) runs.push_back(runs_arg.substr(start, end - start));
                start = end + 1;
            }
            return cmd_report(runs, cfg.out);
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);  // usage errors exit 1 via CLI11
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IngestionError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
