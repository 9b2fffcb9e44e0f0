// tweetsent: batch CLI wiring the sentiment pipeline end to end.
// Subcommands read declared inputs and write declared outputs under the
// configured out_dir; a fixed seed makes the whole chain byte-reproducible.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tweetsent/archs.hpp"
#include "tweetsent/autodiff.hpp"
#include "tweetsent/bertprep.hpp"
#include "tweetsent/config.hpp"
#include "tweetsent/corpus.hpp"
#include "tweetsent/csv.hpp"
#include "tweetsent/embed.hpp"
#include "tweetsent/evalreport.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/nb.hpp"
#include "tweetsent/textclean.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tweetsent;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string input;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config JSON");
    cmd->add_option("--input", args.input, "input file (overrides paths.input)");
    cmd->add_option("--output", args.output, "output directory (overrides paths.out_dir)");
    cmd->add_option("--seed", args.seed, "seed (overrides config seed)");
    cmd->add_option("--set", args.overrides, "config override key=value (repeatable)");
}

PipelineConfig resolve(const CommonArgs& args, const std::string& subcommand) {
    PipelineConfig config = args.config_path.empty()
                                ? PipelineConfig::from_json(json::object())
                                : PipelineConfig::load(args.config_path);
    for (const auto& assignment : args.overrides) config.set_override(assignment);
    if (!args.input.empty()) config.tree["paths"]["input"] = args.input;
    if (!args.output.empty()) config.tree["paths"]["out_dir"] = args.output;
    if (args.seed) config.tree["seed"] = *args.seed;
    config.log_defaults(std::cerr);
    fs::create_directories(config.out_dir());
    std::ofstream echo(config.out_dir() + "/resolved_config_" + subcommand + ".json",
                       std::ios::binary);
    echo << config.tree.dump(2) << "\n";
    return config;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

CleanConfig clean_config_of(const PipelineConfig& config) {
    const auto& c = config.tree.at("clean");
    CleanConfig out;
    out.min_words = c.at("min_words");
    const auto& stages = c.at("stages");
    out.stage_patterns = stages.at("patterns");
    out.stage_contractions = stages.at("contractions");
    out.stage_slang = stages.at("slang");
    out.stage_stopwords = stages.at("stopwords");
    out.stage_lemmatize = stages.at("lemmatize");
    out.stage_phonetic = stages.at("phonetic");
    return out;
}

TokenDocs tokenize_corpus(const Corpus& corpus) {
    TokenDocs docs;
    docs.reserve(corpus.size());
    for (const auto& record : corpus.records) {
        std::vector<std::string> tokens;
        std::istringstream in(record.text);
        std::string token;
        while (in >> token) tokens.push_back(token);
        docs.push_back(std::move(tokens));
    }
    return docs;
}

std::vector<SentimentLabel> labels_of(const Corpus& corpus) {
    std::vector<SentimentLabel> out;
    out.reserve(corpus.size());
    for (const auto& record : corpus.records) out.push_back(record.label);
    return out;
}

int emit_formats(const PipelineConfig& config) {
    int formats = 0;
    for (const auto& f : config.tree.at("report").at("formats")) {
        const std::string name = f.get<std::string>();
        if (name == "json") formats |= static_cast<int>(EmitFormat::Json);
        else if (name == "csv") formats |= static_cast<int>(EmitFormat::Csv);
        else if (name == "svg") formats |= static_cast<int>(EmitFormat::Svg);
        else throw ConfigError("unknown report format: " + name);
    }
    return formats;
}

// ---------------------------------------------------------------------------

void run_clean(const PipelineConfig& config) {
    const auto corpus = load_csv(config.input());
    auto lexicons = LexiconSet::load(config.tree.at("paths").at("lexicon_dir"));
    const auto clean_cfg = clean_config_of(config);
    Cleaner cleaner(std::move(lexicons), clean_cfg);

    // Phonetic normalization needs token frequencies, which come from a
    // first pass without that stage over the corpus being cleaned.
    if (clean_cfg.stage_phonetic) {
        CleanConfig first = clean_cfg;
        first.stage_phonetic = false;
        Cleaner pass1(cleaner.lexicons(), first);
        TokenDocs survivors;
        for (const auto& cleaned : pass1.clean_all(corpus))
            if (!cleaned.dropped) survivors.push_back(cleaned.tokens);
        cleaner.fit_phonetic(survivors);
    }

    const auto cleaned = cleaner.clean_all(corpus);
    Corpus kept;
    for (const auto& record : cleaned)
        if (!record.dropped) kept.records.push_back({record.cleaned_text, record.original.label});
    write_file(config.out_dir() + "/cleaned.csv", save_csv_string(kept));

    const auto stats = length_stats(cleaned);
    std::string stats_csv = "original_length,cleaned_length,token_count,dropped\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const char* reason = "";
        if (cleaned[i].dropped) {
            switch (*cleaned[i].dropped) {
                case DropReason::Empty: reason = "empty"; break;
                case DropReason::TooShort: reason = "too_short"; break;
                case DropReason::NotEnglish: reason = "not_english"; break;
            }
        }
        stats_csv += std::to_string(stats[i].original_length) + "," +
                     std::to_string(stats[i].cleaned_length) + "," +
                     std::to_string(stats[i].token_count) + "," + reason + "\n";
    }
    write_file(config.out_dir() + "/length_stats.csv", stats_csv);
    std::cerr << "clean: " << kept.records.size() << " of " << corpus.size()
              << " records kept\n";
}

void run_split(const PipelineConfig& config) {
    const std::string in_path =
        config.input().empty() ? config.out_dir() + "/cleaned.csv" : config.input();
    const auto corpus = load_csv(in_path);
    SplitResult parts;
    const std::size_t head_n = config.tree.at("split").at("head_n");
    if (head_n > 0) {
        parts = split_head(corpus.size(), head_n, "val", "train");
    } else {
        parts = split_indices(corpus.size(), config.split_spec());
    }
    for (const auto& [name, indices] : parts.manifests) {
        json manifest = indices;
        write_file(config.out_dir() + "/split_" + name + ".json", manifest.dump() + "\n");
        Corpus sub;
        for (auto i : indices) sub.records.push_back(corpus.records[i]);
        write_file(config.out_dir() + "/" + name + ".csv", save_csv_string(sub));
        std::cerr << "split: " << name << " = " << indices.size() << " records\n";
    }
}

void run_featurize(const PipelineConfig& config) {
    const auto& feat = config.tree.at("features");
    const std::string fit_split = feat.at("fit_split");
    const std::string fit_path = config.input().empty()
                                     ? config.out_dir() + "/" + fit_split + ".csv"
                                     : config.input();
    const auto fit_corpus = load_csv(fit_path);
    const auto fit_docs = tokenize_corpus(fit_corpus);
    const std::size_t max_features = feat.at("max_features");
    const auto vocab = fit_vocab(
        fit_docs, {feat.at("ngram_min").get<std::size_t>(), feat.at("ngram_max").get<std::size_t>()},
        max_features ? std::optional<std::size_t>(max_features) : std::nullopt);
    write_file(config.out_dir() + "/vocab.json", vocab_to_json(vocab).dump() + "\n");

    std::vector<std::string> split_names;
    for (const auto& f : config.tree.at("split").at("fractions"))
        split_names.push_back(f.at("name"));
    const bool tfidf = feat.at("tfidf");
    for (const auto& name : split_names) {
        const std::string path = config.out_dir() + "/" + name + ".csv";
        if (!fs::exists(path)) continue;
        const auto docs = tokenize_corpus(load_csv(path));
        const auto counts = count_transform(docs, vocab);
        save_sparse(counts, config.out_dir() + "/features_" + name + "_counts.bin");
        write_file(config.out_dir() + "/features_" + name + "_counts.csv",
                   sparse_debug_csv(counts));
        if (tfidf) {
            const auto weighted = tfidf_transform(counts, vocab);
            save_sparse(weighted, config.out_dir() + "/features_" + name + "_tfidf.bin");
            write_file(config.out_dir() + "/features_" + name + "_tfidf.csv",
                       sparse_debug_csv(weighted));
        }
        std::cerr << "featurize: " << name << " -> " << counts.rows << " x " << counts.cols
                  << " (" << counts.nnz() << " nonzero)\n";
    }
}

void run_train_nb(const PipelineConfig& config) {
    const auto& feat = config.tree.at("features");
    const std::string fit_split = feat.at("fit_split");
    const auto corpus = load_csv(config.out_dir() + "/" + fit_split + ".csv");
    const bool tfidf = feat.at("tfidf");
    const double alpha = config.tree.at("model").at("nb").at("alpha");
    NbModel model;
    if (tfidf) {
        const auto features = load_sparse<double>(config.out_dir() + "/features_" + fit_split +
                                                  "_tfidf.bin");
        model = nb_fit(features, labels_of(corpus), alpha);
    } else {
        const auto features = load_sparse<std::int64_t>(config.out_dir() + "/features_" +
                                                        fit_split + "_counts.bin");
        model = nb_fit(features, labels_of(corpus), alpha);
    }
    write_file(config.out_dir() + "/nb_model.json", nb_to_json(model, "vocab.json").dump() + "\n");
    std::cerr << "train-nb: fitted on " << corpus.size() << " records (alpha " << alpha << ")\n";
}

void run_train_cnn(const PipelineConfig& config) {
    const auto& j = config.tree.at("model").at("cnn");
    const auto train_corpus = load_csv(config.out_dir() + "/train.csv");
    const auto val_corpus = load_csv(config.out_dir() + "/val.csv");
    const auto train_docs = tokenize_corpus(train_corpus);
    const auto val_docs = tokenize_corpus(val_corpus);

    const auto index = WordIndex::fit(train_docs);
    write_file(config.out_dir() + "/word_index.json", word_index_to_json(index).dump() + "\n");

    CnnSpec spec;
    spec.vocab_size = j.at("vocab_size").get<std::size_t>();
    if (spec.vocab_size == 0) spec.vocab_size = index.full_size();
    spec.embed_dim = j.at("embed_dim");
    spec.filters = j.at("filters");
    spec.kernel = j.at("kernel");
    spec.pool = j.at("pool");
    spec.dropout_rate = j.at("dropout_rate");
    spec.dense_units = j.at("dense_units");
    spec.adam_lr = j.at("adam_lr");
    spec.label_smoothing = j.at("label_smoothing");
    spec.patience = j.at("patience");
    spec.max_epochs = j.at("max_epochs");
    spec.batch_size = j.at("batch_size");
    spec.max_len = j.at("max_len");

    TrainData train{encode_sequences(train_docs, index, spec.vocab_size, spec.max_len),
                    labels_of(train_corpus)};
    TrainData val{encode_sequences(val_docs, index, spec.vocab_size, spec.max_len),
                  labels_of(val_corpus)};
    CnnModel model(spec, config.seed());
    const auto run = train_cnn(model, train, val, config.seed());

    ad::save_checkpoint(model.params(), config.out_dir() + "/cnn_checkpoint.bin");
    json meta = {{"architecture", "cnn"},
                 {"spec", cnn_spec_to_json(spec)},
                 {"seed", config.seed()},
                 {"stopped_epoch", run.stopped_epoch},
                 {"best_epoch", run.best_epoch},
                 {"metrics",
                  {{"train_accuracy", run.epochs.back().train_accuracy},
                   {"val_accuracy", run.epochs.back().val_accuracy},
                   {"val_loss", run.epochs.back().val_loss}}}};
    write_file(config.out_dir() + "/cnn_meta.json", meta.dump(2) + "\n");
    write_file(config.out_dir() + "/cnn_history.json", train_run_to_json(run).dump(2) + "\n");
    write_file(config.out_dir() + "/cnn_history.csv", train_run_to_csv(run));
    std::cerr << "train-cnn: " << run.stopped_epoch << " epochs, best " << run.best_epoch
              << ", final val acc " << run.epochs.back().val_accuracy << "\n";
}

void run_train_bilstm(const PipelineConfig& config) {
    const auto& j = config.tree.at("model").at("bilstm");
    const auto train_corpus = load_csv(config.out_dir() + "/train.csv");
    const auto val_corpus = load_csv(config.out_dir() + "/val.csv");
    const auto train_docs = tokenize_corpus(train_corpus);
    const auto val_docs = tokenize_corpus(val_corpus);

    const auto index = WordIndex::fit(train_docs);
    write_file(config.out_dir() + "/word_index.json", word_index_to_json(index).dump() + "\n");

    BilstmSpec spec;
    spec.vocab_size = j.at("vocab_size");
    spec.embed_dim = j.at("embed_dim");
    spec.conv_filters = j.at("conv_filters");
    spec.conv_kernel = j.at("conv_kernel");
    spec.pool = j.at("pool");
    spec.lstm_units = j.at("lstm_units");
    spec.dropout_rate = j.at("dropout_rate");
    spec.lr0 = j.at("lr0");
    spec.momentum = j.at("momentum");
    spec.epochs = j.at("epochs");
    spec.batch_size = j.at("batch_size");
    spec.max_len = j.at("max_len");

    TrainData train{encode_sequences(train_docs, index, spec.vocab_size, spec.max_len),
                    labels_of(train_corpus)};
    TrainData val{encode_sequences(val_docs, index, spec.vocab_size, spec.max_len),
                  labels_of(val_corpus)};
    BilstmModel model(spec, config.seed());
    const auto run = train_bilstm(model, train, val, config.seed());

    ad::save_checkpoint(model.params(), config.out_dir() + "/bilstm_checkpoint.bin");
    json meta = {{"architecture", "bilstm"},
                 {"spec", bilstm_spec_to_json(spec)},
                 {"seed", config.seed()},
                 {"stopped_epoch", run.stopped_epoch},
                 {"best_epoch", run.best_epoch},
                 {"metrics",
                  {{"train_accuracy", run.epochs.back().train_accuracy},
                   {"val_accuracy", run.epochs.back().val_accuracy},
                   {"val_loss", run.epochs.back().val_loss}}}};
    write_file(config.out_dir() + "/bilstm_meta.json", meta.dump(2) + "\n");
    write_file(config.out_dir() + "/bilstm_history.json", train_run_to_json(run).dump(2) + "\n");
    write_file(config.out_dir() + "/bilstm_history.csv", train_run_to_csv(run));
    std::cerr << "train-bilstm: " << run.stopped_epoch << " epochs, final val acc "
              << run.epochs.back().val_accuracy << "\n";
}

void run_train_embed(const PipelineConfig& config) {
    const std::string in_path =
        config.input().empty() ? config.out_dir() + "/cleaned.csv" : config.input();
    const auto docs = tokenize_corpus(load_csv(in_path));
    const auto& j = config.tree.at("model").at("embed");
    EmbedTrainConfig train_cfg;
    const std::string mode = j.at("mode");
    if (mode == "cbow") train_cfg.mode = EmbedMode::Cbow;
    else if (mode == "skipgram") train_cfg.mode = EmbedMode::SkipGram;
    else throw ConfigError("embed mode must be cbow or skipgram");
    train_cfg.dim = j.at("dim");
    train_cfg.window = j.at("window");
    train_cfg.negatives = j.at("negatives");
    train_cfg.epochs = j.at("epochs");
    train_cfg.initial_lr = j.at("initial_lr");
    train_cfg.min_count = j.at("min_count");
    train_cfg.seed = config.seed();
    const auto emb = train_embeddings(docs, train_cfg);
    save_embeddings(emb, config.out_dir() + "/embeddings.vec");
    std::cerr << "train-embed: " << emb.tokens.size() << " tokens x " << emb.dim << "\n";
}

void run_bert_prep(const PipelineConfig& config) {
    const std::string vocab_path = config.tree.at("paths").at("vocab_file");
    if (vocab_path.empty()) throw ConfigError("bert-prep requires paths.vocab_file");
    const auto vocab = WordPieceVocab::load(vocab_path);
    const std::string in_path =
        config.input().empty() ? config.out_dir() + "/cleaned.csv" : config.input();
    const auto corpus = load_csv(in_path);
    const std::size_t max_len = config.tree.at("bert").at("max_len");
    const std::size_t threshold = config.tree.at("bert").at("length_threshold");

    std::vector<std::string> texts;
    for (const auto& record : corpus.records) texts.push_back(record.text);
    const auto filtered = token_length_filter(texts, vocab, threshold);

    std::string listing;
    for (const auto& [idx, count] : filtered.dropped)
        listing += "INDEX: " + std::to_string(idx) + ", TEXT: " + texts[idx] + "\n";
    write_file(config.out_dir() + "/bert_overlength.txt", listing);

    std::string jsonl;
    Corpus kept;
    ad::Tensor ids_tensor({filtered.kept.size(), max_len});
    ad::Tensor mask_tensor({filtered.kept.size(), max_len});
    std::size_t row = 0;
    for (auto idx : filtered.kept) {
        const auto enc = encode(texts[idx], vocab, max_len);
        jsonl += encoding_to_json(enc).dump() + "\n";
        kept.records.push_back(corpus.records[idx]);
        for (std::size_t i = 0; i < max_len; ++i) {
            ids_tensor.at(row, i) = static_cast<double>(enc.input_ids[i]);
            mask_tensor.at(row, i) = enc.attention_mask[i];
        }
        ++row;
    }
    write_file(config.out_dir() + "/bert_encodings.jsonl", jsonl);
    ad::save_checkpoint({ad::make_param(std::move(ids_tensor), "input_ids"),
                         ad::make_param(std::move(mask_tensor), "attention_mask")},
                        config.out_dir() + "/bert_encodings.bin");
    write_file(config.out_dir() + "/bert_filtered.csv", save_csv_string(kept));
    std::cerr << "bert-prep: " << filtered.kept.size() << " encoded, "
              << filtered.dropped.size() << " over " << threshold << " pieces\n";
}

ReportBundle corpus_bundle(const Corpus& eval_corpus, const std::vector<SentimentLabel>& y_true,
                           const std::vector<SentimentLabel>& y_pred, std::size_t top_k) {
    ReportBundle bundle;
    bundle.report = classification_report(y_true, y_pred);
    bundle.cm = confusion(label_codes(y_true), label_codes(y_pred));
    const auto docs = tokenize_corpus(eval_corpus);
    std::vector<std::string> texts;
    for (const auto& record : eval_corpus.records) texts.push_back(record.text);
    for (auto l : y_true)
        (l == SentimentLabel::Positive ? bundle.positive_count : bundle.negative_count)++;
    std::vector<std::string> all_tokens;
    for (const auto& doc : docs) all_tokens.insert(all_tokens.end(), doc.begin(), doc.end());
    bundle.frequency = frequency_table(all_tokens, top_k);
    bundle.weights = word_weights(docs, y_true, top_k);
    bundle.distributions = distribution_series(docs, texts, y_true);
    return bundle;
}

void attach_history(ReportBundle& bundle, const std::string& path, const std::string& name) {
    if (!fs::exists(path)) return;
    const auto j = read_json(path);
    LearningCurveSeries series;
    series.name = name;
    for (const auto& e : j.at("epochs")) {
        series.train_loss.push_back(e.at("loss"));
        series.train_accuracy.push_back(e.at("accuracy"));
        series.val_loss.push_back(e.at("val_loss"));
        series.val_accuracy.push_back(e.at("val_accuracy"));
    }
    bundle.learning_curves.push_back(std::move(series));
}

void run_evaluate(const PipelineConfig& config) {
    const std::string kind = config.tree.at("model").at("kind");
    const std::string eval_split = config.tree.at("model").at("eval_split");
    const std::string eval_path = config.input().empty()
                                      ? config.out_dir() + "/" + eval_split + ".csv"
                                      : config.input();
    const auto eval_corpus = load_csv(eval_path);
    const auto y_true = labels_of(eval_corpus);
    std::vector<SentimentLabel> y_pred;

    if (kind == "nb") {
        const auto model = nb_from_json(read_json(config.out_dir() + "/nb_model.json"));
        const auto vocab = vocab_from_json(read_json(config.out_dir() + "/vocab.json"));
        const auto docs = tokenize_corpus(eval_corpus);
        const auto counts = count_transform(docs, vocab);
        if (config.tree.at("features").at("tfidf").get<bool>()) {
            y_pred = nb_predict_all(model, tfidf_transform(counts, vocab));
        } else {
            y_pred = nb_predict_all(model, counts);
        }
    } else if (kind == "cnn" || kind == "bilstm") {
        const auto meta = read_json(config.out_dir() + "/" + kind + "_meta.json");
        const auto index = word_index_from_json(read_json(config.out_dir() + "/word_index.json"));
        const auto checkpoint =
            ad::load_checkpoint(config.out_dir() + "/" + kind + "_checkpoint.bin");
        auto predict_chunked = [&](auto& model, const IdMatrix& ids) {
            for (std::size_t start = 0; start < ids.size(); start += 256) {
                const std::size_t end = std::min(ids.size(), start + 256);
                IdMatrix chunk(ids.begin() + static_cast<std::ptrdiff_t>(start),
                               ids.begin() + static_cast<std::ptrdiff_t>(end));
                const auto part = model.predict(chunk);
                y_pred.insert(y_pred.end(), part.begin(), part.end());
            }
        };
        if (kind == "cnn") {
            const auto spec = cnn_spec_from_json(meta.at("spec"));
            CnnModel model(spec, 0);
            model.load_parameters(checkpoint);
            predict_chunked(model, encode_sequences(tokenize_corpus(eval_corpus), index,
                                                    spec.vocab_size, spec.max_len));
        } else {
            const auto spec = bilstm_spec_from_json(meta.at("spec"));
            BilstmModel model(spec, 0);
            model.load_parameters(checkpoint);
            predict_chunked(model, encode_sequences(tokenize_corpus(eval_corpus), index,
                                                    spec.vocab_size, spec.max_len));
        }
    } else {
        throw ConfigError("evaluate: model.kind must be nb, cnn, or bilstm");
    }

    auto bundle = corpus_bundle(eval_corpus, y_true, y_pred,
                                config.tree.at("report").at("top_k").get<std::size_t>());
    attach_history(bundle, config.out_dir() + "/cnn_history.json", "cnn");
    attach_history(bundle, config.out_dir() + "/bilstm_history.json", "bilstm");
    std::cout << render_report(*bundle.report);
    emit(bundle, config.out_dir(), emit_formats(config));
}

void run_report(const PipelineConfig& config, const std::string& from) {
    const std::string path = from.empty() ? config.out_dir() + "/report.json" : from;
    const auto bundle = bundle_from_json(read_json(path));
    emit(bundle, config.out_dir(), emit_formats(config));
    std::cerr << "report: emitted to " << config.out_dir() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tweetsent: tweet sentiment classification pipeline"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        CommonArgs args;
    };
    std::map<std::string, Sub> subs;
    for (const char* name : {"clean", "split", "featurize", "train-nb", "train-cnn",
                             "train-bilstm", "train-embed", "bert-prep", "evaluate", "report"}) {
        Sub sub;
        sub.cmd = app.add_subcommand(name);
        subs.emplace(name, sub);
        add_common(subs[name].cmd, subs[name].args);
    }
    std::string report_from;
    subs["report"].cmd->add_option("--from", report_from, "bundle JSON to re-emit");

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [name, sub] : subs) {
            if (!sub.cmd->parsed()) continue;
            const auto config = resolve(sub.args, name);
            if (name == "clean") run_clean(config);
            else if (name == "split") run_split(config);
            else if (name == "featurize") run_featurize(config);
            else if (name == "train-nb") run_train_nb(config);
            else if (name == "train-cnn") run_train_cnn(config);
            else if (name == "train-bilstm") run_train_bilstm(config);
            else if (name == "train-embed") run_train_embed(config);
            else if (name == "bert-prep") run_bert_prep(config);
            else if (name == "evaluate") run_evaluate(config);
            else if (name == "report") run_report(config, report_from);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ad::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
