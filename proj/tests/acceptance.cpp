// Acceptance suite: one test case per shipping criterion, each printing a
// PASS line with its measurements. Run through ctest or directly.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "support/gradsuite.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "tweetsent/archs.hpp"
#include "tweetsent/bertprep.hpp"
#include "tweetsent/csv.hpp"
#include "tweetsent/embed.hpp"
#include "tweetsent/evalreport.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/nb.hpp"
#include "tweetsent/textclean.hpp"

using namespace tweetsent;
namespace ad = tweetsent::ad;
namespace fs = std::filesystem;

namespace {

void pass(int criterion, const std::string& detail) {
    std::cout << "[criterion " << criterion << "] PASS: " << detail << "\n" << std::flush;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("criterion 1: classification-report aggregation reproduces the published rows") {
    // NB report: per-class (P,R,support) = (0.93,0.75,14659), (0.74,0.92,10984)
    const auto nb = aggregate_rows({{0.93, 0.75, 14659}, {0.74, 0.92, 10984}});
    CHECK(std::abs(nb.macro.precision - 0.83) <= 0.01);
    CHECK(std::abs(nb.macro.recall - 0.84) <= 0.01);
    CHECK(std::abs(nb.macro.f1 - 0.82) <= 0.01);
    CHECK(std::abs(nb.weighted.precision - 0.85) <= 0.01);
    CHECK(std::abs(nb.weighted.recall - 0.83) <= 0.01);
    CHECK(std::abs(nb.weighted.f1 - 0.83) <= 0.01);

    // CNN report: (0.99,0.97,16225), (0.96,0.98,11555)
    const auto cnn = aggregate_rows({{0.99, 0.97, 16225}, {0.96, 0.98, 11555}});
    CHECK(cnn.macro.precision >= 0.97 - 0.01);
    CHECK(cnn.macro.precision <= 0.98 + 0.01);
    CHECK(std::abs(cnn.weighted.precision - 0.98) <= 0.01);

    pass(1, "macro/weighted rows match the published tables within 0.01");
}

TEST_CASE("criterion 2: exact-math oracles for features and naive bayes") {
    // 1,000 random corpora, <= 10 docs, <= 20 features, against the dense
    // brute-force evaluation of the count/TF/IDF/TF-IDF equations.
    // 4-letter alphabet and docs of <= 5 tokens bound the feature count at
    // 4 unigrams + 16 bigrams = 20.
    Xoshiro256ss rng(271828);
    std::size_t corpora = 0;
    double max_err = 0;
    while (corpora < 1000) {
        const std::size_t n_docs = 1 + rng.next_below(10);
        TokenDocs docs;
        bool any = false;
        for (std::size_t d = 0; d < n_docs; ++d) {
            std::vector<std::string> doc;
            const std::size_t len = rng.next_below(6);
            for (std::size_t t = 0; t < len; ++t)
                doc.push_back(std::string(1, static_cast<char>('a' + rng.next_below(4))));
            any |= !doc.empty();
            docs.push_back(doc);
        }
        if (!any) continue;
        ++corpora;
        const std::size_t n_max = 1 + rng.next_below(2);
        const auto dense = oracle::dense_features(docs, 1, n_max);
        REQUIRE(dense.features.size() <= 20);
        const auto vocab = fit_vocab(docs, {1, n_max});
        REQUIRE(vocab.size() == dense.features.size());
        const auto counts = count_transform(docs, vocab);
        const auto tf = term_frequency(counts);
        const auto idf = inverse_document_frequency(vocab);
        const auto tfidf = tfidf_transform(counts, vocab);
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const auto crow = counts.dense_row(i);
            const auto trow = tf.dense_row(i);
            const auto xrow = tfidf.dense_row(i);
            for (std::size_t j = 0; j < dense.features.size(); ++j) {
                const auto id = *vocab.lookup(dense.features[j]);
                const double tf_err = std::abs(trow[id] - dense.tf[i][j]);
                const double x_err = std::abs(xrow[id] - dense.tfidf[i][j]);
                max_err = std::max({max_err, tf_err, x_err});
                if (static_cast<double>(crow[id]) != dense.counts[i][j] || tf_err >= 1e-9 ||
                    x_err >= 1e-9) {
                    REQUIRE(static_cast<double>(crow[id]) == dense.counts[i][j]);
                    REQUIRE(tf_err < 1e-9);
                    REQUIRE(x_err < 1e-9);
                }
            }
        }
        for (std::size_t j = 0; j < dense.features.size(); ++j) {
            const double idf_err = std::abs(idf[*vocab.lookup(dense.features[j])] - dense.idf[j]);
            if (idf_err >= 1e-9) REQUIRE(idf_err < 1e-9);
        }
    }

    // Every corpus of 2..4 binary docs over 4 features, both classes
    // present, checked against the enumeration oracle in log space.
    std::vector<std::vector<double>> patterns;
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<double> doc(4);
        for (int j = 0; j < 4; ++j) doc[j] = (mask >> j) & 1;
        patterns.push_back(doc);
    }
    std::size_t nb_corpora = 0;
    double nb_err = 0;
    for (std::size_t n = 2; n <= 4; ++n) {
        std::vector<std::size_t> doc_idx(n, 0);
        while (true) {
            for (std::uint32_t label_mask = 1; label_mask + 1 < (1u << n); ++label_mask) {
                std::vector<std::vector<double>> rows;
                std::vector<int> labels_int;
                std::vector<SentimentLabel> labels;
                SparseCountMatrix features;
                features.cols = 4;
                for (std::size_t d = 0; d < n; ++d) {
                    rows.push_back(patterns[doc_idx[d]]);
                    const int l = (label_mask >> d) & 1;
                    labels_int.push_back(l);
                    labels.push_back(l ? SentimentLabel::Positive : SentimentLabel::Negative);
                    std::vector<std::pair<std::size_t, std::int64_t>> entries;
                    for (std::size_t j = 0; j < 4; ++j)
                        if (patterns[doc_idx[d]][j] != 0)
                            entries.emplace_back(j, static_cast<std::int64_t>(
                                                        patterns[doc_idx[d]][j]));
                    features.append_row(entries);
                }
                const auto model = nb_fit(features, labels, 1.0);
                ++nb_corpora;
                for (int q = 0; q < 16; ++q) {
                    const auto pred = nb_predict(model, patterns[q]);
                    const auto expected = oracle::nb_oracle(rows, labels_int, patterns[q], 1.0);
                    const double e0 = std::abs(
                        pred.log_posterior[0] - static_cast<double>(expected.log_posterior[0]));
                    const double e1 = std::abs(
                        pred.log_posterior[1] - static_cast<double>(expected.log_posterior[1]));
                    nb_err = std::max({nb_err, e0, e1});
                    if (e0 >= 1e-12 || e1 >= 1e-12) {
                        REQUIRE(e0 < 1e-12);
                        REQUIRE(e1 < 1e-12);
                    }
                }
            }
            std::size_t carry = 0;
            while (carry < n && ++doc_idx[carry] == patterns.size()) {
                doc_idx[carry] = 0;
                ++carry;
            }
            if (carry == n) break;
        }
    }
    pass(2, "1000 feature corpora within 1e-9 of the dense oracle (max " +
                std::to_string(max_err) + "); " + std::to_string(nb_corpora) +
                " NB corpora within 1e-12 in log space (max " + std::to_string(nb_err) + ")");
}

TEST_CASE("criterion 3: finite-difference gradient suite") {
    std::size_t checks = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (const auto& [name, check] : gradsuite::run_primitive_suite(seed)) {
            INFO("primitive " << name << " seed " << seed);
            REQUIRE(check.ok);
            checks += check.checked;
        }
    }

    // One full forward of each architecture, sampled coordinates per
    // parameter tensor, against central differences.
    auto arch_check = [&](auto&& make_loss, const std::vector<ad::NodePtr>& params,
                          std::uint64_t seed) {
        Xoshiro256ss coord_rng(seed);
        const auto result = oracle::check_gradients(params, make_loss, 4, coord_rng);
        REQUIRE(result.ok);
        checks += result.checked;
    };
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        CnnSpec cnn_spec;
        cnn_spec.vocab_size = 12;
        cnn_spec.max_len = 32;
        cnn_spec.label_smoothing = 0.1;
        CnnModel cnn(cnn_spec, seed);
        IdMatrix ids(2, std::vector<std::size_t>(cnn_spec.max_len));
        Xoshiro256ss id_rng(seed);
        for (auto& row : ids)
            for (auto& id : row) id = id_rng.next_below(cnn_spec.vocab_size);
        const std::vector<double> targets{1.0, 0.0};
        arch_check(
            [&] {
                Xoshiro256ss dropout_rng(seed * 17);
                return ad::bce_label_smoothed(cnn.forward(ids, true, dropout_rng), targets,
                                              cnn_spec.label_smoothing);
            },
            cnn.params(), seed);

        BilstmSpec bl_spec;
        bl_spec.vocab_size = 12;
        bl_spec.max_len = 16;
        BilstmModel bilstm(bl_spec, seed);
        IdMatrix bl_ids(2, std::vector<std::size_t>(bl_spec.max_len));
        for (auto& row : bl_ids)
            for (auto& id : row) id = id_rng.next_below(bl_spec.vocab_size);
        const std::vector<std::vector<double>> onehot{{0.0, 1.0}, {1.0, 0.0}};
        arch_check(
            [&] {
                Xoshiro256ss dropout_rng(seed * 31);
                return ad::categorical_ce(bilstm.forward(bl_ids, true, dropout_rng), onehot);
            },
            bilstm.params(), seed);
    }
    pass(3, "tape gradients match central differences at rel err < 1e-4 (" +
                std::to_string(checks) + " coordinates across 100 seeds + both architectures)");
}

namespace {

struct EncodedSplits {
    TrainData train, val, test;
    WordIndex index;
};

EncodedSplits encode_corpus(const Corpus& corpus, std::size_t vocab_size, std::size_t max_len,
                            std::uint64_t seed) {
    const auto parts = split(corpus, {{{"train", 0.70}, {"val", 0.15}, {"test", 0.15}}, seed});
    EncodedSplits out;
    out.index = WordIndex::fit(synthetic::tokenized(parts.at("train")));
    const std::size_t vs = vocab_size ? vocab_size : out.index.full_size();
    auto enc = [&](const Corpus& c) {
        return TrainData{encode_sequences(synthetic::tokenized(c), out.index, vs, max_len),
                         synthetic::labels(c)};
    };
    out.train = enc(parts.at("train"));
    out.val = enc(parts.at("val"));
    out.test = enc(parts.at("test"));
    return out;
}

double nb_accuracy(const Corpus& corpus, std::uint64_t seed) {
    const auto parts = split(corpus, {{{"train", 0.70}, {"val", 0.15}, {"test", 0.15}}, seed});
    const auto train_docs = synthetic::tokenized(parts.at("train"));
    const auto test_docs = synthetic::tokenized(parts.at("test"));
    const auto vocab = fit_vocab(train_docs);
    const auto model =
        nb_fit(count_transform(train_docs, vocab), synthetic::labels(parts.at("train")), 1.0);
    const auto pred = nb_predict_all(model, count_transform(test_docs, vocab));
    const auto truth = synthetic::labels(parts.at("test"));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (pred[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

template <typename Model>
double accuracy_of(Model& model, const TrainData& data) {
    std::size_t correct = 0;
    for (std::size_t start = 0; start < data.ids.size(); start += 64) {
        const std::size_t end = std::min(data.ids.size(), start + 64);
        IdMatrix chunk(data.ids.begin() + static_cast<std::ptrdiff_t>(start),
                       data.ids.begin() + static_cast<std::ptrdiff_t>(end));
        const auto pred = model.predict(chunk);
        for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i] == data.labels[start + i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.ids.size());
}

}  // namespace

TEST_CASE("criterion 4: desk-scale trainer sanity on synthetic corpora") {
    const std::uint64_t seed = 20240808;
    const auto unigram = synthetic::unigram_corpus(2000, seed);

    const double nb_uni = nb_accuracy(unigram, seed);
    REQUIRE(nb_uni >= 0.95);

    auto splits = encode_corpus(unigram, 0, 60, seed);
    CnnSpec cnn_spec;
    cnn_spec.vocab_size = splits.index.full_size();
    CnnModel cnn(cnn_spec, seed);
    const auto cnn_run = train_cnn(cnn, splits.train, splits.val, seed);
    const double cnn_train_acc = accuracy_of(cnn, splits.train);
    const double cnn_test_acc = accuracy_of(cnn, splits.test);
    REQUIRE(cnn_run.stopped_epoch <= cnn_spec.max_epochs);
    REQUIRE(cnn_run.wall_seconds < 300.0);
    REQUIRE(cnn_train_acc >= 0.95);
    REQUIRE(cnn_test_acc >= 0.90);

    BilstmSpec bl_spec;
    BilstmModel bilstm(bl_spec, seed);
    const auto bl_run = train_bilstm(bilstm, splits.train, splits.val, seed);
    const double bl_train_acc = accuracy_of(bilstm, splits.train);
    const double bl_test_acc = accuracy_of(bilstm, splits.test);
    REQUIRE(bl_run.stopped_epoch == bl_spec.epochs);
    REQUIRE(bl_run.wall_seconds < 300.0);
    REQUIRE(bl_train_acc >= 0.95);
    REQUIRE(bl_test_acc >= 0.90);

    // Negation corpus: unigrams are uninformative, so the CNN must beat
    // NB-on-unigrams by at least 10 points.
    const auto negation = synthetic::negation_corpus(2000, seed + 1);
    const double nb_neg = nb_accuracy(negation, seed + 1);
    auto neg_splits = encode_corpus(negation, 0, 60, seed + 1);
    CnnSpec neg_spec;
    neg_spec.vocab_size = neg_splits.index.full_size();
    CnnModel neg_cnn(neg_spec, seed + 1);
    train_cnn(neg_cnn, neg_splits.train, neg_splits.val, seed + 1);
    const double cnn_neg_acc = accuracy_of(neg_cnn, neg_splits.test);
    REQUIRE(cnn_neg_acc >= nb_neg + 0.10);

    std::ostringstream detail;
    detail << "NB " << nb_uni << ", CNN " << cnn_train_acc << "/" << cnn_test_acc << " ("
           << cnn_run.wall_seconds << "s), BiLSTM " << bl_train_acc << "/" << bl_test_acc << " ("
           << bl_run.wall_seconds << "s); negation: CNN " << cnn_neg_acc << " vs NB " << nb_neg;
    pass(4, detail.str());
}

TEST_CASE("criterion 5: full-scale accuracies are out of reach by design") {
    // The published headline numbers (NB 83%, CNN 97.56%, BiLSTM 97.35%,
    // BERT 99.23%) were measured on a corpus this repository cannot ship,
    // and BERT fine-tuning is out of scope. Nothing here asserts them;
    // criteria 1-4 and 6-8 stand in instead. This criterion documents that
    // substitution explicitly.
    const bool full_corpus_bundled = fs::exists(TWEETSENT_DATA_DIR "/olympics_tweets.csv");
    CHECK_FALSE(full_corpus_bundled);
    pass(5,
         "headline accuracies (83 / 97.56 / 97.35 / 99.23) are documented as non-reproducible; "
         "desk-scale criteria 1-4 and 6-8 apply instead");
}

TEST_CASE("criterion 6: cleaning conformance") {
    const auto lex = LexiconSet::load(TWEETSENT_DATA_DIR "/lexicons");
    Cleaner cleaner(lex);
    cleaner.fit_phonetic({{"night"}, {"night"}, {"night"}, {"nite"}});

    const auto rows = csv::parse_file(TWEETSENT_TEST_DATA_DIR "/golden_clean.csv");
    REQUIRE(rows.size() == 101);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cleaned = cleaner.clean({rows[i].fields[0], SentimentLabel::Negative});
        INFO("golden row " << i << ": " << rows[i].fields[0]);
        REQUIRE(cleaned.cleaned_text == rows[i].fields[1]);
        const auto& drop = rows[i].fields[2];
        if (drop.empty()) REQUIRE_FALSE(cleaned.dropped.has_value());
        else if (drop == "empty") REQUIRE(cleaned.dropped == DropReason::Empty);
        else REQUIRE(cleaned.dropped == DropReason::TooShort);
    }

    // Idempotence over 10,000 fuzzed tweets.
    Xoshiro256ss rng(424242);
    std::vector<std::string> pool;
    for (const auto& [k, v] : lex.contractions) pool.push_back(k);
    for (const auto& [k, v] : lex.slang) pool.push_back(k);
    for (const auto& [k, v] : lex.digit_words) pool.push_back(k);
    for (const auto& s : lex.stopwords) pool.push_back(s);
    const std::vector<std::string> junk = {
        "https://t.co/abc", "www.games.org/live", "@fan_42",  "#TeamGB",  "!!!",
        ":)",  "<3", "\xF0\x9F\x94\xA5", "\xF0\x9F\x86\x92", "soooo", "GOOOAL",
        "a/b", "$50", "caf\xC3\xA9", "medals", "winning", "nite", "feelings", "proceeds"};
    for (int trial = 0; trial < 10000; ++trial) {
        std::string tweet;
        const std::size_t pieces = 1 + rng.next_below(12);
        for (std::size_t p = 0; p < pieces; ++p) {
            if (p) tweet += ' ';
            switch (rng.next_below(3)) {
                case 0: tweet += pool[rng.next_below(pool.size())]; break;
                case 1: tweet += junk[rng.next_below(junk.size())]; break;
                default: {
                    const std::size_t len = 1 + rng.next_below(9);
                    for (std::size_t c = 0; c < len; ++c)
                        tweet += static_cast<char>('a' + rng.next_below(26));
                }
            }
        }
        const auto once = cleaner.clean({tweet, SentimentLabel::Negative});
        const auto twice = cleaner.clean({once.cleaned_text, SentimentLabel::Negative});
        if (twice.tokens != once.tokens) {
            INFO("tweet: " << tweet << "\nonce: " << once.cleaned_text
                           << "\ntwice: " << twice.cleaned_text);
            REQUIRE(twice.tokens == once.tokens);
        }
    }
    pass(6, "100 golden tweets byte-exact; pipeline idempotent on 10000 fuzzed inputs");
}

TEST_CASE("criterion 7: wordpiece conformance") {
    const auto vocab = WordPieceVocab::from_tokens(
        {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "play", "##ing", "olympic", "##s", "go"});
    REQUIRE(wordpiece_word("playing", vocab) == std::vector<std::string>{"play", "##ing"});
    REQUIRE(wordpiece_word("go", vocab) == std::vector<std::string>{"go"});
    REQUIRE(wordpiece_word("zzz", vocab) == std::vector<std::string>{"[UNK]"});

    std::set<std::string> vocab_set(vocab.id_to_token.begin(), vocab.id_to_token.end());
    Xoshiro256ss rng(31337);
    const std::string alphabet = "goplayinolmpics";
    for (int trial = 0; trial < 10000; ++trial) {
        std::string word;
        const std::size_t len = 1 + rng.next_below(12);
        for (std::size_t i = 0; i < len; ++i) word += alphabet[rng.next_below(alphabet.size())];
        const auto mine = wordpiece_word(word, vocab);
        const auto reference = oracle::wordpiece_reference(word, vocab_set);
        if (mine != reference) {
            INFO("word " << word);
            REQUIRE(mine == reference);
        }
    }

    // Encoding invariants on fuzzed text at max_len 128.
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        const std::size_t words = rng.next_below(80);
        for (std::size_t w = 0; w < words; ++w) {
            if (w) text += ' ';
            const std::size_t len = 1 + rng.next_below(8);
            for (std::size_t i = 0; i < len; ++i)
                text += alphabet[rng.next_below(alphabet.size())];
        }
        const auto enc = encode(text, vocab, 128);
        REQUIRE(enc.input_ids.size() == 128);
        REQUIRE(enc.input_ids[0] == vocab.cls_id);
        REQUIRE(enc.input_ids[enc.real_length - 1] == vocab.sep_id);
        bool ok = true;
        for (std::size_t i = 0; i < 128; ++i) {
            ok &= enc.attention_mask[i] == (i < enc.real_length ? 1 : 0);
            ok &= i < enc.real_length || enc.input_ids[i] == vocab.pad_id;
            ok &= enc.token_type_ids[i] == 0;
        }
        if (!ok) {
            INFO("text: " << text);
            REQUIRE(ok);
        }
    }

    // 60-token filter boundary.
    auto words_of = [](int n) {
        std::string text;
        for (int i = 0; i < n; ++i) text += "go ";
        return text;
    };
    const auto at60 = token_length_filter({words_of(60)}, vocab, 60);
    REQUIRE(at60.kept.size() == 1);
    const auto at61 = token_length_filter({words_of(61)}, vocab, 60);
    REQUIRE(at61.dropped.size() == 1);
    REQUIRE(at61.dropped[0].second == 61);

    pass(7, "toy-vocab goldens, 10000-string greedy maximality, fuzzed encoding invariants, "
            "filter boundary exact");
}

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TWEETSENT_CLI_PATH) + " " + args + " 2>>/tmp/tweetsent_cli.log";
    const int status = std::system(cmd.c_str());
    return status < 0 ? status : (status >> 8) & 0xFF;
}

}  // namespace

TEST_CASE("criterion 8: the CLI chain is byte-deterministic under a fixed seed") {
    const auto base = fs::temp_directory_path() / "tweetsent_accept";
    fs::remove_all(base);
    fs::create_directories(base);

    // input corpus: raw synthetic tweets
    const auto corpus = synthetic::unigram_corpus(600, 99);
    const auto input = (base / "input.csv").string();
    {
        std::ofstream out(input, std::ios::binary);
        out << save_csv_string(corpus);
    }

    auto chain = [&](const std::string& out_dir) {
        const std::string common = "--input " + input + " --output " + out_dir +
                                   " --seed 4242 --set paths.lexicon_dir=" TWEETSENT_DATA_DIR
                                   "/lexicons";
        REQUIRE(run_cli("clean " + common) == 0);
        REQUIRE(run_cli("split --output " + out_dir + " --seed 4242") == 0);
        REQUIRE(run_cli("featurize --output " + out_dir + " --seed 4242") == 0);
        REQUIRE(run_cli("train-nb --output " + out_dir + " --seed 4242") == 0);
        REQUIRE(run_cli("train-bilstm --output " + out_dir + " --seed 4242" +
                        " --set model.bilstm.epochs=2 --set model.bilstm.max_len=32") == 0);
        REQUIRE(run_cli("evaluate --output " + out_dir + " --seed 4242") == 0);
        REQUIRE(run_cli("report --output " + out_dir + " --from " + out_dir + "/report.json") == 0);
    };
    const auto dir_a = (base / "run_a").string();
    const auto dir_b = (base / "run_b").string();
    chain(dir_a);
    chain(dir_b);

    std::size_t compared = 0;
    for (const char* name :
         {"cleaned.csv", "length_stats.csv", "split_train.json", "split_val.json",
          "split_test.json", "vocab.json", "nb_model.json", "bilstm_history.json",
          "bilstm_history.csv", "report.json", "class_report.csv"}) {
        INFO("file " << name);
        REQUIRE(slurp(dir_a + "/" + std::string(name)) == slurp(dir_b + "/" + std::string(name)));
        ++compared;
    }

    // evaluate must produce a report with an accuracy field
    const auto report = nlohmann::json::parse(slurp(dir_a + "/report.json"));
    REQUIRE(report.at("classification_report").contains("accuracy"));

    // the trained bilstm checkpoint evaluates through the same surface
    REQUIRE(run_cli("evaluate --output " + dir_a + " --seed 4242 --set model.kind=bilstm") == 0);

    // re-emitting the same bundle twice is byte-identical
    const auto again = (base / "run_c").string();
    REQUIRE(run_cli("report --output " + again + " --from " + dir_a + "/report.json") == 0);
    REQUIRE(run_cli("report --output " + again + " --from " + dir_a + "/report.json") == 0);
    REQUIRE(slurp(again + "/report.json") == slurp(dir_a + "/report.json"));

    // exit codes: usage (1) and data (2) failures
    REQUIRE(run_cli("evaluate --output " + dir_a + " --set no.such.key=1") == 1);
    REQUIRE(run_cli("clean --input /nonexistent.csv --output " + dir_a) == 2);

    pass(8, std::to_string(compared) + " chain artifacts byte-identical across two seeded runs");
}

TEST_CASE("cli smoke: remaining subcommands produce their artifacts") {
    const auto base = fs::temp_directory_path() / "tweetsent_cli_smoke";
    fs::remove_all(base);
    fs::create_directories(base);
    const auto corpus = synthetic::unigram_corpus(200, 5);
    const auto input = (base / "input.csv").string();
    {
        std::ofstream out(input, std::ios::binary);
        out << save_csv_string(corpus);
    }
    const auto dir = (base / "out").string();
    const std::string common = "--input " + input + " --output " + dir +
                               " --seed 7 --set paths.lexicon_dir=" TWEETSENT_DATA_DIR "/lexicons";
    REQUIRE(run_cli("clean " + common) == 0);
    REQUIRE(run_cli("split --output " + dir + " --seed 7") == 0);

    REQUIRE(run_cli("train-embed --output " + dir + " --seed 7" +
                    " --set model.embed.dim=16 --set model.embed.epochs=2") == 0);
    REQUIRE(fs::exists(dir + "/embeddings.vec"));
    const auto emb = load_embeddings(dir + "/embeddings.vec");
    REQUIRE(emb.dim == 16);

    REQUIRE(run_cli("bert-prep --output " + dir +
                    " --set paths.vocab_file=" TWEETSENT_TEST_DATA_DIR
                    "/wordpiece_toy_vocab.txt") == 0);
    REQUIRE(fs::exists(dir + "/bert_encodings.jsonl"));
    REQUIRE(fs::exists(dir + "/bert_overlength.txt"));
    const auto tensors = ad::load_checkpoint(dir + "/bert_encodings.bin");
    REQUIRE(tensors.count("input_ids") == 1);
    REQUIRE(tensors.count("attention_mask") == 1);
    REQUIRE(tensors.at("input_ids").shape[1] == 128);

    REQUIRE(run_cli("train-cnn --output " + dir + " --seed 7" +
                    " --set model.cnn.max_epochs=1 --set model.cnn.max_len=32") == 0);
    REQUIRE(run_cli("evaluate --output " + dir + " --seed 7 --set model.kind=cnn") == 0);
    const auto report = nlohmann::json::parse(slurp(dir + "/report.json"));
    REQUIRE(report.at("classification_report").at("accuracy").is_number());
    const auto meta = nlohmann::json::parse(slurp(dir + "/cnn_meta.json"));
    REQUIRE(meta.at("metrics").contains("val_accuracy"));

    // a config file drives the same knobs as --set
    const auto config_path = (base / "pipeline.json").string();
    {
        std::ofstream out(config_path);
        out << R"({"features": {"ngram_max": 2}, "paths": {"lexicon_dir": ")"
            << TWEETSENT_DATA_DIR << R"(/lexicons"}})";
    }
    REQUIRE(run_cli("featurize --config " + config_path + " --output " + dir + " --seed 7") == 0);
    const auto vocab_json = nlohmann::json::parse(slurp(dir + "/vocab.json"));
    REQUIRE(vocab_json.at("ngram_max") == 2);
    {
        std::ofstream out(config_path);
        out << R"({"no_such_section": {}})";
    }
    REQUIRE(run_cli("featurize --config " + config_path + " --output " + dir) == 1);

    std::cout << "[cli smoke] PASS: train-embed, bert-prep, train-cnn, evaluate(kind=cnn), "
                 "--config file\n";
}
