#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "support/synthetic.hpp"
#include "tweetsent/archs.hpp"

using namespace tweetsent;
namespace ad = tweetsent::ad;

namespace {

CnnSpec small_cnn_spec(std::size_t vocab_size, std::size_t max_len = 32) {
    CnnSpec spec;
    spec.vocab_size = vocab_size;
    spec.max_len = max_len;
    return spec;
}

BilstmSpec small_bilstm_spec(std::size_t max_len = 32) {
    BilstmSpec spec;
    spec.vocab_size = 64;
    spec.max_len = max_len;
    return spec;
}

}  // namespace

TEST_CASE("encode_sequences: padding, truncation, OOV ranks") {
    const TokenDocs train{{"b", "a", "b"}, {"c", "b"}};
    const auto index = WordIndex::fit(train);
    // frequency ranks: b(3) -> 2, then ties a/c resolved lexicographically
    CHECK(index.ids.at("b") == 2);
    CHECK(index.ids.at("a") == 3);
    CHECK(index.ids.at("c") == 4);
    CHECK(index.full_size() == 5);

    SECTION("short docs pad with trailing zeros") {
        const auto ids = encode_sequences({{"a", "b"}}, index, 5, 6);
        CHECK(ids[0] == std::vector<std::size_t>{3, 2, 0, 0, 0, 0});
    }
    SECTION("long docs truncate at max_len") {
        const auto ids = encode_sequences({{"a", "b", "c", "a", "b"}}, index, 5, 3);
        CHECK(ids[0] == std::vector<std::size_t>{3, 2, 4});
    }
    SECTION("tokens outside the capped vocabulary become OOV id 1") {
        const auto ids = encode_sequences({{"c", "b", "a"}}, index, 4, 4);
        CHECK(ids[0] == std::vector<std::size_t>{1, 2, 3, 0});  // c ranked 4th, cap 4 -> OOV
    }
    SECTION("unknown tokens become OOV id 1") {
        const auto ids = encode_sequences({{"zzz"}}, index, 5, 2);
        CHECK(ids[0] == std::vector<std::size_t>{1, 0});
    }
    CHECK_THROWS_AS(encode_sequences({{"a"}}, index, 5, 0), DataError);
}

TEST_CASE("cnn length algebra matches the closed form") {
    CnnSpec spec;
    spec.vocab_size = 10;
    // (L - 3) then floor halving, three times
    struct Expect {
        std::size_t len;
        std::vector<std::size_t> stages;
    };
    const std::vector<Expect> table{
        {32, {29, 14, 11, 5, 2, 1}},
        {60, {57, 28, 25, 12, 9, 4}},
        {128, {125, 62, 59, 29, 26, 13}},
    };
    for (const auto& [len, stages] : table) {
        std::vector<std::size_t> got;
        const auto final_len = cnn_stage_lengths(spec, len, &got);
        CHECK(got == stages);
        CHECK(final_len == stages.back());
    }
    CHECK(cnn_min_input_length(spec) == 29);
    CHECK_THROWS_AS(cnn_stage_lengths(spec, 28), ad::ShapeError);
    CHECK_THROWS_AS(CnnModel(small_cnn_spec(10, 28), 1), ad::ShapeError);
}

TEST_CASE("cnn model shapes and output range") {
    const auto spec = small_cnn_spec(12, 32);
    CnnModel model(spec, 7);
    CHECK(model.params()[0]->value.numel() == 12 * 300);  // embedding = vocab x 300
    CHECK(model.params()[0]->name == "embedding");

    IdMatrix ids{{1, 2, 3, 4, 5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                  0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                 std::vector<std::size_t>(32, 2)};
    Xoshiro256ss rng(0);
    auto out = model.forward(ids, false, rng);
    REQUIRE(out->value.shape == std::vector<std::size_t>{2, 1});
    for (std::size_t b = 0; b < 2; ++b) {
        CHECK(out->value.at(b, 0) > 0.0);
        CHECK(out->value.at(b, 0) < 1.0);
    }
}

TEST_CASE("bilstm model shapes, same padding, row sums") {
    const auto spec = small_bilstm_spec(32);
    BilstmModel model(spec, 7);
    IdMatrix ids{std::vector<std::size_t>(32, 3), std::vector<std::size_t>(32, 1)};
    Xoshiro256ss rng(0);
    auto out = model.forward(ids, false, rng);
    REQUIRE(out->value.shape == std::vector<std::size_t>{2, 2});
    for (std::size_t b = 0; b < 2; ++b) {
        const double total = out->value.at(b, 0) + out->value.at(b, 1);
        CHECK(total == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("zero-weight models sit exactly on the decision boundary") {
    auto spec = small_cnn_spec(8, 32);
    CnnModel cnn(spec, 3);
    for (const auto& p : cnn.params()) std::fill(p->value.data.begin(), p->value.data.end(), 0.0);
    IdMatrix ids{std::vector<std::size_t>(32, 1)};
    std::vector<double> scores;
    const auto labels = cnn.predict(ids, &scores);
    CHECK(scores[0] == 0.5);
    CHECK(labels[0] == SentimentLabel::Positive);  // boundary goes Positive

    BilstmModel bilstm(small_bilstm_spec(32), 3);
    for (const auto& p : bilstm.params())
        std::fill(p->value.data.begin(), p->value.data.end(), 0.0);
    std::vector<std::array<double, 2>> pair_scores;
    const auto bl = bilstm.predict(ids, &pair_scores);
    CHECK(pair_scores[0][0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(bl[0] == SentimentLabel::Negative);  // softmax tie goes Negative
}

namespace {

TrainData encode_split(const Corpus& corpus, const WordIndex& index, std::size_t vocab_size,
                       std::size_t max_len) {
    return {encode_sequences(synthetic::tokenized(corpus), index, vocab_size, max_len),
            synthetic::labels(corpus)};
}

}  // namespace

TEST_CASE("overfit one batch: cnn loss sinks below 0.05 within 200 steps") {
    const auto corpus = synthetic::unigram_corpus(8, 21);
    const auto docs = synthetic::tokenized(corpus);
    const auto index = WordIndex::fit(docs);
    auto spec = small_cnn_spec(index.full_size(), 32);
    spec.label_smoothing = 0.0;  // smoothing floors the loss; the sanity check wants ~0
    CnnModel model(spec, 5);
    const auto ids = encode_sequences(docs, index, spec.vocab_size, spec.max_len);
    std::vector<double> targets;
    for (auto l : synthetic::labels(corpus)) targets.push_back(label_code(l));

    ad::AdamState opt;
    opt.lr = spec.adam_lr;
    opt.attach(model.params());
    Xoshiro256ss dropout_rng(11);
    double eval_loss = 1e9;
    for (int step = 0; step < 200 && eval_loss >= 0.05; ++step) {
        auto loss = ad::bce_label_smoothed(model.forward(ids, true, dropout_rng), targets, 0.0);
        ad::zero_grad(model.params());
        ad::backward(loss);
        ad::adam_step(opt, model.params());
        Xoshiro256ss eval_rng(0);
        eval_loss =
            ad::bce_label_smoothed(model.forward(ids, false, eval_rng), targets, 0.0)->value.at(0);
    }
    CHECK(eval_loss < 0.05);
}

TEST_CASE("overfit one batch: bilstm loss sinks below 0.05 within 200 steps") {
    const auto corpus = synthetic::unigram_corpus(8, 22);
    const auto docs = synthetic::tokenized(corpus);
    const auto index = WordIndex::fit(docs);
    auto spec = small_bilstm_spec(32);
    BilstmModel model(spec, 5);
    const auto ids = encode_sequences(docs, index, spec.vocab_size, spec.max_len);
    std::vector<std::vector<double>> onehot;
    for (auto l : synthetic::labels(corpus))
        onehot.push_back(l == SentimentLabel::Positive ? std::vector<double>{0, 1}
                                                       : std::vector<double>{1, 0});

    ad::SgdMomentumState opt;
    opt.lr0 = spec.lr0;
    opt.momentum = spec.momentum;
    opt.decay = spec.decay();
    opt.attach(model.params());
    Xoshiro256ss dropout_rng(11);
    double eval_loss = 1e9;
    for (int step = 0; step < 200 && eval_loss >= 0.05; ++step) {
        auto loss = ad::categorical_ce(model.forward(ids, true, dropout_rng), onehot);
        ad::zero_grad(model.params());
        ad::backward(loss);
        ad::sgd_momentum_step(opt, model.params());
        Xoshiro256ss eval_rng(0);
        eval_loss = ad::categorical_ce(model.forward(ids, false, eval_rng), onehot)->value.at(0);
    }
    CHECK(eval_loss < 0.05);
}

TEST_CASE("training is bitwise deterministic under a fixed seed") {
    const auto corpus = synthetic::unigram_corpus(48, 31);
    const auto docs = synthetic::tokenized(corpus);
    const auto index = WordIndex::fit(docs);
    auto spec = small_cnn_spec(index.full_size(), 32);
    spec.max_epochs = 2;
    const auto data = encode_split(corpus, index, spec.vocab_size, spec.max_len);

    auto run_once = [&] {
        CnnModel model(spec, 99);
        return train_cnn(model, data, data, 99);
    };
    const auto a = run_once();
    const auto b = run_once();
    REQUIRE(a.epochs.size() == b.epochs.size());
    CHECK(a.first_batch_loss == b.first_batch_loss);
    for (std::size_t e = 0; e < a.epochs.size(); ++e) {
        CHECK(a.epochs[e].train_loss == b.epochs[e].train_loss);
        CHECK(a.epochs[e].train_accuracy == b.epochs[e].train_accuracy);
        CHECK(a.epochs[e].val_loss == b.epochs[e].val_loss);
        CHECK(a.epochs[e].val_accuracy == b.epochs[e].val_accuracy);
    }
}

TEST_CASE("epoch 1 batch 1 loss is the initialized model's loss on that batch") {
    const auto corpus = synthetic::unigram_corpus(24, 41);  // fewer docs than one batch
    const auto docs = synthetic::tokenized(corpus);
    const auto index = WordIndex::fit(docs);
    auto spec = small_cnn_spec(index.full_size(), 32);
    spec.max_epochs = 1;
    const auto data = encode_split(corpus, index, spec.vocab_size, spec.max_len);
    CnnModel model(spec, 123);
    const auto run = train_cnn(model, data, data, 123);
    // one batch per epoch, and the recorded loss is the pre-update forward
    CHECK(run.first_batch_loss == run.epochs[0].train_loss);

    // reproduce it through the public pieces: same init, same shuffle, same
    // dropout stream
    CnnModel fresh(spec, 123);
    const auto order = tweetsent::detail::epoch_order(data.ids.size(), 123, 0);
    IdMatrix batch;
    std::vector<double> targets;
    for (auto i : order) {
        batch.push_back(data.ids[i]);
        targets.push_back(label_code(data.labels[i]));
    }
    Xoshiro256ss dropout_rng(123 ^ 0x9E3779B97F4A7C15ULL);
    const double expected =
        ad::bce_label_smoothed(fresh.forward(batch, true, dropout_rng), targets,
                               spec.label_smoothing)
            ->value.at(0);
    CHECK(run.first_batch_loss == expected);
}

TEST_CASE("predictions are invariant to batch partitioning") {
    const auto corpus = synthetic::unigram_corpus(10, 51);
    const auto docs = synthetic::tokenized(corpus);
    const auto index = WordIndex::fit(docs);
    const auto spec = small_cnn_spec(index.full_size(), 32);
    CnnModel model(spec, 77);
    const auto ids = encode_sequences(docs, index, spec.vocab_size, spec.max_len);

    std::vector<double> batched;
    model.predict(ids, &batched);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::vector<double> single;
        model.predict({ids[i]}, &single);
        CHECK(single[0] == batched[i]);
    }
}

TEST_CASE("non-finite loss reports epoch and batch") {
    const auto corpus = synthetic::unigram_corpus(8, 61);
    const auto docs = synthetic::tokenized(corpus);
    const auto index = WordIndex::fit(docs);
    const auto spec = small_cnn_spec(index.full_size(), 32);
    CnnModel model(spec, 5);
    // NaN in the output bias reaches the loss directly (earlier layers would
    // saturate through relu/sigmoid instead)
    model.params().back()->value.data[0] = std::numeric_limits<double>::quiet_NaN();
    const auto data = encode_split(corpus, index, spec.vocab_size, spec.max_len);
    try {
        train_cnn(model, data, data, 5);
        FAIL("expected NumericError");
    } catch (const ad::NumericError& e) {
        const std::string what = e.what();
        CHECK(what.find("epoch 1") != std::string::npos);
        CHECK(what.find("batch 1") != std::string::npos);
    }
}

TEST_CASE("checkpoint save/load restores model predictions") {
    const auto corpus = synthetic::unigram_corpus(6, 71);
    const auto docs = synthetic::tokenized(corpus);
    const auto index = WordIndex::fit(docs);
    const auto spec = small_bilstm_spec(32);
    BilstmModel model(spec, 13);
    const auto ids = encode_sequences(docs, index, spec.vocab_size, spec.max_len);
    std::vector<std::array<double, 2>> before;
    model.predict(ids, &before);

    const auto path = (std::filesystem::temp_directory_path() / "tweetsent_bilstm.bin").string();
    ad::save_checkpoint(model.params(), path);
    BilstmModel restored(spec, 999);  // different init, then overwritten
    restored.load_parameters(ad::load_checkpoint(path));
    std::vector<std::array<double, 2>> after;
    restored.predict(ids, &after);
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i][0] == after[i][0]);
        CHECK(before[i][1] == after[i][1]);
    }
}

TEST_CASE("word index and spec JSON round-trips") {
    const TokenDocs docs{{"a", "b", "a"}, {"c"}};
    const auto index = WordIndex::fit(docs);
    const auto restored = word_index_from_json(word_index_to_json(index));
    CHECK(restored.ids == index.ids);

    CnnSpec cnn;
    cnn.vocab_size = 17;
    cnn.max_len = 48;
    const auto cnn2 = cnn_spec_from_json(cnn_spec_to_json(cnn));
    CHECK(cnn2.vocab_size == 17);
    CHECK(cnn2.max_len == 48);
    CHECK(cnn2.filters == cnn.filters);

    BilstmSpec bl;
    bl.lstm_units = 9;
    const auto bl2 = bilstm_spec_from_json(bilstm_spec_to_json(bl));
    CHECK(bl2.lstm_units == 9);
    CHECK(bl2.decay() == Catch::Approx(bl.lr0 / 20.0));
}
