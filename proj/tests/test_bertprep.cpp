#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "support/oracles.hpp"
#include "tweetsent/bertprep.hpp"

using namespace tweetsent;

namespace {

WordPieceVocab toy_vocab() {
    return WordPieceVocab::from_tokens(
        {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "play", "##ing", "olympic", "##s", "go"});
}

}  // namespace

TEST_CASE("greedy longest-match decomposition on the toy vocabulary") {
    const auto vocab = toy_vocab();
    CHECK(wordpiece_word("playing", vocab) == std::vector<std::string>{"play", "##ing"});
    CHECK(wordpiece_word("go", vocab) == std::vector<std::string>{"go"});
    CHECK(wordpiece_word("olympics", vocab) == std::vector<std::string>{"olympic", "##s"});
    CHECK(wordpiece_word("zzz", vocab) == std::vector<std::string>{"[UNK]"});
    CHECK(wordpiece_word(std::string(101, 'a'), vocab) == std::vector<std::string>{"[UNK]"});

    SECTION("tokenize splits on whitespace and punctuation first") {
        CHECK(wordpiece_tokenize("go playing", vocab) ==
              std::vector<std::string>{"go", "play", "##ing"});
        CHECK(wordpiece_tokenize("Go, playing!", vocab) ==
              std::vector<std::string>{"go", "[UNK]", "play", "##ing", "[UNK]"});
    }
}

TEST_CASE("vocab loading and special-token requirements") {
    const auto path = (std::filesystem::temp_directory_path() / "tweetsent_vocab.txt").string();
    {
        std::ofstream out(path);
        out << "[PAD]\n[UNK]\n[CLS]\n[SEP]\nplay\n##ing\n";
    }
    const auto vocab = WordPieceVocab::load(path);
    CHECK(vocab.pad_id == 0);
    CHECK(vocab.unk_id == 1);
    CHECK(vocab.cls_id == 2);
    CHECK(vocab.sep_id == 3);
    CHECK(vocab.token_to_id.at("##ing") == 5);

    CHECK_THROWS_AS(WordPieceVocab::from_tokens({"[PAD]", "[UNK]", "[CLS]"}), DataError);
    CHECK_THROWS_AS(WordPieceVocab::from_tokens({"[PAD]", "[PAD]", "[UNK]", "[CLS]", "[SEP]"}),
                    DataError);
}

TEST_CASE("basic tokenizer: lowercase, accents, punctuation") {
    const auto words = bertdetail::basic_tokenize("Caf\xC3\xA9 ROCKS!don't");
    CHECK(words == std::vector<std::string>{"cafe", "rocks", "!", "don", "'", "t"});
}

TEST_CASE("encode builds the [CLS] ... [SEP] frame with padding and mask") {
    const auto vocab = toy_vocab();

    SECTION("single word") {
        const auto enc = encode("go", vocab, 128);
        REQUIRE(enc.input_ids.size() == 128);
        CHECK(enc.input_ids[0] == vocab.cls_id);
        CHECK(enc.input_ids[1] == vocab.token_to_id.at("go"));
        CHECK(enc.input_ids[2] == vocab.sep_id);
        CHECK(enc.real_length == 3);
        for (std::size_t i = 3; i < 128; ++i) CHECK(enc.input_ids[i] == vocab.pad_id);
        for (std::size_t i = 0; i < 128; ++i) {
            CHECK(enc.attention_mask[i] == (i < 3 ? 1 : 0));
            CHECK(enc.token_type_ids[i] == 0);
        }
    }
    SECTION("empty text is just the frame") {
        const auto enc = encode("", vocab, 128);
        CHECK(enc.real_length == 2);
        CHECK(enc.input_ids[0] == vocab.cls_id);
        CHECK(enc.input_ids[1] == vocab.sep_id);
        CHECK(enc.input_ids[2] == vocab.pad_id);
    }
    SECTION("long input truncates and still ends in [SEP]") {
        std::string text;
        for (int i = 0; i < 200; ++i) text += "go ";
        const auto enc = encode(text, vocab, 128);
        CHECK(enc.input_ids.size() == 128);
        CHECK(enc.real_length == 128);
        CHECK(enc.input_ids[0] == vocab.cls_id);
        CHECK(enc.input_ids[127] == vocab.sep_id);
        for (int m : enc.attention_mask) CHECK(m == 1);
    }
    CHECK_THROWS_AS(encode("go", vocab, 1), DataError);
}

TEST_CASE("encoding invariants hold on fuzzed inputs") {
    const auto vocab = toy_vocab();
    Xoshiro256ss rng(321);
    const std::string alphabet = "gpolaynics ";
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const std::size_t len = rng.next_below(80);
        for (std::size_t i = 0; i < len; ++i) text += alphabet[rng.next_below(alphabet.size())];
        const std::size_t max_len = 2 + rng.next_below(40);
        const auto enc = encode(text, vocab, max_len);
        REQUIRE(enc.input_ids.size() == max_len);
        REQUIRE(enc.attention_mask.size() == max_len);
        REQUIRE(enc.token_type_ids.size() == max_len);
        CHECK(enc.input_ids[0] == vocab.cls_id);
        CHECK(enc.input_ids[enc.real_length - 1] == vocab.sep_id);
        for (std::size_t i = 0; i < max_len; ++i) {
            CHECK(enc.attention_mask[i] == (i < enc.real_length ? 1 : 0));
            if (i >= enc.real_length) CHECK(enc.input_ids[i] == vocab.pad_id);
            CHECK(enc.token_type_ids[i] == 0);
        }
    }
}

TEST_CASE("greedy choice is maximal against the exhaustive reference") {
    const auto vocab = toy_vocab();
    std::set<std::string> vocab_set(vocab.id_to_token.begin(), vocab.id_to_token.end());
    Xoshiro256ss rng(77);
    const std::string alphabet = "goplayinolmpics";
    for (int trial = 0; trial < 10000; ++trial) {
        std::string word;
        const std::size_t len = 1 + rng.next_below(12);
        for (std::size_t i = 0; i < len; ++i) word += alphabet[rng.next_below(alphabet.size())];
        const auto mine = wordpiece_word(word, vocab);
        const auto reference = oracle::wordpiece_reference(word, vocab_set);
        INFO("word " << word);
        CHECK(mine == reference);
    }
}

TEST_CASE("detokenization round-trips covered words") {
    const auto vocab = toy_vocab();
    for (const std::string word : {"playing", "olympics", "go", "play"}) {
        const auto pieces = wordpiece_word(word, vocab);
        REQUIRE(pieces[0] != "[UNK]");
        std::string joined;
        for (const auto& piece : pieces)
            joined += piece.rfind("##", 0) == 0 ? piece.substr(2) : piece;
        CHECK(joined == word);
    }
}

TEST_CASE("token length filter flags texts over the threshold") {
    const auto vocab = toy_vocab();

    SECTION("61 single-piece words exceed a 60 threshold") {
        std::string text;
        for (int i = 0; i < 61; ++i) text += "go ";
        const auto result = token_length_filter({text}, vocab, 60);
        REQUIRE(result.dropped.size() == 1);
        CHECK(result.dropped[0].first == 0);
        CHECK(result.dropped[0].second == 61);
        CHECK(result.kept.empty());
    }
    SECTION("exactly 60 is kept") {
        std::string text;
        for (int i = 0; i < 60; ++i) text += "go ";
        const auto result = token_length_filter({text}, vocab, 60);
        CHECK(result.kept == std::vector<std::size_t>{0});
    }
    SECTION("empty text is kept") {
        const auto result = token_length_filter({""}, vocab, 60);
        CHECK(result.kept == std::vector<std::size_t>{0});
    }
    SECTION("threshold 0 drops everything non-empty") {
        const auto result = token_length_filter({"go", "", "playing"}, vocab, 0);
        CHECK(result.kept == std::vector<std::size_t>{1});
        REQUIRE(result.dropped.size() == 2);
        CHECK(result.dropped[0].second == 1);
        CHECK(result.dropped[1].second == 2);
    }
}
