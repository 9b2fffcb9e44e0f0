#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tweetsent/corpus.hpp"
#include "tweetsent/textclean.hpp"

namespace tweetsent {

struct WordPieceVocab {
    std::unordered_map<std::string, std::size_t> token_to_id;
    std::vector<std::string> id_to_token;
    std::size_t pad_id = 0, unk_id = 0, cls_id = 0, sep_id = 0;
    std::size_t max_piece_len = 0;

    static WordPieceVocab from_tokens(const std::vector<std::string>& tokens) {
        WordPieceVocab vocab;
        vocab.id_to_token = tokens;
        for (std::size_t id = 0; id < tokens.size(); ++id) {
            if (!vocab.token_to_id.emplace(tokens[id], id).second)
                throw DataError("wordpiece vocab: duplicate token " + tokens[id]);
            vocab.max_piece_len = std::max(vocab.max_piece_len, tokens[id].size());
        }
        auto require = [&](const char* name) {
            const auto it = vocab.token_to_id.find(name);
            if (it == vocab.token_to_id.end())
                throw DataError(std::string("wordpiece vocab: missing special token ") + name);
            return it->second;
        };
        vocab.pad_id = require("[PAD]");
        vocab.unk_id = require("[UNK]");
        vocab.cls_id = require("[CLS]");
        vocab.sep_id = require("[SEP]");
        return vocab;
    }

    // One token per line; the id is the 0-based line index.
    static WordPieceVocab load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open wordpiece vocab: " + path);
        std::vector<std::string> tokens;
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
            tokens.push_back(line);
        }
        while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
        return from_tokens(tokens);
    }

    bool contains(const std::string& token) const { return token_to_id.count(token) > 0; }
};

namespace bertdetail {

// Uncased basic tokenizer: ASCII lowercase, Latin-1 accents folded to ASCII,
// whitespace split, each punctuation character its own word.
inline bool is_ascii_punct(std::uint32_t cp) {
    return (cp >= 33 && cp <= 47) || (cp >= 58 && cp <= 64) || (cp >= 91 && cp <= 96) ||
           (cp >= 123 && cp <= 126);
}

inline bool is_punct(std::uint32_t cp) {
    if (is_ascii_punct(cp)) return true;
    return (cp >= 0x2000 && cp <= 0x206F) || cp == 0x00A1 || cp == 0x00BF;
}

inline std::uint32_t fold_accent(std::uint32_t cp) {
    struct Range {
        std::uint32_t lo, hi;
        char ascii;
    };
    static constexpr Range kRanges[] = {
        {0x00C0, 0x00C5, 'a'}, {0x00C8, 0x00CB, 'e'}, {0x00CC, 0x00CF, 'i'},
        {0x00D2, 0x00D6, 'o'}, {0x00D9, 0x00DC, 'u'}, {0x00E0, 0x00E5, 'a'},
        {0x00E8, 0x00EB, 'e'}, {0x00EC, 0x00EF, 'i'}, {0x00F2, 0x00F6, 'o'},
        {0x00F9, 0x00FC, 'u'},
    };
    for (const auto& r : kRanges)
        if (cp >= r.lo && cp <= r.hi) return static_cast<std::uint32_t>(r.ascii);
    switch (cp) {
        case 0x00C7: case 0x00E7: return 'c';
        case 0x00D1: case 0x00F1: return 'n';
        case 0x00DD: case 0x00FD: case 0x00FF: return 'y';
        default: return cp;
    }
}

inline bool is_combining_mark(std::uint32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

inline std::vector<std::string> basic_tokenize(const std::string& text) {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            words.push_back(current);
            current.clear();
        }
    };
    for (auto cp : utf8::decode(text)) {
        if (cp >= 'A' && cp <= 'Z') cp = cp - 'A' + 'a';
        cp = fold_accent(cp);
        if (is_combining_mark(cp)) continue;
        if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') {
            flush();
            continue;
        }
        if (is_punct(cp)) {
            flush();
            std::string punct;
            utf8::append(punct, cp);
            words.push_back(punct);
            continue;
        }
        utf8::append(current, cp);
    }
    flush();
    return words;
}

}  // namespace bertdetail

constexpr std::size_t kMaxWordPieceChars = 100;

// Greedy longest-match-first decomposition of one pre-tokenized word.
// Continuation pieces carry the "##" prefix; words with no full
// decomposition (or longer than 100 characters) become [UNK].
inline std::vector<std::string> wordpiece_word(const std::string& word,
                                               const WordPieceVocab& vocab) {
    if (word.size() > kMaxWordPieceChars) return {"[UNK]"};
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (start < word.size()) {
        std::size_t end = word.size();
        std::string found;
        while (start < end) {
            std::string candidate = word.substr(start, end - start);
            if (start > 0) candidate = "##" + candidate;
            if (vocab.contains(candidate)) {
                found = std::move(candidate);
                break;
            }
            --end;
        }
        if (found.empty()) return {"[UNK]"};
        pieces.push_back(std::move(found));
        start = end;
    }
    return pieces;
}

inline std::vector<std::string> wordpiece_tokenize(const std::string& text,
                                                   const WordPieceVocab& vocab) {
    std::vector<std::string> pieces;
    for (const auto& word : bertdetail::basic_tokenize(text)) {
        auto sub = wordpiece_word(word, vocab);
        pieces.insert(pieces.end(), sub.begin(), sub.end());
    }
    return pieces;
}

struct Encoding {
    std::vector<std::size_t> input_ids;
    std::vector<int> attention_mask;
    std::vector<int> token_type_ids;
    std::size_t real_length = 0;  // ids before padding, [CLS]/[SEP] included
};

// [CLS] + pieces (truncated to max_len-2) + [SEP], padded with [PAD].
inline Encoding encode(const std::string& text, const WordPieceVocab& vocab,
                       std::size_t max_len = 128) {
    if (max_len < 2) throw DataError("encode: max_len must be >= 2");
    const auto pieces = wordpiece_tokenize(text, vocab);
    Encoding enc;
    enc.input_ids.reserve(max_len);
    enc.input_ids.push_back(vocab.cls_id);
    const std::size_t keep = std::min(pieces.size(), max_len - 2);
    for (std::size_t i = 0; i < keep; ++i)
        enc.input_ids.push_back(vocab.token_to_id.at(pieces[i]));
    enc.input_ids.push_back(vocab.sep_id);
    enc.real_length = enc.input_ids.size();
    enc.attention_mask.assign(enc.real_length, 1);
    while (enc.input_ids.size() < max_len) {
        enc.input_ids.push_back(vocab.pad_id);
        enc.attention_mask.push_back(0);
    }
    enc.token_type_ids.assign(max_len, 0);
    return enc;
}

struct LengthFilterResult {
    std::vector<std::size_t> kept;
    std::vector<std::pair<std::size_t, std::size_t>> dropped;  // (index, piece count)
};

// Texts whose content piece count (no [CLS]/[SEP]) exceeds the threshold are
// flagged for dropping; the caller reports index and text. Threshold 0 drops
// everything that tokenizes to at least one piece.
inline LengthFilterResult token_length_filter(const std::vector<std::string>& texts,
                                              const WordPieceVocab& vocab,
                                              std::size_t threshold = 60) {
    LengthFilterResult result;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto count = wordpiece_tokenize(texts[i], vocab).size();
        if (count > threshold) result.dropped.emplace_back(i, count);
        else result.kept.push_back(i);
    }
    return result;
}

inline nlohmann::json encoding_to_json(const Encoding& enc) {
    return {{"ids", enc.input_ids}, {"mask", enc.attention_mask}, {"type_ids", enc.token_type_ids}};
}

}  // namespace tweetsent
