#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tweetsent/corpus.hpp"
#include "tweetsent/csv.hpp"

namespace tweetsent {

// ---------------------------------------------------------------------------
// UTF-8 helpers. Decoding is lenient: an invalid byte decodes to its own
// value so cleaning stays total on malformed input.

namespace utf8 {

inline std::vector<std::uint32_t> decode(const std::string& bytes) {
    std::vector<std::uint32_t> cps;
    cps.reserve(bytes.size());
    std::size_t i = 0;
    const auto n = bytes.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 1;
        std::uint32_t cp = b0;
        if (b0 >= 0xF0) len = 4;
        else if (b0 >= 0xE0) len = 3;
        else if (b0 >= 0xC0) len = 2;
        if (len > 1 && i + len <= n) {
            bool ok = true;
            cp = b0 & (0x7F >> len);
            for (std::size_t k = 1; k < len; ++k) {
                const auto bk = static_cast<unsigned char>(bytes[i + k]);
                if ((bk & 0xC0) != 0x80) { ok = false; break; }
                cp = (cp << 6) | (bk & 0x3F);
            }
            if (!ok) { cp = b0; len = 1; }
        } else if (len > 1) {
            len = 1;
        }
        cps.push_back(cp);
        i += len;
    }
    return cps;
}

inline void append(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline std::string encode(const std::vector<std::uint32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (auto cp : cps) append(out, cp);
    return out;
}

inline std::size_t length(const std::string& bytes) { return decode(bytes).size(); }

}  // namespace utf8

// ---------------------------------------------------------------------------
// Lexicons

struct LemmaRule {
    std::string suffix;
    std::string replacement;  // equal to suffix = stop rule (protects the ending)
    std::size_t min_len = 0;
    bool dedup = false;  // collapse a trailing doubled consonant (except l/s/z)
};

struct LexiconSet {
    std::unordered_map<std::string, std::string> contractions;
    std::unordered_map<std::string, std::string> slang;
    std::unordered_map<std::string, std::string> digit_words;
    std::set<std::string> stopwords;
    // Emoji sequences, grouped by first codepoint; longest match wins.
    std::unordered_map<std::uint32_t, std::vector<std::pair<std::vector<std::uint32_t>, std::string>>> emoji_map;
    std::vector<LemmaRule> lemma_rules;
    std::unordered_map<std::string, std::string> lemma_exceptions;
    std::array<char, 26> phonetic_classes{};  // 'a'..'z' -> '0'..'6', '0' = ignored

    static LexiconSet load(const std::string& dir);
    void validate() const;

    // True when a lemma rewrite must be blocked: rewriting a token into a
    // stopword or a replaceable key would make the pipeline non-idempotent.
    bool blocks_lemma(const std::string& word) const {
        return stopwords.count(word) > 0 || contractions.count(word) > 0 ||
               slang.count(word) > 0 || digit_words.count(word) > 0;
    }
};

enum class DropReason { Empty, TooShort, NotEnglish };

struct CleanConfig {
    std::size_t min_words = 5;
    bool stage_patterns = true;
    bool stage_contractions = true;
    bool stage_slang = true;
    bool stage_stopwords = true;
    bool stage_lemmatize = true;
    bool stage_phonetic = true;
};

struct CleanedRecord {
    Record original;
    std::string cleaned_text;
    std::vector<std::string> tokens;
    std::optional<DropReason> dropped;
};

namespace detail {

inline std::string lower_ascii(const std::string& text) {
    std::string out = text;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_emoji_cp(std::uint32_t cp) {
    return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
           (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0xFE00 && cp <= 0xFE0F) ||
           (cp >= 0x2190 && cp <= 0x21FF) || cp == 0x200D || cp == 0x20E3 ||
           (cp >= 0x1F1E6 && cp <= 0x1F1FF) || cp == 0x2764 || cp == 0x2665;
}

// Runs of > 2 identical codepoints shrink to exactly 2.
inline void collapse_runs(std::vector<std::uint32_t>& cps) {
    std::vector<std::uint32_t> out;
    out.reserve(cps.size());
    std::size_t run = 0;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (i > 0 && cps[i] == cps[i - 1]) ++run;
        else run = 1;
        if (run <= 2) out.push_back(cps[i]);
    }
    cps.swap(out);
}

inline std::vector<std::string> split_ws(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

inline std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stage ops

// URL/user/hashtag/run-length/emoji/symbol normalization. Output alphabet is
// [a-z0-9_<> ] with single spaces; runs of 3+ identical characters never
// survive.
inline std::string replace_patterns(const std::string& text, const LexiconSet& lex) {
    std::string s = detail::lower_ascii(text);

    // Byte-level pass: newlines, URLs, mentions, hashtags. Replacements are
    // space-padded; spaces collapse at the end.
    std::string t;
    t.reserve(s.size());
    std::size_t i = 0;
    auto at_boundary = [&](std::size_t pos) {
        return pos == 0 || !detail::is_word_char(s[pos - 1]);
    };
    while (i < s.size()) {
        const char c = s[i];
        if (c == '\n' || c == '\r' || c == '\t') {
            t += ' ';
            ++i;
            continue;
        }
        const bool url = (s.compare(i, 7, "http://") == 0 || s.compare(i, 8, "https://") == 0 ||
                          (s.compare(i, 4, "www.") == 0 && at_boundary(i)));
        if (url) {
            while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            t += " <url> ";
            continue;
        }
        if (c == '@' && i + 1 < s.size() && detail::is_word_char(s[i + 1])) {
            ++i;
            while (i < s.size() && detail::is_word_char(s[i])) ++i;
            t += " <user> ";
            continue;
        }
        if (c == '#' && i + 1 < s.size() && detail::is_word_char(s[i + 1])) {
            ++i;  // keep the word, drop the hash
            continue;
        }
        t += c;
        ++i;
    }

    // Codepoint-level pass: character runs, emoji, symbols.
    auto cps = utf8::decode(t);
    detail::collapse_runs(cps);

    std::vector<std::uint32_t> kept;
    kept.reserve(cps.size());
    const std::uint32_t SP = ' ';
    for (std::size_t k = 0; k < cps.size();) {
        // Longest emoji-lexicon match at k.
        const auto group = lex.emoji_map.find(cps[k]);
        if (group != lex.emoji_map.end()) {
            const std::vector<std::uint32_t>* best_seq = nullptr;
            const std::string* best_tok = nullptr;
            for (const auto& [seq, tok] : group->second) {
                if (seq.size() <= cps.size() - k &&
                    std::equal(seq.begin(), seq.end(), cps.begin() + static_cast<std::ptrdiff_t>(k)) &&
                    (!best_seq || seq.size() > best_seq->size())) {
                    best_seq = &seq;
                    best_tok = &tok;
                }
            }
            if (best_seq) {
                kept.push_back(SP);
                for (char tc : *best_tok) kept.push_back(static_cast<std::uint32_t>(tc));
                kept.push_back(SP);
                k += best_seq->size();
                continue;
            }
        }
        const std::uint32_t cp = cps[k];
        if (detail::is_emoji_cp(cp)) {
            ++k;  // unmapped emoji are dropped
            continue;
        }
        if (cp == '/') {
            kept.push_back(SP);  // slashes separate words, then vanish
            ++k;
            continue;
        }
        const bool keep = (cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9') ||
                          cp == '_' || cp == '<' || cp == '>' || cp == ' ';
        if (keep) kept.push_back(cp);
        ++k;
    }
    detail::collapse_runs(kept);  // symbol removal can merge runs back together

    std::string out;
    out.reserve(kept.size());
    bool pending_space = false;
    for (auto cp : kept) {
        if (cp == SP) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        utf8::append(out, cp);
    }
    return out;
}

// Replaces every maximal whitespace-delimited token found in the
// contractions map; everything else passes through.
inline std::string expand_contractions(const std::string& text, const LexiconSet& lex) {
    auto tokens = detail::split_ws(text);
    for (auto& token : tokens) {
        const auto it = lex.contractions.find(token);
        if (it != lex.contractions.end()) token = it->second;
    }
    return detail::join(tokens);
}

// Slang and digit-word tokens splice their multi-word expansions into the
// stream.
inline std::vector<std::string> expand_slang(const std::vector<std::string>& tokens,
                                             const LexiconSet& lex) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
        const std::string* expansion = nullptr;
        if (const auto it = lex.slang.find(token); it != lex.slang.end()) expansion = &it->second;
        else if (const auto it2 = lex.digit_words.find(token); it2 != lex.digit_words.end())
            expansion = &it2->second;
        if (expansion) {
            for (auto& word : detail::split_ws(*expansion)) out.push_back(std::move(word));
        } else {
            out.push_back(token);
        }
    }
    return out;
}

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                                 const LexiconSet& lex) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens)
        if (!lex.stopwords.count(token)) out.push_back(token);
    return out;
}

namespace detail {

inline bool all_alpha(const std::string& token) {
    if (token.empty()) return false;
    for (char c : token)
        if (c < 'a' || c > 'z') return false;
    return true;
}

inline void dedup_tail(std::string& word) {
    const auto n = word.size();
    if (n < 2) return;
    const char c = word[n - 1];
    if (word[n - 2] == c && c != 'l' && c != 's' && c != 'z') word.pop_back();
}

}  // namespace detail

// Exception map first (its values are final), then ordered suffix rules to a
// fixed point. A rule whose replacement equals its suffix protects that
// ending. Rewrites that would land on a stopword or a replaceable lexicon
// key are blocked; rewriting into those would undo earlier stages on the
// next pass. Non-alphabetic tokens (markers, digits) pass through.
inline std::string lemmatize(const std::string& token, const LexiconSet& lex) {
    if (!detail::all_alpha(token)) return token;
    std::string word = token;
    for (int guard = 0; guard < 100; ++guard) {
        if (const auto it = lex.lemma_exceptions.find(word); it != lex.lemma_exceptions.end())
            return it->second;
        const LemmaRule* hit = nullptr;
        for (const auto& rule : lex.lemma_rules) {
            if (word.size() >= rule.min_len && word.size() >= rule.suffix.size() &&
                word.compare(word.size() - rule.suffix.size(), rule.suffix.size(), rule.suffix) == 0) {
                hit = &rule;
                break;
            }
        }
        if (!hit) break;
        std::string next = word.substr(0, word.size() - hit->suffix.size()) + hit->replacement;
        if (hit->dedup) detail::dedup_tail(next);
        if (next == word) break;
        if (lex.blocks_lemma(next)) break;
        word = std::move(next);
    }
    return word;
}

// Soundex-style key: first letter, then up to three class digits from the
// remaining letters. Adjacent equal classes collapse first (so repeated
// letters never matter), class '0' letters are silent, and the digits are
// zero-padded.
inline std::string phonetic_key(const std::string& token, const LexiconSet& lex) {
    if (token.empty()) throw DataError("phonetic_key: empty token");
    if (!detail::all_alpha(token)) throw DataError("phonetic_key: non-alphabetic token: " + token);
    std::vector<char> codes;
    codes.reserve(token.size());
    for (char c : token) {
        const char code = lex.phonetic_classes[static_cast<std::size_t>(c - 'a')];
        if (!codes.empty() && codes.back() == code) continue;
        codes.push_back(code);
    }
    std::string key(1, token[0]);
    for (std::size_t i = 1; i < codes.size() && key.size() < 4; ++i)
        if (codes[i] != '0') key += codes[i];
    while (key.size() < 4) key += '0';
    return key;
}

// Token -> canonical spelling, built from training-split token frequencies:
// each phonetic key maps to its most frequent member (ties to the
// lexicographically smallest).
class PhoneticMap {
  public:
    PhoneticMap() = default;

    static PhoneticMap fit(const std::vector<std::vector<std::string>>& docs,
                           const LexiconSet& lex) {
        std::unordered_map<std::string, std::size_t> counts;
        for (const auto& doc : docs)
            for (const auto& token : doc)
                if (detail::all_alpha(token)) ++counts[token];
        PhoneticMap map;
        std::unordered_map<std::string, std::pair<std::string, std::size_t>> best;
        for (const auto& [token, count] : counts) {
            const auto key = phonetic_key(token, lex);
            auto it = best.find(key);
            if (it == best.end() || count > it->second.second ||
                (count == it->second.second && token < it->second.first)) {
                best[key] = {token, count};
            }
        }
        for (auto& [key, mode] : best) map.canonical_[key] = mode.first;
        return map;
    }

    const std::string* lookup(const std::string& key) const {
        const auto it = canonical_.find(key);
        return it == canonical_.end() ? nullptr : &it->second;
    }

    bool empty() const { return canonical_.empty(); }

  private:
    std::unordered_map<std::string, std::string> canonical_;
};

inline std::vector<std::string> phonetic_normalize(const std::vector<std::string>& tokens,
                                                   const PhoneticMap& map,
                                                   const LexiconSet& lex) {
    if (map.empty()) return tokens;
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (!detail::all_alpha(token)) {
            out.push_back(token);
            continue;
        }
        const auto* canon = map.lookup(phonetic_key(token, lex));
        out.push_back(canon ? *canon : token);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whole-pipeline cleaner

class Cleaner {
  public:
    Cleaner(LexiconSet lexicons, CleanConfig config = {})
        : lex_(std::move(lexicons)), config_(config) {}

    const LexiconSet& lexicons() const { return lex_; }
    const CleanConfig& config() const { return config_; }

    void set_phonetic_map(PhoneticMap map) { phonetic_ = std::move(map); }

    std::vector<std::string> clean_tokens(const std::string& text) const {
        std::string s = detail::lower_ascii(text);
        if (config_.stage_patterns) s = replace_patterns(s, lex_);
        if (config_.stage_contractions) s = expand_contractions(s, lex_);
        auto tokens = detail::split_ws(s);
        if (config_.stage_slang) tokens = expand_slang(tokens, lex_);
        if (config_.stage_stopwords) tokens = remove_stopwords(tokens, lex_);
        if (config_.stage_lemmatize)
            for (auto& token : tokens) token = lemmatize(token, lex_);
        if (config_.stage_phonetic) tokens = phonetic_normalize(tokens, phonetic_, lex_);
        return tokens;
    }

    CleanedRecord clean(const Record& record) const {
        CleanedRecord out;
        out.original = record;
        out.tokens = clean_tokens(record.text);
        out.cleaned_text = detail::join(out.tokens);
        if (out.tokens.empty()) out.dropped = DropReason::Empty;
        else if (out.tokens.size() < config_.min_words) out.dropped = DropReason::TooShort;
        return out;
    }

    std::vector<CleanedRecord> clean_all(const Corpus& corpus) const {
        std::vector<CleanedRecord> out;
        out.reserve(corpus.size());
        for (const auto& record : corpus.records) out.push_back(clean(record));
        return out;
    }

    // Fits the phonetic map from already-cleaned token streams (training
    // split only in the standard pipeline).
    void fit_phonetic(const std::vector<std::vector<std::string>>& docs) {
        phonetic_ = PhoneticMap::fit(docs, lex_);
    }

  private:
    LexiconSet lex_;
    CleanConfig config_;
    PhoneticMap phonetic_;
};

inline CleanedRecord clean_record(const Record& record, const CleanConfig& config,
                                  const LexiconSet& lexicons,
                                  const PhoneticMap& phonetic = {}) {
    Cleaner cleaner(lexicons, config);
    cleaner.set_phonetic_map(phonetic);
    return cleaner.clean(record);
}

struct LengthStatsRow {
    std::size_t original_length;  // codepoints
    std::size_t cleaned_length;   // bytes == codepoints, ASCII output
    std::size_t token_count;
};

inline std::vector<LengthStatsRow> length_stats(const std::vector<CleanedRecord>& records) {
    std::vector<LengthStatsRow> rows;
    rows.reserve(records.size());
    for (const auto& record : records) {
        rows.push_back({utf8::length(record.original.text), record.cleaned_text.size(),
                        record.tokens.size()});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Lexicon loading

namespace detail {

inline std::vector<std::pair<std::string, std::string>> load_pairs(const std::string& path) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& row : csv::parse_file(path)) {
        if (row.fields.size() != 2)
            throw DataError("lexicon row needs 2 columns (line " + std::to_string(row.line) +
                            ") in " + path);
        pairs.emplace_back(row.fields[0], row.fields[1]);
    }
    return pairs;
}

inline std::unordered_map<std::string, std::string> load_map(const std::string& path) {
    std::unordered_map<std::string, std::string> map;
    for (auto& [key, value] : load_pairs(path)) map[key] = value;
    return map;
}

}  // namespace detail

inline LexiconSet LexiconSet::load(const std::string& dir) {
    LexiconSet lex;
    lex.contractions = detail::load_map(dir + "/contractions.csv");
    lex.slang = detail::load_map(dir + "/slang.csv");
    lex.digit_words = detail::load_map(dir + "/digit_words.csv");
    lex.lemma_exceptions = detail::load_map(dir + "/lemma_exceptions.csv");

    std::ifstream stop(dir + "/stopwords.txt");
    if (!stop) throw DataError("cannot open " + dir + "/stopwords.txt");
    std::string line;
    while (std::getline(stop, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) lex.stopwords.insert(line);
    }

    for (auto& [hex, token] : detail::load_pairs(dir + "/emoji.csv")) {
        std::vector<std::uint32_t> seq;
        std::istringstream in(hex);
        std::string part;
        while (in >> part) seq.push_back(static_cast<std::uint32_t>(std::stoul(part, nullptr, 16)));
        if (seq.empty()) throw DataError("empty emoji sequence in " + dir + "/emoji.csv");
        lex.emoji_map[seq[0]].emplace_back(seq, token);
    }

    for (const auto& row : csv::parse_file(dir + "/lemma_rules.csv")) {
        if (row.fields.size() != 4)
            throw DataError("lemma rule needs 4 columns (line " + std::to_string(row.line) + ")");
        LemmaRule rule;
        rule.suffix = row.fields[0];
        rule.replacement = row.fields[1];
        rule.min_len = static_cast<std::size_t>(std::stoul(row.fields[2]));
        rule.dedup = row.fields[3] == "1";
        lex.lemma_rules.push_back(std::move(rule));
    }

    lex.phonetic_classes.fill('0');
    for (auto& [letter, digit] : detail::load_pairs(dir + "/phonetic_classes.csv")) {
        if (letter.size() != 1 || letter[0] < 'a' || letter[0] > 'z' || digit.size() != 1)
            throw DataError("bad phonetic class row: " + letter + "," + digit);
        lex.phonetic_classes[static_cast<std::size_t>(letter[0] - 'a')] = digit[0];
    }

    lex.validate();
    return lex;
}

inline void LexiconSet::validate() const {
    auto check_map = [](const std::unordered_map<std::string, std::string>& map,
                        const std::string& name) {
        for (const auto& [key, value] : map) {
            if (key.empty()) throw DataError(name + ": empty key");
            if (key == value) throw DataError(name + ": key maps to itself: " + key);
            for (char c : key)
                if (c >= 'A' && c <= 'Z')
                    throw DataError(name + ": key not lowercase: " + key);
        }
    };
    check_map(contractions, "contractions");
    check_map(slang, "slang");
    check_map(digit_words, "digit_words");
    check_map(lemma_exceptions, "lemma_exceptions");
    for (const auto& [first, entries] : emoji_map) {
        for (const auto& [seq, token] : entries) {
            if (token.size() < 3 || token.front() != '<' || token.back() != '>')
                throw DataError("emoji token must match <[a-z_]+>: " + token);
            for (std::size_t i = 1; i + 1 < token.size(); ++i) {
                const char c = token[i];
                if (!((c >= 'a' && c <= 'z') || c == '_'))
                    throw DataError("emoji token must match <[a-z_]+>: " + token);
            }
        }
    }
}

}  // namespace tweetsent
