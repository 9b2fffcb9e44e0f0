#pragma once

// Deterministic desk-scale corpora. The unigram corpus ties sentiment to
// class-specific token distributions; the negation corpus makes unigram
// marginals uninformative (labels depend on "never X" bigrams), so
// sequence models can win where bag-of-words models cannot.

#include <string>
#include <vector>

#include "tweetsent/corpus.hpp"
#include "tweetsent/rng.hpp"

namespace synthetic {

using tweetsent::Corpus;
using tweetsent::Record;
using tweetsent::SentimentLabel;
using tweetsent::Xoshiro256ss;

inline const std::vector<std::string>& fillers() {
    static const std::vector<std::string> kFillers = {
        "olympic", "stadium", "race",  "final",   "team",  "match",
        "relay",   "tokyo",   "athlete", "event", "crowd", "medal"};
    return kFillers;
}

inline const std::vector<std::string>& positive_tokens() {
    static const std::vector<std::string> kTokens = {"great", "gold",   "love",   "proud",
                                                     "happy", "superb", "joyful", "victory"};
    return kTokens;
}

inline const std::vector<std::string>& negative_tokens() {
    static const std::vector<std::string> kTokens = {"terrible", "sad",   "angry",   "awful",
                                                     "dull",     "shame", "painful", "defeat"};
    return kTokens;
}

inline std::string pick(const std::vector<std::string>& pool, Xoshiro256ss& rng) {
    return pool[rng.next_below(pool.size())];
}

inline Corpus unigram_corpus(std::size_t n_docs, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    Corpus corpus;
    corpus.provenance = "synthetic-unigram";
    for (std::size_t i = 0; i < n_docs; ++i) {
        const bool positive = i % 2 == 1;
        const auto& sentiment = positive ? positive_tokens() : negative_tokens();
        const std::size_t len = 8 + rng.next_below(5);
        std::string text;
        for (std::size_t t = 0; t < len; ++t) {
            if (t) text += ' ';
            text += rng.next_double() < 0.5 ? pick(sentiment, rng) : pick(fillers(), rng);
        }
        corpus.records.push_back(
            {text, positive ? SentimentLabel::Positive : SentimentLabel::Negative});
    }
    return corpus;
}

// Positive docs contain "good" or "never bad"; negative docs contain "bad"
// or "never good". Every unigram appears equally often in both classes.
inline Corpus negation_corpus(std::size_t n_docs, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    Corpus corpus;
    corpus.provenance = "synthetic-negation";
    for (std::size_t i = 0; i < n_docs; ++i) {
        const bool positive = i % 2 == 1;
        const bool negated = (i / 2) % 2 == 1;
        std::vector<std::string> phrase;
        if (positive) {
            phrase = negated ? std::vector<std::string>{"never", "bad"}
                             : std::vector<std::string>{"good"};
        } else {
            phrase = negated ? std::vector<std::string>{"never", "good"}
                             : std::vector<std::string>{"bad"};
        }
        const std::size_t n_fillers = 7 + rng.next_below(4);
        std::vector<std::string> tokens;
        for (std::size_t t = 0; t < n_fillers; ++t) tokens.push_back(pick(fillers(), rng));
        const std::size_t at = rng.next_below(tokens.size() + 1);
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), phrase.begin(),
                      phrase.end());
        std::string text;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (t) text += ' ';
            text += tokens[t];
        }
        corpus.records.push_back(
            {text, positive ? SentimentLabel::Positive : SentimentLabel::Negative});
    }
    return corpus;
}

inline tweetsent::TokenDocs tokenized(const Corpus& corpus) {
    tweetsent::TokenDocs docs;
    for (const auto& record : corpus.records) {
        std::vector<std::string> tokens;
        std::string current;
        for (char c : record.text) {
            if (c == ' ') {
                if (!current.empty()) tokens.push_back(current);
                current.clear();
            } else {
                current += c;
            }
        }
        if (!current.empty()) tokens.push_back(current);
        docs.push_back(std::move(tokens));
    }
    return docs;
}

inline std::vector<SentimentLabel> labels(const Corpus& corpus) {
    std::vector<SentimentLabel> out;
    for (const auto& record : corpus.records) out.push_back(record.label);
    return out;
}

}  // namespace synthetic
