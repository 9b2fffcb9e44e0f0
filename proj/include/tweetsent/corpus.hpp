#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetsent/csv.hpp"
#include "tweetsent/rng.hpp"

namespace tweetsent {

enum class SentimentLabel : int { Negative = 0, Positive = 1 };

using TokenDocs = std::vector<std::vector<std::string>>;

inline int label_code(SentimentLabel label) { return static_cast<int>(label); }

struct Record {
    std::string text;
    SentimentLabel label = SentimentLabel::Negative;
};

struct Corpus {
    std::vector<Record> records;
    std::string provenance;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// "1"/"positive" -> Positive, "0"/"negative" -> Negative, case-insensitive
// for the word forms. Anything else is a DataError.
inline SentimentLabel encode_label(const std::string& raw) {
    if (raw == "1") return SentimentLabel::Positive;
    if (raw == "0") return SentimentLabel::Negative;
    std::string lower;
    lower.reserve(raw.size());
    for (char c : raw) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "positive") return SentimentLabel::Positive;
    if (lower == "negative") return SentimentLabel::Negative;
    throw DataError("unparseable sentiment label: \"" + raw + "\"");
}

// Loads the two-column text,sentiment CSV. Row order is preserved.
inline Corpus load_csv(const std::string& path) {
    const auto rows = csv::parse_file(path);
    if (rows.empty()) throw DataError("empty CSV (no header): " + path);
    const auto& header = rows[0];
    if (header.fields.size() != 2 || header.fields[0] != "text" || header.fields[1] != "sentiment") {
        throw DataError("expected header \"text,sentiment\" (line " +
                        std::to_string(header.line) + ") in " + path);
    }
    Corpus corpus;
    corpus.provenance = path;
    corpus.records.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != 2) {
            throw DataError("expected 2 columns, got " + std::to_string(row.fields.size()) +
                            " (line " + std::to_string(row.line) + ") in " + path);
        }
        try {
            corpus.records.push_back({row.fields[0], encode_label(row.fields[1])});
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (line " + std::to_string(row.line) +
                            ") in " + path);
        }
    }
    return corpus;
}

inline std::string save_csv_string(const Corpus& corpus) {
    std::string out = "text,sentiment\n";
    for (const auto& record : corpus.records) {
        out += csv::format_row({record.text, std::to_string(label_code(record.label))});
    }
    return out;
}

struct SplitSpec {
    std::vector<std::pair<std::string, double>> fractions;  // ordered (name, fraction)
    std::uint64_t seed = 0;
};

struct SplitResult {
    // Split name -> indices into the source corpus, in shuffled order.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> manifests;

    const std::vector<std::size_t>& indices(const std::string& name) const {
        for (const auto& [n, idx] : manifests)
            if (n == name) return idx;
        throw std::out_of_range("no split named " + name);
    }
};

// Shuffles record indices with xoshiro256** seeded from spec.seed, then cuts
// by cumulative fractions: floor(f_i * N) records for every split but the
// last, which takes the remainder.
inline SplitResult split_indices(std::size_t n, const SplitSpec& spec) {
    if (n == 0) throw DataError("cannot split an empty corpus");
    if (spec.fractions.empty()) throw DataError("split spec has no fractions");
    double total = 0;
    for (const auto& [name, f] : spec.fractions) {
        if (f <= 0.0 || f > 1.0) throw DataError("split fraction out of (0,1]: " + name);
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DataError("split fractions must sum to 1");
    for (std::size_t i = 0; i < spec.fractions.size(); ++i)
        for (std::size_t j = i + 1; j < spec.fractions.size(); ++j)
            if (spec.fractions[i].first == spec.fractions[j].first)
                throw DataError("duplicate split name: " + spec.fractions[i].first);

    const auto order = shuffled_indices(n, spec.seed);
    SplitResult result;
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < spec.fractions.size(); ++k) {
        const bool last = (k + 1 == spec.fractions.size());
        const std::size_t take =
            last ? n - cursor
                 : static_cast<std::size_t>(std::floor(spec.fractions[k].second * static_cast<double>(n)));
        std::vector<std::size_t> part(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                      order.begin() + static_cast<std::ptrdiff_t>(cursor + take));
        result.manifests.emplace_back(spec.fractions[k].first, std::move(part));
        cursor += take;
    }
    return result;
}

inline std::map<std::string, Corpus> split(const Corpus& corpus, const SplitSpec& spec) {
    const auto parts = split_indices(corpus.size(), spec);
    std::map<std::string, Corpus> out;
    for (const auto& [name, idx] : parts.manifests) {
        Corpus sub;
        sub.provenance = corpus.provenance + "#" + name;
        sub.records.reserve(idx.size());
        for (std::size_t i : idx) sub.records.push_back(corpus.records[i]);
        out.emplace(name, std::move(sub));
    }
    return out;
}

// Head-N split: first n records become one split, the rest the other.
// Off the normal path; mirrors a fixed-prefix validation scheme.
inline SplitResult split_head(std::size_t total, std::size_t head_n,
                              const std::string& head_name, const std::string& tail_name) {
    if (head_n > total) throw DataError("head split larger than corpus");
    SplitResult result;
    std::vector<std::size_t> head(head_n), tail(total - head_n);
    for (std::size_t i = 0; i < head_n; ++i) head[i] = i;
    for (std::size_t i = head_n; i < total; ++i) tail[i - head_n] = i;
    result.manifests.emplace_back(head_name, std::move(head));
    result.manifests.emplace_back(tail_name, std::move(tail));
    return result;
}

}  // namespace tweetsent
