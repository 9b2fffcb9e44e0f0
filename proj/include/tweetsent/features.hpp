#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tweetsent/corpus.hpp"

namespace tweetsent {

struct Vocabulary {
    std::unordered_map<std::string, std::size_t> index;  // feature -> dense column id
    std::vector<std::size_t> df;                         // document frequency per column
    std::pair<std::size_t, std::size_t> ngram_range{1, 1};
    std::size_t doc_count = 0;

    std::size_t size() const { return index.size(); }

    std::optional<std::size_t> lookup(const std::string& feature) const {
        const auto it = index.find(feature);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

// Compressed sparse row; within a row column ids are strictly increasing and
// zeros are never stored.
template <typename Value>
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_offsets{0};
    std::vector<std::size_t> col_ids;
    std::vector<Value> values;

    std::size_t nnz() const { return values.size(); }

    void append_row(const std::vector<std::pair<std::size_t, Value>>& entries) {
        for (const auto& [col, value] : entries) {
            col_ids.push_back(col);
            values.push_back(value);
        }
        row_offsets.push_back(col_ids.size());
        ++rows;
    }

    std::vector<Value> dense_row(std::size_t r) const {
        std::vector<Value> out(cols, Value{});
        for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k)
            out[col_ids[k]] = values[k];
        return out;
    }
};

using SparseCountMatrix = SparseMatrix<std::int64_t>;
using TfidfMatrix = SparseMatrix<double>;

namespace detail {

// Contiguous n-grams joined by single spaces, for n in [n_min, n_max].
inline void for_each_ngram(const std::vector<std::string>& tokens, std::size_t n_min,
                           std::size_t n_max, const std::function<void(std::string&&)>& fn) {
    for (std::size_t n = n_min; n <= n_max; ++n) {
        if (tokens.size() < n || n == 0) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string gram = tokens[i];
            for (std::size_t k = 1; k < n; ++k) {
                gram += ' ';
                gram += tokens[i + k];
            }
            fn(std::move(gram));
        }
    }
}

}  // namespace detail

// Fits the feature index over all n-grams in range. With max_features set,
// keeps the top-k by total corpus occurrence count (ties to the
// lexicographically smaller feature). Column ids are assigned in
// lexicographic feature order.
inline Vocabulary fit_vocab(const TokenDocs& docs,
                            std::pair<std::size_t, std::size_t> ngram_range = {1, 1},
                            std::optional<std::size_t> max_features = std::nullopt) {
    if (docs.empty()) throw DataError("fit_vocab: empty corpus");
    if (ngram_range.first == 0 || ngram_range.first > ngram_range.second)
        throw DataError("fit_vocab: bad ngram range");

    std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // feature -> (tf, df)
    std::vector<std::string> grams;
    for (const auto& doc : docs) {
        grams.clear();
        detail::for_each_ngram(doc, ngram_range.first, ngram_range.second,
                               [&](std::string&& gram) { grams.push_back(std::move(gram)); });
        for (const auto& gram : grams) ++stats[gram].first;
        std::sort(grams.begin(), grams.end());
        grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
        for (const auto& gram : grams) ++stats[gram].second;
    }

    std::vector<const std::string*> kept;
    kept.reserve(stats.size());
    for (const auto& [gram, st] : stats) kept.push_back(&gram);
    if (max_features && *max_features < kept.size()) {
        std::partial_sort(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(*max_features),
                          kept.end(), [&](const std::string* a, const std::string* b) {
                              const auto fa = stats.at(*a).first, fb = stats.at(*b).first;
                              if (fa != fb) return fa > fb;
                              return *a < *b;
                          });
        kept.resize(*max_features);
        std::sort(kept.begin(), kept.end(),
                  [](const std::string* a, const std::string* b) { return *a < *b; });
    }

    Vocabulary vocab;
    vocab.ngram_range = ngram_range;
    vocab.doc_count = docs.size();
    vocab.df.resize(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        vocab.index.emplace(*kept[j], j);
        vocab.df[j] = stats.at(*kept[j]).second;
    }
    return vocab;
}

// x_ij = n_ij: occurrence count of feature j in document i. Out-of-vocabulary
// features contribute nothing.
inline SparseCountMatrix count_transform(const TokenDocs& docs, const Vocabulary& vocab) {
    SparseCountMatrix matrix;
    matrix.cols = vocab.size();
    std::unordered_map<std::size_t, std::int64_t> counts;
    std::vector<std::pair<std::size_t, std::int64_t>> entries;
    for (const auto& doc : docs) {
        counts.clear();
        detail::for_each_ngram(doc, vocab.ngram_range.first, vocab.ngram_range.second,
                               [&](std::string&& gram) {
                                   if (const auto id = vocab.lookup(gram)) ++counts[*id];
                               });
        entries.assign(counts.begin(), counts.end());
        std::sort(entries.begin(), entries.end());
        matrix.append_row(entries);
    }
    return matrix;
}

// TF_ij = n_ij / sum_k n_ik. All-zero rows stay all-zero.
inline TfidfMatrix term_frequency(const SparseCountMatrix& counts) {
    TfidfMatrix tf;
    tf.rows = counts.rows;
    tf.cols = counts.cols;
    tf.row_offsets = counts.row_offsets;
    tf.col_ids = counts.col_ids;
    tf.values.resize(counts.values.size());
    for (std::size_t r = 0; r < counts.rows; ++r) {
        std::int64_t total = 0;
        for (std::size_t k = counts.row_offsets[r]; k < counts.row_offsets[r + 1]; ++k)
            total += counts.values[k];
        for (std::size_t k = counts.row_offsets[r]; k < counts.row_offsets[r + 1]; ++k)
            tf.values[k] = static_cast<double>(counts.values[k]) / static_cast<double>(total);
    }
    return tf;
}

// IDF_j = ln(N / DF_j), natural logarithm, no smoothing.
inline std::vector<double> inverse_document_frequency(const Vocabulary& vocab) {
    std::vector<double> idf(vocab.df.size());
    for (std::size_t j = 0; j < vocab.df.size(); ++j) {
        if (vocab.df[j] == 0) throw DataError("inverse_document_frequency: DF = 0 column");
        idf[j] = std::log(static_cast<double>(vocab.doc_count) / static_cast<double>(vocab.df[j]));
    }
    return idf;
}

// TFIDF_ij = TF_ij * IDF_j.
inline TfidfMatrix tfidf_transform(const SparseCountMatrix& counts, const Vocabulary& vocab) {
    TfidfMatrix out = term_frequency(counts);
    const auto idf = inverse_document_frequency(vocab);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] *= idf[out.col_ids[k]];
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json vocab_to_json(const Vocabulary& vocab) {
    nlohmann::json features = nlohmann::json::object();
    for (const auto& [gram, id] : vocab.index) features[gram] = id;
    return {{"version", 1},
            {"ngram_min", vocab.ngram_range.first},
            {"ngram_max", vocab.ngram_range.second},
            {"doc_count", vocab.doc_count},
            {"features", std::move(features)},
            {"df", vocab.df}};
}

inline Vocabulary vocab_from_json(const nlohmann::json& j) {
    Vocabulary vocab;
    vocab.ngram_range = {j.at("ngram_min").get<std::size_t>(), j.at("ngram_max").get<std::size_t>()};
    vocab.doc_count = j.at("doc_count").get<std::size_t>();
    vocab.df = j.at("df").get<std::vector<std::size_t>>();
    for (const auto& [gram, id] : j.at("features").items())
        vocab.index.emplace(gram, id.get<std::size_t>());
    if (vocab.df.size() != vocab.index.size()) throw DataError("vocabulary JSON: df length mismatch");
    return vocab;
}

// Binary layout, little-endian: magic "TSSP", u32 version, u8 value kind
// (0 = i64 counts, 1 = f64 reals), u64 rows/cols/nnz, then row offsets
// (rows+1 x u64), column ids (nnz x u64), values (nnz x 8 bytes).
namespace detail {

template <typename T>
void write_pod(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw DataError("sparse matrix file truncated");
    return value;
}

}  // namespace detail

template <typename Value>
void save_sparse(const SparseMatrix<Value>& matrix, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out.write("TSSP", 4);
    detail::write_pod<std::uint32_t>(out, 1);
    detail::write_pod<std::uint8_t>(out, std::is_integral_v<Value> ? 0 : 1);
    detail::write_pod<std::uint64_t>(out, matrix.rows);
    detail::write_pod<std::uint64_t>(out, matrix.cols);
    detail::write_pod<std::uint64_t>(out, matrix.nnz());
    for (auto offset : matrix.row_offsets) detail::write_pod<std::uint64_t>(out, offset);
    for (auto col : matrix.col_ids) detail::write_pod<std::uint64_t>(out, col);
    for (auto value : matrix.values) {
        if constexpr (std::is_integral_v<Value>) detail::write_pod<std::int64_t>(out, value);
        else detail::write_pod<double>(out, value);
    }
}

template <typename Value>
SparseMatrix<Value> load_sparse(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "TSSP") throw DataError("bad sparse matrix magic: " + path);
    const auto version = detail::read_pod<std::uint32_t>(in);
    if (version != 1) throw DataError("unsupported sparse matrix version");
    const auto kind = detail::read_pod<std::uint8_t>(in);
    if (kind != (std::is_integral_v<Value> ? 0 : 1))
        throw DataError("sparse matrix value kind mismatch: " + path);
    SparseMatrix<Value> matrix;
    matrix.rows = detail::read_pod<std::uint64_t>(in);
    matrix.cols = detail::read_pod<std::uint64_t>(in);
    const auto nnz = detail::read_pod<std::uint64_t>(in);
    matrix.row_offsets.resize(matrix.rows + 1);
    for (auto& offset : matrix.row_offsets) offset = detail::read_pod<std::uint64_t>(in);
    matrix.col_ids.resize(nnz);
    for (auto& col : matrix.col_ids) col = detail::read_pod<std::uint64_t>(in);
    matrix.values.resize(nnz);
    for (auto& value : matrix.values) {
        if constexpr (std::is_integral_v<Value>) value = detail::read_pod<std::int64_t>(in);
        else value = detail::read_pod<double>(in);
    }
    return matrix;
}

// row,col,value triplet dump for eyeballing.
template <typename Value>
std::string sparse_debug_csv(const SparseMatrix<Value>& matrix) {
    std::string out = "row,col,value\n";
    for (std::size_t r = 0; r < matrix.rows; ++r) {
        for (std::size_t k = matrix.row_offsets[r]; k < matrix.row_offsets[r + 1]; ++k) {
            out += std::to_string(r);
            out += ',';
            out += std::to_string(matrix.col_ids[k]);
            out += ',';
            if constexpr (std::is_integral_v<Value>) {
                out += std::to_string(matrix.values[k]);
            } else {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.12g", matrix.values[k]);
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace tweetsent
