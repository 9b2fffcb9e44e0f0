#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tweetsent/corpus.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/rng.hpp"

namespace tweetsent {

enum class EmbedMode { Cbow, SkipGram };

struct EmbedTrainConfig {
    EmbedMode mode = EmbedMode::SkipGram;
    std::size_t dim = 100;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double initial_lr = 0.025;
    double min_lr = 1e-4;
    std::size_t min_count = 1;
    std::uint64_t seed = 0;
};

struct EmbeddingMatrix {
    std::vector<std::string> tokens;  // row id -> token
    std::unordered_map<std::string, std::size_t> vocab;
    std::size_t dim = 0;
    std::vector<double> vectors;          // |V| x dim, input side
    std::vector<double> context_vectors;  // |V| x dim, output side

    const double* row(std::size_t id) const { return vectors.data() + id * dim; }
    double* row(std::size_t id) { return vectors.data() + id * dim; }
    const double* context_row(std::size_t id) const { return context_vectors.data() + id * dim; }
    double* context_row(std::size_t id) { return context_vectors.data() + id * dim; }
};

namespace detail {

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

// One negative-sampling step for a (target, context, negatives) triple:
// loss = -ln s(u_c . v_t) - sum_n ln s(-u_n . v_t). Gradients are returned
// rather than applied so the trainer and the finite-difference tests share
// the same arithmetic.
struct SgnsGradients {
    double loss = 0;
    std::vector<double> grad_target;             // d loss / d v_t
    std::vector<double> grad_context;            // d loss / d u_c
    std::vector<std::vector<double>> grad_negs;  // d loss / d u_n
};

inline SgnsGradients sgns_loss_and_grad(const std::vector<double>& v_t,
                                        const std::vector<double>& u_c,
                                        const std::vector<std::vector<double>>& u_negs) {
    const std::size_t d = v_t.size();
    SgnsGradients out;
    out.grad_target.assign(d, 0.0);
    out.grad_context.assign(d, 0.0);
    out.grad_negs.assign(u_negs.size(), std::vector<double>(d, 0.0));

    double dot = 0;
    for (std::size_t i = 0; i < d; ++i) dot += u_c[i] * v_t[i];
    const double s_pos = detail::sigmoid_scalar(dot);
    out.loss -= std::log(std::max(s_pos, 1e-12));
    const double g_pos = s_pos - 1.0;  // d(-ln s(x))/dx = s(x) - 1
    for (std::size_t i = 0; i < d; ++i) {
        out.grad_context[i] += g_pos * v_t[i];
        out.grad_target[i] += g_pos * u_c[i];
    }
    for (std::size_t n = 0; n < u_negs.size(); ++n) {
        double ndot = 0;
        for (std::size_t i = 0; i < d; ++i) ndot += u_negs[n][i] * v_t[i];
        const double s_neg = detail::sigmoid_scalar(-ndot);
        out.loss -= std::log(std::max(s_neg, 1e-12));
        const double g_neg = detail::sigmoid_scalar(ndot);  // = 1 - s(-x)
        for (std::size_t i = 0; i < d; ++i) {
            out.grad_negs[n][i] += g_neg * v_t[i];
            out.grad_target[i] += g_neg * u_negs[n][i];
        }
    }
    return out;
}

namespace detail {

// Cumulative unigram^0.75 distribution; sampling is a binary search over a
// uniform draw.
struct NegativeSampler {
    std::vector<double> cumulative;

    explicit NegativeSampler(const std::vector<std::size_t>& counts) {
        cumulative.reserve(counts.size());
        double total = 0;
        for (auto c : counts) {
            total += std::pow(static_cast<double>(c), 0.75);
            cumulative.push_back(total);
        }
        for (auto& v : cumulative) v /= total;
    }

    std::size_t draw(Xoshiro256ss& rng) const {
        const double u = rng.next_double();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                     cumulative.size() - 1);
    }
};

}  // namespace detail

// Single-threaded by contract so fixed seeds give bitwise-identical
// matrices. Pairs use the full symmetric window; the learning rate decays
// linearly over all (epoch, pair) steps down to min_lr.
inline EmbeddingMatrix train_embeddings(const TokenDocs& docs, const EmbedTrainConfig& config) {
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : docs)
        for (const auto& token : doc) ++counts[token];

    EmbeddingMatrix emb;
    emb.dim = config.dim;
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [token, count] : counts)
        if (count >= config.min_count) kept.emplace_back(token, count);
    if (kept.empty()) throw DataError("train_embeddings: empty vocabulary after min_count");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::size_t> vocab_counts;
    for (std::size_t id = 0; id < kept.size(); ++id) {
        emb.tokens.push_back(kept[id].first);
        emb.vocab.emplace(kept[id].first, id);
        vocab_counts.push_back(kept[id].second);
    }
    const std::size_t v = emb.tokens.size(), d = emb.dim;
    emb.vectors.resize(v * d);
    emb.context_vectors.assign(v * d, 0.0);
    Xoshiro256ss rng(config.seed);
    for (auto& w : emb.vectors) w = (rng.next_double() - 0.5) / static_cast<double>(d);

    // Map docs to ids, dropping filtered tokens.
    std::vector<std::vector<std::size_t>> encoded;
    encoded.reserve(docs.size());
    std::size_t pairs_per_epoch = 0;
    for (const auto& doc : docs) {
        std::vector<std::size_t> row;
        for (const auto& token : doc) {
            const auto it = emb.vocab.find(token);
            if (it != emb.vocab.end()) row.push_back(it->second);
        }
        if (row.size() >= 2) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                const std::size_t lo = i >= config.window ? i - config.window : 0;
                const std::size_t hi = std::min(row.size() - 1, i + config.window);
                pairs_per_epoch += (hi - lo);  // excludes the center position
            }
        }
        encoded.push_back(std::move(row));
    }
    if (pairs_per_epoch == 0) throw DataError("train_embeddings: no training pairs");

    detail::NegativeSampler sampler(vocab_counts);
    const double total_steps = static_cast<double>(pairs_per_epoch * config.epochs);
    std::size_t step = 0;
    std::vector<double> context_mean(d), grad_accum(d);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& row : encoded) {
            if (row.size() < 2) continue;
            for (std::size_t i = 0; i < row.size(); ++i) {
                const std::size_t lo = i >= config.window ? i - config.window : 0;
                const std::size_t hi = std::min(row.size() - 1, i + config.window);

                if (config.mode == EmbedMode::SkipGram) {
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        const double lr = std::max(
                            config.min_lr,
                            config.initial_lr * (1.0 - static_cast<double>(step) / total_steps));
                        ++step;
                        const std::size_t target = row[i], context = row[j];
                        std::vector<std::vector<double>> negs;
                        std::vector<std::size_t> neg_ids;
                        for (std::size_t n = 0; n < config.negatives; ++n) {
                            const auto neg = sampler.draw(rng);
                            if (neg == context || neg == target) continue;
                            neg_ids.push_back(neg);
                            negs.emplace_back(emb.context_row(neg), emb.context_row(neg) + d);
                        }
                        const std::vector<double> vt(emb.row(target), emb.row(target) + d);
                        const std::vector<double> uc(emb.context_row(context),
                                                     emb.context_row(context) + d);
                        const auto g = sgns_loss_and_grad(vt, uc, negs);
                        for (std::size_t k = 0; k < d; ++k) {
                            emb.context_row(context)[k] -= lr * g.grad_context[k];
                            emb.row(target)[k] -= lr * g.grad_target[k];
                        }
                        for (std::size_t n = 0; n < neg_ids.size(); ++n)
                            for (std::size_t k = 0; k < d; ++k)
                                emb.context_row(neg_ids[n])[k] -= lr * g.grad_negs[n][k];
                    }
                } else {
                    // CBOW: the mean of the context input vectors predicts
                    // the target; the input-side gradient is shared equally.
                    if (hi == lo) continue;
                    const double lr = std::max(
                        config.min_lr,
                        config.initial_lr * (1.0 - static_cast<double>(step) / total_steps));
                    step += hi - lo;
                    std::fill(context_mean.begin(), context_mean.end(), 0.0);
                    std::size_t n_ctx = 0;
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        ++n_ctx;
                        for (std::size_t k = 0; k < d; ++k) context_mean[k] += emb.row(row[j])[k];
                    }
                    for (std::size_t k = 0; k < d; ++k)
                        context_mean[k] /= static_cast<double>(n_ctx);

                    const std::size_t target = row[i];
                    std::vector<std::vector<double>> negs;
                    std::vector<std::size_t> neg_ids;
                    for (std::size_t n = 0; n < config.negatives; ++n) {
                        const auto neg = sampler.draw(rng);
                        if (neg == target) continue;
                        neg_ids.push_back(neg);
                        negs.emplace_back(emb.context_row(neg), emb.context_row(neg) + d);
                    }
                    const std::vector<double> ut(emb.context_row(target),
                                                 emb.context_row(target) + d);
                    const auto g = sgns_loss_and_grad(context_mean, ut, negs);
                    for (std::size_t k = 0; k < d; ++k) {
                        emb.context_row(target)[k] -= lr * g.grad_context[k];
                        grad_accum[k] = lr * g.grad_target[k] / static_cast<double>(n_ctx);
                    }
                    for (std::size_t n = 0; n < neg_ids.size(); ++n)
                        for (std::size_t k = 0; k < d; ++k)
                            emb.context_row(neg_ids[n])[k] -= lr * g.grad_negs[n][k];
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        for (std::size_t k = 0; k < d; ++k) emb.row(row[j])[k] -= grad_accum[k];
                    }
                }
            }
        }
    }
    for (double w : emb.vectors)
        if (!std::isfinite(w)) throw DataError("train_embeddings: non-finite embedding");
    return emb;
}

// Arithmetic mean of in-vocabulary token vectors; empty or all-OOV docs give
// the zero vector.
inline std::vector<double> doc_vector(const std::vector<std::string>& tokens,
                                      const EmbeddingMatrix& emb) {
    std::vector<double> out(emb.dim, 0.0);
    std::size_t hits = 0;
    for (const auto& token : tokens) {
        const auto it = emb.vocab.find(token);
        if (it == emb.vocab.end()) continue;
        ++hits;
        const double* row = emb.row(it->second);
        for (std::size_t k = 0; k < emb.dim; ++k) out[k] += row[k];
    }
    if (hits)
        for (auto& v : out) v /= static_cast<double>(hits);
    return out;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Text vector format: "|V| dim" header line, then "token v1 .. vd" rows.
inline void save_embeddings(const EmbeddingMatrix& emb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << emb.tokens.size() << ' ' << emb.dim << '\n';
    char buf[32];
    for (std::size_t id = 0; id < emb.tokens.size(); ++id) {
        out << emb.tokens[id];
        for (std::size_t k = 0; k < emb.dim; ++k) {
            std::snprintf(buf, sizeof(buf), " %.6f", emb.row(id)[k]);
            out << buf;
        }
        out << '\n';
    }
}

inline EmbeddingMatrix load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::size_t v = 0, d = 0;
    in >> v >> d;
    if (!in || d == 0) throw DataError("bad embedding header in " + path);
    EmbeddingMatrix emb;
    emb.dim = d;
    emb.vectors.resize(v * d);
    emb.context_vectors.assign(v * d, 0.0);
    for (std::size_t id = 0; id < v; ++id) {
        std::string token;
        in >> token;
        emb.tokens.push_back(token);
        emb.vocab.emplace(token, id);
        for (std::size_t k = 0; k < d; ++k) in >> emb.vectors[id * d + k];
    }
    if (!in) throw DataError("embedding file truncated: " + path);
    return emb;
}

}  // namespace tweetsent
