#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tweetsent/autodiff.hpp"
#include "tweetsent/corpus.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/rng.hpp"

namespace tweetsent {

// ---------------------------------------------------------------------------
// Sequence encoding: ids 0 = padding, 1 = out-of-vocabulary, 2.. = tokens
// ranked by training frequency (ties lexicographic).

struct WordIndex {
    std::unordered_map<std::string, std::size_t> ids;  // token -> id >= 2

    static WordIndex fit(const TokenDocs& docs) {
        std::map<std::string, std::size_t> counts;
        for (const auto& doc : docs)
            for (const auto& token : doc) ++counts[token];
        std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        WordIndex index;
        for (std::size_t r = 0; r < ranked.size(); ++r) index.ids.emplace(ranked[r].first, r + 2);
        return index;
    }

    // Padding and OOV slots included.
    std::size_t full_size() const { return ids.size() + 2; }
};

using IdMatrix = std::vector<std::vector<std::size_t>>;

// Fixed-length id sequences: post-padded with 0, tail-truncated at max_len.
// Tokens ranked outside the top (vocab_size - 2) map to the OOV id 1.
inline IdMatrix encode_sequences(const TokenDocs& docs, const WordIndex& index,
                                 std::size_t vocab_size, std::size_t max_len) {
    if (max_len < 1) throw DataError("encode_sequences: max_len must be >= 1");
    if (vocab_size < 2) throw DataError("encode_sequences: vocab_size must be >= 2");
    IdMatrix out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
        std::vector<std::size_t> row(max_len, 0);
        const std::size_t n = std::min(doc.size(), max_len);
        for (std::size_t i = 0; i < n; ++i) {
            const auto it = index.ids.find(doc[i]);
            row[i] = (it != index.ids.end() && it->second < vocab_size) ? it->second : 1;
        }
        out.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Architecture specs

struct CnnSpec {
    std::size_t vocab_size = 0;  // word-index length, set by the caller
    std::size_t embed_dim = 300;
    std::array<std::size_t, 3> filters{32, 64, 64};
    std::size_t kernel = 4;
    std::size_t pool = 2;
    double dropout_rate = 0.1;
    std::size_t dense_units = 256;
    double adam_lr = 0.01;
    double label_smoothing = 0.1;
    std::size_t patience = 2;
    std::size_t max_epochs = 20;
    std::size_t batch_size = 64;
    std::size_t max_len = 60;
};

struct BilstmSpec {
    std::size_t vocab_size = 5000;
    std::size_t embed_dim = 32;
    std::size_t conv_filters = 32;
    std::size_t conv_kernel = 3;  // same padding
    std::size_t pool = 2;
    std::size_t lstm_units = 32;
    double dropout_rate = 0.4;
    double lr0 = 0.1;
    double momentum = 0.8;
    std::size_t epochs = 20;
    std::size_t batch_size = 64;
    std::size_t max_len = 60;

    double decay() const { return lr0 / static_cast<double>(epochs); }
};

// Length algebra for the CNN stack: each stage is a valid conv (l - k + 1)
// followed by a floor pool (l / p).
inline std::size_t cnn_stage_lengths(const CnnSpec& spec, std::size_t max_len,
                                     std::vector<std::size_t>* stages = nullptr) {
    std::size_t l = max_len;
    for (std::size_t s = 0; s < spec.filters.size(); ++s) {
        if (l < spec.kernel)
            throw ad::ShapeError("cnn: input length too short at conv stage " +
                                 std::to_string(s + 1) + " (length " + std::to_string(l) + ")");
        l = l - spec.kernel + 1;
        if (stages) stages->push_back(l);
        l = l / spec.pool;
        if (l == 0)
            throw ad::ShapeError("cnn: input length too short at pool stage " +
                                 std::to_string(s + 1));
        if (stages) stages->push_back(l);
    }
    return l;
}

inline std::size_t cnn_min_input_length(const CnnSpec& spec) {
    for (std::size_t l = 1; l < 4096; ++l) {
        try {
            cnn_stage_lengths(spec, l);
            return l;
        } catch (const ad::ShapeError&) {
        }
    }
    throw ad::ShapeError("cnn: no feasible input length under 4096");
}

// ---------------------------------------------------------------------------
// Models. Parameters are shared graph leaves; forward() records a fresh tape
// over them each call.

class CnnModel {
  public:
    CnnModel(CnnSpec spec, std::uint64_t seed) : spec_(spec) {
        if (spec.vocab_size < 2) throw DataError("cnn: vocab_size must be >= 2");
        flat_len_ = cnn_stage_lengths(spec, spec.max_len) * spec.filters[2];
        Xoshiro256ss rng(seed);
        auto param = [&](std::vector<std::size_t> shape, const std::string& name,
                         std::size_t fan_in, std::size_t fan_out, bool embed = false) {
            ad::Tensor t(std::move(shape));
            if (embed) ad::init_uniform(t, -0.05, 0.05, rng);
            else if (fan_in) ad::init_glorot_uniform(t, fan_in, fan_out, rng);
            auto node = ad::make_param(std::move(t), name);
            params_.push_back(node);
            return node;
        };
        embedding_ = param({spec.vocab_size, spec.embed_dim}, "embedding", 0, 0, true);
        std::size_t in_ch = spec.embed_dim;
        for (std::size_t s = 0; s < spec.filters.size(); ++s) {
            const std::size_t out_ch = spec.filters[s];
            conv_k_[s] = param({spec.kernel, in_ch, out_ch}, "conv" + std::to_string(s + 1) + "_kernel",
                               spec.kernel * in_ch, spec.kernel * out_ch);
            conv_b_[s] = param({out_ch}, "conv" + std::to_string(s + 1) + "_bias", 0, 0);
            in_ch = out_ch;
        }
        dense_w_ = param({flat_len_, spec.dense_units}, "dense_weight", flat_len_, spec.dense_units);
        dense_b_ = param({spec.dense_units}, "dense_bias", 0, 0);
        out_w_ = param({spec.dense_units, std::size_t{1}}, "output_weight", spec.dense_units, 1);
        out_b_ = param({std::size_t{1}}, "output_bias", 0, 0);
    }

    const CnnSpec& spec() const { return spec_; }
    const std::vector<ad::NodePtr>& params() const { return params_; }

    void load_parameters(const std::map<std::string, ad::Tensor>& tensors) {
        for (auto& p : params_) {
            const auto it = tensors.find(p->name);
            if (it == tensors.end()) throw DataError("checkpoint missing parameter " + p->name);
            if (it->second.shape != p->value.shape)
                throw DataError("checkpoint shape mismatch for " + p->name);
            p->value = it->second;
        }
    }

    // Embed -> [Conv -> Pool -> Dropout] x3 -> Flatten -> Dense ReLU ->
    // single sigmoid unit.
    ad::NodePtr forward(const IdMatrix& ids, bool train, Xoshiro256ss& rng) const {
        auto x = ad::embedding_lookup(embedding_, ids);
        for (std::size_t s = 0; s < spec_.filters.size(); ++s) {
            x = ad::relu(ad::conv1d(x, conv_k_[s], conv_b_[s], ad::Padding::Valid));
            x = ad::maxpool1d(x, spec_.pool);
            x = ad::dropout(x, spec_.dropout_rate, train, rng);
        }
        x = ad::flatten(x);
        x = ad::relu(ad::affine(x, dense_w_, dense_b_));
        return ad::sigmoid(ad::affine(x, out_w_, out_b_));
    }

    // Positive iff the sigmoid output is >= 0.5 (boundary counts as
    // Positive).
    std::vector<SentimentLabel> predict(const IdMatrix& ids, std::vector<double>* scores = nullptr) const {
        Xoshiro256ss rng(0);
        auto out = forward(ids, false, rng);
        std::vector<SentimentLabel> labels;
        labels.reserve(ids.size());
        for (std::size_t b = 0; b < ids.size(); ++b) {
            const double s = out->value.at(b, 0);
            if (scores) scores->push_back(s);
            labels.push_back(s >= 0.5 ? SentimentLabel::Positive : SentimentLabel::Negative);
        }
        return labels;
    }

  private:
    CnnSpec spec_;
    std::size_t flat_len_;
    std::vector<ad::NodePtr> params_;
    ad::NodePtr embedding_;
    std::array<ad::NodePtr, 3> conv_k_, conv_b_;
    ad::NodePtr dense_w_, dense_b_, out_w_, out_b_;
};

class BilstmModel {
  public:
    BilstmModel(BilstmSpec spec, std::uint64_t seed) : spec_(spec) {
        if (spec.vocab_size < 2) throw DataError("bilstm: vocab_size must be >= 2");
        Xoshiro256ss rng(seed);
        auto param = [&](std::vector<std::size_t> shape, const std::string& name,
                         std::size_t fan_in, std::size_t fan_out, bool embed = false) {
            ad::Tensor t(std::move(shape));
            if (embed) ad::init_uniform(t, -0.05, 0.05, rng);
            else if (fan_in) ad::init_glorot_uniform(t, fan_in, fan_out, rng);
            auto node = ad::make_param(std::move(t), name);
            params_.push_back(node);
            return node;
        };
        const std::size_t h = spec.lstm_units;
        embedding_ = param({spec.vocab_size, spec.embed_dim}, "embedding", 0, 0, true);
        conv_k_ = param({spec.conv_kernel, spec.embed_dim, spec.conv_filters}, "conv_kernel",
                        spec.conv_kernel * spec.embed_dim, spec.conv_kernel * spec.conv_filters);
        conv_b_ = param({spec.conv_filters}, "conv_bias", 0, 0);
        auto lstm_params = [&](const std::string& prefix) {
            ad::LstmParams p;
            p.w = param({spec.conv_filters, 4 * h}, prefix + "_w", spec.conv_filters, 4 * h);
            p.u = param({h, 4 * h}, prefix + "_u", h, 4 * h);
            p.b = param({4 * h}, prefix + "_b", 0, 0);
            // forget gate bias starts at 1
            for (std::size_t j = h; j < 2 * h; ++j) p.b->value.at(j) = 1.0;
            return p;
        };
        fwd_ = lstm_params("lstm_fwd");
        bwd_ = lstm_params("lstm_bwd");
        dense_w_ = param({2 * h, std::size_t{2}}, "dense_weight", 2 * h, 2);
        dense_b_ = param({std::size_t{2}}, "dense_bias", 0, 0);
    }

    const BilstmSpec& spec() const { return spec_; }
    const std::vector<ad::NodePtr>& params() const { return params_; }

    void load_parameters(const std::map<std::string, ad::Tensor>& tensors) {
        for (auto& p : params_) {
            const auto it = tensors.find(p->name);
            if (it == tensors.end()) throw DataError("checkpoint missing parameter " + p->name);
            if (it->second.shape != p->value.shape)
                throw DataError("checkpoint shape mismatch for " + p->name);
            p->value = it->second;
        }
    }

    // Embed -> Conv(same, ReLU) -> Pool -> BiLSTM -> Dropout -> 2-way
    // softmax.
    ad::NodePtr forward(const IdMatrix& ids, bool train, Xoshiro256ss& rng) const {
        auto x = ad::embedding_lookup(embedding_, ids);
        x = ad::relu(ad::conv1d(x, conv_k_, conv_b_, ad::Padding::Same));
        x = ad::maxpool1d(x, spec_.pool);
        auto h = ad::bilstm(x, fwd_, bwd_);
        h = ad::dropout(h, spec_.dropout_rate, train, rng);
        return ad::softmax(ad::affine(h, dense_w_, dense_b_));
    }

    // Argmax of the softmax row; ties go to Negative.
    std::vector<SentimentLabel> predict(const IdMatrix& ids,
                                        std::vector<std::array<double, 2>>* scores = nullptr) const {
        Xoshiro256ss rng(0);
        auto out = forward(ids, false, rng);
        std::vector<SentimentLabel> labels;
        labels.reserve(ids.size());
        for (std::size_t b = 0; b < ids.size(); ++b) {
            const double neg = out->value.at(b, 0), pos = out->value.at(b, 1);
            if (scores) scores->push_back({neg, pos});
            labels.push_back(pos > neg ? SentimentLabel::Positive : SentimentLabel::Negative);
        }
        return labels;
    }

  private:
    BilstmSpec spec_;
    std::vector<ad::NodePtr> params_;
    ad::NodePtr embedding_, conv_k_, conv_b_;
    ad::LstmParams fwd_, bwd_;
    ad::NodePtr dense_w_, dense_b_;
};

// ---------------------------------------------------------------------------
// Training

struct EpochStats {
    double train_loss = 0;
    double train_accuracy = 0;
    double val_loss = 0;
    double val_accuracy = 0;
};

struct TrainRun {
    std::vector<EpochStats> epochs;
    std::size_t stopped_epoch = 0;  // 1-based count of epochs actually run
    std::size_t best_epoch = 0;     // 1-based epoch of the best monitored value
    std::uint64_t seed = 0;
    double wall_seconds = 0;
    double first_batch_loss = 0;  // loss of the initialized model on batch 1
};

namespace detail {

inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    return shuffled_indices(n, seed ^ static_cast<std::uint64_t>(epoch));
}

inline std::vector<ad::Tensor> snapshot(const std::vector<ad::NodePtr>& params) {
    std::vector<ad::Tensor> out;
    out.reserve(params.size());
    for (const auto& p : params) out.push_back(p->value);
    return out;
}

inline void restore(const std::vector<ad::NodePtr>& params, const std::vector<ad::Tensor>& snap) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = snap[i];
}

}  // namespace detail

struct TrainData {
    IdMatrix ids;
    std::vector<SentimentLabel> labels;
};

// Mini-batch training for the CNN: Adam, smoothed BCE, early stopping on
// validation accuracy with best-epoch weights restored.
inline TrainRun train_cnn(CnnModel& model, const TrainData& train, const TrainData& val,
                          std::uint64_t seed) {
    const auto& spec = model.spec();
    const auto t0 = std::chrono::steady_clock::now();
    TrainRun run;
    run.seed = seed;
    ad::AdamState opt;
    opt.lr = spec.adam_lr;
    opt.attach(model.params());
    Xoshiro256ss dropout_rng(seed ^ 0x9E3779B97F4A7C15ULL);
    ad::EarlyStopState stopper{spec.patience};
    std::vector<ad::Tensor> best_weights = detail::snapshot(model.params());

    for (std::size_t epoch = 0; epoch < spec.max_epochs; ++epoch) {
        const auto order = detail::epoch_order(train.ids.size(), seed, epoch);
        double loss_sum = 0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
            const std::size_t end = std::min(order.size(), start + spec.batch_size);
            IdMatrix batch_ids;
            std::vector<double> batch_y;
            for (std::size_t i = start; i < end; ++i) {
                batch_ids.push_back(train.ids[order[i]]);
                batch_y.push_back(static_cast<double>(label_code(train.labels[order[i]])));
            }
            auto pred = model.forward(batch_ids, true, dropout_rng);
            auto loss = ad::bce_label_smoothed(pred, batch_y, spec.label_smoothing);
            const double batch_loss = loss->value.at(0);
            if (!std::isfinite(batch_loss))
                throw ad::NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                       " batch " + std::to_string(start / spec.batch_size + 1));
            if (epoch == 0 && start == 0) run.first_batch_loss = batch_loss;
            loss_sum += batch_loss * static_cast<double>(end - start);
            for (std::size_t b = 0; b < batch_y.size(); ++b) {
                const bool pos = pred->value.at(b, 0) >= 0.5;
                if (pos == (batch_y[b] > 0.5)) ++correct;
            }
            ad::zero_grad(model.params());
            ad::backward(loss);
            ad::adam_step(opt, model.params());
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(order.size());
        stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
        double val_loss_sum = 0;
        std::size_t val_correct = 0;
        for (std::size_t start = 0; start < val.ids.size(); start += spec.batch_size) {
            const std::size_t end = std::min(val.ids.size(), start + spec.batch_size);
            IdMatrix chunk_ids(val.ids.begin() + static_cast<std::ptrdiff_t>(start),
                               val.ids.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<double> chunk_y;
            for (std::size_t i = start; i < end; ++i)
                chunk_y.push_back(static_cast<double>(label_code(val.labels[i])));
            Xoshiro256ss eval_rng(0);
            auto pred = model.forward(chunk_ids, false, eval_rng);
            val_loss_sum +=
                ad::bce_label_smoothed(pred, chunk_y, spec.label_smoothing)->value.at(0) *
                static_cast<double>(end - start);
            for (std::size_t b = 0; b < chunk_y.size(); ++b)
                if ((pred->value.at(b, 0) >= 0.5) == (chunk_y[b] > 0.5)) ++val_correct;
        }
        stats.val_loss = val_loss_sum / static_cast<double>(val.ids.size());
        stats.val_accuracy = static_cast<double>(val_correct) / static_cast<double>(val.ids.size());
        run.epochs.push_back(stats);

        const auto signal = ad::early_stop_update(stopper, stats.val_accuracy);
        if (stopper.since_improvement == 0) best_weights = detail::snapshot(model.params());
        if (signal == ad::EarlyStopSignal::Stop) break;
    }
    detail::restore(model.params(), best_weights);
    run.stopped_epoch = run.epochs.size();
    run.best_epoch = stopper.best_index + 1;
    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

// Mini-batch training for the BiLSTM: decayed-momentum SGD, categorical CE,
// fixed epoch count.
inline TrainRun train_bilstm(BilstmModel& model, const TrainData& train, const TrainData& val,
                             std::uint64_t seed) {
    const auto& spec = model.spec();
    const auto t0 = std::chrono::steady_clock::now();
    TrainRun run;
    run.seed = seed;
    ad::SgdMomentumState opt;
    opt.lr0 = spec.lr0;
    opt.momentum = spec.momentum;
    opt.decay = spec.decay();
    opt.attach(model.params());
    Xoshiro256ss dropout_rng(seed ^ 0x9E3779B97F4A7C15ULL);

    auto onehot = [](SentimentLabel l) {
        return l == SentimentLabel::Positive ? std::vector<double>{0.0, 1.0}
                                             : std::vector<double>{1.0, 0.0};
    };

    for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
        const auto order = detail::epoch_order(train.ids.size(), seed, epoch);
        double loss_sum = 0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
            const std::size_t end = std::min(order.size(), start + spec.batch_size);
            IdMatrix batch_ids;
            std::vector<std::vector<double>> batch_y;
            for (std::size_t i = start; i < end; ++i) {
                batch_ids.push_back(train.ids[order[i]]);
                batch_y.push_back(onehot(train.labels[order[i]]));
            }
            auto probs = model.forward(batch_ids, true, dropout_rng);
            auto loss = ad::categorical_ce(probs, batch_y);
            const double batch_loss = loss->value.at(0);
            if (!std::isfinite(batch_loss))
                throw ad::NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                       " batch " + std::to_string(start / spec.batch_size + 1));
            if (epoch == 0 && start == 0) run.first_batch_loss = batch_loss;
            loss_sum += batch_loss * static_cast<double>(end - start);
            for (std::size_t b = 0; b < batch_y.size(); ++b) {
                const bool pos = probs->value.at(b, 1) > probs->value.at(b, 0);
                if (pos == (batch_y[b][1] > 0.5)) ++correct;
            }
            ad::zero_grad(model.params());
            ad::backward(loss);
            ad::sgd_momentum_step(opt, model.params());
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(order.size());
        stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
        double val_loss_sum = 0;
        std::size_t val_correct = 0;
        for (std::size_t start = 0; start < val.ids.size(); start += spec.batch_size) {
            const std::size_t end = std::min(val.ids.size(), start + spec.batch_size);
            IdMatrix chunk_ids(val.ids.begin() + static_cast<std::ptrdiff_t>(start),
                               val.ids.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<std::vector<double>> chunk_y;
            for (std::size_t i = start; i < end; ++i) chunk_y.push_back(onehot(val.labels[i]));
            Xoshiro256ss eval_rng(0);
            auto probs = model.forward(chunk_ids, false, eval_rng);
            val_loss_sum +=
                ad::categorical_ce(probs, chunk_y)->value.at(0) * static_cast<double>(end - start);
            for (std::size_t b = 0; b < chunk_y.size(); ++b) {
                const bool pos = probs->value.at(b, 1) > probs->value.at(b, 0);
                if (pos == (chunk_y[b][1] > 0.5)) ++val_correct;
            }
        }
        stats.val_loss = val_loss_sum / static_cast<double>(val.ids.size());
        stats.val_accuracy = static_cast<double>(val_correct) / static_cast<double>(val.ids.size());
        run.epochs.push_back(stats);
    }
    run.stopped_epoch = run.epochs.size();
    run.best_epoch = 1;
    for (std::size_t e = 1; e < run.epochs.size(); ++e)
        if (run.epochs[e].val_accuracy > run.epochs[run.best_epoch - 1].val_accuracy)
            run.best_epoch = e + 1;
    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

// ---------------------------------------------------------------------------
// History export

inline nlohmann::json train_run_to_json(const TrainRun& run) {
    nlohmann::json epochs = nlohmann::json::array();
    for (std::size_t e = 0; e < run.epochs.size(); ++e) {
        const auto& s = run.epochs[e];
        epochs.push_back({{"epoch", e + 1},
                          {"loss", s.train_loss},
                          {"accuracy", s.train_accuracy},
                          {"val_loss", s.val_loss},
                          {"val_accuracy", s.val_accuracy}});
    }
    return {{"version", 1},
            {"epochs", std::move(epochs)},
            {"stopped_epoch", run.stopped_epoch},
            {"best_epoch", run.best_epoch},
            {"seed", run.seed},
            {"first_batch_loss", run.first_batch_loss}};
}

inline nlohmann::json cnn_spec_to_json(const CnnSpec& s) {
    return {{"vocab_size", s.vocab_size},   {"embed_dim", s.embed_dim},
            {"filters", s.filters},         {"kernel", s.kernel},
            {"pool", s.pool},               {"dropout_rate", s.dropout_rate},
            {"dense_units", s.dense_units}, {"adam_lr", s.adam_lr},
            {"label_smoothing", s.label_smoothing}, {"patience", s.patience},
            {"max_epochs", s.max_epochs},   {"batch_size", s.batch_size},
            {"max_len", s.max_len}};
}

inline CnnSpec cnn_spec_from_json(const nlohmann::json& j) {
    CnnSpec s;
    s.vocab_size = j.at("vocab_size");
    s.embed_dim = j.at("embed_dim");
    s.filters = j.at("filters");
    s.kernel = j.at("kernel");
    s.pool = j.at("pool");
    s.dropout_rate = j.at("dropout_rate");
    s.dense_units = j.at("dense_units");
    s.adam_lr = j.at("adam_lr");
    s.label_smoothing = j.at("label_smoothing");
    s.patience = j.at("patience");
    s.max_epochs = j.at("max_epochs");
    s.batch_size = j.at("batch_size");
    s.max_len = j.at("max_len");
    return s;
}

inline nlohmann::json bilstm_spec_to_json(const BilstmSpec& s) {
    return {{"vocab_size", s.vocab_size},     {"embed_dim", s.embed_dim},
            {"conv_filters", s.conv_filters}, {"conv_kernel", s.conv_kernel},
            {"pool", s.pool},                 {"lstm_units", s.lstm_units},
            {"dropout_rate", s.dropout_rate}, {"lr0", s.lr0},
            {"momentum", s.momentum},         {"epochs", s.epochs},
            {"batch_size", s.batch_size},     {"max_len", s.max_len}};
}

inline BilstmSpec bilstm_spec_from_json(const nlohmann::json& j) {
    BilstmSpec s;
    s.vocab_size = j.at("vocab_size");
    s.embed_dim = j.at("embed_dim");
    s.conv_filters = j.at("conv_filters");
    s.conv_kernel = j.at("conv_kernel");
    s.pool = j.at("pool");
    s.lstm_units = j.at("lstm_units");
    s.dropout_rate = j.at("dropout_rate");
    s.lr0 = j.at("lr0");
    s.momentum = j.at("momentum");
    s.epochs = j.at("epochs");
    s.batch_size = j.at("batch_size");
    s.max_len = j.at("max_len");
    return s;
}

inline nlohmann::json word_index_to_json(const WordIndex& index) {
    nlohmann::json ids = nlohmann::json::object();
    for (const auto& [token, id] : index.ids) ids[token] = id;
    return {{"version", 1}, {"ids", std::move(ids)}};
}

inline WordIndex word_index_from_json(const nlohmann::json& j) {
    WordIndex index;
    for (const auto& [token, id] : j.at("ids").items())
        index.ids.emplace(token, id.get<std::size_t>());
    return index;
}

inline std::string train_run_to_csv(const TrainRun& run) {
    std::string out = "epoch,loss,acc,val_loss,val_acc\n";
    char buf[160];
    for (std::size_t e = 0; e < run.epochs.size(); ++e) {
        const auto& s = run.epochs[e];
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", e + 1, s.train_loss,
                      s.train_accuracy, s.val_loss, s.val_accuracy);
        out += buf;
    }
    return out;
}

}  // namespace tweetsent
