#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "tweetsent/corpus.hpp"
#include "tweetsent/features.hpp"

namespace tweetsent {

// Multinomial Naive Bayes with Laplace smoothing. Feature "mass" may be
// fractional, so TF-IDF rows work as soft counts.
struct NbModel {
    double alpha = 1.0;
    std::array<double, 2> log_prior{};                 // [Negative, Positive]
    std::array<std::vector<double>, 2> log_likelihood; // ln P(feature | class)
    std::size_t vocab_size = 0;
};

struct NbPrediction {
    SentimentLabel label;
    std::array<double, 2> log_posterior{};  // up to a shared constant
};

template <typename Value>
NbModel nb_fit(const SparseMatrix<Value>& features, const std::vector<SentimentLabel>& labels,
               double alpha = 1.0) {
    if (features.rows != labels.size())
        throw DataError("nb_fit: row/label count mismatch (" + std::to_string(features.rows) +
                        " vs " + std::to_string(labels.size()) + ")");
    if (alpha <= 0) throw DataError("nb_fit: alpha must be positive");
    if (features.rows == 0) throw DataError("nb_fit: empty training set");

    NbModel model;
    model.alpha = alpha;
    model.vocab_size = features.cols;

    std::array<std::size_t, 2> class_docs{};
    std::array<std::vector<double>, 2> mass;
    mass[0].assign(features.cols, 0.0);
    mass[1].assign(features.cols, 0.0);
    for (std::size_t r = 0; r < features.rows; ++r) {
        const auto c = static_cast<std::size_t>(label_code(labels[r]));
        ++class_docs[c];
        for (std::size_t k = features.row_offsets[r]; k < features.row_offsets[r + 1]; ++k)
            mass[c][features.col_ids[k]] += static_cast<double>(features.values[k]);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        if (class_docs[c] == 0)
            throw DataError("nb_fit: class with zero documents: " +
                            std::string(c == 0 ? "Negative" : "Positive"));
        model.log_prior[c] = std::log(static_cast<double>(class_docs[c]) /
                                      static_cast<double>(features.rows));
        double total = 0;
        for (double m : mass[c]) total += m;
        const double denom = total + alpha * static_cast<double>(features.cols);
        model.log_likelihood[c].resize(features.cols);
        for (std::size_t j = 0; j < features.cols; ++j)
            model.log_likelihood[c][j] = std::log((mass[c][j] + alpha) / denom);
    }
    return model;
}

// score(c) = log_prior[c] + sum_j x_j * log_likelihood[c][j]; ties go to
// Negative.
template <typename Value>
NbPrediction nb_predict_row(const NbModel& model, const SparseMatrix<Value>& features,
                            std::size_t row) {
    if (features.cols != model.vocab_size)
        throw DataError("nb_predict: feature dimension mismatch");
    NbPrediction out{SentimentLabel::Negative, {model.log_prior[0], model.log_prior[1]}};
    for (std::size_t k = features.row_offsets[row]; k < features.row_offsets[row + 1]; ++k) {
        const auto j = features.col_ids[k];
        const auto x = static_cast<double>(features.values[k]);
        out.log_posterior[0] += x * model.log_likelihood[0][j];
        out.log_posterior[1] += x * model.log_likelihood[1][j];
    }
    out.label = out.log_posterior[1] > out.log_posterior[0] ? SentimentLabel::Positive
                                                            : SentimentLabel::Negative;
    return out;
}

inline NbPrediction nb_predict(const NbModel& model, const std::vector<double>& doc_features) {
    if (doc_features.size() != model.vocab_size)
        throw DataError("nb_predict: feature dimension mismatch");
    NbPrediction out{SentimentLabel::Negative, {model.log_prior[0], model.log_prior[1]}};
    for (std::size_t j = 0; j < doc_features.size(); ++j) {
        if (doc_features[j] == 0) continue;
        out.log_posterior[0] += doc_features[j] * model.log_likelihood[0][j];
        out.log_posterior[1] += doc_features[j] * model.log_likelihood[1][j];
    }
    out.label = out.log_posterior[1] > out.log_posterior[0] ? SentimentLabel::Positive
                                                            : SentimentLabel::Negative;
    return out;
}

template <typename Value>
std::vector<SentimentLabel> nb_predict_all(const NbModel& model,
                                           const SparseMatrix<Value>& features) {
    std::vector<SentimentLabel> out;
    out.reserve(features.rows);
    for (std::size_t r = 0; r < features.rows; ++r)
        out.push_back(nb_predict_row(model, features, r).label);
    return out;
}

inline nlohmann::json nb_to_json(const NbModel& model, const std::string& vocab_ref = "") {
    return {{"version", 1},
            {"alpha", model.alpha},
            {"log_prior", model.log_prior},
            {"log_likelihood_negative", model.log_likelihood[0]},
            {"log_likelihood_positive", model.log_likelihood[1]},
            {"vocab_size", model.vocab_size},
            {"vocab_ref", vocab_ref}};
}

inline NbModel nb_from_json(const nlohmann::json& j) {
    NbModel model;
    model.alpha = j.at("alpha").get<double>();
    const auto prior = j.at("log_prior").get<std::vector<double>>();
    if (prior.size() != 2) throw DataError("NB model JSON: log_prior must have 2 entries");
    model.log_prior = {prior[0], prior[1]};
    model.log_likelihood[0] = j.at("log_likelihood_negative").get<std::vector<double>>();
    model.log_likelihood[1] = j.at("log_likelihood_positive").get<std::vector<double>>();
    model.vocab_size = j.at("vocab_size").get<std::size_t>();
    if (model.log_likelihood[0].size() != model.vocab_size ||
        model.log_likelihood[1].size() != model.vocab_size)
        throw DataError("NB model JSON: likelihood size mismatch");
    return model;
}

}  // namespace tweetsent
