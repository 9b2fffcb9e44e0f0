#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tweetsent/corpus.hpp"

namespace tweetsent {

// ---------------------------------------------------------------------------
// Confusion matrix and the four headline metrics. Positive (=1) is the
// positive class.

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

inline ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw DataError("confusion: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw DataError("confusion: labels must be 0 or 1");
        if (p == 1) (t == 1 ? cm.tp : cm.fp)++;
        else (t == 1 ? cm.fn : cm.tn)++;
    }
    return cm;
}

inline std::vector<int> label_codes(const std::vector<SentimentLabel>& labels) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (auto l : labels) out.push_back(label_code(l));
    return out;
}

struct Metrics {
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;
    bool degenerate = false;  // a 0/0 ratio was defined as 0
};

inline Metrics metrics(const ConfusionMatrix& cm) {
    Metrics m;
    auto ratio = [&](double num, double den) {
        if (den == 0) {
            m.degenerate = true;
            return 0.0;
        }
        return num / den;
    };
    m.accuracy = ratio(static_cast<double>(cm.tp + cm.tn), static_cast<double>(cm.total()));
    m.precision = ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
    m.recall = ratio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
    m.f1 = ratio(2.0 * m.recall * m.precision, m.recall + m.precision);
    return m;
}

// ---------------------------------------------------------------------------
// Classification report

struct ClassRow {
    std::string name;
    double precision = 0, recall = 0, f1 = 0;
    std::size_t support = 0;
};

struct ClassReport {
    std::vector<ClassRow> per_class;  // Negative, Positive
    double accuracy = 0;
    ClassRow macro, weighted, micro;
    std::vector<std::string> warnings;
};

// Macro/weighted rows from externally supplied per-class precision/recall
// and supports (F1 recomputed from the pair). classification_report builds
// on the same arithmetic.
struct AggregateInput {
    double precision = 0, recall = 0;
    std::size_t support = 0;
};

struct AggregateRows {
    ClassRow macro, weighted;
};

inline double f1_of(double precision, double recall) {
    if (precision + recall == 0) return 0;
    return 2.0 * recall * precision / (recall + precision);
}

inline AggregateRows aggregate_rows(const std::vector<AggregateInput>& inputs) {
    if (inputs.empty()) throw DataError("aggregate_rows: no classes");
    AggregateRows rows;
    rows.macro.name = "macro avg";
    rows.weighted.name = "weighted avg";
    double total_support = 0;
    for (const auto& in : inputs) total_support += static_cast<double>(in.support);
    if (total_support == 0) throw DataError("aggregate_rows: zero total support");
    for (const auto& in : inputs) {
        const double f1 = f1_of(in.precision, in.recall);
        const double w = static_cast<double>(in.support);
        rows.macro.precision += in.precision;
        rows.macro.recall += in.recall;
        rows.macro.f1 += f1;
        rows.weighted.precision += in.precision * w;
        rows.weighted.recall += in.recall * w;
        rows.weighted.f1 += f1 * w;
        rows.macro.support += in.support;
        rows.weighted.support += in.support;
    }
    const double k = static_cast<double>(inputs.size());
    rows.macro.precision /= k;
    rows.macro.recall /= k;
    rows.macro.f1 /= k;
    rows.weighted.precision /= total_support;
    rows.weighted.recall /= total_support;
    rows.weighted.f1 /= total_support;
    return rows;
}

// Per-class rows treat each class as positive in turn; micro pools the
// counts, which for single-label data makes micro P = R = F1 = accuracy.
inline ClassReport classification_report(const std::vector<int>& y_true,
                                         const std::vector<int>& y_pred) {
    const auto cm = confusion(y_true, y_pred);
    ClassReport report;

    // Negative treated as positive flips the quadrants.
    const ConfusionMatrix cm_neg{cm.tn, cm.fn, cm.fp, cm.tp};
    const ConfusionMatrix cm_pos = cm;
    const Metrics m_neg = metrics(cm_neg);
    const Metrics m_pos = metrics(cm_pos);
    report.per_class = {
        {"Negative", m_neg.precision, m_neg.recall, m_neg.f1, cm.tn + cm.fp},
        {"Positive", m_pos.precision, m_pos.recall, m_pos.f1, cm.tp + cm.fn},
    };
    if (m_neg.degenerate || m_pos.degenerate)
        report.warnings.push_back("a 0/0 metric was defined as 0");
    report.accuracy =
        cm.total() ? static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total()) : 0.0;

    const auto rows = aggregate_rows({{m_neg.precision, m_neg.recall, cm.tn + cm.fp},
                                      {m_pos.precision, m_pos.recall, cm.tp + cm.fn}});
    report.macro = rows.macro;
    report.weighted = rows.weighted;

    // Micro: pooled per-class counts. For two classes this pools both views.
    const std::size_t pooled_tp = cm.tp + cm.tn;
    const std::size_t pooled_fp = cm.fp + cm.fn;
    const std::size_t pooled_fn = cm.fn + cm.fp;
    const Metrics m_micro = metrics({pooled_tp, pooled_fp, pooled_fn, 0});
    report.micro = {"micro avg", m_micro.precision, m_micro.recall, m_micro.f1, cm.total()};
    return report;
}

inline ClassReport classification_report(const std::vector<SentimentLabel>& y_true,
                                         const std::vector<SentimentLabel>& y_pred) {
    return classification_report(label_codes(y_true), label_codes(y_pred));
}

// Round half up to two decimals for rendering; raw values stay in the JSON.
inline double round2(double x) { return std::floor(x * 100.0 + 0.5) / 100.0; }

inline std::string render_report(const ClassReport& report) {
    char buf[160];
    std::string out = "              precision    recall  f1-score   support\n\n";
    auto row = [&](const ClassRow& r) {
        std::snprintf(buf, sizeof(buf), "%12s       %.2f      %.2f      %.2f   %7zu\n",
                      r.name.c_str(), round2(r.precision), round2(r.recall), round2(r.f1),
                      r.support);
        out += buf;
    };
    for (const auto& r : report.per_class) row(r);
    out += '\n';
    std::snprintf(buf, sizeof(buf), "%12s                            %.2f   %7zu\n", "accuracy",
                  round2(report.accuracy), report.macro.support);
    out += buf;
    row(report.macro);
    row(report.weighted);
    row(report.micro);
    return out;
}

// ---------------------------------------------------------------------------
// Corpus statistics

// Descending count, lexicographic tie-break.
inline std::vector<std::pair<std::string, std::size_t>> frequency_table(
    const std::vector<std::string>& tokens, std::size_t top_k) {
    std::map<std::string, std::size_t> counts;
    for (const auto& token : tokens) ++counts[token];
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
}

// Word-cloud substitute: per-sentiment token weights (= in-class frequency).
struct WordWeights {
    std::vector<std::pair<std::string, std::size_t>> negative;
    std::vector<std::pair<std::string, std::size_t>> positive;
};

inline WordWeights word_weights(const TokenDocs& docs, const std::vector<SentimentLabel>& labels,
                                std::size_t top_k) {
    if (docs.size() != labels.size()) throw DataError("word_weights: length mismatch");
    std::vector<std::string> neg, pos;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto& sink = labels[i] == SentimentLabel::Positive ? pos : neg;
        sink.insert(sink.end(), docs[i].begin(), docs[i].end());
    }
    return {frequency_table(neg, top_k), frequency_table(pos, top_k)};
}

struct Histogram {
    std::vector<double> bin_edges;  // size bins+1
    std::vector<std::size_t> counts;
    std::size_t sample_count = 0;
};

inline Histogram histogram(const std::vector<double>& samples, std::size_t bins) {
    Histogram h;
    h.sample_count = samples.size();
    if (samples.empty() || bins == 0) return h;
    const double lo = *std::min_element(samples.begin(), samples.end());
    double hi = *std::max_element(samples.begin(), samples.end());
    if (hi == lo) hi = lo + 1.0;
    h.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        h.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double v : samples) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;  // right edge closes the last bin
        ++h.counts[b];
    }
    return h;
}

struct DensitySeries {
    std::vector<double> x, y;  // 256-point Gaussian KDE
    double bandwidth = 0;
    std::size_t sample_count = 0;
};

// Silverman's rule bandwidth; degenerate spreads fall back to a small
// constant so the curve stays finite.
inline DensitySeries kde(const std::vector<double>& samples, std::size_t points = 256) {
    DensitySeries d;
    d.sample_count = samples.size();
    if (samples.empty()) return d;
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double var = 0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var = n > 1 ? var / (n - 1) : 0.0;
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
    const double q3 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
    const double iqr = q3 - q1;
    double spread = std::sqrt(var);
    if (iqr > 0) spread = std::min(spread, iqr / 1.34);
    double bw = 0.9 * spread * std::pow(n, -0.2);
    if (bw <= 0) bw = 0.1;
    d.bandwidth = bw;

    const double lo = sorted.front() - 3 * bw, hi = sorted.back() + 3 * bw;
    d.x.resize(points);
    d.y.resize(points);
    const double norm = 1.0 / (n * bw * std::sqrt(2.0 * 3.14159265358979323846));
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        double y = 0;
        for (double v : samples) {
            const double z = (x - v) / bw;
            y += std::exp(-0.5 * z * z);
        }
        d.x[i] = x;
        d.y[i] = y * norm;
    }
    return d;
}

struct DistributionSeries {
    Histogram char_length_negative, char_length_positive;
    Histogram word_count_negative, word_count_positive;
    DensitySeries avg_word_length_negative, avg_word_length_positive;
};

// Character-length histograms use 50 bins; word counts get one bin per
// integer; densities are per-record mean token lengths.
inline DistributionSeries distribution_series(const TokenDocs& docs,
                                              const std::vector<std::string>& texts,
                                              const std::vector<SentimentLabel>& labels) {
    if (docs.size() != labels.size() || texts.size() != labels.size())
        throw DataError("distribution_series: length mismatch");
    std::vector<double> chars_neg, chars_pos, words_neg, words_pos, awl_neg, awl_pos;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const bool pos = labels[i] == SentimentLabel::Positive;
        (pos ? chars_pos : chars_neg).push_back(static_cast<double>(texts[i].size()));
        (pos ? words_pos : words_neg).push_back(static_cast<double>(docs[i].size()));
        if (!docs[i].empty()) {
            double total = 0;
            for (const auto& token : docs[i]) total += static_cast<double>(token.size());
            (pos ? awl_pos : awl_neg).push_back(total / static_cast<double>(docs[i].size()));
        }
    }
    auto int_bins = [](const std::vector<double>& v) {
        if (v.empty()) return std::size_t{0};
        return static_cast<std::size_t>(*std::max_element(v.begin(), v.end())) + 1;
    };
    DistributionSeries out;
    out.char_length_negative = histogram(chars_neg, 50);
    out.char_length_positive = histogram(chars_pos, 50);
    out.word_count_negative = histogram(words_neg, int_bins(words_neg));
    out.word_count_positive = histogram(words_pos, int_bins(words_pos));
    out.avg_word_length_negative = kde(awl_neg);
    out.avg_word_length_positive = kde(awl_pos);
    return out;
}

// ---------------------------------------------------------------------------
// Report bundle

struct LearningCurveSeries {
    std::string name;  // e.g. "cnn"
    std::vector<double> train_loss, train_accuracy, val_loss, val_accuracy;
};

struct ReportBundle {
    std::optional<ClassReport> report;
    std::optional<ConfusionMatrix> cm;
    std::size_t negative_count = 0, positive_count = 0;  // sentiment proportions
    std::vector<std::pair<std::string, std::size_t>> frequency;  // top tokens
    std::optional<WordWeights> weights;
    std::optional<DistributionSeries> distributions;
    std::vector<LearningCurveSeries> learning_curves;
    std::vector<std::pair<std::string, double>> model_comparison;  // (model, accuracy)
};

namespace detail {

inline nlohmann::json hist_json(const Histogram& h, const char* x_label) {
    return {{"x_label", x_label},
            {"y_label", "records"},
            {"sample_count", h.sample_count},
            {"bin_edges", h.bin_edges},
            {"counts", h.counts}};
}

inline nlohmann::json kde_json(const DensitySeries& d, const char* x_label) {
    return {{"x_label", x_label}, {"y_label", "density"},   {"sample_count", d.sample_count},
            {"bandwidth", d.bandwidth}, {"x", d.x}, {"y", d.y}};
}

inline nlohmann::json class_row_json(const ClassRow& r) {
    return {{"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"support", r.support},
            {"precision_2dp", round2(r.precision)},
            {"recall_2dp", round2(r.recall)},
            {"f1_2dp", round2(r.f1)}};
}

}  // namespace detail

inline nlohmann::json report_to_json(const ClassReport& report) {
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& row : report.per_class) per_class[row.name] = detail::class_row_json(row);
    return {{"per_class", std::move(per_class)},
            {"accuracy", report.accuracy},
            {"accuracy_2dp", round2(report.accuracy)},
            {"macro_avg", detail::class_row_json(report.macro)},
            {"weighted_avg", detail::class_row_json(report.weighted)},
            {"micro_avg", detail::class_row_json(report.micro)},
            // equal to micro for single-label data, emitted as an alias
            {"samples_avg", detail::class_row_json(report.micro)},
            {"warnings", report.warnings}};
}

inline nlohmann::json bundle_to_json(const ReportBundle& bundle) {
    nlohmann::json j;
    j["version"] = 1;
    if (bundle.report) j["classification_report"] = report_to_json(*bundle.report);
    if (bundle.cm) {
        j["confusion_matrix"] = {{"tp", bundle.cm->tp},
                                 {"fp", bundle.cm->fp},
                                 {"fn", bundle.cm->fn},
                                 {"tn", bundle.cm->tn}};
    }
    const auto total = bundle.negative_count + bundle.positive_count;
    j["sentiment_proportions"] = {
        {"negative", bundle.negative_count},
        {"positive", bundle.positive_count},
        {"negative_fraction", total ? static_cast<double>(bundle.negative_count) / total : 0.0},
        {"positive_fraction", total ? static_cast<double>(bundle.positive_count) / total : 0.0}};
    if (!bundle.frequency.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [token, count] : bundle.frequency)
            rows.push_back({{"token", token}, {"count", count}});
        j["frequency_table"] = std::move(rows);
    }
    if (bundle.weights) {
        auto list = [](const std::vector<std::pair<std::string, std::size_t>>& in) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& [token, weight] : in)
                rows.push_back({{"token", token}, {"weight", weight}});
            return rows;
        };
        j["word_weights"] = {{"negative", list(bundle.weights->negative)},
                             {"positive", list(bundle.weights->positive)}};
    }
    if (bundle.distributions) {
        const auto& d = *bundle.distributions;
        j["distributions"] = {
            {"char_length", {{"negative", detail::hist_json(d.char_length_negative, "characters")},
                             {"positive", detail::hist_json(d.char_length_positive, "characters")}}},
            {"word_count", {{"negative", detail::hist_json(d.word_count_negative, "words")},
                            {"positive", detail::hist_json(d.word_count_positive, "words")}}},
            {"avg_word_length",
             {{"negative", detail::kde_json(d.avg_word_length_negative, "average word length")},
              {"positive", detail::kde_json(d.avg_word_length_positive, "average word length")}}}};
    }
    if (!bundle.learning_curves.empty()) {
        nlohmann::json curves = nlohmann::json::array();
        for (const auto& c : bundle.learning_curves) {
            curves.push_back({{"name", c.name},
                              {"x_label", "epoch"},
                              {"sample_count", c.train_loss.size()},
                              {"train_loss", c.train_loss},
                              {"train_accuracy", c.train_accuracy},
                              {"val_loss", c.val_loss},
                              {"val_accuracy", c.val_accuracy}});
        }
        j["learning_curves"] = std::move(curves);
    }
    if (!bundle.model_comparison.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [model, accuracy] : bundle.model_comparison)
            rows.push_back({{"model", model}, {"accuracy", accuracy}});
        j["model_comparison"] = std::move(rows);
    }
    return j;
}

namespace detail {

inline ClassRow class_row_from_json(const std::string& name, const nlohmann::json& j) {
    ClassRow r;
    r.name = name;
    r.precision = j.at("precision");
    r.recall = j.at("recall");
    r.f1 = j.at("f1");
    r.support = j.at("support");
    return r;
}

inline Histogram hist_from_json(const nlohmann::json& j) {
    Histogram h;
    h.sample_count = j.at("sample_count");
    h.bin_edges = j.at("bin_edges").get<std::vector<double>>();
    h.counts = j.at("counts").get<std::vector<std::size_t>>();
    return h;
}

inline DensitySeries kde_from_json(const nlohmann::json& j) {
    DensitySeries d;
    d.sample_count = j.at("sample_count");
    d.bandwidth = j.at("bandwidth");
    d.x = j.at("x").get<std::vector<double>>();
    d.y = j.at("y").get<std::vector<double>>();
    return d;
}

}  // namespace detail

inline ReportBundle bundle_from_json(const nlohmann::json& j) {
    ReportBundle bundle;
    if (j.contains("classification_report")) {
        const auto& r = j.at("classification_report");
        ClassReport report;
        for (const char* name : {"Negative", "Positive"})
            if (r.at("per_class").contains(name))
                report.per_class.push_back(
                    detail::class_row_from_json(name, r.at("per_class").at(name)));
        report.accuracy = r.at("accuracy");
        report.macro = detail::class_row_from_json("macro avg", r.at("macro_avg"));
        report.weighted = detail::class_row_from_json("weighted avg", r.at("weighted_avg"));
        report.micro = detail::class_row_from_json("micro avg", r.at("micro_avg"));
        report.warnings = r.at("warnings").get<std::vector<std::string>>();
        bundle.report = std::move(report);
    }
    if (j.contains("confusion_matrix")) {
        const auto& c = j.at("confusion_matrix");
        bundle.cm = ConfusionMatrix{c.at("tp"), c.at("fp"), c.at("fn"), c.at("tn")};
    }
    if (j.contains("sentiment_proportions")) {
        bundle.negative_count = j.at("sentiment_proportions").at("negative");
        bundle.positive_count = j.at("sentiment_proportions").at("positive");
    }
    if (j.contains("frequency_table"))
        for (const auto& row : j.at("frequency_table"))
            bundle.frequency.emplace_back(row.at("token"), row.at("count"));
    if (j.contains("word_weights")) {
        WordWeights w;
        for (const auto& row : j.at("word_weights").at("negative"))
            w.negative.emplace_back(row.at("token"), row.at("weight"));
        for (const auto& row : j.at("word_weights").at("positive"))
            w.positive.emplace_back(row.at("token"), row.at("weight"));
        bundle.weights = std::move(w);
    }
    if (j.contains("distributions")) {
        const auto& d = j.at("distributions");
        DistributionSeries out;
        out.char_length_negative = detail::hist_from_json(d.at("char_length").at("negative"));
        out.char_length_positive = detail::hist_from_json(d.at("char_length").at("positive"));
        out.word_count_negative = detail::hist_from_json(d.at("word_count").at("negative"));
        out.word_count_positive = detail::hist_from_json(d.at("word_count").at("positive"));
        out.avg_word_length_negative = detail::kde_from_json(d.at("avg_word_length").at("negative"));
        out.avg_word_length_positive = detail::kde_from_json(d.at("avg_word_length").at("positive"));
        bundle.distributions = std::move(out);
    }
    if (j.contains("learning_curves")) {
        for (const auto& c : j.at("learning_curves")) {
            LearningCurveSeries s;
            s.name = c.at("name");
            s.train_loss = c.at("train_loss").get<std::vector<double>>();
            s.train_accuracy = c.at("train_accuracy").get<std::vector<double>>();
            s.val_loss = c.at("val_loss").get<std::vector<double>>();
            s.val_accuracy = c.at("val_accuracy").get<std::vector<double>>();
            bundle.learning_curves.push_back(std::move(s));
        }
    }
    if (j.contains("model_comparison"))
        for (const auto& row : j.at("model_comparison"))
            bundle.model_comparison.emplace_back(row.at("model"), row.at("accuracy"));
    return bundle;
}

// ---------------------------------------------------------------------------
// SVG emission: static SVG 1.1 bar charts and histograms with numeric ticks.

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string svg_header(double width, double height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt_num(width) +
           "\" height=\"" + fmt_num(height) + "\" viewBox=\"0 0 " + fmt_num(width) + " " +
           fmt_num(height) + "\">\n";
}

}  // namespace detail

inline std::string svg_bar_chart(const std::string& title,
                                 const std::vector<std::string>& labels,
                                 const std::vector<double>& values) {
    const double width = 640, height = 400, ml = 60, mb = 60, mt = 40, mr = 20;
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;
    double vmax = 1e-12;
    for (double v : values) vmax = std::max(vmax, v);
    std::string out = detail::svg_header(width, height);
    out += "<text x=\"" + detail::fmt_num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
    out += "<line x1=\"" + detail::fmt_num(ml) + "\" y1=\"" + detail::fmt_num(mt) + "\" x2=\"" +
           detail::fmt_num(ml) + "\" y2=\"" + detail::fmt_num(mt + plot_h) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + detail::fmt_num(ml) + "\" y1=\"" + detail::fmt_num(mt + plot_h) +
           "\" x2=\"" + detail::fmt_num(ml + plot_w) + "\" y2=\"" + detail::fmt_num(mt + plot_h) +
           "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 5; ++tick) {
        const double v = vmax * tick / 5.0;
        const double y = mt + plot_h - plot_h * tick / 5.0;
        out += "<text x=\"" + detail::fmt_num(ml - 6) + "\" y=\"" + detail::fmt_num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
               detail::fmt_num(v) + "</text>\n";
        out += "<line x1=\"" + detail::fmt_num(ml - 4) + "\" y1=\"" + detail::fmt_num(y) +
               "\" x2=\"" + detail::fmt_num(ml) + "\" y2=\"" + detail::fmt_num(y) +
               "\" stroke=\"black\"/>\n";
    }
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double bw = plot_w / n;
        const double bh = plot_h * values[i] / vmax;
        const double x = ml + bw * static_cast<double>(i) + bw * 0.1;
        out += "<rect class=\"bar\" x=\"" + detail::fmt_num(x) + "\" y=\"" +
               detail::fmt_num(mt + plot_h - bh) + "\" width=\"" + detail::fmt_num(bw * 0.8) +
               "\" height=\"" + detail::fmt_num(bh) + "\" fill=\"#4878a8\"/>\n";
        out += "<text x=\"" + detail::fmt_num(x + bw * 0.4) + "\" y=\"" +
               detail::fmt_num(mt + plot_h + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               labels[i] + "</text>\n";
        out += "<text x=\"" + detail::fmt_num(x + bw * 0.4) + "\" y=\"" +
               detail::fmt_num(mt + plot_h - bh - 4) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               detail::fmt_num(values[i]) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

inline std::string svg_histogram(const std::string& title, const Histogram& h,
                                 const std::string& x_label) {
    std::vector<std::string> labels(h.counts.size());
    std::vector<double> values(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        values[i] = static_cast<double>(h.counts[i]);
        // label every few bins to keep ticks readable
        if (h.counts.size() <= 12 || i % (h.counts.size() / 10 + 1) == 0)
            labels[i] = detail::fmt_num(h.bin_edges[i]);
    }
    return svg_bar_chart(title + " (" + x_label + ")", labels, values);
}

// ---------------------------------------------------------------------------
// Bundle emission. JSON is the source of truth; the same bundle always
// produces byte-identical files.

enum class EmitFormat { Json = 1, Csv = 2, Svg = 4 };

inline void emit(const ReportBundle& bundle, const std::string& out_dir, int formats) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(out_dir + "/" + name, std::ios::binary);
        if (!out) throw DataError("cannot write " + out_dir + "/" + name);
        out << content;
    };

    if (formats & static_cast<int>(EmitFormat::Json))
        write("report.json", bundle_to_json(bundle).dump(2) + "\n");

    if (formats & static_cast<int>(EmitFormat::Csv)) {
        if (bundle.report) {
            std::string csv = "class,precision,recall,f1,support\n";
            char buf[160];
            auto row = [&](const ClassRow& r) {
                std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%zu\n", r.name.c_str(),
                              r.precision, r.recall, r.f1, r.support);
                csv += buf;
            };
            for (const auto& r : bundle.report->per_class) row(r);
            row(bundle.report->macro);
            row(bundle.report->weighted);
            row(bundle.report->micro);
            write("class_report.csv", csv);
        }
        if (!bundle.frequency.empty()) {
            std::string csv = "token,count\n";
            for (const auto& [token, count] : bundle.frequency)
                csv += token + "," + std::to_string(count) + "\n";
            write("frequency.csv", csv);
        }
        if (!bundle.learning_curves.empty()) {
            for (const auto& c : bundle.learning_curves) {
                std::string csv = "epoch,loss,acc,val_loss,val_acc\n";
                char buf[160];
                for (std::size_t e = 0; e < c.train_loss.size(); ++e) {
                    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", e + 1,
                                  c.train_loss[e], c.train_accuracy[e], c.val_loss[e],
                                  c.val_accuracy[e]);
                    csv += buf;
                }
                write("learning_curve_" + c.name + ".csv", csv);
            }
        }
        if (!bundle.model_comparison.empty()) {
            std::string csv = "model,accuracy\n";
            char buf[120];
            for (const auto& [model, accuracy] : bundle.model_comparison) {
                std::snprintf(buf, sizeof(buf), "%s,%.9g\n", model.c_str(), accuracy);
                csv += buf;
            }
            write("model_comparison.csv", csv);
        }
    }

    if (formats & static_cast<int>(EmitFormat::Svg)) {
        write("sentiment_distribution.svg",
              svg_bar_chart("Sentiment distribution", {"negative", "positive"},
                            {static_cast<double>(bundle.negative_count),
                             static_cast<double>(bundle.positive_count)}));
        if (!bundle.frequency.empty()) {
            std::vector<std::string> labels;
            std::vector<double> values;
            for (const auto& [token, count] : bundle.frequency) {
                labels.push_back(token);
                values.push_back(static_cast<double>(count));
                if (labels.size() == 20) break;
            }
            write("frequency.svg", svg_bar_chart("Most frequent tokens", labels, values));
        }
        if (bundle.distributions) {
            write("char_length_hist.svg",
                  svg_histogram("Character lengths, negative",
                                bundle.distributions->char_length_negative, "characters"));
            write("word_count_hist.svg",
                  svg_histogram("Word counts, negative",
                                bundle.distributions->word_count_negative, "words"));
        }
        if (!bundle.model_comparison.empty()) {
            std::vector<std::string> labels;
            std::vector<double> values;
            for (const auto& [model, accuracy] : bundle.model_comparison) {
                labels.push_back(model);
                values.push_back(accuracy);
            }
            write("model_comparison.svg", svg_bar_chart("Model comparison", labels, values));
        }
    }
}

}  // namespace tweetsent
