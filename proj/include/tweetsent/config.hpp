#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tweetsent/corpus.hpp"

namespace tweetsent {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Every knob the CLI understands, with its default. Unknown keys in a user
// config are rejected; keys the user left out are logged as defaults at
// startup.
inline nlohmann::json default_config() {
    return nlohmann::json{
        {"paths",
         {{"input", ""},
          {"lexicon_dir", "data/lexicons"},
          {"vocab_file", ""},
          {"out_dir", "out"}}},
        {"seed", 42},
        {"split",
         {{"fractions",
           {{{"name", "train"}, {"fraction", 0.70}},
            {{"name", "val"}, {"fraction", 0.15}},
            {{"name", "test"}, {"fraction", 0.15}}}},
          {"head_n", 0}}},  // > 0 switches to the fixed-prefix validation split
        {"clean",
         {{"min_words", 5},
          {"stages",
           {{"patterns", true},
            {"contractions", true},
            {"slang", true},
            {"stopwords", true},
            {"lemmatize", true},
            {"phonetic", true}}}}},
        {"features",
         {{"ngram_min", 1}, {"ngram_max", 1}, {"tfidf", false}, {"max_features", 0},
          {"fit_split", "train"}}},
        {"model",
         {{"kind", "nb"},
          {"eval_split", "test"},
          {"nb", {{"alpha", 1.0}}},
          {"cnn",
           {{"embed_dim", 300},
            {"filters", {32, 64, 64}},
            {"kernel", 4},
            {"pool", 2},
            {"dropout_rate", 0.1},
            {"dense_units", 256},
            {"adam_lr", 0.01},
            {"label_smoothing", 0.1},
            {"patience", 2},
            {"max_epochs", 20},
            {"batch_size", 64},
            {"max_len", 60},
            {"vocab_size", 0}}},  // 0 = full word-index length
          {"bilstm",
           {{"vocab_size", 5000},
            {"embed_dim", 32},
            {"conv_filters", 32},
            {"conv_kernel", 3},
            {"pool", 2},
            {"lstm_units", 32},
            {"dropout_rate", 0.4},
            {"lr0", 0.1},
            {"momentum", 0.8},
            {"epochs", 20},
            {"batch_size", 64},
            {"max_len", 60}}},
          {"embed",
           {{"mode", "skipgram"},
            {"dim", 100},
            {"window", 5},
            {"negatives", 5},
            {"epochs", 5},
            {"initial_lr", 0.025},
            {"min_count", 1}}}}},
        {"bert", {{"max_len", 128}, {"length_threshold", 60}}},
        {"report", {{"formats", {"json", "csv", "svg"}}, {"top_k", 25}}}};
}

namespace detail {

inline void merge_config(nlohmann::json& base, const nlohmann::json& user,
                         const std::string& prefix, std::vector<std::string>& defaults_used) {
    if (!user.is_object()) throw ConfigError("config section must be an object: " + prefix);
    for (const auto& [key, value] : user.items()) {
        if (!base.contains(key))
            throw ConfigError("unknown config key: " + (prefix.empty() ? key : prefix + "." + key));
        auto& slot = base[key];
        if (slot.is_object() && value.is_object()) {
            merge_config(slot, value, prefix.empty() ? key : prefix + "." + key, defaults_used);
        } else {
            slot = value;
        }
    }
    for (const auto& [key, value] : base.items()) {
        if (!user.contains(key) && !value.is_object())
            defaults_used.push_back((prefix.empty() ? key : prefix + "." + key) + " = " +
                                    value.dump());
        else if (!user.contains(key) && value.is_object()) {
            // whole section defaulted
            std::vector<std::string> nested;
            const nlohmann::json empty = nlohmann::json::object();
            auto copy = value;
            merge_config(copy, empty, prefix.empty() ? key : prefix + "." + key, nested);
            defaults_used.insert(defaults_used.end(), nested.begin(), nested.end());
        }
    }
}

}  // namespace detail

struct PipelineConfig {
    nlohmann::json tree;
    std::vector<std::string> defaults_used;

    static PipelineConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config: " + path);
        nlohmann::json user;
        try {
            in >> user;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config parse error in " + path + ": " + e.what());
        }
        return from_json(user);
    }

    static PipelineConfig from_json(const nlohmann::json& user) {
        PipelineConfig config;
        config.tree = default_config();
        detail::merge_config(config.tree, user, "", config.defaults_used);
        return config;
    }

    // dotted-path override, e.g. "model.cnn.max_epochs=2"; the value parses
    // as JSON when possible, otherwise as a string.
    void set_override(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got: " + assignment);
        const std::string path = assignment.substr(0, eq);
        const std::string raw = assignment.substr(eq + 1);
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::exception&) {
            value = raw;
        }
        nlohmann::json* slot = &tree;
        std::istringstream parts(path);
        std::string key;
        std::vector<std::string> keys;
        while (std::getline(parts, key, '.')) keys.push_back(key);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (!slot->contains(keys[i])) throw ConfigError("unknown config key: " + path);
            slot = &(*slot)[keys[i]];
        }
        if (slot->is_object()) throw ConfigError("cannot assign to config section: " + path);
        *slot = std::move(value);
    }

    void log_defaults(std::ostream& err) const {
        for (const auto& line : defaults_used) err << "config default: " << line << "\n";
    }

    SplitSpec split_spec() const {
        SplitSpec spec;
        spec.seed = tree.at("seed").get<std::uint64_t>();
        for (const auto& f : tree.at("split").at("fractions"))
            spec.fractions.emplace_back(f.at("name").get<std::string>(),
                                        f.at("fraction").get<double>());
        return spec;
    }

    std::string out_dir() const { return tree.at("paths").at("out_dir"); }
    std::string input() const { return tree.at("paths").at("input"); }
    std::uint64_t seed() const { return tree.at("seed").get<std::uint64_t>(); }
};

}  // namespace tweetsent
