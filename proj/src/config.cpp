#include "kgrag/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"

namespace kgrag {

using nlohmann::json;

namespace {

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

const std::set<std::string> kKnownKeys = {
    "corpus",       "term_lists", "synonyms",  "relations",    "stopwords",
    "graphs",       "probes",     "journal",   "reports_dir",  "profiles",
    "weights",      "min_words",  "min_df",    "top_k",        "threshold",
    "temperatures", "seed"};

std::string nearest_key(const std::string& key) {
    std::string best;
    std::size_t best_dist = SIZE_MAX;
    for (const auto& k : kKnownKeys) {
        std::size_t d = edit_distance(key, k);
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best_dist <= 3 ? best : "";
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    for (auto& [key, value] : j.items()) {
        if (kKnownKeys.count(key) == 0) {
            std::string hint = nearest_key(key);
            throw ConfigError("unknown config key '" + key + "'" +
                              (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
        }
    }

    PipelineConfig cfg;
    try {
        cfg.corpus_path = j.value("corpus", "");
        cfg.term_lists_path = j.value("term_lists", "");
        cfg.synonyms_path = j.value("synonyms", "");
        cfg.relations_path = j.value("relations", "");
        cfg.stopwords_path = j.value("stopwords", "");
        cfg.probes_path = j.value("probes", "");
        cfg.journal_path = j.value("journal", "");
        cfg.reports_dir = j.value("reports_dir", "reports");
        cfg.profiles_path = j.value("profiles", "");
        if (j.contains("graphs")) {
            for (auto& [symbol, p] : j.at("graphs").items()) {
                cfg.graph_paths[symbol] = p.get<std::string>();
            }
        }
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            cfg.weights.w_caus = w.value("w_caus", cfg.weights.w_caus);
            cfg.weights.w_pheno = w.value("w_pheno", cfg.weights.w_pheno);
            cfg.weights.w_biom = w.value("w_biom", cfg.weights.w_biom);
            cfg.weights.w_kw = w.value("w_kw", cfg.weights.w_kw);
        }
        cfg.min_words = j.value("min_words", cfg.min_words);
        cfg.min_df = j.value("min_df", cfg.min_df);
        cfg.top_k = j.value("top_k", cfg.top_k);
        cfg.intersection_threshold = j.value("threshold", cfg.intersection_threshold);
        if (j.contains("temperatures")) {
            cfg.temperatures = j.at("temperatures").get<std::vector<double>>();
        }
        cfg.seed = j.value("seed", cfg.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value: ") + e.what());
    }

    if (cfg.weights.w_caus < 0 || cfg.weights.w_pheno < 0 || cfg.weights.w_biom < 0 ||
        cfg.weights.w_kw < 0) {
        throw ConfigError("config: ranking weights must be non-negative");
    }
    if (cfg.weights.w_caus + cfg.weights.w_pheno + cfg.weights.w_biom + cfg.weights.w_kw <= 0) {
        throw ConfigError("config: at least one ranking weight must be positive");
    }
    if (cfg.min_words < 0) throw ConfigError("config: min_words must be >= 0");
    if (cfg.min_df < 1) throw ConfigError("config: min_df must be >= 1");
    if (cfg.top_k < 0) throw ConfigError("config: top_k must be >= 0");
    if (cfg.intersection_threshold <= 0.0 || cfg.intersection_threshold > 1.0) {
        throw ConfigError("config: threshold must lie in (0, 1], got " +
                          std::to_string(cfg.intersection_threshold));
    }
    for (double t : cfg.temperatures) {
        if (t < 0.0) throw ConfigError("config: temperatures must be non-negative");
    }
    return cfg;
}

}  // namespace kgrag
