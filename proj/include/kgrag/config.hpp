#pragma once

#include <map>
#include <string>
#include <vector>

#include "kgrag/corpus.hpp"

namespace kgrag {

// Everything the pipeline stages share: file locations and the tunables with
// their published defaults.
struct PipelineConfig {
    std::string corpus_path;
    std::string term_lists_path;
    std::string synonyms_path;
    std::string relations_path;
    std::string stopwords_path;
    std::map<std::string, std::string> graph_paths;  // "g1"/"g2"/"g3" -> file
    std::string probes_path;
    std::string journal_path;
    std::string reports_dir = "reports";
    std::string profiles_path;

    RankingWeights weights;
    int min_words = 180;
    int min_df = 2;
    int top_k = 20;
    double intersection_threshold = 0.65;
    std::vector<double> temperatures = {0.0, 0.2, 0.5};
    std::uint64_t seed = 0;
};

// JSON key-value document; unknown keys are rejected with a nearest-match
// suggestion, out-of-range values with the expected range.
PipelineConfig load_config(const std::string& path);

}  // namespace kgrag
