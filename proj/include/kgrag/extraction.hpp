#pragma once

#include <string>
#include <vector>

#include "kgrag/chat.hpp"
#include "kgrag/corpus.hpp"
#include "kgrag/triples.hpp"

namespace kgrag {

// Prompt/model configuration for the three-stage extraction loop:
// coreference resolution, clause decomposition, relation extraction.
// Templates carry a {text} placeholder.
struct ExtractionPipelineConfig {
    std::string coref_template;
    std::string decomp_template;
    std::string re_template;
    std::string provider = "http";
    std::string model;
    double temperature = 0.7;
    int max_retries = 2;

    static ExtractionPipelineConfig defaults();
};

std::string render_template(const std::string& tpl, const std::string& body);

// Split the decomposition response into clauses: one clause per non-empty
// line, list bullets and numbering stripped.
std::vector<std::string> parse_clauses(const std::string& response);

// Parse the relation-extraction response: a JSON array of
// {"Entity 1", "Relationship", "Entity 2"} objects. Malformed output yields
// an empty list (the clause is skipped by the caller).
std::vector<RawTriple> parse_re_response(const std::string& response);

// Per sentence: coref-resolve, decompose into clauses, extract triples per
// clause. Each triple is tagged (doc id, sentence index, clause index).
// Transport failures are retried, then the sentence is skipped and logged;
// the pipeline always continues.
std::vector<RawTriple> run_extraction_pipeline(const Document& doc,
                                               const ExtractionPipelineConfig& cfg,
                                               ChatClient& client);

}  // namespace kgrag
