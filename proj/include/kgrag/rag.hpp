#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgrag/chat.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/probes.hpp"

namespace kgrag {

// The six retrieval setups: no context, a single graph, or a union pooled
// before ranking.
enum class RagSystem { no_rag, g1, g2, g1_g2, g3, g1_g2_g3 };

std::string to_string(RagSystem s);
RagSystem rag_system_from_string(const std::string& s);
// The graph symbols a system draws from ({} for no_rag).
std::vector<std::string> system_graphs(RagSystem s);

struct RetrievalConfig {
    RagSystem system = RagSystem::no_rag;
    int top_k = 20;
};

// Graphs loaded once per run, keyed "g1"/"g2"/"g3".
using GraphSet = std::map<std::string, KnowledgeGraph>;

struct RunRecord {
    std::string item_id;
    std::string probe;  // probe set origin
    std::string model;
    std::string system;
    double temperature = 0.0;
    int replicate = 0;  // index of the temperature in the sweep
    std::vector<std::string> retrieved_context;
    std::string raw_response;
    std::string parsed_letter;  // single letter or "invalid"
    std::string key;
    bool correct = false;
    long latency_ms = 0;
    std::string error;  // non-empty when the provider call ultimately failed
};

// Triples of the selected graphs verbalized as "head relation tail.", ranked
// by TF-IDF cosine against the item stem+options, top_k returned. Ties break
// by ascending verbalization text; no_rag short-circuits to empty.
std::vector<std::string> retrieve_context(const ProbeItem& item, const RetrievalConfig& rc,
                                          const GraphSet& graphs);

// The zero-shot instruction with an optional Facts block; byte-stable.
std::string render_prompt(const ProbeItem& item, const std::vector<std::string>& context);

// First standalone character that uppercases into the allowed set, or
// "invalid". Total: never throws.
std::string parse_answer(const std::string& response, const std::string& allowed);

RunRecord evaluate_item(const ProbeItem& item, const RetrievalConfig& rc, const GraphSet& graphs,
                        const std::string& probe_origin, const std::string& model,
                        double temperature, ChatClient& client);

struct GridResult {
    std::vector<RunRecord> records;
    int failed_calls = 0;  // records carrying an error annotation
    int skipped_existing = 0;
};

// Full (model, system, temperature, item) cross product in deterministic
// order. Records already present in the journal are skipped (resume); new
// records are appended to the journal as they complete. Item-level failures
// never abort the grid.
GridResult run_grid(const ProbeSet& probes, const std::vector<RagSystem>& systems,
                    const std::vector<ProviderProfile>& profiles,
                    const std::vector<double>& temperatures, const GraphSet& graphs, int top_k,
                    const std::string& provider_spec, const std::string& journal_path,
                    bool trace = false);

std::vector<RunRecord> read_journal(const std::string& path);
void append_journal(const RunRecord& r, std::ostream& out);

}  // namespace kgrag
