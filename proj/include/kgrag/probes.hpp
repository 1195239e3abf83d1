#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgrag/graph.hpp"
#include "kgrag/intersect.hpp"
#include "kgrag/triples.hpp"

namespace kgrag {

enum class ProbeKind { single_hop, multi_hop_pair, fitb };

std::string to_string(ProbeKind k);
ProbeKind probe_kind_from_string(const std::string& s);

struct ProbeItem {
    std::string item_id;
    ProbeKind kind = ProbeKind::single_hop;
    std::string stem;
    // Numbered facts (pair-style items only); lettered options then name pairs.
    std::vector<std::string> atomic_options;
    std::vector<std::pair<char, std::string>> options;
    std::string allowed_letters;  // e.g. "ABCD"
    char key = 'A';
    std::vector<CanonicalTriple> source_triples;
    std::uint64_t seed = 0;
};

struct ProbeSet {
    std::vector<ProbeItem> items;
    std::string origin;  // "probe1" | "probe2"
    std::string graph_fingerprint;
    std::uint64_t generation_seed = 0;
};

// Ask for the object of a sampled causal edge (u, r, .); the true tail is
// keyed and three distractors come from the in-neighborhood of u, matched by
// in-degree bucket and distinct in canonical space.
std::vector<ProbeItem> gen_single_hop(const KnowledgeGraph& g, int n, std::uint64_t seed,
                                      const SynonymMap& syn = {});

// Pick the pair of direct causes of a target; distractors come from two-hop
// causes or close neighbors. Four atomic options, lettered 2-combinations,
// exactly one lettered pair lies fully inside P1(x).
std::vector<ProbeItem> gen_multihop_pair(const KnowledgeGraph& g, int n, std::uint64_t seed,
                                         const SynonymMap& syn = {});

// Mask the head or tail of a causal edge; only the canonical label is keyed.
std::vector<ProbeItem> gen_fitb(const KnowledgeGraph& g, int n, std::uint64_t seed,
                                const SynonymMap& syn = {});

// Probe 1: mixed set over one graph (default mix 40/40/20 single/multi/FITB).
ProbeSet gen_probe1(const KnowledgeGraph& g, int n, std::uint64_t seed,
                    const SynonymMap& syn = {});

// Probe 2: the same kinds restricted to intersection-derived triples, with
// direction-aware multi-hop items whose distractors include reversed edges.
ProbeSet gen_probe2(const std::vector<IntersectionItem>& inter, int n, std::uint64_t seed,
                    const SynonymMap& syn = {});

struct ValidationFinding {
    std::string item_id;
    std::string code;  // e.g. "key-mismatch", "canonical-collision"
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    bool valid() const { return findings.empty(); }
};

// Checks every item invariant plus keyed-answer ground truth against the
// source graph (or intersection set, for probe 2 sets).
ValidationReport validate_probe_set(const ProbeSet& ps, const KnowledgeGraph* g,
                                    const std::vector<IntersectionItem>* inter,
                                    const SynonymMap& syn = {});

// JSONL: one header line (origin, seed, fingerprint), then one item per line.
void write_probe_set(const ProbeSet& ps, const std::string& path);
ProbeSet read_probe_set(const std::string& path);

}  // namespace kgrag
