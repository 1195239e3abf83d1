#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace kgrag {

struct Provenance {
    std::string paper_id;
    int sentence_id = 0;
    int clause_id = 0;

    bool operator==(const Provenance&) const = default;
    auto operator<=>(const Provenance&) const = default;
};

struct RawTriple {
    std::string head;
    std::string relation;
    std::string tail;
    Provenance provenance;
};

struct CanonicalTriple {
    std::string head;
    std::string relation;  // lowercased, whitespace-normalized
    std::string tail;
    Provenance provenance;

    bool same_fact(const CanonicalTriple& o) const {
        return head == o.head && relation == o.relation && tail == o.tail;
    }
};

// Surface name -> canonical label. Lookups are case-insensitive on trimmed
// strings; canonical labels are fixed points of the map.
class SynonymMap {
  public:
    SynonymMap() = default;
    static SynonymMap load(const std::string& path);
    static SynonymMap from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

    std::string canonical(const std::string& name) const;
    std::size_t size() const { return map_.size(); }

  private:
    std::map<std::string, std::string> map_;  // lowercase(trimmed surface) -> canonical
    void insert(const std::string& surface, const std::string& canonical_name);
};

struct RelationFilter {
    std::set<std::string> causal_relations;  // lowercase

    static RelationFilter load(const std::string& path);
    static RelationFilter defaults();
    bool is_causal(const std::string& relation) const;
};

extern const std::set<std::string> kDefaultVagueTerms;  // {"it", "this", "this study"}

// Keep triples whose lowercased relation is in the causal set. Order preserved.
std::vector<RawTriple> filter_causal(const std::vector<RawTriple>& triples,
                                     const RelationFilter& rf);

// Drop triples whose head or tail (lowercased, trimmed) is a vague term.
std::vector<RawTriple> mask_vague(const std::vector<RawTriple>& triples,
                                  const std::set<std::string>& vague = kDefaultVagueTerms);

CanonicalTriple canonicalize(const RawTriple& t, const SynonymMap& syn);
CanonicalTriple canonicalize(const CanonicalTriple& t, const SynonymMap& syn);

// Table-I-shaped JSONL: {"Entity 1", "Relationship", "Entity 2", "provenance"}.
std::vector<RawTriple> read_triples_jsonl(const std::string& path);
void write_triples_jsonl(const std::vector<RawTriple>& triples, const std::string& path);

}  // namespace kgrag
