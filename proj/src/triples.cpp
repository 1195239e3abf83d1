#include "kgrag/triples.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

using nlohmann::json;

const std::set<std::string> kDefaultVagueTerms = {"it", "this", "this study"};

void SynonymMap::insert(const std::string& surface, const std::string& canonical_name) {
    std::string key = text::lowercase(text::trim(surface));
    std::string value = text::trim(canonical_name);
    if (key.empty() || value.empty()) {
        throw ValidationError("synonym map entries must be non-empty");
    }
    map_[key] = value;
    // Canonical labels must map to themselves.
    map_.emplace(text::lowercase(value), value);
}

SynonymMap SynonymMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open synonym map: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("synonym map: ") + e.what());
    }
    SynonymMap m;
    for (auto& [surface, canon] : j.items()) m.insert(surface, canon.get<std::string>());
    return m;
}

SynonymMap SynonymMap::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    SynonymMap m;
    for (const auto& [surface, canon] : pairs) m.insert(surface, canon);
    return m;
}

std::string SynonymMap::canonical(const std::string& name) const {
    std::string trimmed = text::normalize_ws(name);
    auto it = map_.find(text::lowercase(trimmed));
    return it == map_.end() ? trimmed : it->second;
}

RelationFilter RelationFilter::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open relation filter: " + path);
    RelationFilter rf;
    std::string line;
    while (std::getline(in, line)) {
        line = text::normalize_ws(text::lowercase(line));
        if (!line.empty() && line[0] != '#') rf.causal_relations.insert(line);
    }
    if (rf.causal_relations.empty()) throw ValidationError("relation filter is empty: " + path);
    return rf;
}

RelationFilter RelationFilter::defaults() {
    return RelationFilter{{"causes", "because", "leads to", "results in", "contributes to",
                           "induces", "increases risk of", "reduces", "promotes"}};
}

bool RelationFilter::is_causal(const std::string& relation) const {
    return causal_relations.count(text::normalize_ws(text::lowercase(relation))) > 0;
}

std::vector<RawTriple> filter_causal(const std::vector<RawTriple>& triples,
                                     const RelationFilter& rf) {
    std::vector<RawTriple> out;
    for (const auto& t : triples) {
        if (rf.is_causal(t.relation)) out.push_back(t);
    }
    return out;
}

std::vector<RawTriple> mask_vague(const std::vector<RawTriple>& triples,
                                  const std::set<std::string>& vague) {
    auto is_vague = [&](const std::string& s) {
        return vague.count(text::lowercase(text::normalize_ws(s))) > 0;
    };
    std::vector<RawTriple> out;
    for (const auto& t : triples) {
        if (!is_vague(t.head) && !is_vague(t.tail)) out.push_back(t);
    }
    return out;
}

CanonicalTriple canonicalize(const RawTriple& t, const SynonymMap& syn) {
    CanonicalTriple c;
    c.head = syn.canonical(t.head);
    c.relation = text::lowercase(text::normalize_ws(t.relation));
    c.tail = syn.canonical(t.tail);
    c.provenance = t.provenance;
    if (c.head.empty() || c.relation.empty() || c.tail.empty()) {
        throw ValidationError("triple fields must be non-empty after trimming");
    }
    return c;
}

CanonicalTriple canonicalize(const CanonicalTriple& t, const SynonymMap& syn) {
    return canonicalize(RawTriple{t.head, t.relation, t.tail, t.provenance}, syn);
}

std::vector<RawTriple> read_triples_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open triple file: " + path);
    std::vector<RawTriple> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("triple line " + std::to_string(lineno) + ": " + e.what());
        }
        RawTriple t;
        try {
            t.head = j.at("Entity 1").get<std::string>();
            t.relation = j.at("Relationship").get<std::string>();
            t.tail = j.at("Entity 2").get<std::string>();
            if (j.contains("provenance")) {
                const auto& p = j.at("provenance");
                t.provenance.paper_id = p.value("paper_id", "");
                t.provenance.sentence_id = p.value("sentence_id", 0);
                t.provenance.clause_id = p.value("clause_id", 0);
            }
        } catch (const json::exception& e) {
            throw ParseError("triple line " + std::to_string(lineno) + ": " + e.what());
        }
        if (text::trim(t.head).empty() || text::trim(t.relation).empty() ||
            text::trim(t.tail).empty()) {
            throw ValidationError("triple line " + std::to_string(lineno) +
                                  ": empty head/relation/tail");
        }
        out.push_back(std::move(t));
    }
    return out;
}

void write_triples_jsonl(const std::vector<RawTriple>& triples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write triple file: " + path);
    for (const auto& t : triples) {
        json j{{"Entity 1", t.head},
               {"Relationship", t.relation},
               {"Entity 2", t.tail},
               {"provenance",
                {{"paper_id", t.provenance.paper_id},
                 {"sentence_id", t.provenance.sentence_id},
                 {"clause_id", t.provenance.clause_id}}}};
        out << j.dump() << "\n";
    }
}

}  // namespace kgrag
