#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kgrag/graph.hpp"
#include "kgrag/tfidf.hpp"

namespace kgrag {

// Maps a verbalized triple to a vector; cosine of two embeddings drives the
// intersection screen. Pluggable so an external embedding service can stand
// in for the default offline encoder.
class TripleEncoder {
  public:
    virtual ~TripleEncoder() = default;
    virtual SparseVec embed(const std::string& verbalization) const = 0;
};

// Default encoder: TF-IDF (unigrams, no stopword removal, min_df=1) fitted on
// the joint corpus of verbalized triples from both graphs. Deterministic and
// fully offline.
class TfidfTripleEncoder : public TripleEncoder {
  public:
    explicit TfidfTripleEncoder(const std::vector<std::string>& corpus);
    SparseVec embed(const std::string& verbalization) const override;

  private:
    TfidfModel model_;
};

struct IntersectionItem {
    CanonicalTriple triple_a;
    CanonicalTriple triple_b;
    double similarity = 0.0;
};

SparseVec embed_triple(const CanonicalTriple& t, const TripleEncoder& encoder);

// All cross pairs of causal triples with cosine >= threshold, de-duplicated on
// the stopword-stripped a-side verbalization (best-scoring survivor wins),
// sorted by descending similarity with ties broken by triple text.
std::vector<IntersectionItem> intersect_graphs(const KnowledgeGraph& ga,
                                               const KnowledgeGraph& gb,
                                               const TripleEncoder& encoder, double threshold);

// Convenience: builds the default encoder over both graphs' causal triples.
std::vector<IntersectionItem> intersect_graphs(const KnowledgeGraph& ga,
                                               const KnowledgeGraph& gb, double threshold);

std::vector<IntersectionItem> read_intersection(const std::string& path);
void write_intersection(const std::vector<IntersectionItem>& items, const std::string& path);

}  // namespace kgrag
