#include "kgrag/extraction.hpp"

#include <cctype>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

using nlohmann::json;

ExtractionPipelineConfig ExtractionPipelineConfig::defaults() {
    ExtractionPipelineConfig cfg;
    cfg.coref_template =
        "Rewrite the sentence below so every pronoun and abbreviation is replaced by the "
        "full entity name it refers to. Return only the rewritten sentence.\n\n"
        "Sentence: {text}";
    cfg.decomp_template =
        "Decompose the sentence below into simple independent clauses, one per line. "
        "Return only the clauses.\n\n"
        "Sentence: {text}";
    cfg.re_template =
        "Extract subject-relation-object triples from the clause below. Respond with a JSON "
        "array of objects with keys \"Entity 1\", \"Relationship\", \"Entity 2\" and nothing "
        "else.\n\n"
        "Clause: {text}";
    return cfg;
}

std::string render_template(const std::string& tpl, const std::string& body) {
    static const std::string placeholder = "{text}";
    std::string out = tpl;
    auto pos = out.find(placeholder);
    if (pos == std::string::npos) throw ConfigError("prompt template lacks {text} placeholder");
    out.replace(pos, placeholder.size(), body);
    return out;
}

std::vector<std::string> parse_clauses(const std::string& response) {
    std::vector<std::string> out;
    std::string line;
    std::istringstream in(response);
    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        // Strip "1.", "2)", "-", "*" style list prefixes.
        std::size_t i = 0;
        while (i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])) != 0)) ++i;
        if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) {
            t = text::trim(t.substr(i + 1));
        } else if (!t.empty() && (t[0] == '-' || t[0] == '*')) {
            t = text::trim(t.substr(1));
        }
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::vector<RawTriple> parse_re_response(const std::string& response) {
    // Tolerate prose around the array: parse from the first '[' to the last ']'.
    auto b = response.find('[');
    auto e = response.rfind(']');
    if (b == std::string::npos || e == std::string::npos || e < b) return {};
    json j;
    try {
        j = json::parse(response.substr(b, e - b + 1));
    } catch (const json::exception&) {
        return {};
    }
    if (!j.is_array()) return {};
    std::vector<RawTriple> out;
    for (const auto& item : j) {
        if (!item.is_object()) continue;
        RawTriple t;
        t.head = text::trim(item.value("Entity 1", ""));
        t.relation = text::trim(item.value("Relationship", ""));
        t.tail = text::trim(item.value("Entity 2", ""));
        if (t.head.empty() || t.relation.empty() || t.tail.empty()) continue;
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

std::string call_with_retries(ChatClient& client, const ChatRequest& req, int max_retries) {
    std::string last;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        try {
            return client.complete(req);
        } catch (const TransportError& e) {
            last = e.what();
        }
    }
    throw TransportError(last);
}

}  // namespace

std::vector<RawTriple> run_extraction_pipeline(const Document& doc,
                                               const ExtractionPipelineConfig& cfg,
                                               ChatClient& client) {
    std::vector<RawTriple> out;
    auto sentences = text::split_sentences(doc.abstract_text);
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        std::string resolved;
        std::vector<std::string> clauses;
        try {
            ChatRequest coref{render_template(cfg.coref_template, sentences[si]), cfg.model,
                              cfg.temperature, doc.id};
            resolved = text::trim(call_with_retries(client, coref, cfg.max_retries));
            if (resolved.empty()) resolved = sentences[si];

            ChatRequest decomp{render_template(cfg.decomp_template, resolved), cfg.model,
                               cfg.temperature, doc.id};
            clauses = parse_clauses(call_with_retries(client, decomp, cfg.max_retries));
        } catch (const TransportError& e) {
            std::cerr << "extraction: doc " << doc.id << " sentence " << si
                      << " failed: " << e.what() << "\n";
            continue;
        }
        for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
            std::string response;
            try {
                ChatRequest re{render_template(cfg.re_template, clauses[ci]), cfg.model,
                               cfg.temperature, doc.id};
                response = call_with_retries(client, re, cfg.max_retries);
            } catch (const TransportError& e) {
                std::cerr << "extraction: doc " << doc.id << " sentence " << si << " clause "
                          << ci << " failed: " << e.what() << "\n";
                continue;
            }
            auto triples = parse_re_response(response);
            if (triples.empty()) {
                std::cerr << "extraction: doc " << doc.id << " sentence " << si << " clause "
                          << ci << ": unparseable triple output, skipped\n";
                continue;
            }
            for (auto& t : triples) {
                t.provenance = Provenance{doc.id, static_cast<int>(si), static_cast<int>(ci)};
                out.push_back(std::move(t));
            }
        }
    }
    return out;
}

}  // namespace kgrag
