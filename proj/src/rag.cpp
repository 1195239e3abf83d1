#include "kgrag/rag.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"
#include "kgrag/tfidf.hpp"

namespace kgrag {

using nlohmann::json;

std::string to_string(RagSystem s) {
    switch (s) {
        case RagSystem::no_rag: return "no_rag";
        case RagSystem::g1: return "g1";
        case RagSystem::g2: return "g2";
        case RagSystem::g1_g2: return "g1+g2";
        case RagSystem::g3: return "g3";
        case RagSystem::g1_g2_g3: return "g1+g2+g3";
    }
    return "no_rag";
}

RagSystem rag_system_from_string(const std::string& s) {
    if (s == "no_rag") return RagSystem::no_rag;
    if (s == "g1") return RagSystem::g1;
    if (s == "g2") return RagSystem::g2;
    if (s == "g1+g2") return RagSystem::g1_g2;
    if (s == "g3") return RagSystem::g3;
    if (s == "g1+g2+g3") return RagSystem::g1_g2_g3;
    throw ValidationError("unknown retrieval system: " + s);
}

std::vector<std::string> system_graphs(RagSystem s) {
    switch (s) {
        case RagSystem::no_rag: return {};
        case RagSystem::g1: return {"g1"};
        case RagSystem::g2: return {"g2"};
        case RagSystem::g1_g2: return {"g1", "g2"};
        case RagSystem::g3: return {"g3"};
        case RagSystem::g1_g2_g3: return {"g1", "g2", "g3"};
    }
    return {};
}

std::vector<std::string> retrieve_context(const ProbeItem& item, const RetrievalConfig& rc,
                                          const GraphSet& graphs) {
    if (rc.system == RagSystem::no_rag) return {};

    // Pool candidates across the system's graphs before ranking.
    std::set<std::string> pooled;
    for (const auto& symbol : system_graphs(rc.system)) {
        auto it = graphs.find(symbol);
        if (it == graphs.end()) {
            throw ConfigError("retrieval system " + to_string(rc.system) + " needs graph " +
                              symbol + " which is not loaded");
        }
        for (const auto& e : it->second.triples()) pooled.insert(verbalize(e));
    }
    if (pooled.empty()) return {};

    std::vector<std::string> corpus(pooled.begin(), pooled.end());
    TfidfModel model = TfidfModel::fit(
        corpus, TfidfModel::Options{.min_df = 1, .bigrams = false, .use_stopwords = true},
        text::default_stopwords());

    std::string query = item.stem;
    for (const auto& a : item.atomic_options) query += " " + a;
    for (const auto& [letter, opt] : item.options) query += " " + opt;
    SparseVec q = model.transform(query);

    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(corpus.size());
    for (const auto& v : corpus) scored.emplace_back(TfidfModel::cosine(model.transform(v), q), v);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<std::string> out;
    for (const auto& [score, v] : scored) {
        if (static_cast<int>(out.size()) >= rc.top_k) break;
        out.push_back(v);
    }
    return out;
}

std::string render_prompt(const ProbeItem& item, const std::vector<std::string>& context) {
    if (item.allowed_letters.empty()) throw ValidationError("item has no allowed letters");
    std::ostringstream os;
    if (!context.empty()) {
        os << "Facts:\n";
        for (const auto& c : context) os << "- " << c << "\n";
        os << "\n";
    }
    std::string allowed_str;
    for (char c : item.allowed_letters) {
        if (!allowed_str.empty()) allowed_str += ", ";
        allowed_str += c;
    }
    os << "You are answering a multiple-choice question.\n"
       << "Return ONLY one uppercase letter from this set: " << allowed_str << ".\n"
       << "Do not include explanations or extra text.\n\n"
       << "Question: " << item.stem << "\n";
    if (!item.atomic_options.empty()) {
        for (std::size_t i = 0; i < item.atomic_options.size(); ++i) {
            os << (i + 1) << ". " << item.atomic_options[i] << "\n";
        }
    }
    for (const auto& [letter, text_] : item.options) {
        os << letter << ": " << text_ << "\n";
    }
    return os.str();
}

std::string parse_answer(const std::string& response, const std::string& allowed) {
    auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t i = 0; i < response.size(); ++i) {
        char c = response[i];
        if (std::isalpha(static_cast<unsigned char>(c)) == 0) continue;
        bool left_ok = i == 0 || !is_alnum(response[i - 1]);
        bool right_ok = i + 1 == response.size() || !is_alnum(response[i + 1]);
        if (!left_ok || !right_ok) continue;
        char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (allowed.find(up) != std::string::npos) return std::string(1, up);
    }
    return "invalid";
}

RunRecord evaluate_item(const ProbeItem& item, const RetrievalConfig& rc, const GraphSet& graphs,
                        const std::string& probe_origin, const std::string& model,
                        double temperature, ChatClient& client) {
    RunRecord r;
    r.item_id = item.item_id;
    r.probe = probe_origin;
    r.model = model;
    r.system = to_string(rc.system);
    r.temperature = temperature;
    r.key = std::string(1, item.key);
    r.retrieved_context = retrieve_context(item, rc, graphs);

    std::string prompt = render_prompt(item, r.retrieved_context);
    auto t0 = std::chrono::steady_clock::now();
    try {
        r.raw_response = client.complete(ChatRequest{prompt, model, temperature, item.item_id});
        r.parsed_letter = parse_answer(r.raw_response, item.allowed_letters);
    } catch (const TransportError& e) {
        r.parsed_letter = "invalid";
        r.error = e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    // Mock providers report zero latency so journals replay byte-identically.
    if (!r.error.empty() || dynamic_cast<HttpChatClient*>(&client) != nullptr) {
        r.latency_ms = static_cast<long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
    }
    r.correct = r.parsed_letter == r.key;
    return r;
}

namespace {

json record_to_json(const RunRecord& r) {
    json j{{"item_id", r.item_id},
           {"probe", r.probe},
           {"model", r.model},
           {"system", r.system},
           {"temperature", r.temperature},
           {"replicate", r.replicate},
           {"retrieved_context", r.retrieved_context},
           {"raw_response", r.raw_response},
           {"parsed_letter", r.parsed_letter},
           {"key", r.key},
           {"correct", r.correct},
           {"latency_ms", r.latency_ms}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.item_id = j.at("item_id").get<std::string>();
    r.probe = j.value("probe", "");
    r.model = j.at("model").get<std::string>();
    r.system = j.at("system").get<std::string>();
    r.temperature = j.at("temperature").get<double>();
    r.replicate = j.value("replicate", 0);
    for (const auto& c : j.value("retrieved_context", json::array())) {
        r.retrieved_context.push_back(c.get<std::string>());
    }
    r.raw_response = j.value("raw_response", "");
    r.parsed_letter = j.at("parsed_letter").get<std::string>();
    r.key = j.value("key", "");
    r.correct = j.at("correct").get<bool>();
    r.latency_ms = j.value("latency_ms", 0L);
    r.error = j.value("error", "");
    return r;
}

std::string cell_key(const std::string& model, const std::string& system, double temperature,
                     const std::string& item_id) {
    std::ostringstream os;
    os << model << "|" << system << "|" << temperature << "|" << item_id;
    return os.str();
}

}  // namespace

std::vector<RunRecord> read_journal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open journal: " + path);
    std::vector<RunRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError("journal line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void append_journal(const RunRecord& r, std::ostream& out) {
    out << record_to_json(r).dump() << "\n";
}

GridResult run_grid(const ProbeSet& probes, const std::vector<RagSystem>& systems,
                    const std::vector<ProviderProfile>& profiles,
                    const std::vector<double>& temperatures, const GraphSet& graphs, int top_k,
                    const std::string& provider_spec, const std::string& journal_path,
                    bool trace) {
    // Resume support: anything already journaled is kept, not re-run.
    std::set<std::string> done;
    GridResult result;
    {
        std::ifstream probe_journal(journal_path);
        if (probe_journal.good()) {
            for (auto& r : read_journal(journal_path)) {
                done.insert(cell_key(r.model, r.system, r.temperature, r.item_id));
                result.records.push_back(std::move(r));
            }
        }
    }

    std::map<std::string, std::string> oracle_answers;
    for (const auto& item : probes.items) {
        oracle_answers[item.item_id] = std::string(1, item.key);
    }

    std::ofstream journal(journal_path, std::ios::app);
    if (!journal) throw ConfigError("cannot open journal for append: " + journal_path);

    for (const auto& profile : profiles) {
        auto client = make_client(provider_spec, profile, oracle_answers, trace);
        for (const auto& system : systems) {
            RetrievalConfig rc{system, top_k};
            for (std::size_t ti = 0; ti < temperatures.size(); ++ti) {
                for (const auto& item : probes.items) {
                    if (done.count(cell_key(profile.model, to_string(system), temperatures[ti],
                                            item.item_id)) > 0) {
                        ++result.skipped_existing;
                        continue;
                    }
                    RunRecord r = evaluate_item(item, rc, graphs, probes.origin, profile.model,
                                                temperatures[ti], *client);
                    r.replicate = static_cast<int>(ti);
                    if (!r.error.empty()) ++result.failed_calls;
                    append_journal(r, journal);
                    result.records.push_back(std::move(r));
                }
            }
        }
    }

    // Deterministic final order regardless of resume interleavings.
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const RunRecord& a, const RunRecord& b) {
                         return std::tie(a.model, a.system, a.temperature, a.item_id) <
                                std::tie(b.model, b.system, b.temperature, b.item_id);
                     });
    return result;
}

}  // namespace kgrag
