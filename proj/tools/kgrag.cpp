#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgrag/chat.hpp"
#include "kgrag/config.hpp"
#include "kgrag/corpus.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/extraction.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/intersect.hpp"
#include "kgrag/probes.hpp"
#include "kgrag/rag.hpp"
#include "kgrag/report.hpp"
#include "kgrag/stats.hpp"
#include "kgrag/triples.hpp"

namespace {

constexpr const char* kVersion = "kgrag 1.0.0";

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) out.push_back(std::stod(part));
    }
    return out;
}

kgrag::SynonymMap load_synonyms_opt(const std::string& path) {
    if (path.empty()) return {};
    return kgrag::SynonymMap::load(path);
}

kgrag::RelationFilter load_relations_opt(const std::string& path) {
    if (path.empty()) return kgrag::RelationFilter::defaults();
    return kgrag::RelationFilter::load(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Corpus ranking, knowledge-graph assembly, probe synthesis, "
                 "retrieval-augmented evaluation, and statistical reporting."};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- rank ----
    auto* rank = app.add_subcommand("rank", "Rank a JSONL corpus by weighted TF-IDF features");
    std::string rank_corpus, rank_terms, rank_out, rank_weights_csv;
    int rank_min_words = 180, rank_min_df = 2, rank_top = 0;
    rank->add_option("--corpus", rank_corpus, "Corpus JSONL (id, title, abstract)")->required();
    rank->add_option("--terms", rank_terms, "Term lists JSON")->required();
    rank->add_option("--out", rank_out, "Output JSONL")->required();
    rank->add_option("--min-words", rank_min_words, "Minimum abstract length");
    rank->add_option("--min-df", rank_min_df, "Minimum document frequency");
    rank->add_option("--weights", rank_weights_csv, "w_caus,w_pheno,w_biom,w_kw");
    rank->add_option("--top", rank_top, "Keep only the top K documents");

    // ---- extract ----
    auto* extract = app.add_subcommand("extract", "Run the triple-extraction loop over a corpus");
    std::string ex_corpus, ex_out, ex_provider = "http", ex_profiles, ex_model;
    double ex_temp = 0.7;
    bool ex_trace = false;
    extract->add_option("--corpus", ex_corpus, "Corpus JSONL")->required();
    extract->add_option("--out", ex_out, "Output triples JSONL")->required();
    extract->add_option("--provider", ex_provider,
                        "http | mock:oracle | mock:random:<seed> | mock:script:<file>");
    extract->add_option("--profiles", ex_profiles, "Provider profiles JSON");
    extract->add_option("--model", ex_model, "Model identifier override");
    extract->add_option("--temperature", ex_temp, "Sampling temperature");
    extract->add_flag("--trace", ex_trace, "Log request/response bodies (credentials redacted)");

    // ---- build-kg ----
    auto* build = app.add_subcommand("build-kg", "Clean triples and assemble a knowledge graph");
    std::string bk_triples, bk_relations, bk_synonyms, bk_out;
    build->add_option("--triples", bk_triples, "Raw triples JSONL")->required();
    build->add_option("--relations", bk_relations, "Causal relation list (one per line)");
    build->add_option("--synonyms", bk_synonyms, "Synonym map JSON");
    build->add_option("--out", bk_out, "Output graph JSON")->required();

    // ---- merge-kg ----
    auto* merge = app.add_subcommand("merge-kg", "Union two or more graphs");
    std::vector<std::string> mg_in;
    std::string mg_out;
    merge->add_option("--in", mg_in, "Input graph JSON files")->required()->expected(-2);
    merge->add_option("--out", mg_out, "Output graph JSON")->required();

    // ---- intersect ----
    auto* inter = app.add_subcommand("intersect", "Embedding-screened triple intersection");
    std::string in_a, in_b, in_out;
    double in_threshold = 0.65;
    inter->add_option("--a", in_a, "Graph A JSON")->required();
    inter->add_option("--b", in_b, "Graph B JSON")->required();
    inter->add_option("--threshold", in_threshold, "Cosine threshold in (0, 1]");
    inter->add_option("--out", in_out, "Output intersection JSON")->required();

    // ---- gen-probes ----
    auto* gen = app.add_subcommand("gen-probes", "Synthesize a seeded multiple-choice probe set");
    std::string gp_kg, gp_inter, gp_mode = "probe1", gp_syn, gp_out;
    int gp_n = 100;
    std::uint64_t gp_seed = 0;
    gen->add_option("--kg", gp_kg, "Source graph JSON (probe1)");
    gen->add_option("--intersection", gp_inter, "Intersection JSON (probe2)");
    gen->add_option("--mode", gp_mode, "probe1 | probe2");
    gen->add_option("--n", gp_n, "Number of items");
    gen->add_option("--seed", gp_seed, "Generation seed");
    gen->add_option("--synonyms", gp_syn, "Synonym map JSON");
    gen->add_option("--out", gp_out, "Output probes JSONL")->required();

    // ---- validate-probes ----
    auto* val = app.add_subcommand("validate-probes", "Check probe invariants and ground truth");
    std::string vp_probes, vp_kg, vp_inter, vp_syn;
    val->add_option("--probes", vp_probes, "Probes JSONL")->required();
    val->add_option("--kg", vp_kg, "Graph JSON the set was generated from");
    val->add_option("--intersection", vp_inter, "Intersection JSON (probe2 sets)");
    val->add_option("--synonyms", vp_syn, "Synonym map JSON");

    // ---- run-eval ----
    auto* run = app.add_subcommand("run-eval", "Run the (model, system, temperature) grid");
    std::string re_probes, re_systems = "no_rag,g1,g2,g1+g2,g3,g1+g2+g3";
    std::string re_profiles, re_temps = "0,0.2,0.5", re_out, re_provider = "http";
    std::string re_g1, re_g2, re_g3;
    int re_top_k = 20;
    bool re_trace = false;
    run->add_option("--probes", re_probes, "Probes JSONL")->required();
    run->add_option("--systems", re_systems, "Comma-separated retrieval systems");
    run->add_option("--profiles", re_profiles, "Provider profiles JSON")->required();
    run->add_option("--temps", re_temps, "Comma-separated temperatures");
    run->add_option("--top-k", re_top_k, "Context size");
    run->add_option("--g1", re_g1, "Graph g1 JSON");
    run->add_option("--g2", re_g2, "Graph g2 JSON");
    run->add_option("--g3", re_g3, "Graph g3 JSON");
    run->add_option("--provider", re_provider,
                    "http | mock:oracle | mock:random:<seed> | mock:script:<file>");
    run->add_option("--out", re_out, "Journal JSONL (appended; existing cells skipped)")
        ->required();
    run->add_flag("--trace", re_trace, "Log request/response bodies (credentials redacted)");

    // ---- analyze ----
    auto* ana = app.add_subcommand("analyze", "Score a journal and emit report.md / report.csv");
    std::string an_journal, an_out_dir = "reports", an_baseline = "no_rag";
    ana->add_option("--journal", an_journal, "Run journal JSONL")->required();
    ana->add_option("--out-dir", an_out_dir, "Report output directory");
    ana->add_option("--baseline", an_baseline, "Baseline system for significance tests");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (rank->parsed()) {
            auto docs = kgrag::ingest_documents(rank_corpus, rank_min_words);
            auto terms = kgrag::load_term_lists(rank_terms);
            auto feats = kgrag::compute_features(docs, terms, rank_min_df);
            kgrag::RankingWeights w;
            if (!rank_weights_csv.empty()) {
                auto ws = parse_doubles(rank_weights_csv);
                if (ws.size() != 4)
                    throw kgrag::ValidationError("--weights expects four comma-separated values");
                w = {ws[0], ws[1], ws[2], ws[3]};
            }
            auto ranked = kgrag::rank_documents(docs, feats, w);
            if (rank_top > 0) ranked = kgrag::select_top_k(ranked, rank_top);
            kgrag::write_ranked_jsonl(ranked, rank_out);
            std::cerr << "rank: " << ranked.size() << " documents -> " << rank_out << "\n";
        } else if (extract->parsed()) {
            auto docs = kgrag::ingest_documents(ex_corpus, 0);
            auto cfg = kgrag::ExtractionPipelineConfig::defaults();
            cfg.provider = ex_provider;
            cfg.temperature = ex_temp;
            kgrag::ProviderProfile profile;
            if (!ex_profiles.empty()) {
                auto profiles = kgrag::load_profiles(ex_profiles);
                if (profiles.empty()) throw kgrag::ConfigError("no provider profiles loaded");
                profile = profiles.front();
            }
            if (!ex_model.empty()) profile.model = ex_model;
            cfg.model = profile.model;
            auto client = kgrag::make_client(ex_provider, profile, {}, ex_trace);
            std::vector<kgrag::RawTriple> all;
            for (const auto& d : docs) {
                auto triples = kgrag::run_extraction_pipeline(d, cfg, *client);
                all.insert(all.end(), triples.begin(), triples.end());
            }
            kgrag::write_triples_jsonl(all, ex_out);
            std::cerr << "extract: " << all.size() << " triples -> " << ex_out << "\n";
        } else if (build->parsed()) {
            auto raw = kgrag::read_triples_jsonl(bk_triples);
            auto rf = load_relations_opt(bk_relations);
            auto syn = load_synonyms_opt(bk_synonyms);
            auto cleaned = kgrag::mask_vague(kgrag::filter_causal(raw, rf));
            std::vector<kgrag::CanonicalTriple> canon;
            canon.reserve(cleaned.size());
            for (const auto& t : cleaned) canon.push_back(kgrag::canonicalize(t, syn));
            auto g = kgrag::KnowledgeGraph::assemble(canon, rf);
            g.save(bk_out);
            std::cerr << "build-kg: " << g.entities().size() << " entities, "
                      << g.triples().size() << " triples -> " << bk_out << "\n";
        } else if (merge->parsed()) {
            std::vector<kgrag::KnowledgeGraph> graphs;
            graphs.reserve(mg_in.size());
            for (const auto& p : mg_in) graphs.push_back(kgrag::KnowledgeGraph::load(p));
            auto g = kgrag::KnowledgeGraph::merge(graphs);
            g.save(mg_out);
            std::cerr << "merge-kg: " << g.triples().size() << " triples -> " << mg_out << "\n";
        } else if (inter->parsed()) {
            auto ga = kgrag::KnowledgeGraph::load(in_a);
            auto gb = kgrag::KnowledgeGraph::load(in_b);
            auto items = kgrag::intersect_graphs(ga, gb, in_threshold);
            kgrag::write_intersection(items, in_out);
            std::cerr << "intersect: " << items.size() << " pairs at threshold " << in_threshold
                      << " -> " << in_out << "\n";
        } else if (gen->parsed()) {
            auto syn = load_synonyms_opt(gp_syn);
            kgrag::ProbeSet ps;
            if (gp_mode == "probe1") {
                if (gp_kg.empty()) throw kgrag::ConfigError("probe1 requires --kg");
                ps = kgrag::gen_probe1(kgrag::KnowledgeGraph::load(gp_kg), gp_n, gp_seed, syn);
            } else if (gp_mode == "probe2") {
                if (gp_inter.empty()) throw kgrag::ConfigError("probe2 requires --intersection");
                ps = kgrag::gen_probe2(kgrag::read_intersection(gp_inter), gp_n, gp_seed, syn);
            } else {
                throw kgrag::ConfigError("--mode must be probe1 or probe2");
            }
            if (static_cast<int>(ps.items.size()) < gp_n) {
                std::cerr << "gen-probes: warning: only " << ps.items.size() << " of " << gp_n
                          << " requested items could be generated\n";
            }
            kgrag::write_probe_set(ps, gp_out);
            std::cerr << "gen-probes: " << ps.items.size() << " items -> " << gp_out << "\n";
        } else if (val->parsed()) {
            auto ps = kgrag::read_probe_set(vp_probes);
            auto syn = load_synonyms_opt(vp_syn);
            kgrag::KnowledgeGraph g;
            const kgrag::KnowledgeGraph* gp = nullptr;
            if (!vp_kg.empty()) {
                g = kgrag::KnowledgeGraph::load(vp_kg);
                gp = &g;
            }
            std::vector<kgrag::IntersectionItem> iset;
            const std::vector<kgrag::IntersectionItem>* ip = nullptr;
            if (!vp_inter.empty()) {
                iset = kgrag::read_intersection(vp_inter);
                ip = &iset;
            }
            auto report = kgrag::validate_probe_set(ps, gp, ip, syn);
            for (const auto& f : report.findings) {
                std::cerr << f.item_id << " [" << f.code << "] " << f.message << "\n";
            }
            if (!report.valid()) {
                std::cerr << "validate-probes: " << report.findings.size() << " finding(s)\n";
                return 1;
            }
            std::cerr << "validate-probes: OK (" << ps.items.size() << " items)\n";
        } else if (run->parsed()) {
            auto ps = kgrag::read_probe_set(re_probes);
            std::vector<kgrag::RagSystem> systems;
            {
                std::stringstream ss(re_systems);
                std::string part;
                while (std::getline(ss, part, ','))
                    if (!part.empty()) systems.push_back(kgrag::rag_system_from_string(part));
            }
            auto temps = parse_doubles(re_temps);
            if (temps.empty()) throw kgrag::ConfigError("--temps must name at least one value");
            auto profiles = kgrag::load_profiles(re_profiles);
            kgrag::GraphSet graphs;
            std::map<std::string, std::string> graph_paths = {
                {"g1", re_g1}, {"g2", re_g2}, {"g3", re_g3}};
            std::set<std::string> needed;
            for (auto s : systems)
                for (const auto& sym : kgrag::system_graphs(s)) needed.insert(sym);
            for (const auto& sym : needed) {
                if (graph_paths[sym].empty())
                    throw kgrag::ConfigError("system needs graph " + sym + "; pass --" + sym);
                graphs[sym] = kgrag::KnowledgeGraph::load(graph_paths[sym]);
            }
            auto result = kgrag::run_grid(ps, systems, profiles, temps, graphs, re_top_k,
                                          re_provider, re_out, re_trace);
            std::cerr << "run-eval: " << result.records.size() << " records ("
                      << result.skipped_existing << " resumed, " << result.failed_calls
                      << " failed) -> " << re_out << "\n";
            if (result.failed_calls > 0) return 2;
        } else if (ana->parsed()) {
            auto records = kgrag::read_journal(an_journal);
            kgrag::ReportOptions opts;
            opts.baseline = an_baseline;
            opts.out_dir = an_out_dir;
            auto result = kgrag::emit_report(records, opts);
            std::cerr << "analyze: " << result.markdown_path << ", " << result.csv_path << "\n";
            if (!result.complete) {
                std::cerr << "analyze: grid incomplete; report contains gaps\n";
                return 2;
            }
        }
    } catch (const kgrag::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const kgrag::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const kgrag::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
