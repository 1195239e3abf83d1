#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "kgrag/chat.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/extraction.hpp"

using namespace kgrag;
namespace fs = std::filesystem;

namespace {

// Script a full transcript by pre-computing every prompt the pipeline will send.
std::string write_transcript(const std::string& name,
                             const std::map<std::string, std::string>& by_prompt) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [prompt, response] : by_prompt) {
        j[ScriptClient::prompt_key(prompt)] = response;
    }
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << j.dump();
    return p.string();
}

}  // namespace

TEST_CASE("render_template substitutes the placeholder and rejects templates without one") {
    CHECK(render_template("Clause: {text}!", "a causes b") == "Clause: a causes b!");
    CHECK_THROWS_AS(render_template("no placeholder", "x"), ConfigError);
}

TEST_CASE("parse_clauses strips numbering and bullets") {
    auto c = parse_clauses("1. first clause\n2) second clause\n- third clause\n\n* fourth");
    REQUIRE(c.size() == 4);
    CHECK(c[0] == "first clause");
    CHECK(c[1] == "second clause");
    CHECK(c[2] == "third clause");
    CHECK(c[3] == "fourth");
}

TEST_CASE("parse_re_response tolerates prose and drops incomplete objects") {
    auto t = parse_re_response(
        R"(Sure, here you go: [{"Entity 1":"a","Relationship":"causes","Entity 2":"b"},)"
        R"({"Entity 1":"","Relationship":"causes","Entity 2":"x"}] done)");
    REQUIRE(t.size() == 1);
    CHECK(t[0].head == "a");
    CHECK(parse_re_response("no array here").empty());
    CHECK(parse_re_response("[{bad json]").empty());
}

TEST_CASE("scripted pipeline extracts the expanded-abbreviation triple") {
    auto cfg = ExtractionPipelineConfig::defaults();
    std::string sentence = "T2DM was associated with decreased FEV1.";
    Document doc{"PM1", "t", sentence, 6};

    std::string resolved =
        "T2DM was associated with decreased forced expiratory volume in 1s (FEV1).";
    std::map<std::string, std::string> transcript = {
        {render_template(cfg.coref_template, sentence), resolved},
        {render_template(cfg.decomp_template, resolved), resolved},
        {render_template(cfg.re_template, resolved),
         R"x([{"Entity 1":"T2DM","Relationship":"was associated with",)x"
         R"x("Entity 2":"decreased forced expiratory volume in 1s (FEV1)"}])x"},
    };
    ScriptClient client(write_transcript("kgrag_ex_fev1.json", transcript));
    auto triples = run_extraction_pipeline(doc, cfg, client);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].head == "T2DM");
    CHECK(triples[0].relation == "was associated with");
    CHECK(triples[0].tail == "decreased forced expiratory volume in 1s (FEV1)");
    CHECK(triples[0].provenance == Provenance{"PM1", 0, 0});
}

TEST_CASE("empty document yields no triples and no provider calls") {
    auto cfg = ExtractionPipelineConfig::defaults();
    Document doc{"PM2", "t", "", 0};
    ScriptClient client(write_transcript("kgrag_ex_empty.json", {}));  // any call would throw
    CHECK(run_extraction_pipeline(doc, cfg, client).empty());
}

TEST_CASE("two clauses in one sentence get distinct clause ids") {
    auto cfg = ExtractionPipelineConfig::defaults();
    std::string sentence = "Obesity causes inflammation and inflammation promotes decline.";
    Document doc{"PM3", "t", sentence, 8};
    std::string c1 = "Obesity causes inflammation";
    std::string c2 = "inflammation promotes decline";
    std::map<std::string, std::string> transcript = {
        {render_template(cfg.coref_template, sentence), sentence},
        {render_template(cfg.decomp_template, sentence), c1 + "\n" + c2},
        {render_template(cfg.re_template, c1),
         R"([{"Entity 1":"Obesity","Relationship":"causes","Entity 2":"inflammation"}])"},
        {render_template(cfg.re_template, c2),
         R"([{"Entity 1":"inflammation","Relationship":"promotes","Entity 2":"decline"}])"},
    };
    ScriptClient client(write_transcript("kgrag_ex_two_clause.json", transcript));
    auto triples = run_extraction_pipeline(doc, cfg, client);
    REQUIRE(triples.size() == 2);
    CHECK(triples[0].provenance == Provenance{"PM3", 0, 0});
    CHECK(triples[1].provenance == Provenance{"PM3", 0, 1});
}

TEST_CASE("transport failures skip the sentence but never abort the run") {
    auto cfg = ExtractionPipelineConfig::defaults();
    std::string s1 = "Alpha causes beta.";
    std::string s2 = "Gamma reduces delta.";
    Document doc{"PM4", "t", s1 + " " + s2, 6};
    // Only the second sentence is scripted; the first fails every retry.
    std::map<std::string, std::string> transcript = {
        {render_template(cfg.coref_template, s2), s2},
        {render_template(cfg.decomp_template, s2), s2},
        {render_template(cfg.re_template, s2),
         R"([{"Entity 1":"Gamma","Relationship":"reduces","Entity 2":"delta"}])"},
    };
    ScriptClient client(write_transcript("kgrag_ex_fail.json", transcript));
    auto triples = run_extraction_pipeline(doc, cfg, client);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].head == "Gamma");
    CHECK(triples[0].provenance == Provenance{"PM4", 1, 0});
}
