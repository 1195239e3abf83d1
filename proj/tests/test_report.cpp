#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kgrag/report.hpp"
#include "kgrag/stats.hpp"

using namespace kgrag;
namespace fs = std::filesystem;

namespace {

// Build one grid cell of n items with the requested number of correct answers.
void add_cell(std::vector<RunRecord>& out, const std::string& model, const std::string& system,
              double temp, int n, int n_correct) {
    for (int i = 0; i < n; ++i) {
        RunRecord r;
        r.item_id = "q" + std::to_string(i);
        r.probe = "probe1";
        r.model = model;
        r.system = system;
        r.temperature = temp;
        r.key = "A";
        r.parsed_letter = i < n_correct ? "A" : "B";
        r.correct = i < n_correct;
        out.push_back(r);
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("a clearly better system earns ** from the Holm-adjusted Welch test") {
    std::vector<RunRecord> journal;
    // no_rag: 70/71/72 correct of 100; g2: 80/82/84 -> adjusted p ~ 0.004
    add_cell(journal, "m1", "no_rag", 0.0, 100, 70);
    add_cell(journal, "m1", "no_rag", 0.2, 100, 71);
    add_cell(journal, "m1", "no_rag", 0.5, 100, 72);
    add_cell(journal, "m1", "g2", 0.0, 100, 80);
    add_cell(journal, "m1", "g2", 0.2, 100, 82);
    add_cell(journal, "m1", "g2", 0.5, 100, 84);

    auto dir = fs::temp_directory_path() / "kgrag_report_stars";
    fs::remove_all(dir);
    auto res = emit_report(journal, {"no_rag", dir.string()});
    CHECK(res.complete);
    auto md = slurp(res.markdown_path);
    // the g2 column of the vs-baseline row must carry exactly two stars
    auto sig_pos = md.find("vs no_rag");
    REQUIRE(sig_pos != std::string::npos);
    auto row_pos = md.find("| m1 |", sig_pos);
    REQUIRE(row_pos != std::string::npos);
    auto row = md.substr(row_pos, md.find('\n', row_pos) - row_pos);
    CHECK(row.find("**") != std::string::npos);
    CHECK(row.find("***") == std::string::npos);

    // CSV carries both raw and adjusted p for the comparison
    auto csv = slurp(res.csv_path);
    CHECK(csv.find("model,probe,system,temperature,metric,value,p_raw,p_adj,stars,cohens_d") !=
          std::string::npos);
    CHECK(csv.find("temp_welch_") != std::string::npos);
}

TEST_CASE("baseline compared with itself earns no stars") {
    std::vector<RunRecord> journal;
    add_cell(journal, "m1", "no_rag", 0.0, 50, 30);
    add_cell(journal, "m1", "no_rag", 0.2, 50, 31);
    add_cell(journal, "m1", "no_rag", 0.5, 50, 33);
    auto dir = fs::temp_directory_path() / "kgrag_report_self";
    fs::remove_all(dir);
    auto res = emit_report(journal, {"no_rag", dir.string()});
    auto md = slurp(res.markdown_path);
    auto sig_pos = md.find("vs no_rag");
    REQUIRE(sig_pos != std::string::npos);
    auto row_pos = md.find("| m1 |", sig_pos);
    auto row = md.substr(row_pos, md.find('\n', row_pos) - row_pos);
    CHECK(row.find('*') == std::string::npos);
}

TEST_CASE("incomplete grids render explicit gaps and flag the report incomplete") {
    std::vector<RunRecord> journal;
    add_cell(journal, "m1", "no_rag", 0.0, 20, 10);
    add_cell(journal, "m1", "no_rag", 0.2, 20, 11);
    add_cell(journal, "m1", "no_rag", 0.5, 20, 12);
    add_cell(journal, "m1", "g1", 0.0, 20, 15);
    add_cell(journal, "m1", "g1", 0.2, 20, 16);
    // (m1, g1, 0.5) missing
    auto dir = fs::temp_directory_path() / "kgrag_report_gap";
    fs::remove_all(dir);
    auto res = emit_report(journal, {"no_rag", dir.string()});
    CHECK_FALSE(res.complete);
    auto md = slurp(res.markdown_path);
    CHECK(md.find("—") != std::string::npos);
}

TEST_CASE("temperature sensitivity counts match a brute-force recomputation") {
    std::vector<RunRecord> journal;
    // m1 on g1 improves with temperature, m2 on g1 degrades, both flat on no_rag
    add_cell(journal, "m1", "g1", 0.0, 40, 20);
    add_cell(journal, "m1", "g1", 0.2, 40, 24);
    add_cell(journal, "m1", "g1", 0.5, 40, 30);
    add_cell(journal, "m2", "g1", 0.0, 40, 30);
    add_cell(journal, "m2", "g1", 0.2, 40, 26);
    add_cell(journal, "m2", "g1", 0.5, 40, 22);
    for (const auto* m : {"m1", "m2"}) {
        add_cell(journal, m, "no_rag", 0.0, 40, 25);
        add_cell(journal, m, "no_rag", 0.2, 40, 25);
        add_cell(journal, m, "no_rag", 0.5, 40, 25);
    }
    auto dir = fs::temp_directory_path() / "kgrag_report_temp";
    fs::remove_all(dir);
    auto res = emit_report(journal, {"no_rag", dir.string()});
    CHECK(res.complete);
    auto md = slurp(res.markdown_path);

    // oracle: recompute deltas from the raw records
    auto macro_f1_of = [&](const std::string& model, const std::string& system, double temp) {
        std::vector<RunRecord> cell;
        for (const auto& r : journal) {
            if (r.model == model && r.system == system && r.temperature == temp)
                cell.push_back(r);
        }
        return score_predictions(cell).macro_f1;
    };
    int inc = 0, dec = 0, flat = 0;
    for (const auto* m : {"m1", "m2"}) {
        double d = macro_f1_of(m, "g1", 0.5) - macro_f1_of(m, "g1", 0.0);
        if (d > 1e-12) ++inc;
        else if (d < -1e-12) ++dec;
        else ++flat;
    }
    CHECK(inc == 1);
    CHECK(dec == 1);
    CHECK(flat == 0);
    auto sens_pos = md.find("Temperature sensitivity by system");
    REQUIRE(sens_pos != std::string::npos);
    auto g1_pos = md.find("| g1 |", sens_pos);
    REQUIRE(g1_pos != std::string::npos);
    auto row = md.substr(g1_pos, md.find('\n', g1_pos) - g1_pos);
    CHECK(row.find("| 1 | 1 | 0 |") != std::string::npos);
    auto nr_pos = md.find("| no_rag |", sens_pos);
    auto nr_row = md.substr(nr_pos, md.find('\n', nr_pos) - nr_pos);
    CHECK(nr_row.find("| 0 | 0 | 2 |") != std::string::npos);
}
