#pragma once

#include <string>
#include <vector>

#include "kgrag/rag.hpp"
#include "kgrag/stats.hpp"

namespace kgrag {

struct ReportOptions {
    std::string baseline = "no_rag";
    // Stars in the vs-baseline table follow the Holm-adjusted p; the CSV
    // carries both raw and adjusted values.
    std::string out_dir = "reports";
};

struct ReportResult {
    bool complete = true;  // false when any (model, system, temperature) cell is missing
    std::string markdown_path;
    std::string csv_path;
};

// Scores the journal into per-cell metrics and writes report.md and
// report.csv: the temperature-averaged metric table, a vs-baseline
// significance table (Welch over the temperature replicates, Holm-adjusted,
// star-coded), pairwise temperature tests per configuration, and the
// temperature-sensitivity-by-system summary.
ReportResult emit_report(const std::vector<RunRecord>& records, const ReportOptions& opts);

}  // namespace kgrag
