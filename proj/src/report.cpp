#include "kgrag/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "kgrag/errors.hpp"

namespace kgrag {

namespace {

std::string fmt2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

std::string fmt_full(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Column order used by the paper's result tables.
const std::vector<std::string> kSystemOrder = {"g1", "g1+g2", "g1+g2+g3", "g2", "g3", "no_rag"};

std::vector<std::string> ordered_systems(const std::set<std::string>& present) {
    std::vector<std::string> out;
    for (const auto& s : kSystemOrder) {
        if (present.count(s) > 0) out.push_back(s);
    }
    for (const auto& s : present) {
        if (std::find(kSystemOrder.begin(), kSystemOrder.end(), s) == kSystemOrder.end()) {
            out.push_back(s);
        }
    }
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct CsvRow {
    std::string model, probe, system;
    std::string temperature;  // empty for aggregated rows
    std::string metric;
    double value = 0.0;
    std::string p_raw, p_adj, star_mark, d;
};

}  // namespace

ReportResult emit_report(const std::vector<RunRecord>& records, const ReportOptions& opts) {
    if (records.empty()) throw ValidationError("emit_report: empty journal");

    std::filesystem::create_directories(opts.out_dir);
    ReportResult result;
    result.markdown_path = opts.out_dir + "/report.md";
    result.csv_path = opts.out_dir + "/report.csv";

    // Group into (model, system, temperature) cells.
    std::map<std::tuple<std::string, std::string, double>, std::vector<RunRecord>> cells;
    std::set<std::string> models, systems;
    std::set<double> temps;
    std::string probe = records.front().probe;
    for (const auto& r : records) {
        cells[{r.model, r.system, r.temperature}].push_back(r);
        models.insert(r.model);
        systems.insert(r.system);
        temps.insert(r.temperature);
    }
    std::vector<double> temp_list(temps.begin(), temps.end());
    auto sys_list = ordered_systems(systems);

    std::map<std::tuple<std::string, std::string, double>, MetricSet> metrics;
    for (auto& [key, recs] : cells) {
        std::sort(recs.begin(), recs.end(),
                  [](const RunRecord& a, const RunRecord& b) { return a.item_id < b.item_id; });
        metrics[key] = score_predictions(recs);
    }

    auto cell_present = [&](const std::string& m, const std::string& s, double t) {
        return metrics.count({m, s, t}) > 0;
    };
    for (const auto& m : models) {
        for (const auto& s : sys_list) {
            for (double t : temp_list) {
                if (!cell_present(m, s, t)) result.complete = false;
            }
        }
    }

    std::vector<CsvRow> csv;
    std::ostringstream md;
    md << "# Evaluation report (" << (probe.empty() ? "unlabeled probe" : probe) << ")\n\n";
    if (!result.complete) {
        md << "> **Warning:** the run grid is incomplete; missing cells are marked with a "
              "dash.\n\n";
    }

    // ---- Main table: metrics averaged across temperatures --------------
    md << "## Metrics averaged across temperatures (";
    for (std::size_t i = 0; i < temp_list.size(); ++i) {
        md << (i ? ", " : "") << temp_list[i];
    }
    md << ")\n\n";
    md << "| Model | Metric |";
    for (const auto& s : sys_list) md << " " << s << " |";
    md << "\n|---|---|";
    for (std::size_t i = 0; i < sys_list.size(); ++i) md << "---|";
    md << "\n";

    std::map<std::pair<std::string, std::string>, TemperatureAggregate> averaged;
    for (const auto& m : models) {
        for (const auto& s : sys_list) {
            std::vector<MetricSet> per_temp;
            for (double t : temp_list) {
                if (cell_present(m, s, t)) per_temp.push_back(metrics.at({m, s, t}));
            }
            if (per_temp.size() == temp_list.size()) {
                averaged[{m, s}] = aggregate_temperatures(per_temp);
            }
        }
        md << "| " << m << " | Acc / F1micro |";
        for (const auto& s : sys_list) {
            auto it = averaged.find({m, s});
            if (it == averaged.end()) {
                md << " — |";
            } else {
                md << " " << fmt2(it->second.mean.accuracy) << " / "
                   << fmt2(it->second.mean.micro_f1) << " |";
            }
        }
        md << "\n| | Macro P/R/F1 |";
        for (const auto& s : sys_list) {
            auto it = averaged.find({m, s});
            if (it == averaged.end()) {
                md << " — |";
            } else {
                md << " " << fmt2(it->second.mean.macro_precision) << " / "
                   << fmt2(it->second.mean.macro_recall) << " / "
                   << fmt2(it->second.mean.macro_f1) << " |";
            }
        }
        md << "\n";
    }
    md << "\n";

    for (const auto& [key, ms] : metrics) {
        const auto& [m, s, t] = key;
        auto add = [&](const char* name, double v) {
            CsvRow row;
            row.model = m;
            row.probe = probe;
            row.system = s;
            row.temperature = fmt_full(t);
            row.metric = name;
            row.value = v;
            csv.push_back(row);
        };
        add("accuracy", ms.accuracy);
        add("micro_f1", ms.micro_f1);
        add("macro_precision", ms.macro_precision);
        add("macro_recall", ms.macro_recall);
        add("macro_f1", ms.macro_f1);
        add("n_invalid", ms.n_invalid);
    }

    // ---- vs-baseline significance (temperatures as replicates) ---------
    md << "## Macro-F1 vs " << opts.baseline
       << " (Welch t-test over the temperature replicates, Holm-adjusted; "
          "\\* p<.05, \\*\\* p<.01, \\*\\*\\* p<.001)\n\n";
    md << "| Model | " << opts.baseline << " |";
    for (const auto& s : sys_list) {
        if (s != opts.baseline) md << " " << s << " |";
    }
    md << "\n|---|---|";
    for (std::size_t i = 0; i + 1 < sys_list.size(); ++i) md << "---|";
    md << "\n";

    for (const auto& m : models) {
        auto replicates = [&](const std::string& s) {
            std::vector<double> v;
            for (double t : temp_list) {
                if (cell_present(m, s, t)) v.push_back(metrics.at({m, s, t}).macro_f1);
            }
            return v;
        };
        auto base = replicates(opts.baseline);
        bool base_ok = base.size() == temp_list.size() && base.size() >= 2;
        if (!base_ok) result.complete = false;

        struct Cmp {
            std::string system;
            double mean_f1 = 0.0;
            TTestResult test;
            bool ok = false;
        };
        std::vector<Cmp> cmps;
        std::vector<double> raw_ps;
        for (const auto& s : sys_list) {
            if (s == opts.baseline) continue;
            Cmp c;
            c.system = s;
            auto reps = replicates(s);
            if (base_ok && reps.size() == temp_list.size() && reps.size() >= 2) {
                c.mean_f1 = 0.0;
                for (double v : reps) c.mean_f1 += v / static_cast<double>(reps.size());
                c.test = welch_t_test(reps, base);
                c.ok = true;
                raw_ps.push_back(c.test.p_value);
            }
            cmps.push_back(std::move(c));
        }
        auto adj = holm_adjust(raw_ps);
        std::size_t pi = 0;

        md << "| " << m << " | ";
        if (base_ok) {
            double bm = 0.0;
            for (double v : base) bm += v / static_cast<double>(base.size());
            md << fmt2(bm);
        } else {
            md << "—";
        }
        md << " |";
        for (auto& c : cmps) {
            if (!c.ok) {
                md << " — |";
                continue;
            }
            double p_adj = adj[pi];
            double p_raw = raw_ps[pi];
            ++pi;
            md << " " << fmt2(c.mean_f1) << stars(p_adj) << " |";

            CsvRow row;
            row.model = m;
            row.probe = probe;
            row.system = c.system;
            row.metric = "macro_f1_mean_vs_" + opts.baseline;
            row.value = c.mean_f1;
            row.p_raw = fmt_full(p_raw);
            row.p_adj = fmt_full(p_adj);
            row.star_mark = stars(p_adj);
            row.d = fmt_full(c.test.cohens_d);
            csv.push_back(row);
        }
        md << "\n";
    }
    md << "\n";

    // ---- Temperature analysis per configuration ------------------------
    // Pairwise Welch tests over per-item correctness, Holm-corrected within
    // each (model, system) configuration.
    md << "## Temperature sensitivity by system (macro-F1, delta " << temp_list.front() << " -> "
       << temp_list.back() << ")\n\n";

    auto correctness = [&](const std::string& m, const std::string& s, double t) {
        std::vector<double> v;
        for (const auto& r : cells.at({m, s, t})) v.push_back(r.correct ? 1.0 : 0.0);
        return v;
    };
    for (const auto& m : models) {
        for (const auto& s : sys_list) {
            bool all = true;
            for (double t : temp_list) all = all && cell_present(m, s, t);
            if (!all || temp_list.size() < 2) continue;
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            for (std::size_t i = 0; i < temp_list.size(); ++i) {
                for (std::size_t j = i + 1; j < temp_list.size(); ++j) pairs.emplace_back(i, j);
            }
            std::vector<double> raw;
            std::vector<TTestResult> tests;
            for (auto& [i, j] : pairs) {
                auto t = welch_t_test(correctness(m, s, temp_list[i]),
                                      correctness(m, s, temp_list[j]));
                raw.push_back(t.p_value);
                tests.push_back(t);
            }
            auto adj = holm_adjust(raw);
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                CsvRow row;
                row.model = m;
                row.probe = probe;
                row.system = s;
                std::ostringstream name;
                name << "temp_welch_" << temp_list[pairs[k].first] << "_vs_"
                     << temp_list[pairs[k].second];
                row.metric = name.str();
                row.value = tests[k].t_statistic;
                row.p_raw = fmt_full(raw[k]);
                row.p_adj = fmt_full(adj[k]);
                row.star_mark = stars(adj[k]);
                row.d = fmt_full(tests[k].cohens_d);
                csv.push_back(row);
            }
        }
    }

    md << "| System | Increases | Decreases | No change | Median delta |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& s : sys_list) {
        int inc = 0, dec = 0, same = 0;
        std::vector<double> deltas;
        for (const auto& m : models) {
            auto it = averaged.find({m, s});
            if (it == averaged.end()) continue;
            double d = it->second.delta_macro_f1;
            deltas.push_back(d);
            if (d > 1e-12) {
                ++inc;
            } else if (d < -1e-12) {
                ++dec;
            } else {
                ++same;
            }
        }
        md << "| " << s << " | " << inc << " | " << dec << " | " << same << " | "
           << fmt2(median(deltas)) << " |\n";
    }
    md << "\n";

    std::ofstream md_out(result.markdown_path);
    if (!md_out) throw ConfigError("cannot write " + result.markdown_path);
    md_out << md.str();

    std::ofstream csv_out(result.csv_path);
    if (!csv_out) throw ConfigError("cannot write " + result.csv_path);
    csv_out << "model,probe,system,temperature,metric,value,p_raw,p_adj,stars,cohens_d\n";
    for (const auto& row : csv) {
        csv_out << row.model << "," << row.probe << "," << row.system << "," << row.temperature
                << "," << row.metric << "," << fmt_full(row.value) << "," << row.p_raw << ","
                << row.p_adj << "," << row.star_mark << "," << row.d << "\n";
    }
    return result;
}

}  // namespace kgrag
