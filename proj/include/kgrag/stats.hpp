#pragma once

#include <string>
#include <vector>

#include "kgrag/rag.hpp"

namespace kgrag {

struct MetricSet {
    double accuracy = 0.0;
    double micro_precision = 0.0, micro_recall = 0.0, micro_f1 = 0.0;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    int n_items = 0;
    int n_invalid = 0;
};

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    double cohens_d = 0.0;     // NaN when the pooled SD is zero
    bool degenerate = false;   // both samples constant; Welch undefined
};

// Gold class = keyed letter, predicted class = parsed letter ("invalid" is a
// predicted-only class). Micro metrics pool counts; macro averages over the
// classes seen in gold or predictions. Records must share one
// (model, system, temperature) cell.
MetricSet score_predictions(const std::vector<RunRecord>& records);

// Regularized incomplete beta I_x(a, b); continued-fraction evaluation,
// absolute error below 1e-10 on the t-CDF domain.
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

// Welch statistic, Satterthwaite df, two-tailed p, and Cohen's d (pooled SD).
// Both-samples-constant: p=1 when the means agree, a machine-min sentinel
// flagged degenerate when they differ.
TTestResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y);

// Step-down Holm-Bonferroni; adjusted values returned in input order.
std::vector<double> holm_adjust(const std::vector<double>& pvals);

double cohens_d(const std::vector<double>& x, const std::vector<double>& y);

struct TemperatureAggregate {
    MetricSet mean;
    double delta_accuracy = 0.0;  // accuracy(T_max) - accuracy(T_min)
    double delta_macro_f1 = 0.0;
};

// Unweighted arithmetic mean across the configured temperatures, plus the
// 0 -> 0.5 deltas. Cells must be ordered by ascending temperature and cover
// the full sweep.
TemperatureAggregate aggregate_temperatures(const std::vector<MetricSet>& cells);

// "" / * / ** / *** per p<.05/.01/.001.
std::string stars(double p);

}  // namespace kgrag
