#include "kgrag/stats.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "kgrag/errors.hpp"

namespace kgrag {

MetricSet score_predictions(const std::vector<RunRecord>& records) {
    if (records.empty()) throw ValidationError("score_predictions: empty cell");
    for (const auto& r : records) {
        if (r.model != records.front().model || r.system != records.front().system ||
            r.temperature != records.front().temperature) {
            throw ValidationError("score_predictions: records span multiple cells");
        }
    }

    MetricSet m;
    m.n_items = static_cast<int>(records.size());

    std::set<std::string> classes;
    std::map<std::string, int> tp, gold_count, pred_count;
    int n_correct = 0;
    for (const auto& r : records) {
        const std::string& gold = r.key;
        const std::string& pred = r.parsed_letter;
        classes.insert(gold);
        classes.insert(pred);
        ++gold_count[gold];
        ++pred_count[pred];
        if (pred == "invalid") ++m.n_invalid;
        if (pred == gold) {
            ++tp[gold];
            ++n_correct;
        }
    }

    m.accuracy = static_cast<double>(n_correct) / m.n_items;
    // Single-label, every item predicted exactly once: pooled precision,
    // recall, and F1 all reduce to accuracy.
    m.micro_precision = m.micro_recall = m.micro_f1 = m.accuracy;

    double psum = 0.0, rsum = 0.0, fsum = 0.0;
    for (const auto& c : classes) {
        double tpc = tp.count(c) ? tp.at(c) : 0.0;
        double prec = pred_count.count(c) && pred_count.at(c) > 0 ? tpc / pred_count.at(c) : 0.0;
        double rec = gold_count.count(c) && gold_count.at(c) > 0 ? tpc / gold_count.at(c) : 0.0;
        double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        psum += prec;
        rsum += rec;
        fsum += f1;
    }
    const double k = static_cast<double>(classes.size());
    m.macro_precision = psum / k;
    m.macro_recall = rsum / k;
    m.macro_f1 = fsum / k;
    return m;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    // Continued fraction (modified Lentz), converging fast when
    // x < (a+1)/(a+b+2); otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

    const double ln_front = a * std::log(x) + b * std::log(1.0 - x) - std::log(a) +
                            std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double front = std::exp(ln_front);

    // Modified Lentz evaluation, stepping the even/odd coefficients in pairs.
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 3e-16) break;
    }
    return front * h;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw ValidationError("student_t_cdf: df must be > 0");
    if (t == 0.0) return 0.5;
    if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double half_tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - half_tail : half_tail;
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

double cohens_d(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || y.size() < 2) throw ValidationError("cohens_d: samples need n >= 2");
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    const double mx = mean_of(x), my = mean_of(y);
    const double pooled_var =
        ((nx - 1.0) * sample_var(x, mx) + (ny - 1.0) * sample_var(y, my)) / (nx + ny - 2.0);
    if (pooled_var <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (mx - my) / std::sqrt(pooled_var);
}

TTestResult welch_t_test(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || y.size() < 2) throw ValidationError("welch_t_test: samples need n >= 2");
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    const double mx = mean_of(x), my = mean_of(y);
    const double vx = sample_var(x, mx), vy = sample_var(y, my);

    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
    };

    TTestResult r;
    r.cohens_d = cohens_d(x, y);
    if (constant(x) && constant(y)) {
        // Welch's formula is undefined; defined by convention.
        r.degrees_of_freedom = nx + ny - 2.0;
        if (x.front() == y.front()) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = x.front() > y.front()
                                ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
            r.p_value = DBL_MIN;
            r.degenerate = true;
        }
        return r;
    }

    const double se2 = vx / nx + vy / ny;
    r.t_statistic = (mx - my) / std::sqrt(se2);
    r.degrees_of_freedom = se2 * se2 / (vx * vx / (nx * nx * (nx - 1.0)) +
                                        vy * vy / (ny * ny * (ny - 1.0)));
    r.p_value = 2.0 * (1.0 - student_t_cdf(std::fabs(r.t_statistic), r.degrees_of_freedom));
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

std::vector<double> holm_adjust(const std::vector<double>& pvals) {
    const std::size_t m = pvals.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });

    std::vector<double> adjusted(m, 0.0);
    double running_max = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        double adj = pvals[order[rank]] * static_cast<double>(m - rank);
        running_max = std::max(running_max, adj);
        adjusted[order[rank]] = std::min(1.0, running_max);
    }
    return adjusted;
}

TemperatureAggregate aggregate_temperatures(const std::vector<MetricSet>& cells) {
    if (cells.empty()) throw ValidationError("aggregate_temperatures: no cells");
    TemperatureAggregate agg;
    const double n = static_cast<double>(cells.size());
    for (const auto& c : cells) {
        agg.mean.accuracy += c.accuracy / n;
        agg.mean.micro_precision += c.micro_precision / n;
        agg.mean.micro_recall += c.micro_recall / n;
        agg.mean.micro_f1 += c.micro_f1 / n;
        agg.mean.macro_precision += c.macro_precision / n;
        agg.mean.macro_recall += c.macro_recall / n;
        agg.mean.macro_f1 += c.macro_f1 / n;
        agg.mean.n_items += c.n_items;
        agg.mean.n_invalid += c.n_invalid;
    }
    agg.delta_accuracy = cells.back().accuracy - cells.front().accuracy;
    agg.delta_macro_f1 = cells.back().macro_f1 - cells.front().macro_f1;
    return agg;
}

std::string stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace kgrag
