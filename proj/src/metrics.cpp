#include "confinit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace confinit {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den)
{
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> detection_rate(const ConfusionCounts& c) { return ratio(c.tp, c.attackers_inserted); }

std::optional<double> accuracy(const ConfusionCounts& c) { return ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn); }

std::optional<double> fpr(const ConfusionCounts& c) { return ratio(c.fp, c.fp + c.tn); }

std::optional<double> fnr(const ConfusionCounts& c) { return ratio(c.fn, c.fn + c.tp); }

PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c)
{
    PrecisionRecallF1 out;
    out.precision = ratio(c.tp, c.tp + c.fp);
    out.recall = ratio(c.tp, c.tp + c.fn);
    if (out.precision && out.recall) {
        const double p = *out.precision;
        const double r = *out.recall;
        out.f1 = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
    return out;
}

std::vector<AvailabilityPoint> cluster_availability(std::span<const ClusterSnapshot> snapshots,
                                                    const GroundTruth& truth)
{
    std::vector<AvailabilityPoint> series;
    series.reserve(snapshots.size());
    for (const auto& snap : snapshots) {
        AvailabilityPoint p{snap.round, snap.clusters.size(), 0};
        for (const auto& cluster : snap.clusters) {
            bool clean = true;
            for (NodeId id : cluster) {
                if (truth.attacker(id)) {
                    clean = false;
                    break;
                }
            }
            if (clean) ++p.clusters_attacker_free;
        }
        series.push_back(p);
    }
    return series;
}

MetricsReport make_report(const ConfusionCounts& c, std::span<const AvailabilityPoint> availability)
{
    MetricsReport r;
    r.detection_rate = detection_rate(c);
    r.accuracy = accuracy(c);
    if (r.accuracy) r.accuracy_pct = *r.accuracy * 100.0;
    r.fpr = fpr(c);
    r.fnr = fnr(c);
    const auto prf = precision_recall_f1(c);
    r.precision = prf.precision;
    r.recall = prf.recall;
    r.f1 = prf.f1;
    if (!availability.empty()) {
        double total = 0.0;
        double clean = 0.0;
        for (const auto& p : availability) {
            total += static_cast<double>(p.clusters_total);
            clean += static_cast<double>(p.clusters_attacker_free);
        }
        r.clusters_total_mean = total / static_cast<double>(availability.size());
        r.clusters_attacker_free_mean = clean / static_cast<double>(availability.size());
    }
    r.total_interactions = c.total_interactions;
    r.fn_count_unnormalized = static_cast<double>(c.total_interactions) - r.detection_rate.value_or(0.0);
    return r;
}

MetricSummary summarize(std::span<const std::optional<double>> samples)
{
    MetricSummary s;
    double sum = 0.0;
    for (const auto& v : samples) {
        if (!v) continue;
        sum += *v;
        ++s.samples;
    }
    if (s.samples == 0) return s;
    const double n = static_cast<double>(s.samples);
    const double mean = sum / n;
    s.mean = mean;
    if (s.samples < 2) return s;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& v : samples) {
        if (!v) continue;
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
    }
    if (lo == hi) {
        // Identical samples: avoid rounding noise from sum / n.
        s.mean = lo;
        s.ci_half_width = 0.0;
        return s;
    }
    double ss = 0.0;
    for (const auto& v : samples) {
        if (v) ss += (*v - mean) * (*v - mean);
    }
    s.ci_half_width = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return s;
}

AggregateReport aggregate_runs(std::span<const MetricsReport> reports)
{
    AggregateReport agg;
    agg.runs = reports.size();
    auto column = [&](auto field) {
        std::vector<std::optional<double>> values;
        values.reserve(reports.size());
        for (const auto& r : reports) values.push_back(field(r));
        return summarize(values);
    };
    agg.detection_rate = column([](const MetricsReport& r) { return r.detection_rate; });
    agg.accuracy = column([](const MetricsReport& r) { return r.accuracy; });
    agg.fpr = column([](const MetricsReport& r) { return r.fpr; });
    agg.fnr = column([](const MetricsReport& r) { return r.fnr; });
    agg.precision = column([](const MetricsReport& r) { return r.precision; });
    agg.recall = column([](const MetricsReport& r) { return r.recall; });
    agg.f1 = column([](const MetricsReport& r) { return r.f1; });
    agg.clusters_total = column([](const MetricsReport& r) { return std::optional<double>(r.clusters_total_mean); });
    agg.clusters_attacker_free =
        column([](const MetricsReport& r) { return std::optional<double>(r.clusters_attacker_free_mean); });
    return agg;
}

}  // namespace confinit
