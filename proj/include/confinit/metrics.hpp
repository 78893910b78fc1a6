// Detection statistics: confusion counts, derived rates, cluster
// availability and cross-seed aggregation.

#pragma once

#include "confinit/attacks.hpp"
#include "confinit/clustering.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace confinit {

/// Per-node final verdicts at the end of a run.
struct ConfusionCounts {
    std::uint64_t tp = 0;  // attackers blacklisted somewhere
    std::uint64_t tn = 0;  // honest nodes never blacklisted
    std::uint64_t fp = 0;  // honest nodes blacklisted somewhere
    std::uint64_t fn = 0;  // attackers never blacklisted
    std::uint64_t attackers_inserted = 0;
    std::uint64_t total_interactions = 0;  // DM receipts processed

    bool operator==(const ConfusionCounts&) const = default;
};

// Every rate is std::nullopt when its denominator is zero.
std::optional<double> detection_rate(const ConfusionCounts& c);
std::optional<double> accuracy(const ConfusionCounts& c);
std::optional<double> fpr(const ConfusionCounts& c);
std::optional<double> fnr(const ConfusionCounts& c);

struct PrecisionRecallF1 {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;  // 0 when precision = recall = 0
};

PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c);

struct AvailabilityPoint {
    Round round = 0;
    std::size_t clusters_total = 0;
    std::size_t clusters_attacker_free = 0;

    bool operator==(const AvailabilityPoint&) const = default;
};

std::vector<AvailabilityPoint> cluster_availability(std::span<const ClusterSnapshot> snapshots,
                                                    const GroundTruth& truth);

struct MetricsReport {
    std::optional<double> detection_rate;
    std::optional<double> accuracy;
    std::optional<double> accuracy_pct;  // accuracy x 100
    std::optional<double> fpr;
    std::optional<double> fnr;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    double clusters_total_mean = 0.0;
    double clusters_attacker_free_mean = 0.0;
    // Unnormalized |X| - T_det with X = DM receipts, kept for traceability.
    double fn_count_unnormalized = 0.0;
    std::uint64_t total_interactions = 0;
};

MetricsReport make_report(const ConfusionCounts& c, std::span<const AvailabilityPoint> availability);

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> ci_half_width;  // 1.96 * s / sqrt(n); needs n >= 2
    std::size_t samples = 0;
};

/// Mean and normal-approximation 95% half-width over the defined samples.
MetricSummary summarize(std::span<const std::optional<double>> samples);

struct AggregateReport {
    std::size_t runs = 0;
    MetricSummary detection_rate;
    MetricSummary accuracy;
    MetricSummary fpr;
    MetricSummary fnr;
    MetricSummary precision;
    MetricSummary recall;
    MetricSummary f1;
    MetricSummary clusters_total;
    MetricSummary clusters_attacker_free;
};

AggregateReport aggregate_runs(std::span<const MetricsReport> reports);

}  // namespace confinit
