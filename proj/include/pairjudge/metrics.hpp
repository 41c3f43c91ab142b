#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pairjudge/reward.hpp"

namespace pairjudge {

struct AccuracyReport {
    std::int64_t correct = 0;
    std::int64_t total = 0;
    double accuracy = 0.0;
    std::map<std::string, std::int64_t> breakdown;  // outcome reason -> count
};

/// Fraction of preference pairs the judge ordered correctly, with a
/// per-reason breakdown (ties and parse failures are counted, not hidden).
/// Throws std::invalid_argument on empty input.
AccuracyReport pairwise_accuracy(std::span<const TrainingReward> rewards);

struct CorrelationReport {
    double r = 0.0;
    std::size_t n = 0;
};

/// Pearson correlation. Throws std::invalid_argument when lengths differ,
/// fewer than two points, or either side has zero variance (the coefficient
/// is undefined there; callers decide what degenerate inputs mean).
CorrelationReport pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation with average ranks for ties. Same error
/// contract as pearson; all-tied input is degenerate.
CorrelationReport spearman(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct Histogram {
    std::vector<double> bin_edges;        // bins + 1 edges
    std::vector<std::int64_t> counts;     // one per bin
    std::int64_t below_range = 0;         // clamped into the first bin
    std::int64_t above_range = 0;         // clamped into the last bin
};

/// Fixed-width histogram over [lo, hi]. Bins are left-closed/right-open
/// except the last, which also takes hi itself; out-of-range values are
/// clamped into the boundary bins and counted separately. Throws
/// std::invalid_argument on empty input or a non-positive range/width.
Histogram score_histogram(std::span<const double> values, double lo, double hi,
                          double bin_width);

}  // namespace pairjudge
